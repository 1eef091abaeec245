#pragma once

#include <optional>
#include <string>
#include <vector>

#include "motormap/matrix.hpp"

namespace motormap {

/// A (torque, speed, current) condition at which machine objectives are
/// evaluated. All three quantities must be positive.
struct OperatingPoint {
    std::string label;
    double torque_nm = 0.0;
    double speed_rpm = 0.0;
    double current_a = 0.0;

    void validate() const;
    bool operator==(const OperatingPoint&) const = default;
};

enum class Sense { minimize, maximize };

const char* sense_name(Sense s);
Sense parse_sense(const std::string& text);

/// N design candidates: parameter vectors, objective vectors and metadata.
/// Objective columns are laid out as m_ops blocks of d_op per-operating-point
/// objectives followed by d_global global ones. Immutable by convention once
/// built; every operation returns a new set.
struct CandidateSet {
    std::vector<std::string> ids;          // N unique
    Matrix params;                         // N x P (P may be 0)
    Matrix objectives;                     // N x (m_ops*d_op + d_global)
    std::vector<std::string> param_names;  // P
    std::vector<std::string> column_names; // objective columns
    std::vector<Sense> senses;             // per objective column
    std::vector<OperatingPoint> operating_points;
    std::vector<bool> feasible;            // N
    std::size_t m_ops = 1;
    std::size_t d_op = 0;
    std::size_t d_global = 0;

    std::size_t size() const { return ids.size(); }
    void validate() const;
    CandidateSet select(const std::vector<std::size_t>& rows) const;
    std::optional<std::size_t> column_index(const std::string& name) const;

    bool operator==(const CandidateSet&) const = default;
};

/// N x N squared Euclidean distances: symmetric, zero diagonal, entries >= 0.
struct DistanceMatrix {
    Matrix values;

    std::size_t size() const { return values.rows(); }
    bool operator==(const DistanceMatrix&) const = default;
};

/// Column-role mapping for CSV ingestion. Columns named in `param_columns`
/// become parameters, `feasible_column` (if present in the file) becomes the
/// feasibility flag, every other non-id column is an objective.
struct CsvSchema {
    std::vector<std::string> param_columns;
    std::string feasible_column; // empty = none
    std::vector<OperatingPoint> operating_points;
    std::vector<std::pair<std::string, Sense>> senses;
    std::size_t m_ops = 0;   // 0 = derive from columns
    std::size_t d_op = 0;
    std::size_t d_global = 0;
};

/// Loads a candidate CSV. When `schema` is absent the sidecar file
/// `<path>.meta` is consulted if it exists; otherwise every non-id column is
/// treated as an objective. Cells must parse as finite reals.
CandidateSet load_candidates(const std::string& path, std::optional<CsvSchema> schema = std::nullopt);

/// Writes the CSV plus the `<path>.meta` sidecar. Numbers are printed with 17
/// significant digits so load(save(x)) == x bit-exactly. `sidecar_extras` are
/// appended verbatim to the sidecar (run statistics etc.).
void save_candidates(const CandidateSet& set, const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& sidecar_extras = {});

enum class ScaleMode { zscore, minmax, none };

ScaleMode parse_scale_mode(const std::string& text);

/// Column-wise standardization of an arbitrary matrix.
/// zscore: mean 0 / population variance 1 per column; minmax: [0,1]; a
/// constant column under minmax maps to 0, under zscore it is an error.
Matrix standardize_columns(const Matrix& m, ScaleMode mode, const std::vector<std::string>* names = nullptr);

/// Standardizes the objective columns; params and metadata are untouched.
CandidateSet standardize(const CandidateSet& set, ScaleMode mode);

/// values[i][j] = sum_k (x_ik - x_jk)^2, computed with the naive per-pair
/// loop so results are bit-identical to the obvious reference.
DistanceMatrix pairwise_sq_distances(const Matrix& points);

// --- sidecar key/value files (one `key = value` per line) ---

std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::string& path);
void write_key_value_file(const std::string& path, const std::vector<std::pair<std::string, std::string>>& entries);

std::string format_double(double v); // %.17g, used by every CSV/sidecar writer

} // namespace motormap
