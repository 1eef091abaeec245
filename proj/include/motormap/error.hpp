#pragma once

#include <stdexcept>
#include <string>

namespace motormap {

enum class errc {
    // input / schema
    missing_column,
    duplicate_id,
    non_numeric_cell,
    id_mismatch,
    not_two_dimensional,
    bad_config,
    // numeric domain
    zero_variance_column,
    degenerate_row,
    perplexity_out_of_range,
    dimension_mismatch,
    non_finite_update,
    rank_deficient,
    disconnected_graph,
    k_too_large,
    single_cluster,
    // filesystem
    io_failure,
};

/// All toolkit failures are reported through this exception; `code()` drives
/// the CLI exit-code mapping (input=1, numeric=2, io=3).
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::missing_column: return "MissingColumn";
        case errc::duplicate_id: return "DuplicateId";
        case errc::non_numeric_cell: return "NonNumericCell";
        case errc::id_mismatch: return "IdMismatch";
        case errc::not_two_dimensional: return "NotTwoDimensional";
        case errc::bad_config: return "BadConfig";
        case errc::zero_variance_column: return "ZeroVarianceColumn";
        case errc::degenerate_row: return "DegenerateRow";
        case errc::perplexity_out_of_range: return "PerplexityOutOfRange";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::non_finite_update: return "NonFiniteUpdate";
        case errc::rank_deficient: return "RankDeficient";
        case errc::disconnected_graph: return "DisconnectedGraph";
        case errc::k_too_large: return "KTooLarge";
        case errc::single_cluster: return "SingleCluster";
        case errc::io_failure: return "IoFailure";
    }
    return "Error";
}

} // namespace motormap
