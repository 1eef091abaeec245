#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "motormap/dataset.hpp"

namespace motormap {

/// Seven normalized design variables of the machine surrogate. turn_on must
/// stay strictly below turn_off.
struct DesignParams {
    double bore_diameter = 0.5;
    double stack_length = 0.5;
    double stator_pole_angle = 0.5;
    double rotor_pole_angle = 0.5;
    double current_density = 0.5;
    double turn_on = 0.25;
    double turn_off = 0.75;

    static constexpr std::size_t kCount = 7;
    std::array<double, kCount> to_array() const;
    static DesignParams from_array(const std::array<double, kCount>& a);
    static const std::array<const char*, kCount>& names();
    void validate() const;

    bool operator==(const DesignParams&) const = default;
};

/// Four per-operating-point surrogate responses.
struct SurrogateOutputs {
    double torque = 0.0;
    double torque_density = 0.0;
    double efficiency = 0.0;
    double ripple = 0.0;
};

struct ConstraintThresholds {
    // calibrated against the surrogate's output range at the first operating
    // point so the default filter keeps roughly half of a typical run
    double min_efficiency = 0.82;
    double max_ripple = 0.4;
};

/// One operating point of the surrogate plus the turn-on angle that
/// maximizes its torque term.
struct SurrogateOp {
    OperatingPoint op;
    double theta_on_star = 0.5;
};

struct SurrogateProblem {
    std::vector<SurrogateOp> ops;
    ConstraintThresholds thresholds;

    static SurrogateProblem defaults();              // A/B/C, 13 objectives
    static SurrogateProblem single_op(const std::string& label); // 5 objectives

    std::size_t objective_count() const { return ops.size() * 4 + 1; }
    std::vector<std::string> objective_names() const;
    std::vector<Sense> objective_senses() const;
    std::vector<OperatingPoint> operating_points() const;

    /// Full objective row: per op {torque, torque_density, efficiency,
    /// ripple}, then global volume.
    std::vector<double> evaluate(const DesignParams& p) const;
};

double surrogate_volume(const DesignParams& p);
SurrogateOutputs evaluate_surrogate(const DesignParams& p, const SurrogateOp& op);

/// Fronts of indices; front 0 is the Pareto set. Maximized columns are
/// negated internally for the dominance test only.
std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<std::vector<double>>& objectives,
                                                         const std::vector<Sense>& senses);

/// Normalized neighbor-gap sums; boundary points get +infinity,
/// zero-range objectives contribute nothing.
std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front);

struct GenerationResult {
    CandidateSet all;         // every evaluated candidate, de-duplicated
    CandidateSet kept;        // rows passing the constraint thresholds
    double preservation_ratio = 0.0;
};

/// Standard NSGA-II loop (binary tournament, SBX, polynomial mutation,
/// mu+lambda selection) over the surrogate; returns every evaluated
/// individual with feasibility flags. Deterministic per seed.
GenerationResult nsga2_generate(const SurrogateProblem& problem, std::size_t pop_size, std::size_t generations,
                                std::uint64_t seed);

/// Rows meeting all thresholds plus the kept/total ratio.
std::pair<CandidateSet, double> constraint_filter(const CandidateSet& set, const ConstraintThresholds& thresholds);

} // namespace motormap
