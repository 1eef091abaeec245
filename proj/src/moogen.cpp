#include "motormap/moogen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "motormap/rng.hpp"

namespace motormap {

namespace {

constexpr double kSbxIndex = 15.0;       // SBX distribution index
constexpr double kMutationIndex = 20.0;  // polynomial mutation index
constexpr double kCrossoverProb = 0.9;   // per pair
constexpr double kMutationProb = 1.0 / 7.0; // per variable

double sin_pi(double x) { return std::sin(M_PI * x); }

void repair_commutation(std::array<double, 7>& v) {
    double& on = v[5];
    double& off = v[6];
    if (on > off) std::swap(on, off);
    if (on == off) { // clamping can collapse the pair; nudge apart
        if (off < 1.0) off = std::min(1.0, off + 1e-9);
        else on = std::max(0.0, on - 1e-9);
    }
}

struct Individual {
    std::array<double, 7> x{};
    std::vector<double> objectives;
    std::size_t rank = 0;
    double crowding = 0.0;
};

void rank_population(std::vector<Individual>& pop, const std::vector<Sense>& senses) {
    std::vector<std::vector<double>> objs(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) objs[i] = pop[i].objectives;
    const auto fronts = non_dominated_sort(objs, senses);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        std::vector<std::vector<double>> front_objs;
        front_objs.reserve(fronts[r].size());
        for (std::size_t idx : fronts[r]) front_objs.push_back(pop[idx].objectives);
        const auto crowd = crowding_distance(front_objs);
        for (std::size_t m = 0; m < fronts[r].size(); ++m) {
            pop[fronts[r][m]].rank = r;
            pop[fronts[r][m]].crowding = crowd[m];
        }
    }
}

// lower rank wins, then larger crowding, then the first pick
const Individual& tournament(const std::vector<Individual>& pop, Rng& rng) {
    const Individual& a = pop[uniform_index(rng, pop.size())];
    const Individual& b = pop[uniform_index(rng, pop.size())];
    if (a.rank != b.rank) return a.rank < b.rank ? a : b;
    if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
    return a;
}

// Deb's bounded simulated binary crossover on [0,1]
std::pair<std::array<double, 7>, std::array<double, 7>> sbx(const std::array<double, 7>& p1,
                                                            const std::array<double, 7>& p2, Rng& rng) {
    std::array<double, 7> c1 = p1, c2 = p2;
    if (uniform01(rng) > kCrossoverProb) return {c1, c2};
    for (std::size_t j = 0; j < 7; ++j) {
        if (uniform01(rng) > 0.5) continue;
        if (std::abs(p1[j] - p2[j]) <= 1e-14) continue;
        const double y1 = std::min(p1[j], p2[j]);
        const double y2 = std::max(p1[j], p2[j]);
        const double u = uniform01(rng);

        auto child = [&](double beta_bound, bool lower) {
            const double alpha = 2.0 - std::pow(beta_bound, -(kSbxIndex + 1.0));
            double betaq;
            if (u <= 1.0 / alpha) betaq = std::pow(u * alpha, 1.0 / (kSbxIndex + 1.0));
            else betaq = std::pow(1.0 / (2.0 - u * alpha), 1.0 / (kSbxIndex + 1.0));
            return lower ? 0.5 * ((y1 + y2) - betaq * (y2 - y1)) : 0.5 * ((y1 + y2) + betaq * (y2 - y1));
        };
        double v1 = child(1.0 + 2.0 * y1 / (y2 - y1), true);
        double v2 = child(1.0 + 2.0 * (1.0 - y2) / (y2 - y1), false);
        v1 = std::clamp(v1, 0.0, 1.0);
        v2 = std::clamp(v2, 0.0, 1.0);
        if (uniform01(rng) <= 0.5) std::swap(v1, v2);
        c1[j] = v1;
        c2[j] = v2;
    }
    return {c1, c2};
}

// Deb's bounded polynomial mutation on [0,1]
void mutate(std::array<double, 7>& x, Rng& rng) {
    for (std::size_t j = 0; j < 7; ++j) {
        if (uniform01(rng) > kMutationProb) continue;
        const double y = x[j];
        const double u = uniform01(rng);
        const double mut_pow = 1.0 / (kMutationIndex + 1.0);
        double deltaq;
        if (u <= 0.5) {
            const double xy = 1.0 - y;
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, kMutationIndex + 1.0);
            deltaq = std::pow(val, mut_pow) - 1.0;
        } else {
            const double xy = y;
            const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, kMutationIndex + 1.0);
            deltaq = 1.0 - std::pow(val, mut_pow);
        }
        x[j] = std::clamp(y + deltaq, 0.0, 1.0);
    }
}

std::string make_id(std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "c%05zu", i + 1);
    return buf;
}

} // namespace

std::array<double, DesignParams::kCount> DesignParams::to_array() const {
    return {bore_diameter, stack_length, stator_pole_angle, rotor_pole_angle, current_density, turn_on, turn_off};
}

DesignParams DesignParams::from_array(const std::array<double, kCount>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
}

const std::array<const char*, DesignParams::kCount>& DesignParams::names() {
    static const std::array<const char*, kCount> names = {
        "bore_diameter", "stack_length", "stator_pole_angle", "rotor_pole_angle",
        "current_density", "turn_on", "turn_off"};
    return names;
}

void DesignParams::validate() const {
    for (const double v : to_array())
        if (!(v >= 0.0 && v <= 1.0)) raise(errc::bad_config, "design parameters must lie in [0,1]");
    if (!(turn_on < turn_off)) raise(errc::bad_config, "turn_on must be strictly below turn_off");
}

SurrogateProblem SurrogateProblem::defaults() {
    SurrogateProblem p;
    p.ops = {
        {{"A", 0.18, 2000.0, 3.0}, 0.3},
        {{"B", 0.08, 5000.0, 2.0}, 0.5},
        {{"C", 0.02, 10000.0, 1.0}, 0.7},
    };
    return p;
}

SurrogateProblem SurrogateProblem::single_op(const std::string& label) {
    SurrogateProblem all = defaults();
    SurrogateProblem p;
    p.thresholds = all.thresholds;
    for (const auto& so : all.ops)
        if (so.op.label == label) p.ops.push_back(so);
    if (p.ops.empty()) raise(errc::bad_config, "unknown operating point '" + label + "' (expected A, B or C)");
    return p;
}

std::vector<std::string> SurrogateProblem::objective_names() const {
    std::vector<std::string> names;
    for (const auto& so : ops) {
        names.push_back("torque_" + so.op.label);
        names.push_back("torque_density_" + so.op.label);
        names.push_back("efficiency_" + so.op.label);
        names.push_back("ripple_" + so.op.label);
    }
    names.push_back("volume");
    return names;
}

std::vector<Sense> SurrogateProblem::objective_senses() const {
    std::vector<Sense> senses;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        senses.push_back(Sense::maximize); // torque
        senses.push_back(Sense::maximize); // torque density
        senses.push_back(Sense::maximize); // efficiency
        senses.push_back(Sense::minimize); // ripple
    }
    senses.push_back(Sense::minimize); // volume
    return senses;
}

std::vector<OperatingPoint> SurrogateProblem::operating_points() const {
    std::vector<OperatingPoint> out;
    for (const auto& so : ops) out.push_back(so.op);
    return out;
}

double surrogate_volume(const DesignParams& p) {
    return 0.2 + 0.8 * p.bore_diameter * p.bore_diameter * p.stack_length;
}

SurrogateOutputs evaluate_surrogate(const DesignParams& p, const SurrogateOp& so) {
    const double omega = so.op.speed_rpm / 10000.0;
    const double current = so.op.current_a / 3.0;
    const double d2l = p.bore_diameter * p.bore_diameter * p.stack_length;

    SurrogateOutputs out;
    const double shape = 0.4 + 0.6 * sin_pi(p.stator_pole_angle) * sin_pi(p.rotor_pole_angle);
    const double timing = 1.0 - 0.5 * (p.turn_on - so.theta_on_star) * (p.turn_on - so.theta_on_star);
    out.torque = current * d2l * shape * timing;
    out.torque_density = out.torque / surrogate_volume(p);
    out.efficiency = 1.0 / (1.0 + 0.3 * p.current_density * p.current_density +
                            0.8 * std::pow(omega, 1.5) * d2l + 0.1 * (1.0 - p.current_density));
    out.ripple = 0.15 + 0.5 * std::abs(p.turn_off - p.turn_on - 0.35) + 0.35 * (1.0 - sin_pi(p.rotor_pole_angle));
    return out;
}

std::vector<double> SurrogateProblem::evaluate(const DesignParams& p) const {
    std::vector<double> row;
    row.reserve(objective_count());
    for (const auto& so : ops) {
        const SurrogateOutputs o = evaluate_surrogate(p, so);
        row.push_back(o.torque);
        row.push_back(o.torque_density);
        row.push_back(o.efficiency);
        row.push_back(o.ripple);
    }
    row.push_back(surrogate_volume(p));
    return row;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(const std::vector<std::vector<double>>& objectives,
                                                         const std::vector<Sense>& senses) {
    const std::size_t n = objectives.size();
    if (n == 0) raise(errc::bad_config, "non_dominated_sort needs at least one vector");
    const std::size_t m = objectives[0].size();
    for (const auto& row : objectives)
        if (row.size() != m) raise(errc::dimension_mismatch, "objective vectors have mixed lengths");
    if (senses.size() != m) raise(errc::dimension_mismatch, "senses do not match objective count");

    // orient everything toward minimization once
    std::vector<std::vector<double>> v(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            v[i][j] = senses[j] == Sense::maximize ? -objectives[i][j] : objectives[i][j];

    auto dominates = [&](std::size_t a, std::size_t b) {
        bool strictly = false;
        for (std::size_t j = 0; j < m; ++j) {
            if (v[a][j] > v[b][j]) return false;
            if (v[a][j] < v[b][j]) strictly = true;
        }
        return strictly;
    };

    std::vector<std::size_t> dominated_count(n, 0);
    std::vector<std::vector<std::size_t>> dominates_list(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            if (dominates(a, b)) dominates_list[a].push_back(b);
            else if (dominates(b, a)) ++dominated_count[a];
        }

    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i)
        if (dominated_count[i] == 0) current.push_back(i);
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<std::size_t> next;
        for (std::size_t a : current)
            for (std::size_t b : dominates_list[a])
                if (--dominated_count[b] == 0) next.push_back(b);
        std::sort(next.begin(), next.end());
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(const std::vector<std::vector<double>>& front) {
    const std::size_t n = front.size();
    if (n == 0) raise(errc::bad_config, "crowding_distance needs a non-empty front");
    const std::size_t m = front[0].size();
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> dist(n, 0.0);
    if (n <= 2) return std::vector<double>(n, inf);

    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < m; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][j] < front[b][j]; });
        const double range = front[order[n - 1]][j] - front[order[0]][j];
        dist[order[0]] = inf;
        dist[order[n - 1]] = inf;
        if (range <= 0.0) continue; // constant objective contributes nothing
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (std::isinf(dist[order[k]])) continue;
            dist[order[k]] += (front[order[k + 1]][j] - front[order[k - 1]][j]) / range;
        }
    }
    return dist;
}

GenerationResult nsga2_generate(const SurrogateProblem& problem, std::size_t pop_size, std::size_t generations,
                                std::uint64_t seed) {
    if (pop_size < 4 || pop_size % 2 != 0) raise(errc::bad_config, "pop_size must be even and >= 4");

    Rng rng(seed);
    const auto senses = problem.objective_senses();

    auto random_individual = [&]() {
        Individual ind;
        for (double& v : ind.x) v = uniform01(rng);
        repair_commutation(ind.x);
        ind.objectives = problem.evaluate(DesignParams::from_array(ind.x));
        return ind;
    };

    std::vector<Individual> population;
    std::vector<Individual> archive; // every evaluated individual, in order
    population.reserve(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) {
        population.push_back(random_individual());
        archive.push_back(population.back());
    }

    for (std::size_t gen = 0; gen < generations; ++gen) {
        rank_population(population, senses);

        std::vector<Individual> offspring;
        offspring.reserve(pop_size);
        while (offspring.size() < pop_size) {
            const Individual& pa = tournament(population, rng);
            const Individual& pb = tournament(population, rng);
            auto [c1, c2] = sbx(pa.x, pb.x, rng);
            mutate(c1, rng);
            mutate(c2, rng);
            repair_commutation(c1);
            repair_commutation(c2);
            for (auto& cx : {c1, c2}) {
                Individual child;
                child.x = cx;
                child.objectives = problem.evaluate(DesignParams::from_array(cx));
                offspring.push_back(child);
                archive.push_back(child);
            }
        }

        // mu+lambda environmental selection
        std::vector<Individual> combined = population;
        combined.insert(combined.end(), offspring.begin(), offspring.end());
        rank_population(combined, senses);
        std::vector<std::size_t> order(combined.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (combined[a].rank != combined[b].rank) return combined[a].rank < combined[b].rank;
            return combined[a].crowding > combined[b].crowding;
        });
        std::vector<Individual> next;
        next.reserve(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) next.push_back(combined[order[i]]);
        population = std::move(next);
    }

    // de-duplicate by exact parameter equality, first occurrence wins
    std::map<std::array<double, 7>, bool> seen;
    std::vector<const Individual*> unique;
    for (const Individual& ind : archive)
        if (seen.emplace(ind.x, true).second) unique.push_back(&ind);

    CandidateSet all;
    all.param_names.assign(DesignParams::names().begin(), DesignParams::names().end());
    all.column_names = problem.objective_names();
    all.senses = senses;
    all.operating_points = problem.operating_points();
    all.m_ops = problem.ops.size();
    all.d_op = 4;
    all.d_global = 1;
    all.params = Matrix(unique.size(), DesignParams::kCount);
    all.objectives = Matrix(unique.size(), problem.objective_count());
    for (std::size_t i = 0; i < unique.size(); ++i) {
        all.ids.push_back(make_id(i));
        for (std::size_t j = 0; j < DesignParams::kCount; ++j) all.params(i, j) = unique[i]->x[j];
        for (std::size_t j = 0; j < unique[i]->objectives.size(); ++j) all.objectives(i, j) = unique[i]->objectives[j];
    }
    all.feasible.assign(unique.size(), true);

    GenerationResult result;
    auto [kept, ratio] = constraint_filter(all, problem.thresholds);
    // constraint_filter recomputes flags; adopt them on the full set too
    for (std::size_t i = 0; i < all.size(); ++i) all.feasible[i] = false;
    for (const auto& id : kept.ids) {
        const auto it = std::find(all.ids.begin(), all.ids.end(), id);
        all.feasible[static_cast<std::size_t>(it - all.ids.begin())] = true;
    }
    result.all = std::move(all);
    result.kept = std::move(kept);
    result.preservation_ratio = ratio;
    return result;
}

std::pair<CandidateSet, double> constraint_filter(const CandidateSet& set, const ConstraintThresholds& thresholds) {
    if (set.operating_points.empty()) raise(errc::bad_config, "constraint_filter needs operating-point metadata");
    const std::string label = set.operating_points.front().label;
    const auto eff_col = set.column_index("efficiency_" + label);
    const auto rip_col = set.column_index("ripple_" + label);
    if (!eff_col || !rip_col)
        raise(errc::missing_column, "constraint_filter needs efficiency_" + label + " and ripple_" + label);

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (set.objectives(i, *eff_col) >= thresholds.min_efficiency &&
            set.objectives(i, *rip_col) <= thresholds.max_ripple)
            keep.push_back(i);

    const double ratio = static_cast<double>(keep.size()) / static_cast<double>(set.size());
    CandidateSet kept = set.select(keep);
    for (std::size_t i = 0; i < kept.size(); ++i) kept.feasible[i] = true;
    return {std::move(kept), ratio};
}

} // namespace motormap
