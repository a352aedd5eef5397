#include "etsim/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

#include "etsim/platform.hpp"

namespace etsim {

std::vector<Violation> validate(const BoundInput& in) {
    std::vector<Violation> out;
    if (in.eps.empty()) out.push_back({"eps", "empty"});
    for (double e : in.eps) {
        if (!(e > 0.0)) {
            out.push_back({"eps", "normalized energies must be positive"});
            break;
        }
    }
    if (in.node_budget < 1) out.push_back({"K", "must be at least 1"});
    if (!(in.battery_pj > 0.0)) out.push_back({"B", "must be positive"});
    return out;
}

double upper_bound(const BoundInput& in) {
    if (auto v = validate(in); !v.empty()) throw ConfigError(join_violations(v));
    const double total = std::accumulate(in.eps.begin(), in.eps.end(), 0.0);
    return in.node_budget * in.battery_pj / total;
}

long long bound_for_mapping(std::span<const int> counts, std::span<const double> eps, double battery_pj) {
    if (counts.size() != eps.size()) throw ConfigError("counts", "length differs from eps");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0) throw ConfigError("counts", "negative duplicate count");
        if (!(eps[i] > 0.0)) throw ConfigError("eps", "normalized energies must be positive");
        best = std::min(best, counts[i] * battery_pj / eps[i]);
    }
    return static_cast<long long>(std::floor(best));
}

namespace {

struct Candidate {
    double value = -1.0;
    std::size_t index = 0;
};

struct Grid {
    std::size_t p;
    long long steps;  ///< grid cells along K
    double step;
    std::size_t points;
};

Grid make_grid(const BoundInput& in, double step) {
    if (auto v = validate(in); !v.empty()) throw ConfigError(join_violations(v));
    if (in.eps.size() > 4) throw ConfigError("eps", "grid search supports at most 4 modules");
    if (!(step > 0.0)) throw ConfigError("step", "must be positive");
    Grid g{in.eps.size(), std::llround(in.node_budget / step), step, 1};
    // Free coordinates are the first p-1 modules, each in 0..steps.
    for (std::size_t i = 0; i + 1 < g.p; ++i) g.points *= static_cast<std::size_t>(g.steps + 1);
    return g;
}

// Decodes grid point idx into counts; false if the remainder is negative.
bool decode(const Grid& g, const BoundInput& in, std::size_t idx, double* n) {
    long long used = 0;
    for (std::size_t i = 0; i + 1 < g.p; ++i) {
        const long long m = static_cast<long long>(idx % static_cast<std::size_t>(g.steps + 1));
        idx /= static_cast<std::size_t>(g.steps + 1);
        used += m;
        n[i] = static_cast<double>(m) * g.step;
    }
    if (used > g.steps) return false;
    n[g.p - 1] = in.node_budget - static_cast<double>(used) * g.step;
    return true;
}

double objective(const BoundInput& in, const double* n) {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < in.eps.size(); ++i) v = std::min(v, n[i] * in.battery_pj / in.eps[i]);
    return v;
}

TheoremCheck summarize(const Grid& g, const BoundInput& in, const Candidate& best) {
    TheoremCheck c;
    c.grid_points = g.points;
    c.best_counts.resize(g.p);
    decode(g, in, best.index, c.best_counts.data());
    c.best_value = best.value;
    c.optimal_counts = optimal_counts(in.eps, in.node_budget);
    c.closed_form = upper_bound(in);
    double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.p; ++i) {
        c.max_count_error = std::max(c.max_count_error, std::abs(c.best_counts[i] - c.optimal_counts[i]));
        const double term = c.optimal_counts[i] * in.battery_pj / in.eps[i];
        lo = std::min(lo, term);
        hi = std::max(hi, term);
    }
    c.value_gap = c.closed_form - c.best_value;
    c.balance_spread = hi - lo;
    return c;
}

}  // namespace

TheoremCheck verify_theorem1_serial(const BoundInput& in, double step) {
    const Grid g = make_grid(in, step);
    Candidate best;
    double n[4];
    for (std::size_t idx = 0; idx < g.points; ++idx) {
        if (!decode(g, in, idx, n)) continue;
        const double v = objective(in, n);
        if (v > best.value) best = {v, idx};
    }
    return summarize(g, in, best);
}

TheoremCheck verify_theorem1(const BoundInput& in, double step) {
    const Grid g = make_grid(in, step);
    std::vector<Candidate> per_thread(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel
    {
        Candidate local;
        double n[4];
#pragma omp for schedule(static)
        for (std::size_t idx = 0; idx < g.points; ++idx) {
            if (!decode(g, in, idx, n)) continue;
            const double v = objective(in, n);
            if (v > local.value) local = {v, idx};
        }
        per_thread[static_cast<std::size_t>(omp_get_thread_num())] = local;
    }
    // Static chunks are in thread order, so a strict > keeps the first maximizer.
    Candidate best;
    for (const auto& c : per_thread) {
        if (c.value > best.value || (c.value == best.value && c.index < best.index)) best = c;
    }
    return summarize(g, in, best);
}

}  // namespace etsim
