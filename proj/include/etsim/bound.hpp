#pragma once

#include <span>
#include <vector>

#include "etsim/error.hpp"

namespace etsim {

struct BoundInput {
    std::vector<double> eps;  ///< normalized energy per module, pJ
    int node_budget = 1;      ///< K
    double battery_pj = 1.0;  ///< B
};

std::vector<Violation> validate(const BoundInput& in);

/// J* = K B / sum(eps), unfloored.
double upper_bound(const BoundInput& in);

/// floor(min_i n_i B / eps_i); 0 if any n_i is 0.
long long bound_for_mapping(std::span<const int> counts, std::span<const double> eps, double battery_pj);

struct TheoremCheck {
    std::vector<double> best_counts;  ///< grid maximizer of min_i n_i B / eps_i
    double best_value = 0.0;
    std::vector<double> optimal_counts;  ///< closed form
    double closed_form = 0.0;            ///< J*
    double max_count_error = 0.0;        ///< |best - optimal|, max over modules
    double value_gap = 0.0;              ///< closed_form - best_value
    double balance_spread = 0.0;  ///< max - min of n*_i B / eps_i (0 when balanced)
    std::size_t grid_points = 0;
};

/// Exhaustive search over allocations n_i = step * m_i with sum n_i = K
/// (the last module takes the remainder), p <= 4. OpenMP-parallel; the
/// reduction keeps the first maximizer in grid order.
TheoremCheck verify_theorem1(const BoundInput& in, double step);

/// Single-threaded version of the same search.
TheoremCheck verify_theorem1_serial(const BoundInput& in, double step);

}  // namespace etsim
