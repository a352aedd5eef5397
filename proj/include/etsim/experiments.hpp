#pragma once

#include <vector>

#include "etsim/bound.hpp"
#include "etsim/config.hpp"

namespace etsim {

struct SweepRow {
    MeshInfo size;
    SimMetrics ear;
    SimMetrics sdr;
    double ratio = 0.0;  ///< jobs(EAR) / jobs(SDR), fractional counts
};

/// EAR and SDR on every configured mesh size; configs differ only in the
/// routing algorithm. Member runs execute in parallel, rows come back in
/// size order.
std::vector<SweepRow> sweep_meshes(const ExperimentConfig& config);

struct BoundRow {
    MeshInfo size;
    SimMetrics ear;  ///< ideal batteries
    std::vector<double> eps;
    double j_star = 0.0;
    double ratio = 0.0;  ///< fractional jobs / J*
    long long mapping_bound = 0;
};

/// EAR with ideal batteries against J* for every configured size.
std::vector<BoundRow> bound_compare(const ExperimentConfig& config);

struct ControllerRow {
    MeshInfo size;
    int controllers = 0;
    SimMetrics metrics;
};

/// Finite-energy controllers: lifetime for every (size, controller count).
std::vector<ControllerRow> controller_sweep(const ExperimentConfig& config);

struct BoundSummary {
    std::vector<int> op_counts;
    std::vector<double> comm;
    std::vector<double> eps;
    BoundInput input;
    double j_star = 0.0;
    std::vector<double> optimal_counts;
    std::vector<int> mapping_counts;
    long long mapping_bound = 0;
};

/// Analytical quantities for the configured platform.
BoundSummary bound_summary(const ExperimentConfig& config);

}  // namespace etsim
