#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "etsim/app_model.hpp"
#include "etsim/control.hpp"
#include "etsim/platform.hpp"
#include "etsim/routing.hpp"

namespace etsim {

struct WorkloadConfig {
    int concurrent_jobs = 1;
    int buffer_capacity = 1;  ///< packets a node can hold
    int origin_node = 0;      ///< jobs start at the first-module node nearest to this one
};

/// Everything one simulation needs.
struct Scenario {
    AppSpec app;
    Topology topology;
    Mapping mapping;
    LinkEnergyModel link = LinkEnergyModel::textile();
    BatteryParams battery;
    int battery_levels = 8;  ///< N_B
    double q = 1.0;
    Algorithm algorithm = Algorithm::Ear;
    ControlConfig control;
    WorkloadConfig workload;
    int hop_cycles = 8;
    /// Relative spread of initial battery capacities, drawn from seed.
    double capacity_jitter = 0.0;
    std::uint64_t seed = 1;
    std::int64_t max_cycles = 2'000'000'000;
};

std::vector<Violation> validate(const Scenario& scenario);

enum class DeathCause { None, ModuleExtinction, ControllerExtinction, Unroutable };

const char* to_string(DeathCause cause);
const char* to_string(Algorithm algorithm);

struct NodeLedger {
    int node = 0;
    int module = 0;
    std::int64_t ops = 0;
    double initial_pj = 0.0;
    double computation_pj = 0.0;
    double communication_pj = 0.0;
    double overhead_pj = 0.0;
    double residual_pj = 0.0;
    bool alive = false;
    std::int64_t death_cycle = -1;
};

struct SimMetrics {
    Algorithm algorithm = Algorithm::Ear;
    std::int64_t jobs_completed = 0;
    /// Completed jobs plus flow progress of jobs in flight at death.
    double jobs_fractional = 0.0;
    std::int64_t jobs_injected = 0;
    std::int64_t jobs_lost = 0;  ///< held by a node whose battery gave out
    std::int64_t elapsed_cycles = 0;
    std::int64_t frames = 0;
    std::int64_t recomputations = 0;
    std::int64_t deadlock_reports = 0;
    DeathCause death_cause = DeathCause::None;
    double total_initial_pj = 0.0;
    double total_consumed_pj = 0.0;
    double overhead_fraction = 0.0;
    double controller_energy_pj = 0.0;
    /// E_i(j) x_j + C_j + OH_j > B seen after an energy event.
    std::int64_t budget_violations = 0;
    /// Deadlock flags whose packet was still stuck two frames later although
    /// a live alternative next hop existed.
    std::int64_t liveness_checks = 0;
    std::int64_t liveness_violations = 0;
    std::vector<NodeLedger> nodes;
};

/// Runs until system death. Deterministic for a given scenario.
SimMetrics run(const Scenario& scenario);

/// True when some live node hosting the first flow module can push a job
/// through the whole flow using live nodes only.
bool flow_routable(const Topology& topology, const Mapping& mapping, const std::vector<int>& flow,
                   const std::vector<bool>& alive);

}  // namespace etsim
