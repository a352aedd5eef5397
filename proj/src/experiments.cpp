#include "etsim/experiments.hpp"

#include <exception>

#include <omp.h>

namespace etsim {

namespace {

// Runs every scenario; results land at their own index. The first failure
// (in index order) is rethrown after the parallel region.
std::vector<SimMetrics> run_all(const std::vector<Scenario>& scenarios) {
    std::vector<SimMetrics> out(scenarios.size());
    std::vector<std::exception_ptr> errors(scenarios.size());
    const auto n = static_cast<long long>(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = run(scenarios[static_cast<std::size_t>(i)]);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace

std::vector<SweepRow> sweep_meshes(const ExperimentConfig& config) {
    std::vector<Scenario> scenarios;
    for (const auto& size : config.sweep_sizes) {
        for (auto algo : {Algorithm::Ear, Algorithm::Sdr}) {
            auto s = make_scenario(config, size);
            s.algorithm = algo;
            scenarios.push_back(std::move(s));
        }
    }
    const auto metrics = run_all(scenarios);
    std::vector<SweepRow> rows;
    for (std::size_t k = 0; k < config.sweep_sizes.size(); ++k) {
        SweepRow r{config.sweep_sizes[k], metrics[2 * k], metrics[2 * k + 1], 0.0};
        r.ratio = r.sdr.jobs_fractional > 0.0 ? r.ear.jobs_fractional / r.sdr.jobs_fractional : kInfinity;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<BoundRow> bound_compare(const ExperimentConfig& config) {
    std::vector<Scenario> scenarios;
    for (const auto& size : config.sweep_sizes) {
        auto s = make_scenario(config, size);
        s.algorithm = Algorithm::Ear;
        s.battery.model = BatteryModel::Ideal;
        scenarios.push_back(std::move(s));
    }
    const auto metrics = run_all(scenarios);
    std::vector<BoundRow> rows;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        const auto& s = scenarios[k];
        BoundRow r;
        r.size = config.sweep_sizes[k];
        r.ear = metrics[k];
        const auto comm = bound_comm_energy(config, s);
        r.eps = normalized_energy(s.app, comm);
        r.j_star = upper_bound({r.eps, s.topology.node_count(), s.battery.capacity_pj});
        r.ratio = r.ear.jobs_fractional / r.j_star;
        const auto counts = s.mapping.counts();
        r.mapping_bound = bound_for_mapping(counts, r.eps, s.battery.capacity_pj);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<ControllerRow> controller_sweep(const ExperimentConfig& config) {
    std::vector<Scenario> scenarios;
    std::vector<ControllerRow> rows;
    for (const auto& size : config.sweep_sizes) {
        for (int count : config.controller_counts) {
            auto s = make_scenario(config, size);
            s.control.finite_controllers = true;
            s.control.controller_count = count;
            scenarios.push_back(std::move(s));
            rows.push_back({size, count, {}});
        }
    }
    auto metrics = run_all(scenarios);
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k].metrics = std::move(metrics[k]);
    return rows;
}

BoundSummary bound_summary(const ExperimentConfig& config) {
    const auto s = make_scenario(config);
    BoundSummary b;
    b.op_counts = op_counts(s.app);
    b.comm = bound_comm_energy(config, s);
    b.eps = normalized_energy(s.app, b.comm);
    b.input = {b.eps, s.topology.node_count(), s.battery.capacity_pj};
    b.j_star = upper_bound(b.input);
    b.optimal_counts = optimal_counts(b.eps, s.topology.node_count());
    b.mapping_counts = s.mapping.counts();
    b.mapping_bound = bound_for_mapping(b.mapping_counts, b.eps, s.battery.capacity_pj);
    return b;
}

}  // namespace etsim
