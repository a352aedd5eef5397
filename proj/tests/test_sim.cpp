#include <doctest.h>

#include <cmath>

#include "etsim/bound.hpp"
#include "etsim/config.hpp"
#include "etsim/sim.hpp"
#include "oracle.hpp"

using namespace etsim;

namespace {

AppSpec chain_app(int p, double energy) {
    AppSpec app;
    for (int i = 1; i <= p; ++i) app.modules.push_back({i, "m" + std::to_string(i), energy, 4});
    for (int i = 1; i <= p; ++i) app.flow.push_back(i);
    return app;
}

Scenario bare(AppSpec app, Topology t, Mapping m, double capacity) {
    Scenario s;
    s.app = std::move(app);
    s.topology = std::move(t);
    s.mapping = std::move(m);
    s.battery.model = BatteryModel::Ideal;
    s.battery.capacity_pj = capacity;
    s.control.e_med_pj_per_bit = 0.0;
    return s;
}

double min_hop_bound(const ExperimentConfig& c, const Scenario& s) {
    const auto comm = bound_comm_energy(c, s);
    const auto eps = normalized_energy(s.app, comm);
    return upper_bound({eps, s.topology.node_count(), s.battery.capacity_pj});
}

}  // namespace

TEST_CASE("pure computation budget") {
    auto s = bare(chain_app(1, 1.0), mesh(1, 1, 1.0), Mapping({1}, 1), 10.0);
    const auto m = run(s);
    CHECK(m.jobs_completed == 10);
    CHECK(m.death_cause == DeathCause::ModuleExtinction);
    CHECK(m.nodes[0].ops == 10);
}

TEST_CASE("one hop charges the sender one packet") {
    auto app = chain_app(2, 1.0);
    app.modules[1].energy_pj = 100.0;
    auto s = bare(app, mesh(2, 1, 1.0), Mapping({1, 2}, 2), 1000.0);
    const auto m = run(s);
    // The receiver runs out first, so every hop from the sender completed.
    CHECK(m.jobs_completed == 10);
    CHECK(m.nodes[0].alive);
    CHECK(m.nodes[0].communication_pj == doctest::Approx(57.2416 * m.nodes[0].ops).epsilon(1e-12));
    CHECK(m.nodes[1].communication_pj == 0.0);
}

TEST_CASE("unroutable platform dies at once") {
    auto s = bare(chain_app(2, 1.0), Topology(2, {}), Mapping({1, 2}, 2), 1000.0);
    const auto m = run(s);
    CHECK(m.jobs_completed == 0);
    CHECK(m.death_cause == DeathCause::Unroutable);
    CHECK(m.elapsed_cycles == 0);
}

TEST_CASE("flow routability") {
    const auto t = mesh(4, 4, 1.0);
    const auto map = parity_map(t, aes_preset());
    const auto flow = aes_preset().flow;
    std::vector<bool> alive(16, true);
    CHECK(flow_routable(t, map, flow, alive));
    for (int j : map.duplicates(2)) alive[static_cast<std::size_t>(j)] = false;
    CHECK_FALSE(flow_routable(t, map, flow, alive));
    alive.assign(16, false);
    for (int j : {0, 1, 5}) alive[static_cast<std::size_t>(j)] = true;
    CHECK(flow_routable(t, map, flow, alive));
}

TEST_CASE("controller extinction ends the run") {
    ExperimentConfig c;
    c.control.finite_controllers = true;
    c.control.controller_count = 1;
    const auto m = run(make_scenario(c));
    CHECK(m.death_cause == DeathCause::ControllerExtinction);
    CHECK(m.controller_energy_pj > 0.0);
    for (const auto& n : m.nodes) CHECK(n.residual_pj > 0.0);
}

TEST_CASE("aes on 4x4 stays under the bound") {
    for (auto algo : {Algorithm::Ear, Algorithm::Sdr}) {
        ExperimentConfig c;
        c.algorithm = algo;
        const auto s = make_scenario(c);
        const auto m = run(s);
        CHECK(m.jobs_completed > 0);
        CHECK(m.jobs_fractional <= min_hop_bound(c, s));
        CHECK(m.budget_violations == 0);
    }
}

TEST_CASE("runs are deterministic") {
    ExperimentConfig c;
    c.capacity_jitter = 0.1;
    c.workload.concurrent_jobs = 3;
    const auto s = make_scenario(c);
    const auto a = run(s);
    const auto b = run(s);
    CHECK(a.jobs_completed == b.jobs_completed);
    CHECK(a.elapsed_cycles == b.elapsed_cycles);
    CHECK(a.total_consumed_pj == b.total_consumed_pj);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(a.nodes[i].residual_pj == b.nodes[i].residual_pj);
        CHECK(a.nodes[i].ops == b.nodes[i].ops);
    }
}

TEST_CASE("property: ideal batteries close the energy books") {
    for (auto algo : {Algorithm::Ear, Algorithm::Sdr}) {
        for (int side : {4, 5}) {
            ExperimentConfig c;
            c.algorithm = algo;
            c.battery.model = BatteryModel::Ideal;
            c.mesh = MeshInfo{side, side};
            const auto m = run(make_scenario(c));
            double sum = 0.0;
            for (const auto& n : m.nodes) {
                sum += n.computation_pj + n.communication_pj + n.overhead_pj + n.residual_pj;
                CHECK(n.computation_pj + n.communication_pj + n.overhead_pj <= n.initial_pj * (1 + 1e-12));
            }
            CHECK(std::abs(sum - side * side * 60000.0) <= 1e-9 * side * side * 60000.0);
            CHECK(m.budget_violations == 0);
        }
    }
}

TEST_CASE("property: completed jobs are backed by operations") {
    for (auto model : {BatteryModel::Ideal, BatteryModel::ThinFilm}) {
        ExperimentConfig c;
        c.battery.model = model;
        const auto s = make_scenario(c);
        const auto m = run(s);
        const auto f = op_counts(s.app);
        std::vector<std::int64_t> ops(3, 0);
        for (const auto& n : m.nodes) ops[static_cast<std::size_t>(n.module - 1)] += n.ops;
        for (int i = 0; i < 3; ++i) CHECK(ops[i] >= m.jobs_completed * f[i]);
        for (const auto& n : m.nodes) {
            CHECK(n.computation_pj >= s.app.module(n.module).energy_pj * n.ops * (1 - 1e-12));
        }
    }
}

TEST_CASE("property: every run terminates") {
    for (int jobs : {1, 2, 4}) {
        ExperimentConfig c;
        c.workload.concurrent_jobs = jobs;
        const auto m = run(make_scenario(c));
        CHECK(m.death_cause != DeathCause::None);
        CHECK(m.jobs_injected >= m.jobs_completed);
    }
}

TEST_CASE("concurrent jobs recover from deadlock") {
    ExperimentConfig c;
    c.workload.concurrent_jobs = 4;
    c.workload.buffer_capacity = 1;
    const auto m = run(make_scenario(c));
    CHECK(m.liveness_violations == 0);
    CHECK(m.death_cause != DeathCause::None);
}

TEST_CASE("invalid scenarios are rejected") {
    auto s = bare(chain_app(2, 1.0), mesh(2, 1, 1.0), Mapping({1, 2}, 2), 1000.0);
    s.workload.buffer_capacity = 0;
    CHECK_FALSE(validate(s).empty());
    CHECK_THROWS_AS(run(s), ConfigError);
}
