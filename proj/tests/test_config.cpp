#include <doctest.h>

#include "etsim/report.hpp"

using namespace etsim;

TEST_CASE("mesh parsing") {
    const auto m = parse_mesh("6x5");
    CHECK(m.width == 6);
    CHECK(m.height == 5);
    CHECK(mesh_name(m) == "6x5");
    for (const char* bad : {"0x4", "4x0", "4", "x4", "4x4x4", "-1x3", "ax3"}) {
        try {
            parse_mesh(bad, "platform.mesh");
            FAIL("accepted " << bad);
        } catch (const ConfigError& e) {
            CHECK(e.field() == "platform.mesh");
        }
    }
}

TEST_CASE("config round trip") {
    ExperimentConfig c;
    c.algorithm = Algorithm::Sdr;
    c.q = 0.5;
    c.workload.concurrent_jobs = 3;
    c.battery.model = BatteryModel::Ideal;
    c.mesh = MeshInfo{5, 6};
    const auto j = to_json(c);
    ExperimentConfig back;
    apply_json(back, j);
    CHECK(to_json(back) == j);
    CHECK(back.algorithm == Algorithm::Sdr);
    CHECK(back.mesh->width == 5);
    CHECK(back.mesh->height == 6);
}

TEST_CASE("unknown and malformed keys name the field") {
    ExperimentConfig c;
    try {
        apply_json(c, json{{"routing", {{"qq", 1}}}});
        FAIL("accepted unknown key");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "routing.qq");
    }
    CHECK_THROWS_AS(apply_json(c, json{{"routing", {{"q", "high"}}}}), ConfigError);
    CHECK_THROWS_AS(apply_json(c, json{{"bogus", 1}}), ConfigError);
}

TEST_CASE("scenario from config") {
    ExperimentConfig c;
    const auto s = make_scenario(c, MeshInfo{6, 6});
    CHECK(s.topology.node_count() == 36);
    CHECK(s.mapping.counts() == std::vector<int>{9, 9, 18});
    const auto comm = bound_comm_energy(c, s);
    for (double x : comm) CHECK(x == doctest::Approx(57.2416).epsilon(1e-12));
    c.bound_comm.kind = BoundComm::Kind::Zero;
    for (double x : bound_comm_energy(c, s)) CHECK(x == 0.0);
}

TEST_CASE("tables carry the resolved config") {
    ExperimentConfig c;
    c.sweep_sizes = {{4, 4}};
    const auto cfg = to_json(c);
    const auto sweep = sweep_csv(sweep_meshes(c), cfg);
    CHECK(sweep.rfind("# config: ", 0) == 0);
    CHECK(sweep.find(cfg.dump()) != std::string::npos);
    int rows = 0;
    for (char ch : sweep) rows += ch == '\n';
    CHECK(rows == 3);

    const auto bound = bound_compare(c);
    REQUIRE(bound.size() == 1);
    CHECK(bound[0].ratio < 1.0);
    CHECK(bound_compare_csv(bound, cfg).rfind("# config: ", 0) == 0);
    c.controller_counts = {1};
    CHECK(controller_csv(controller_sweep(c), cfg).rfind("# config: ", 0) == 0);
}

TEST_CASE("metrics serialization") {
    ExperimentConfig c;
    c.mesh = MeshInfo{2, 2};
    const auto m = run(make_scenario(c));
    const auto j = to_json(m);
    CHECK(j.contains("jobs_completed"));
    CHECK(j["jobs_completed"].get<std::int64_t>() == m.jobs_completed);
    CHECK(j["nodes"].size() == 4);
    CHECK_FALSE(to_json(m, false).contains("nodes"));
    CHECK(metrics_text(m).find("jobs_completed") != std::string::npos);
    CHECK(fmt(1.5, 2) == "1.50");
}
