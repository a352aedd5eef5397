#include <doctest.h>

#include <random>

#include "etsim/routing.hpp"
#include "oracle.hpp"

using namespace etsim;

namespace {

Topology line(int k) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < k; ++i) {
        edges.push_back({i, i + 1, 1.0});
        edges.push_back({i + 1, i, 1.0});
    }
    return Topology(k, edges);
}

std::vector<int> full_levels(int k, int nb) { return std::vector<int>(static_cast<std::size_t>(k), nb - 1); }

}  // namespace

TEST_CASE("sdr weights") {
    const auto w = weights_sdr(mesh(2, 1, 1.0));
    CHECK(w(0, 0) == 0.0);
    CHECK(w(0, 1) == 1.0);
    CHECK(w(1, 0) == 1.0);
    CHECK(w(1, 1) == 0.0);
    const auto apart = weights_sdr(Topology(2, {}));
    CHECK(apart(0, 1) == kInfinity);
}

TEST_CASE("weight function") {
    CHECK(weight_fn(7, 1.0, 8) == 1.0);
    CHECK(weight_fn(0, 1.0, 8) == 128.0);
    CHECK(weight_fn(3, 0.5, 8) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(weight_fn(8, 1.0, 8), ConfigError);
    CHECK_THROWS_AS(weight_fn(-1, 1.0, 8), ConfigError);
}

TEST_CASE("ear weights") {
    const auto t = mesh(2, 1, 1.0);
    const std::vector<int> levels{7, 0};
    const auto w = weights_ear(t, levels, 1.0, 8);
    CHECK(w(0, 1) == 128.0);
    CHECK(w(1, 0) == 1.0);
    const auto full = full_levels(16, 8);
    CHECK(weights_ear(mesh(4, 4, 1.0), full, 1.0, 8) == weights_sdr(mesh(4, 4, 1.0)));
}

TEST_CASE("chain with a shortcut") {
    WeightMatrix w(3, kInfinity);
    for (int i = 0; i < 3; ++i) w(i, i) = 0.0;
    w(0, 1) = 1;
    w(1, 2) = 1;
    w(0, 2) = 3;
    const auto ap = all_pairs(w);
    CHECK(ap.dist(0, 2) == 2.0);
    CHECK(ap.succ(0, 2) == 1);
    CHECK(ap.dist(2, 0) == kInfinity);
    CHECK(ap.succ(2, 0) == kNoNode);
    for (int i = 0; i < 3; ++i) CHECK(ap.dist(i, i) == 0.0);
}

TEST_CASE("all pairs matches simple path enumeration") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = std::uniform_int_distribution<int>(1, 7)(rng);
        const auto w = oracle::random_weights(rng, k);
        const auto ap = all_pairs(w);
        const auto ref = oracle::simple_path_distances(w);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                CHECK(ap.dist(i, j) == ref[i][j]);
                if (i != j && ap.dist(i, j) < kInfinity) CHECK(oracle::walk_length(ap, w, i, j) == ap.dist(i, j));
            }
        }
        CHECK(ap.relaxations == static_cast<std::uint64_t>(k) * k * k);
    }
}

TEST_CASE("parallel and serial all pairs agree bit for bit") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = std::uniform_int_distribution<int>(1, 40)(rng);
        auto w = oracle::random_weights(rng, k);
        const auto a = all_pairs(w);
        const auto b = all_pairs_serial(w);
        CHECK(a == b);
        CHECK(b.relaxations == static_cast<std::uint64_t>(k) * k * k);
    }
}

TEST_CASE("routing tables pick the nearest duplicate") {
    // 0 - 1 - 2 - 3 with module 1 on both ends.
    const auto t = line(4);
    const Mapping m({1, 2, 2, 1}, 2);
    const auto ap = all_pairs(weights_sdr(t));
    std::uint64_t examined = 0;
    const auto rt = build_routing_tables(ap, m, {}, {}, &examined);
    CHECK(examined == 16);
    CHECK(rt.at(1, 1) == 0);
    CHECK(rt.at(2, 1) == 3);
    CHECK(rt.at(0, 2) == 1);
    // Local delivery.
    CHECK(rt.at(0, 1) == 0);
    CHECK(rt.at(1, 2) == 1);

    std::vector<bool> locked{false, true, false, false};
    const auto moved = build_routing_tables(ap, m, locked, rt);
    CHECK(moved.at(1, 1) == 2);
    CHECK(moved.at(0, 1) == rt.at(0, 1));
}

TEST_CASE("equal distances resolve to the lowest node id") {
    const auto t = line(3);
    const Mapping m({1, 2, 1}, 2);
    const auto rt = build_routing_tables(all_pairs(weights_sdr(t)), m, {}, {});
    CHECK(rt.at(1, 1) == 0);
}

TEST_CASE("property: ear equals sdr at full charge") {
    for (int s = 2; s <= 8; ++s) {
        const auto t = mesh(s, s, 1.0);
        const Mapping m = parity_map(t, aes_preset());
        const auto levels = full_levels(s * s, 8);
        const auto ear = compute_routes(t, m, {Algorithm::Ear, 1.0, 8}, levels, {}, {});
        const auto sdr = compute_routes(t, m, {Algorithm::Sdr, 1.0, 8}, levels, {}, {});
        CHECK(ear.weights == sdr.weights);
        CHECK(ear.paths == sdr.paths);
        CHECK(ear.tables == sdr.tables);
    }
}

TEST_CASE("property: lower levels never shorten paths") {
    std::mt19937_64 rng(13);
    const auto t = mesh(4, 4, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> levels(16);
        for (int& l : levels) l = std::uniform_int_distribution<int>(1, 7)(rng);
        auto lower = levels;
        const int j = std::uniform_int_distribution<int>(0, 15)(rng);
        lower[j] = std::uniform_int_distribution<int>(0, levels[j] - 1)(rng);
        const auto w0 = weights_ear(t, levels, 1.0, 8);
        const auto w1 = weights_ear(t, lower, 1.0, 8);
        const auto d0 = all_pairs(w0);
        const auto d1 = all_pairs(w1);
        for (int a = 0; a < 16; ++a) {
            CHECK(w1(a, j) >= w0(a, j));
            for (int b = 0; b < 16; ++b) CHECK(d1.dist(a, b) >= d0.dist(a, b));
        }
    }
}

TEST_CASE("property: table entries are edges or local delivery") {
    std::mt19937_64 rng(21);
    const auto t = mesh(5, 5, 1.0);
    const Mapping m = parity_map(t, aes_preset());
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> levels(25);
        for (int& l : levels) l = std::uniform_int_distribution<int>(0, 7)(rng);
        std::vector<bool> locked(25);
        for (std::size_t i = 0; i < locked.size(); ++i) locked[i] = std::bernoulli_distribution(0.2)(rng);
        const auto first = compute_routes(t, m, {}, levels, {}, {});
        const auto snap = compute_routes(t, m, {}, levels, locked, first.tables);
        for (int n = 0; n < 25; ++n) {
            for (int i = 1; i <= 3; ++i) {
                const int s = snap.tables.at(n, i);
                if (s == kNoNode) continue;
                if (s == n) {
                    CHECK(m.module_of(n) == i);
                } else {
                    CHECK(t.has_edge(n, s));
                }
            }
        }
        CHECK(compute_routes(t, m, {}, levels, locked, first.tables).tables == snap.tables);
    }
}

TEST_CASE("blocked ports are avoided") {
    const auto t = line(4);
    const Mapping m({1, 2, 2, 1}, 2);
    const std::vector<int> levels(4, 7);
    BlockedPorts blocked(4);
    blocked[1] = {0};
    const auto snap = compute_routes(t, m, {}, levels, {}, {}, blocked);
    CHECK(snap.weights(1, 0) == kInfinity);
    CHECK(snap.tables.at(1, 1) == 2);
}
