#include <doctest.h>

#include <random>

#include "etsim/platform.hpp"

using namespace etsim;

namespace {

BatteryParams ideal(double capacity) {
    BatteryParams p;
    p.model = BatteryModel::Ideal;
    p.capacity_pj = capacity;
    return p;
}

}  // namespace

TEST_CASE("mesh edges") {
    const auto t = mesh(4, 4, 1.0);
    CHECK(t.node_count() == 16);
    CHECK(t.edges().size() == 48);
    CHECK(mesh(1, 1, 1.0).edges().empty());
    CHECK(mesh(2, 1, 1.0).edges().size() == 2);
    CHECK(t.has_edge(0, 1));
    CHECK(t.has_edge(1, 0));
    CHECK_FALSE(t.has_edge(0, 5));
    CHECK(t.length(0, 4) == 1.0);
    CHECK_THROWS_AS(mesh(0, 4, 1.0), ConfigError);
    CHECK_THROWS_AS(mesh(4, 0, 1.0), ConfigError);
}

TEST_CASE("property: mesh edge count") {
    for (int w = 1; w <= 9; ++w) {
        for (int h = 1; h <= 9; ++h) {
            CHECK(mesh(w, h, 2.0).edges().size() == static_cast<std::size_t>(2 * (2 * w * h - w - h)));
        }
    }
}

TEST_CASE("parity map") {
    const auto t = mesh(4, 4, 1.0);
    const auto m = parity_map(t, aes_preset());
    CHECK(m.module_of(0) == 2);
    CHECK(m.module_of(1) == 3);
    CHECK(m.module_of(5) == 1);
    CHECK(m.counts() == std::vector<int>{4, 4, 8});
    auto two = aes_preset();
    two.modules.pop_back();
    try {
        parity_map(t, two);
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("parity map is AES-specific") != std::string::npos);
    }
}

TEST_CASE("property: parity counts on even meshes") {
    for (int w = 2; w <= 10; w += 2) {
        for (int h = 2; h <= 10; h += 2) {
            const int k = w * h;
            CHECK(parity_map(mesh(w, h, 1.0), aes_preset()).counts() == std::vector<int>{k / 4, k / 4, k / 2});
        }
    }
}

TEST_CASE("optimal counts") {
    const std::vector<double> eps{1201, 660.06, 1942.05};
    const auto n = optimal_counts(eps, 16);
    CHECK(n[0] == doctest::Approx(5.0527).epsilon(1e-4));
    CHECK(n[1] == doctest::Approx(2.7769).epsilon(1e-4));
    CHECK(n[2] == doctest::Approx(8.1704).epsilon(1e-4));
    const std::vector<double> sym{1, 1};
    CHECK(optimal_counts(sym, 2) == std::vector<double>{1.0, 1.0});
    const std::vector<double> skew{1, 3};
    CHECK(optimal_counts(skew, 4) == std::vector<double>{1.0, 3.0});
    const std::vector<double> bad{1, 0};
    CHECK_THROWS_AS(optimal_counts(bad, 4), ConfigError);
}

TEST_CASE("property: optimal counts sum to K and ignore scale") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5000.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int p = std::uniform_int_distribution<int>(1, 6)(rng);
        const int k = std::uniform_int_distribution<int>(1, 100)(rng);
        std::vector<double> eps(p), scaled(p);
        const double lambda = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
        for (int i = 0; i < p; ++i) {
            eps[i] = u(rng);
            scaled[i] = lambda * eps[i];
        }
        const auto a = optimal_counts(eps, k);
        const auto b = optimal_counts(scaled, k);
        double sum = 0.0;
        for (int i = 0; i < p; ++i) {
            sum += a[i];
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        }
        CHECK(sum == doctest::Approx(k).epsilon(1e-9));
    }
}

TEST_CASE("packet energy") {
    const auto link = LinkEnergyModel::textile();
    CHECK(packet_energy(link, 1.0, 128) == doctest::Approx(57.2416).epsilon(1e-12));
    CHECK(packet_energy(link, 100.0, 1) == doctest::Approx(53.082).epsilon(1e-12));
    CHECK(packet_energy(link, 10.0, 1) == doctest::Approx(4.4472).epsilon(1e-12));
    CHECK(packet_energy(link, 20.0, 1) == doctest::Approx(11.867).epsilon(1e-12));
    CHECK_THROWS_AS(packet_energy(link, 20.0, 0), ConfigError);
    CHECK_THROWS_AS(packet_energy(link, 0.0, 8), ConfigError);
    CHECK_THROWS_AS(packet_energy(link, 200.0, 8), ConfigError);
    const LinkEnergyModel ext(link.points(), true);
    CHECK(packet_energy(ext, 200.0, 1) > 53.082);
}

TEST_CASE("property: packet energy strictly increasing") {
    const auto link = LinkEnergyModel::textile();
    double prev = 0.0;
    for (double len = 1.0; len <= 100.0; len += 0.5) {
        const double e = packet_energy(link, len, 64);
        CHECK(e > prev);
        prev = e;
    }
    for (int bits = 1; bits < 512; ++bits) CHECK(packet_energy(link, 7.0, bits + 1) > packet_energy(link, 7.0, bits));
}

TEST_CASE("ideal battery") {
    Battery full(ideal(60000));
    auto d = full.consume(60000);
    CHECK(d.delivered);
    CHECK_FALSE(full.alive());

    Battery almost(ideal(60000));
    CHECK(almost.consume(59999).delivered);
    CHECK(almost.alive());
    CHECK(almost.residual_pj() == doctest::Approx(1.0));

    Battery over(ideal(10));
    d = over.consume(11);
    CHECK_FALSE(d.delivered);
    CHECK_FALSE(over.alive());
    CHECK(d.drawn_pj == doctest::Approx(10.0));
    CHECK(over.consume(1).drawn_pj == 0.0);
    CHECK_THROWS_AS(Battery(ideal(10)).consume(-1.0), ConfigError);
}

TEST_CASE("thin-film cutoff") {
    BatteryParams p;
    Battery b(p);
    CHECK(b.voltage() == doctest::Approx(3.6));
    CHECK(b.consume(57000).delivered);
    CHECK(b.alive());
    b.consume(600);
    CHECK_FALSE(b.alive());
    CHECK(b.residual_pj() == doctest::Approx(2400.0));
    CHECK(b.consumed_pj() + b.residual_pj() == doctest::Approx(60000.0));
    CHECK(discharge_voltage(p.discharge_table, 0.35) == doctest::Approx(3.45));
}

TEST_CASE("headroom predicts the killing draw") {
    BatteryParams p;
    Battery b(p);
    const double h = b.headroom_pj();
    Battery just_below(p), at(p);
    just_below.consume(h * (1.0 - 1e-9));
    at.consume(h * (1.0 + 1e-9));
    CHECK(just_below.alive());
    CHECK_FALSE(at.alive());
    CHECK(Battery(ideal(500)).headroom_pj() == doctest::Approx(500.0));
}

TEST_CASE("battery levels") {
    Battery b(ideal(60000));
    CHECK(battery_level(b, 8) == 7);
    b.consume(30000);
    CHECK(battery_level(b, 8) == 4);
    b.consume(30000);
    CHECK(battery_level(b, 8) == 0);
}

TEST_CASE("property: consumption is monotone and closes") {
    std::mt19937_64 rng(5);
    for (auto model : {BatteryModel::Ideal, BatteryModel::ThinFilm}) {
        BatteryParams p;
        p.model = model;
        Battery b(p);
        double last = 0.0;
        bool was_dead = false;
        while (b.consumed_pj() < p.capacity_pj && !was_dead) {
            b.consume(std::uniform_real_distribution<double>(0.0, 900.0)(rng));
            CHECK(b.consumed_pj() >= last);
            CHECK(b.consumed_pj() + b.residual_pj() == doctest::Approx(b.initial_pj()).epsilon(1e-15));
            last = b.consumed_pj();
            was_dead = !b.alive();
        }
        CHECK(was_dead);
        b.consume(1.0);
        CHECK_FALSE(b.alive());
        CHECK(b.consumed_pj() == last);
    }
}
