#include <doctest.h>

#include <algorithm>
#include <random>

#include "etsim/app_model.hpp"
#include "oracle.hpp"

using namespace etsim;

namespace {

AppSpec tiny(std::vector<int> flow, int p) {
    AppSpec app;
    for (int i = 1; i <= p; ++i) app.modules.push_back({i, "m" + std::to_string(i), 1.0 * i, 16});
    app.flow = std::move(flow);
    return app;
}

bool has_message(const std::vector<Violation>& v, const std::string& text) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.message.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("aes preset shape") {
    const auto app = aes_preset();
    CHECK(app.flow.size() == 30);
    CHECK(app.module_count() == 3);
    CHECK(app.module(3).energy_pj == doctest::Approx(176.55).epsilon(1e-12));
    CHECK(app.module(1).energy_pj == doctest::Approx(120.1).epsilon(1e-12));
    CHECK(app.module(2).energy_pj == doctest::Approx(73.34).epsilon(1e-12));
    CHECK(app.flow.front() == 3);
    CHECK(app.flow.back() == 3);
    CHECK(app.packet_bits == 128);
    CHECK(validate(app).empty());
    CHECK(app_preset("aes128").flow == app.flow);
    CHECK_THROWS_AS(app_preset("des"), ConfigError);
}

TEST_CASE("op counts") {
    CHECK(op_counts(aes_preset()) == std::vector<int>{10, 9, 11});
    CHECK(op_counts(tiny({1}, 1)) == std::vector<int>{1});
    CHECK(op_counts(tiny({1, 2, 1}, 2)) == std::vector<int>{2, 1});
}

TEST_CASE("normalized energy") {
    const auto app = aes_preset();
    const std::vector<double> zero{0, 0, 0};
    const auto e0 = normalized_energy(app, zero);
    CHECK(e0[0] == doctest::Approx(1201.0).epsilon(1e-12));
    CHECK(e0[1] == doctest::Approx(660.06).epsilon(1e-12));
    CHECK(e0[2] == doctest::Approx(1942.05).epsilon(1e-12));

    const std::vector<double> hop{57.2416, 57.2416, 57.2416};
    CHECK(normalized_energy(app, hop)[0] == doctest::Approx(1773.416).epsilon(1e-12));

    auto unit = tiny({1}, 1);
    const std::vector<double> c0{0};
    CHECK(normalized_energy(unit, c0) == std::vector<double>{1.0});

    const std::vector<double> short_c{0, 0};
    CHECK_THROWS_AS(normalized_energy(app, short_c), ConfigError);
    const std::vector<double> neg{0, -1, 0};
    CHECK_THROWS_AS(normalized_energy(app, neg), ConfigError);
}

TEST_CASE("validate reports violations") {
    auto bad_flow = aes_preset();
    bad_flow.flow.push_back(4);
    CHECK(has_message(validate(bad_flow), "unknown module id"));

    auto zero_e = aes_preset();
    zero_e.modules[1].energy_pj = 0.0;
    CHECK(has_message(validate(zero_e), "non-positive energy"));
    CHECK_THROWS_AS(require_valid(zero_e), ConfigError);

    auto unused = tiny({1, 1}, 2);
    CHECK_FALSE(validate(unused).empty());
}

TEST_CASE("property: counts sum to flow length and survive relabeling") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = std::uniform_int_distribution<int>(1, 5)(rng);
        std::vector<int> flow;
        for (int i = 1; i <= p; ++i) flow.push_back(i);
        const int extra = std::uniform_int_distribution<int>(0, 20)(rng);
        for (int k = 0; k < extra; ++k) flow.push_back(std::uniform_int_distribution<int>(1, p)(rng));
        std::shuffle(flow.begin(), flow.end(), rng);
        const auto app = tiny(flow, p);
        const auto f = op_counts(app);
        int sum = 0;
        for (int x : f) sum += x;
        CHECK(sum == static_cast<int>(flow.size()));

        std::vector<int> perm(p);
        for (int i = 0; i < p; ++i) perm[i] = i + 1;
        std::shuffle(perm.begin(), perm.end(), rng);
        auto relabeled = flow;
        for (int& m : relabeled) m = perm[m - 1];
        const auto g = op_counts(tiny(relabeled, p));
        for (int i = 0; i < p; ++i) CHECK(g[perm[i] - 1] == f[i]);
    }
}

TEST_CASE("property: normalized energy is linear in c") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    const auto app = aes_preset();
    const auto f = op_counts(app);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> c{u(rng), u(rng), u(rng)};
        std::vector<double> d{u(rng), u(rng), u(rng)};
        std::vector<double> cd{c[0] + d[0], c[1] + d[1], c[2] + d[2]};
        const auto a = normalized_energy(app, c);
        const auto b = normalized_energy(app, cd);
        const std::vector<double> e{120.1, 73.34, 176.55};
        const auto ref = oracle::eps(f, e, c);
        for (int i = 0; i < 3; ++i) {
            CHECK(b[i] - a[i] == doctest::Approx(f[i] * d[i]).epsilon(1e-9));
            CHECK(a[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        }
    }
}
