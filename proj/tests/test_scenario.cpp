#include <doctest.h>

#include <random>

#include "hetnet/scenario.hpp"

using namespace hetnet;

namespace {

ScenarioConfig table1_like() {
    ScenarioConfig cfg;
    cfg.n = 1000;
    cfg.r_f = 10.0;
    cfg.r_m = 400.0;
    cfg.mu = 1.0 / 120.0;
    cfg.eta_m = 1.0 / 240.0;
    cfg.eta_f = 1.0 / 360.0;
    cfg.lambda_o_f = 1.0;
    cfg.lambda_o_m = 0.1;
    cfg.K = 4;
    return cfg;
}

} // namespace

TEST_CASE("table1 values validate cleanly") {
    const auto cfg = table1_like();
    CHECK(validate(cfg).empty());
    CHECK(cfg.n * coverage_ratio(cfg) == doctest::Approx(0.625));
}

TEST_CASE("coverage overflow is rejected") {
    auto cfg = table1_like();
    cfg.r_m = 300.0; // n*q ~ 1.11
    const auto report = validate(cfg);
    REQUIRE(!report.empty());
    CHECK(report.front().field == "n");
}

TEST_CASE("n = 0 is a valid single-tier scenario") {
    auto cfg = table1_like();
    cfg.n = 0;
    cfg.lambda_o_f = 0.0;
    CHECK(validate(cfg).empty());
}

TEST_CASE("K must be explicit") {
    auto cfg = table1_like();
    cfg.K = 0;
    CHECK(!validate(cfg).empty());
}

TEST_CASE("derived capacities from table1 timings") {
    const auto cfg = table1_like();
    const auto d = derive_capacities(cfg);
    CHECK(d.mu_f == doctest::Approx(1.0 / 90.0).epsilon(1e-12));
    CHECK(d.mu_m == doctest::Approx((std::sqrt(1000.0) + 1.0) / 240.0 + 1.0 / 120.0)
                        .epsilon(1e-12));
    CHECK(d.N == 100); // 6000 / ((64+56)/2)
    CHECK(d.S == 30);  // floor(50*28 / 46)
    CHECK(d.q == doctest::Approx(0.000625));
}

TEST_CASE("no mobility collapses release to completion") {
    auto cfg = table1_like();
    cfg.n = 0;
    cfg.lambda_o_f = 0.0;
    cfg.eta_m = 0.0;
    cfg.eta_f = 0.0;
    const auto d = derive_capacities(cfg);
    CHECK(d.mu_m == doctest::Approx(cfg.mu));
    CHECK(d.mu_f == doctest::Approx(cfg.mu));
}

TEST_CASE("overrides win over the default chain sizing") {
    auto cfg = table1_like();
    cfg.N_override = 20;
    cfg.S_override = 5;
    const auto d = derive_capacities(cfg);
    CHECK(d.N == 20);
    CHECK(d.S == 5);
}

TEST_CASE("derive_capacities is scale invariant in the radii") {
    auto cfg = table1_like();
    const auto d1 = derive_capacities(cfg);
    cfg.r_f *= 2.0;
    cfg.r_m *= 2.0;
    const auto d2 = derive_capacities(cfg);
    CHECK(d1.q == doctest::Approx(d2.q).epsilon(1e-15));
}

TEST_CASE("split_arrivals matches the density-weighted share") {
    const auto [f, m] = split_arrivals(1.0, 20.0, 1000, 0.000625);
    CHECK(f == doctest::Approx(12.5 / 12.875).epsilon(1e-12));
    CHECK(m == doctest::Approx(1.0 - 12.5 / 12.875).epsilon(1e-12));
}

TEST_CASE("split_arrivals trivial cases") {
    const auto [f0, m0] = split_arrivals(3.0, 20.0, 0, 0.000625);
    CHECK(f0 == 0.0);
    CHECK(m0 == 3.0);
    const auto [f1, m1] = split_arrivals(2.0, 1.0, 800, 0.625e-3);
    CHECK(f1 == doctest::Approx(1.0));
    CHECK(m1 == doctest::Approx(1.0));
}

TEST_CASE("split_arrivals conserves the total over random inputs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double lambda = 10.0 * unif(rng);
        const double d = 0.1 + 40.0 * unif(rng);
        const int n = static_cast<int>(rng() % 2000);
        const double q = n > 0 ? unif(rng) / n : 0.01;
        const auto [f, m] = split_arrivals(lambda, d, n, q);
        CHECK(f + m == doctest::Approx(lambda).epsilon(1e-12));
        CHECK(f >= 0.0);
        CHECK(m >= 0.0);
    }
}

TEST_CASE("valid configs never derive non-finite values") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(1e-4, 10.0);
    for (int i = 0; i < 300; ++i) {
        ScenarioConfig cfg = table1_like();
        cfg.n = static_cast<int>(rng() % 1200);
        cfg.mu = unif(rng);
        cfg.eta_m = unif(rng);
        cfg.eta_f = unif(rng);
        if (cfg.n == 0) cfg.lambda_o_f = 0.0;
        if (!validate(cfg).empty()) continue;
        const auto d = derive_capacities(cfg);
        CHECK(std::isfinite(d.mu_m));
        CHECK(std::isfinite(d.mu_f));
        CHECK(d.mu_m >= cfg.mu);
        CHECK(d.mu_f >= cfg.mu);
        CHECK(d.N >= 1);
        CHECK(d.S >= 0);
    }
}

TEST_CASE("scenario digest tracks content") {
    const auto a = table1_like();
    auto b = a;
    CHECK(scenario_digest(a) == scenario_digest(b));
    b.lambda_o_f += 1e-9;
    CHECK(scenario_digest(a) != scenario_digest(b));
}
