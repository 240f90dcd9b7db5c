#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cascade/stats.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace cascade;

TEST_CASE("ecdf basics") {
    const Ecdf f(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(f(0.5) == 0.0);
    CHECK(f(1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(f(2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(f(2.5) == doctest::Approx(2.0 / 3.0));
    CHECK(f(3.0) == 1.0);
    CHECK(f(99.0) == 1.0);

    const Ecdf g(std::vector<double>{5.0, 5.0, 5.0});
    CHECK(g(4.999) == 0.0);
    CHECK(g(5.0) == 1.0);
    const auto steps = g.step_points();
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].first == 5.0);
    CHECK(steps[0].second == 1.0);
}

TEST_CASE("ecdf matches rank counting on random data") {
    auto rng = testutil::rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> v;
        const std::size_t n = 1 + rng() % 40;
        for (std::size_t i = 0; i < n; ++i)
            v.push_back(std::round(testutil::unif(rng, -5.0, 5.0) * 4.0) / 4.0);  // force ties
        const Ecdf f(v);
        for (int q = 0; q < 20; ++q) {
            const double x = testutil::unif(rng, -6.0, 6.0);
            std::size_t c = 0;
            for (double y : v)
                if (y <= x) ++c;
            CHECK(f(x) == doctest::Approx(static_cast<double>(c) / static_cast<double>(n)).epsilon(1e-14));
        }
    }
}

TEST_CASE("ecdf rejects bad input") {
    CHECK_THROWS_AS(Ecdf(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(Ecdf(std::vector<double>{1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("ks statistic on known configurations") {
    const auto same = ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
    CHECK(same.statistic == 0.0);
    CHECK(same.p_value == 1.0);

    const auto disjoint = ks_two_sample({1, 2, 3, 4}, {5, 6, 7, 8});
    CHECK(disjoint.statistic == 1.0);

    const auto interleaved = ks_two_sample({1.0, 2.0}, {1.5, 2.5});
    CHECK(interleaved.statistic == doctest::Approx(0.5));

    CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ks_two_sample({1.0}, {}), std::invalid_argument);
}

TEST_CASE("ks is symmetric and invariant under monotone transforms") {
    auto rng = testutil::rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a, b;
        const std::size_t na = 1 + rng() % 12, nb = 1 + rng() % 12;
        for (std::size_t i = 0; i < na; ++i) a.push_back(std::floor(testutil::unif(rng, 0.0, 8.0)));
        for (std::size_t i = 0; i < nb; ++i) b.push_back(std::floor(testutil::unif(rng, 0.0, 8.0)));

        const auto ab = ks_two_sample(a, b);
        const auto ba = ks_two_sample(b, a);
        CHECK(ab.statistic == ba.statistic);
        CHECK(ab.p_value == ba.p_value);

        auto ta = a, tb = b;
        for (double& x : ta) x = std::exp(0.5 * x) + 3.0;
        for (double& x : tb) x = std::exp(0.5 * x) + 3.0;
        CHECK(ks_two_sample(ta, tb).statistic == ab.statistic);
    }
}

TEST_CASE("ks statistic equals brute-force evaluation with ties") {
    auto rng = testutil::rng(31);
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<double> a, b;
        const std::size_t na = 1 + rng() % 9, nb = 1 + rng() % 9;
        for (std::size_t i = 0; i < na; ++i) a.push_back(std::floor(testutil::unif(rng, 0.0, 5.0)) / 2.0);
        for (std::size_t i = 0; i < nb; ++i) b.push_back(std::floor(testutil::unif(rng, 0.0, 5.0)) / 2.0);
        const double want = testutil::brute_ks(a, b);
        CHECK(ks_two_sample(a, b).statistic == want);
    }
}

TEST_CASE("kolmogorov tail probability") {
    CHECK(kolmogorov_prob(0.0) == 1.0);
    CHECK(kolmogorov_prob(-1.0) == 1.0);
    // Q(1.0) via the alternating series, first terms: 2(e^-2 - e^-8 + e^-18 - ...)
    const double q1 = 2.0 * (std::exp(-2.0) - std::exp(-8.0) + std::exp(-18.0) - std::exp(-32.0));
    CHECK(kolmogorov_prob(1.0) == doctest::Approx(q1).epsilon(1e-12));
    CHECK(kolmogorov_prob(10.0) <= 1e-80);
    CHECK(kolmogorov_prob(0.3) <= 1.0);
    CHECK(kolmogorov_prob(0.3) >= 0.999);
}

TEST_CASE("ks p-value decreases with separation and calibrates under the null") {
    // Strong separation: two point masses.
    const auto apart = ks_two_sample(std::vector<double>(50, 0.1), std::vector<double>(50, 0.2));
    CHECK(apart.statistic == 1.0);
    CHECK(apart.p_value < 1e-6);

    // Same continuous distribution: the alpha = 0.05 rejection rate should be
    // close to nominal.
    auto rng = testutil::rng(101);
    int rejected = 0;
    const int trials = 600;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> a(100), b(100);
        for (auto& x : a) x = testutil::unif(rng, 0.0, 1.0);
        for (auto& x : b) x = testutil::unif(rng, 0.0, 1.0);
        if (ks_two_sample(a, b).p_value < 0.05) ++rejected;
    }
    const double rate = static_cast<double>(rejected) / trials;
    CHECK(rate > 0.02);
    CHECK(rate < 0.09);
}
