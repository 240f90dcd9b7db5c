#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cascade/errors.hpp"
#include "cascade/hawkes.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace cascade;

namespace {

HawkesParams single_group(double mu, double w, double beta = 1.0) {
    HawkesParams p;
    p.mu = {mu};
    p.W = Matrix(1, 1, w);
    p.beta = beta;
    return p;
}

EventSequence seq_of(std::vector<std::pair<std::size_t, double>> events, double window) {
    EventSequence s;
    s.url = "test";
    s.window_T = window;
    for (auto& [g, t] : events) s.events.push_back(Event{g, t, "", Event::kParentUntracked});
    return s;
}

}  // namespace

TEST_CASE("intensity matches the closed form for a two-event sequence") {
    const HawkesParams p = single_group(0.5, 0.4);
    const EventSequence s = seq_of({{0, 0.0}, {0, 1.0}}, 2.0);

    CHECK(intensity(p, s, 0.0, 0) == doctest::Approx(0.5));  // nothing strictly earlier
    // Only the event at t=0 is strictly before t=1: the event at t=1 does not
    // excite itself.
    CHECK(intensity(p, s, 1.0, 0) == doctest::Approx(0.5 + 0.4 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(intensity(p, s, 2.0, 0) ==
          doctest::Approx(0.5 + 0.4 * (std::exp(-2.0) + std::exp(-1.0))).epsilon(1e-12));

    CHECK_THROWS_AS(intensity(p, s, -0.1, 0), std::out_of_range);
    CHECK_THROWS_AS(intensity(p, s, 2.1, 0), std::out_of_range);
    CHECK_THROWS_AS(intensity(p, s, 1.0, 1), std::out_of_range);
}

TEST_CASE("intensity with zero weights is the background rate") {
    HawkesParams p;
    p.mu = {0.3, 0.7};
    p.W = Matrix(2, 2, 0.0);
    const EventSequence s = seq_of({{0, 0.0}, {1, 0.5}, {0, 1.0}}, 5.0);
    for (double t : {0.25, 1.5, 4.0}) {
        CHECK(intensity(p, s, t, 0) == 0.3);
        CHECK(intensity(p, s, t, 1) == 0.7);
    }
}

TEST_CASE("intensity agrees with direct summation on random inputs") {
    auto rng = testutil::rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 1 + rng() % 3;
        const HawkesParams p = testutil::random_params(rng, k, 0.1, 0.6, 0.5, 0.9,
                                                       testutil::unif(rng, 0.5, 2.5));
        EventSequence s;
        s.window_T = 20.0;
        double t = 0.0;
        for (int i = 0; i < 30; ++i) {
            t += testutil::unif(rng, 0.01, 1.0);
            s.events.push_back(Event{rng() % k, t, "", Event::kParentUntracked});
        }
        s.window_T = t + 1.0;
        std::vector<double> times;
        std::vector<std::size_t> gs;
        for (const auto& e : s.events) {
            times.push_back(e.t);
            gs.push_back(e.group);
        }
        for (int q = 0; q < 25; ++q) {
            const double at = testutil::unif(rng, 0.0, s.window_T);
            const std::size_t dest = rng() % k;
            CHECK(intensity(p, s, at, dest) ==
                  doctest::Approx(testutil::naive_intensity(p, times, gs, at, dest)).epsilon(1e-12));
        }
    }
}

TEST_CASE("excitation is additive over disjoint predecessor sets") {
    auto rng = testutil::rng(99);
    const HawkesParams p = testutil::random_params(rng, 2, 0.1, 0.4, 0.5, 0.9);
    EventSequence all, part_a, part_b;
    double t = 0.0;
    for (int i = 0; i < 40; ++i) {
        t += testutil::unif(rng, 0.01, 0.5);
        const Event e{rng() % 2, t, "", Event::kParentUntracked};
        all.events.push_back(e);
        (rng() % 2 == 0 ? part_a : part_b).events.push_back(e);
    }
    all.window_T = part_a.window_T = part_b.window_T = t + 1.0;
    const double at = t + 0.5;
    for (std::size_t dest = 0; dest < 2; ++dest) {
        const double lhs = intensity(p, all, at, dest) - p.mu[dest];
        const double rhs = (intensity(p, part_a, at, dest) - p.mu[dest]) +
                           (intensity(p, part_b, at, dest) - p.mu[dest]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("log-likelihood matches the hand-computed two-event value") {
    const HawkesParams p = single_group(0.5, 0.4);
    const EventSequence s = seq_of({{0, 0.0}, {0, 1.0}}, 2.0);
    const double expected = std::log(0.5) + std::log(0.5 + 0.4 * std::exp(-1.0)) -
                            (0.5 * 2.0 + 0.4 * (1.0 - std::exp(-2.0)) + 0.4 * (1.0 - std::exp(-1.0)));
    CHECK(expected == doctest::Approx(-2.73).epsilon(2e-3));  // sanity on the anchor itself
    CHECK(log_likelihood(p, s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log-likelihood reduces to the Poisson form when W is zero") {
    HawkesParams p;
    p.mu = {0.3, 0.7};
    p.W = Matrix(2, 2, 0.0);
    const EventSequence s = seq_of({{0, 0.2}, {1, 0.9}, {1, 2.4}, {0, 3.3}}, 6.0);
    const double expected = 2.0 * std::log(0.3) + 2.0 * std::log(0.7) - (0.3 + 0.7) * 6.0;
    CHECK(log_likelihood(p, s) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero-intensity events yield minus infinity, not an error") {
    HawkesParams p;
    p.mu = {0.0, 0.5};
    p.W = Matrix(2, 2, 0.0);
    const EventSequence s = seq_of({{0, 1.0}}, 2.0);
    CHECK(log_likelihood(p, s) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("log-likelihood agrees with quadratic-time reference on random data") {
    auto rng = testutil::rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 1 + rng() % 3;
        const HawkesParams gen = testutil::random_params(rng, k, 0.3, 1.0, 0.4, 0.9,
                                                         testutil::unif(rng, 0.5, 2.0));
        SimulationSpec spec;
        spec.params = gen;
        spec.horizon_T = 30.0;
        spec.seed = 1000 + static_cast<std::uint64_t>(trial);
        const EventSequence s = simulate(spec);
        if (s.events.empty()) continue;
        const PreparedSequence prep = prepare(s, k);
        const HawkesParams eval = testutil::random_params(rng, k, 0.2, 0.8, 0.4, 0.9, gen.beta);
        CHECK(log_likelihood(eval, prep) ==
              doctest::Approx(testutil::naive_log_likelihood(eval, prep)).epsilon(1e-9));
    }
}

TEST_CASE("compensator matches trapezoid quadrature") {
    auto rng = testutil::rng(555);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t k = 1 + rng() % 3;
        const HawkesParams p = testutil::random_params(rng, k, 0.3, 1.2, 0.5, 0.9,
                                                       testutil::unif(rng, 0.5, 2.5));
        SimulationSpec spec;
        spec.params = p;
        spec.horizon_T = 15.0;
        spec.seed = 2000 + static_cast<std::uint64_t>(trial);
        const EventSequence s = simulate(spec);
        if (s.events.empty()) continue;
        const PreparedSequence prep = prepare(s, k);
        const double closed = compensator(p, prep);
        const double quad = testutil::quad_compensator(p, prep, 1e-4);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-3));
    }
}

TEST_CASE("prepare strictifies ties and honors the window") {
    EventSequence s = seq_of({{0, 1.0}, {1, 1.0}, {0, 1.0}}, 5.0);
    const PreparedSequence prep = prepare(s, 2);
    REQUIRE(prep.t.size() == 3);
    CHECK(prep.t[0] == 1.0);
    CHECK(prep.t[1] == doctest::Approx(1.0 + 1e-9));
    CHECK(prep.t[2] == doctest::Approx(1.0 + 2e-9));
    CHECK(prep.t[1] > prep.t[0]);
    CHECK(prep.t[2] > prep.t[1]);
    CHECK(prep.g[0] == 0);  // input order preserved
    CHECK(prep.g[1] == 1);
    CHECK(prep.g[2] == 0);
    CHECK(prep.T == 5.0);

    // Ties at the window edge widen T instead of producing t > T.
    EventSequence edge = seq_of({{0, 5.0}, {0, 5.0}}, 5.0);
    const PreparedSequence pe = prepare(edge, 1);
    CHECK(pe.T >= pe.t.back());

    EventSequence unsorted = seq_of({{0, 2.0}, {0, 1.0}}, 5.0);
    const PreparedSequence pu = prepare(unsorted, 1);
    CHECK(pu.t[0] == 1.0);
    CHECK(pu.t[1] == 2.0);

    CHECK_THROWS_AS(prepare(seq_of({}, 1.0), 1), std::invalid_argument);
    CHECK_THROWS_AS(prepare(seq_of({{3, 0.5}}, 1.0), 2), std::invalid_argument);
}

TEST_CASE("stability classification") {
    HawkesParams p;
    p.mu = {0.1, 0.1, 0.1, 0.1};
    p.W = Matrix(4, 4, 0.0);
    for (std::size_t i = 0; i < 4; ++i) p.W(i, i) = 0.5;
    const Stability st = stability(p);
    CHECK(st.spectral_radius == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(st.subcritical);

    p.W(0, 0) = 1.2;
    CHECK_FALSE(stability(p).subcritical);
    CHECK(stability(p).spectral_radius == doctest::Approx(1.2).epsilon(1e-9));
}

TEST_CASE("stationary rates solve the balance equations") {
    HawkesParams p;
    p.mu = {1.0, 0.0};
    p.W = Matrix(2, 2, 0.0);
    p.W(0, 1) = 0.5;
    p.W(1, 1) = 0.5;
    const std::vector<double> rates = stationary_rates(p);
    // Group 0 gets no excitation; group 1 satisfies x1 = 0.5 x0 + 0.5 x1.
    CHECK(rates[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rates[1] == doctest::Approx(1.0).epsilon(1e-12));

    HawkesParams super = single_group(1.0, 1.5);
    CHECK_THROWS_AS(stationary_rates(super), std::domain_error);
}

TEST_CASE("simulation is deterministic per seed") {
    SimulationSpec spec;
    spec.params = single_group(0.5, 0.5);
    spec.horizon_T = 200.0;
    spec.seed = 42;
    const EventSequence a = simulate(spec);
    const EventSequence b = simulate(spec);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].t == b.events[i].t);
        CHECK(a.events[i].group == b.events[i].group);
    }
    spec.seed = 43;
    const EventSequence c = simulate(spec);
    bool identical = a.events.size() == c.events.size();
    for (std::size_t i = 0; identical && i < a.events.size(); ++i)
        identical = a.events[i].t == c.events[i].t;
    CHECK_FALSE(identical);
}

TEST_CASE("simulated events are ordered and inside the horizon") {
    auto rng = testutil::rng(31337);
    for (int trial = 0; trial < 10; ++trial) {
        SimulationSpec spec;
        spec.params = testutil::random_params(rng, 3, 0.1, 0.5, 0.4, 0.9);
        spec.horizon_T = 50.0;
        spec.seed = rng();
        const EventSequence s = simulate(spec);
        CHECK(s.window_T == 50.0);
        double prev = 0.0;
        for (const auto& e : s.events) {
            CHECK(e.t >= prev);
            CHECK(e.t < 50.0);
            CHECK(e.group < 3);
            prev = e.t;
        }
    }
}

TEST_CASE("zero background rate simulates to an empty sequence") {
    SimulationSpec spec;
    spec.params = single_group(0.0, 0.5);
    spec.horizon_T = 100.0;
    CHECK(simulate(spec).events.empty());
}

TEST_CASE("simulation rejects bad specs unless overridden") {
    SimulationSpec spec;
    spec.params = single_group(1.0, 1.5);
    spec.horizon_T = 10.0;
    CHECK_THROWS_WITH_AS(simulate(spec), doctest::Contains("1.5"), ConfigError);
    spec.allow_supercritical = true;
    CHECK_NOTHROW(static_cast<void>(simulate(spec)));

    SimulationSpec flat;
    flat.params = single_group(1.0, 0.0);
    flat.horizon_T = 0.0;
    CHECK_THROWS_AS(simulate(flat), ConfigError);
}

TEST_CASE("homogeneous simulation matches the Poisson rate within 3 percent") {
    SimulationSpec spec;
    spec.params = single_group(2.0, 0.0);
    spec.horizon_T = 1000.0;
    double total = 0.0;
    const int seeds = 100;
    for (int i = 0; i < seeds; ++i) {
        spec.seed = 9000 + static_cast<std::uint64_t>(i);
        total += static_cast<double>(simulate(spec).events.size());
    }
    const double rate = total / (seeds * spec.horizon_T);
    CHECK(rate == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("self-exciting simulation matches the stationary rate within 3 percent") {
    SimulationSpec spec;
    spec.params = single_group(1.0, 0.5);
    spec.horizon_T = 5000.0;
    double total = 0.0;
    const int seeds = 40;
    for (int i = 0; i < seeds; ++i) {
        spec.seed = 100 + static_cast<std::uint64_t>(i);
        total += static_cast<double>(simulate(spec).events.size());
    }
    const double rate = total / (seeds * spec.horizon_T);
    CHECK(rate == doctest::Approx(2.0).epsilon(0.03));  // mu / (1 - w) = 2
}

TEST_CASE("parent bookkeeping is structurally valid and balances the branching ratio") {
    SimulationSpec spec;
    spec.params = single_group(0.5, 0.5);
    spec.horizon_T = 4000.0;
    spec.seed = 7;
    spec.track_parents = true;
    const EventSequence s = simulate(spec);
    REQUIRE(s.events.size() > 1000);
    std::size_t offspring = 0;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const int p = s.events[i].parent;
        CHECK(p >= Event::kParentBackground);
        CHECK(p < static_cast<int>(i));
        if (p >= 0) {
            CHECK(s.events[static_cast<std::size_t>(p)].t < s.events[i].t);
            ++offspring;
        }
    }
    // Fraction of triggered events estimates the branching ratio 0.5.
    const double frac = static_cast<double>(offspring) / static_cast<double>(s.events.size());
    CHECK(frac == doctest::Approx(0.5).epsilon(0.08));

    spec.track_parents = false;
    for (const auto& e : simulate(spec).events) CHECK(e.parent == Event::kParentUntracked);
}

TEST_CASE("compensator-rescaled intervals from simulated data look exponential") {
    auto rng = testutil::rng(2024);
    const HawkesParams p = testutil::random_params(rng, 2, 0.2, 0.5, 0.4, 0.8);
    SimulationSpec spec;
    spec.params = p;
    spec.horizon_T = 1500.0;
    spec.seed = 99;
    const EventSequence s = simulate(spec);
    const PreparedSequence prep = prepare(s, 2);
    const std::vector<double> intervals = testutil::rescaled_intervals(p, prep);
    REQUIRE(intervals.size() > 500);
    CHECK(testutil::ks_exp1_pvalue(intervals) > 0.01);
}

TEST_CASE("likelihood peaks near the generating parameters") {
    const HawkesParams truth = single_group(0.8, 0.4);
    SimulationSpec spec;
    spec.params = truth;
    spec.horizon_T = 2000.0;
    spec.seed = 11;
    const PreparedSequence prep = prepare(simulate(spec), 1);
    const double at_truth = log_likelihood(truth, prep);
    for (const double scale : {0.5, 1.5}) {
        HawkesParams mu_off = truth;
        mu_off.mu[0] *= scale;
        CHECK(log_likelihood(mu_off, prep) < at_truth);
        HawkesParams w_off = truth;
        w_off.W(0, 0) *= scale;
        CHECK(log_likelihood(w_off, prep) < at_truth);
        HawkesParams beta_off = truth;
        beta_off.beta *= scale;
        CHECK(log_likelihood(beta_off, prep) < at_truth);
    }
}

TEST_CASE("parameter validation") {
    HawkesParams p = single_group(0.5, 0.4);
    CHECK_NOTHROW(p.validate());
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = single_group(-0.1, 0.4);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = single_group(0.5, -0.4);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = single_group(0.5, 0.4);
    p.W = Matrix(2, 2, 0.1);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
