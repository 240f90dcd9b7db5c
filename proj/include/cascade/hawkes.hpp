#pragma once

#include <cstdint>
#include <vector>

#include "cascade/events.hpp"
#include "cascade/linalg.hpp"

namespace cascade {

// Multivariate Hawkes model with a shared exponential kernel:
//   lambda_k(t) = mu[k] + sum_{t_j < t} W(g_j, k) * beta * exp(-beta (t - t_j))
// W(s, d) is the expected number of direct offspring in group d per event in
// group s (the kernel integrates to one).
struct HawkesParams {
    std::vector<double> mu;  // events/hour, length K
    Matrix W;                // K x K, source row -> destination column
    double beta = 1.0;       // 1/hours

    [[nodiscard]] std::size_t n_groups() const { return mu.size(); }
    void validate() const;  // finite, non-negative, beta > 0, square W
};

struct Stability {
    double spectral_radius = 0.0;
    bool subcritical = true;
};

[[nodiscard]] Stability stability(const HawkesParams& params);

// Expected long-run event rates per group, solving (I - W^T) x = mu.
// Requires a subcritical model.
[[nodiscard]] std::vector<double> stationary_rates(const HawkesParams& params);

// Likelihood computations need strictly increasing times; exact ties are
// perturbed forward by 1e-9 hours in input order, and the window is widened
// to cover any event the perturbation pushed past it.
struct PreparedSequence {
    std::vector<double> t;       // strictly increasing
    std::vector<std::size_t> g;  // group per event
    double T = 0.0;              // >= t.back()
};

[[nodiscard]] PreparedSequence prepare(const EventSequence& seq, std::size_t n_groups);
[[nodiscard]] PreparedSequence prepare(const EventSequence& seq, std::size_t n_groups,
                                       double window_T);

// lambda_k(t) with only events strictly before t contributing. t must lie in
// [0, window_T].
[[nodiscard]] double intensity(const HawkesParams& params, const EventSequence& seq,
                               double t, std::size_t k);

// Integral of the total intensity over [0, T] in closed form.
[[nodiscard]] double compensator(const HawkesParams& params, const PreparedSequence& seq);

// Full log-likelihood; -infinity when some event has zero intensity (a
// degenerate parameterization, not an error).
[[nodiscard]] double log_likelihood(const HawkesParams& params,
                                    const PreparedSequence& seq);
[[nodiscard]] double log_likelihood(const HawkesParams& params, const EventSequence& seq);

struct SimulationSpec {
    HawkesParams params;
    double horizon_T = 0.0;  // hours
    std::uint64_t seed = 0;
    bool allow_supercritical = false;
    bool track_parents = false;  // record each event's parent index (-1 = background)
};

// Ogata's modified thinning; deterministic for a given seed. Events get
// parent bookkeeping when requested, for attribution ground truth.
[[nodiscard]] EventSequence simulate(const SimulationSpec& spec);

} // namespace cascade
