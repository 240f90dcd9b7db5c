#include "cascade/hawkes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "cascade/errors.hpp"
#include "cascade/numeric.hpp"

namespace cascade {

namespace {

constexpr double kTieStep = 1e-9;  // hours; forced gap between equal timestamps

double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

void HawkesParams::validate() const {
    const std::size_t k = mu.size();
    if (k == 0) throw std::invalid_argument("HawkesParams: empty mu");
    if (W.rows() != k || W.cols() != k)
        throw std::invalid_argument("HawkesParams: W must be K x K");
    for (double m : mu)
        if (!std::isfinite(m) || m < 0.0)
            throw std::invalid_argument("HawkesParams: mu entries must be finite and >= 0");
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (!std::isfinite(W(i, j)) || W(i, j) < 0.0)
                throw std::invalid_argument(
                    "HawkesParams: W entries must be finite and >= 0");
    if (!std::isfinite(beta) || beta <= 0.0)
        throw std::invalid_argument("HawkesParams: beta must be positive");
}

Stability stability(const HawkesParams& params) {
    params.validate();
    const double radius = spectral_radius(params.W);
    return Stability{radius, radius < 1.0};
}

std::vector<double> stationary_rates(const HawkesParams& params) {
    const auto st = stability(params);
    if (!st.subcritical)
        throw std::domain_error("stationary rates undefined: spectral radius " +
                                std::to_string(st.spectral_radius) + " >= 1");
    const std::size_t k = params.n_groups();
    Matrix a = Matrix::identity(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) a(i, j) -= params.W(j, i);
    return solve(a, params.mu);
}

PreparedSequence prepare(const EventSequence& seq, std::size_t n_groups) {
    return prepare(seq, n_groups, seq.window_T);
}

PreparedSequence prepare(const EventSequence& seq, std::size_t n_groups,
                         double window_T) {
    if (seq.events.empty()) throw std::invalid_argument("prepare: empty sequence");
    if (!(window_T > 0.0)) throw std::invalid_argument("prepare: window must be positive");

    PreparedSequence p;
    p.t.reserve(seq.events.size());
    p.g.reserve(seq.events.size());
    bool sorted = true;
    for (const auto& e : seq.events) {
        if (e.group >= n_groups)
            throw std::invalid_argument("prepare: event group out of range");
        if (!p.t.empty() && e.t < p.t.back()) sorted = false;
        p.t.push_back(e.t);
        p.g.push_back(e.group);
    }
    if (!sorted) {
        std::vector<std::size_t> order(p.t.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return p.t[a] < p.t[b]; });
        PreparedSequence q;
        q.t.reserve(p.t.size());
        q.g.reserve(p.g.size());
        for (std::size_t i : order) {
            q.t.push_back(p.t[i]);
            q.g.push_back(p.g[i]);
        }
        p.t = std::move(q.t);
        p.g = std::move(q.g);
    }
    for (std::size_t i = 1; i < p.t.size(); ++i)
        if (p.t[i] <= p.t[i - 1]) p.t[i] = p.t[i - 1] + kTieStep;
    p.T = std::max(window_T, p.t.back());
    return p;
}

double intensity(const HawkesParams& params, const EventSequence& seq, double t,
                 std::size_t k) {
    params.validate();
    if (k >= params.n_groups()) throw std::out_of_range("intensity: group out of range");
    if (t < 0.0 || t > seq.window_T)
        throw std::out_of_range("intensity: t outside [0, window]");
    double lam = params.mu[k];
    for (const auto& e : seq.events) {
        if (!(e.t < t)) continue;  // strictly-prior events only
        lam += params.W(e.group, k) * params.beta * std::exp(-params.beta * (t - e.t));
    }
    return lam;
}

double compensator(const HawkesParams& params, const PreparedSequence& seq) {
    const std::size_t k = params.n_groups();
    std::vector<double> row_sum(k, 0.0);
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t d = 0; d < k; ++d) row_sum[s] += params.W(s, d);

    NeumaierSum total;
    for (std::size_t s = 0; s < k; ++s) total.add(params.mu[s] * seq.T);
    for (std::size_t j = 0; j < seq.t.size(); ++j)
        total.add(row_sum[seq.g[j]] * (1.0 - std::exp(-params.beta * (seq.T - seq.t[j]))));
    return total.value();
}

double log_likelihood(const HawkesParams& params, const PreparedSequence& seq) {
    params.validate();
    const std::size_t k = params.n_groups();
    const std::size_t n = seq.t.size();

    // r[s] = sum over prior events j in group s of exp(-beta (t_i - t_j)),
    // advanced by one decay step per event.
    std::vector<double> r(k, 0.0);
    NeumaierSum log_term;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double decay = std::exp(-params.beta * (seq.t[i] - seq.t[i - 1]));
            for (std::size_t s = 0; s < k; ++s) {
                if (s == seq.g[i - 1]) r[s] += 1.0;
                r[s] *= decay;
            }
        }
        double lam = params.mu[seq.g[i]];
        for (std::size_t s = 0; s < k; ++s) lam += params.W(s, seq.g[i]) * params.beta * r[s];
        if (!(lam > 0.0)) return -std::numeric_limits<double>::infinity();
        log_term.add(std::log(lam));
    }
    return log_term.value() - compensator(params, seq);
}

double log_likelihood(const HawkesParams& params, const EventSequence& seq) {
    return log_likelihood(params, prepare(seq, params.n_groups()));
}

EventSequence simulate(const SimulationSpec& spec) {
    const HawkesParams& par = spec.params;
    par.validate();
    if (!(spec.horizon_T > 0.0) || !std::isfinite(spec.horizon_T))
        throw ConfigError("simulate: horizon must be positive and finite");
    if (!spec.allow_supercritical) {
        const auto st = stability(par);
        if (!st.subcritical)
            throw ConfigError("simulate: supercritical parameters (spectral radius " +
                              std::to_string(st.spectral_radius) +
                              " >= 1); pass the override to proceed");
    }

    const std::size_t k = par.n_groups();
    std::mt19937_64 rng(spec.seed);

    EventSequence seq;
    seq.category = UrlCategory::Other;
    seq.window_T = spec.horizon_T;

    // Decayed excitation per source group and, for parent draws, the accepted
    // event indices per group (weights recomputed on demand).
    std::vector<double> excite(k, 0.0);
    std::vector<std::vector<std::size_t>> members(k);
    std::vector<double> lam(k, 0.0);

    double t = 0.0;
    double bound = 0.0;
    for (std::size_t s = 0; s < k; ++s) bound += par.mu[s];
    const double mu_total = bound;
    if (!(mu_total > 0.0)) return seq;  // intensity can never leave zero

    while (true) {
        const double wait = -std::log1p(-uniform53(rng)) / bound;
        const double cand = t + wait;
        if (cand >= spec.horizon_T) break;

        const double decay = std::exp(-par.beta * (cand - t));
        for (std::size_t s = 0; s < k; ++s) excite[s] *= decay;

        double lam_total = 0.0;
        for (std::size_t d = 0; d < k; ++d) {
            double x = par.mu[d];
            for (std::size_t s = 0; s < k; ++s) x += par.W(s, d) * par.beta * excite[s];
            lam[d] = x;
            lam_total += x;
        }

        t = cand;
        if (uniform53(rng) * bound > lam_total) {
            bound = lam_total;  // rejected; the decayed total stays an upper bound
            continue;
        }

        std::size_t dest = k - 1;
        double pick = uniform53(rng) * lam_total;
        for (std::size_t d = 0; d < k; ++d) {
            if (pick < lam[d]) {
                dest = d;
                break;
            }
            pick -= lam[d];
        }

        Event ev;
        ev.group = dest;
        ev.t = cand;
        if (spec.track_parents) {
            ev.parent = Event::kParentBackground;
            double mix = uniform53(rng) * lam[dest] - par.mu[dest];
            if (mix >= 0.0) {
                // mix >= 0 implies positive excitation mass toward dest
                std::size_t src = k;
                for (std::size_t s = 0; s < k; ++s) {
                    const double mass = par.W(s, dest) * par.beta * excite[s];
                    if (mass <= 0.0) continue;
                    src = s;
                    if (mix < mass) break;
                    mix -= mass;
                }
                if (src < k) {
                    // within the source group, parent chance decays with age
                    double within = uniform53(rng) * excite[src];
                    std::size_t parent = members[src].back();
                    for (const std::size_t j : members[src]) {
                        const double w = std::exp(-par.beta * (cand - seq.events[j].t));
                        if (within < w) {
                            parent = j;
                            break;
                        }
                        within -= w;
                    }
                    ev.parent = static_cast<int>(parent);
                }
            }
        }

        members[dest].push_back(seq.events.size());
        seq.events.push_back(std::move(ev));
        excite[dest] += 1.0;
        bound = lam_total + par.W(dest, dest) * par.beta;
        for (std::size_t d = 0; d < k; ++d)
            if (d != dest) bound += par.W(dest, d) * par.beta;
    }
    return seq;
}

} // namespace cascade
