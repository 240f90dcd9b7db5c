#include "cascade/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cascade/numeric.hpp"

namespace cascade {

void FitConfig::validate() const {
    if (beta_grid.empty()) throw std::invalid_argument("FitConfig: empty beta grid");
    for (double b : beta_grid)
        if (!(b > 0.0) || !std::isfinite(b))
            throw std::invalid_argument("FitConfig: beta grid entries must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("FitConfig: tol must be positive");
    if (max_iter == 0) throw std::invalid_argument("FitConfig: max_iter must be >= 1");
    for (const auto& p : {mu_prior, w_prior}) {
        if (!(p.rate > 0.0))
            throw std::invalid_argument("FitConfig: prior rates must be positive");
        // shape < 1 would allow negative maximum-a-posteriori updates
        if (!(p.shape >= 1.0))
            throw std::invalid_argument("FitConfig: prior shapes must be >= 1");
    }
}

double penalized_log_likelihood(const HawkesParams& params, const PreparedSequence& seq,
                                const FitConfig& config) {
    double pen = log_likelihood(params, seq);
    for (double m : params.mu)
        pen += (config.mu_prior.shape - 1.0) * std::log(m) - config.mu_prior.rate * m;
    const std::size_t k = params.n_groups();
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t d = 0; d < k; ++d)
            pen += (config.w_prior.shape - 1.0) * std::log(params.W(s, d)) -
                   config.w_prior.rate * params.W(s, d);
    return pen;
}

Responsibilities responsibilities(const HawkesParams& params, const PreparedSequence& seq) {
    params.validate();
    const std::size_t k = params.n_groups();
    const std::size_t n = seq.t.size();
    Responsibilities resp;
    resp.background.assign(n, 0.0);
    resp.by_source_group = Matrix(n, k);

    std::vector<double> r(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double decay = std::exp(-params.beta * (seq.t[i] - seq.t[i - 1]));
            for (std::size_t s = 0; s < k; ++s) {
                if (s == seq.g[i - 1]) r[s] += 1.0;
                r[s] *= decay;
            }
        }
        const std::size_t d = seq.g[i];
        double lam = params.mu[d];
        for (std::size_t s = 0; s < k; ++s) lam += params.W(s, d) * params.beta * r[s];
        if (!(lam > 0.0))
            throw std::runtime_error(
                "responsibilities: zero intensity at an event (all responsibilities "
                "vanish); positive priors should prevent this");
        resp.background[i] = params.mu[d] / lam;
        for (std::size_t s = 0; s < k; ++s)
            resp.by_source_group(i, s) = params.W(s, d) * params.beta * r[s] / lam;
    }
    return resp;
}

namespace {

struct EmWorkspace {
    std::vector<double> decay;   // exp(-beta (t_i - t_{i-1})), decay[0] unused
    std::vector<double> g_mass;  // per source group: sum_j (1 - exp(-beta (T - t_j)))
    std::vector<std::size_t> counts;
};

EmWorkspace make_workspace(const PreparedSequence& seq, std::size_t k, double beta) {
    EmWorkspace ws;
    const std::size_t n = seq.t.size();
    ws.decay.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        ws.decay[i] = std::exp(-beta * (seq.t[i] - seq.t[i - 1]));
    ws.g_mass.assign(k, 0.0);
    ws.counts.assign(k, 0);
    for (std::size_t j = 0; j < n; ++j) {
        ws.g_mass[seq.g[j]] += 1.0 - std::exp(-beta * (seq.T - seq.t[j]));
        ws.counts[seq.g[j]] += 1;
    }
    return ws;
}

double prior_penalty(const HawkesParams& params, const FitConfig& config) {
    double pen = 0.0;
    for (double m : params.mu)
        pen += (config.mu_prior.shape - 1.0) * std::log(m) - config.mu_prior.rate * m;
    const std::size_t k = params.n_groups();
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t d = 0; d < k; ++d)
            pen += (config.w_prior.shape - 1.0) * std::log(params.W(s, d)) -
                   config.w_prior.rate * params.W(s, d);
    return pen;
}

FitResult degenerate_fit(const EventSequence& seq, std::size_t k,
                         const FitConfig& config, double beta) {
    const PreparedSequence prep = prepare(seq, k);
    FitResult res;
    res.url = seq.url;
    res.category = seq.category;
    res.beta = beta;
    res.degenerate = true;
    res.converged = true;
    res.n_events_per_group.assign(k, 0);
    for (std::size_t g : prep.g) ++res.n_events_per_group[g];

    // Too little data for EM: prior means everywhere, except the background
    // rate of groups we did observe, which gets the smoothed point estimate.
    HawkesParams p;
    p.beta = beta;
    p.mu.assign(k, config.mu_prior.shape / config.mu_prior.rate);
    for (std::size_t g = 0; g < k; ++g)
        if (res.n_events_per_group[g] > 0)
            p.mu[g] = (config.mu_prior.shape - 1.0 +
                       static_cast<double>(res.n_events_per_group[g])) /
                      (config.mu_prior.rate + prep.T);
    p.W = Matrix(k, k, config.w_prior.shape / config.w_prior.rate);
    res.params = std::move(p);
    res.loglik = log_likelihood(res.params, prep);
    res.penalized = res.loglik + prior_penalty(res.params, config);
    res.trace.push_back(res.penalized);
    return res;
}

} // namespace

FitResult em_fit(const EventSequence& seq, std::size_t n_groups, const FitConfig& config,
                 double beta) {
    config.validate();
    const std::size_t k = n_groups;
    const std::size_t n = seq.events.size();
    if (n < config.min_events_full_fit) return degenerate_fit(seq, k, config, beta);

    const PreparedSequence prep = prepare(seq, k);
    const EmWorkspace ws = make_workspace(prep, k, beta);

    FitResult res;
    res.url = seq.url;
    res.category = seq.category;
    res.beta = beta;
    res.n_events_per_group = ws.counts;

    HawkesParams params;
    params.beta = beta;
    params.mu.assign(k, 0.0);
    for (std::size_t g = 0; g < k; ++g)
        params.mu[g] = 0.5 * (static_cast<double>(ws.counts[g]) + 1.0) / prep.T;
    params.W = Matrix(k, k, 0.2);

    const double a0 = config.mu_prior.shape, b0 = config.mu_prior.rate;
    const double a1 = config.w_prior.shape, b1 = config.w_prior.rate;

    std::vector<double> r(k, 0.0);          // decayed excitation per source group
    std::vector<double> s_bg(k, 0.0);       // background responsibility mass
    Matrix s_w(k, k);                       // responsibility mass per (source, dest)
    double pll_prev = 0.0;

    for (std::size_t it = 0;; ++it) {
        // Single fused pass: responsibilities, their group-level sums, and the
        // data log-likelihood at the current parameters.
        std::fill(r.begin(), r.end(), 0.0);
        std::fill(s_bg.begin(), s_bg.end(), 0.0);
        s_w = Matrix(k, k);
        NeumaierSum log_term;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) {
                const double decay = ws.decay[i];
                for (std::size_t s = 0; s < k; ++s) {
                    if (s == prep.g[i - 1]) r[s] += 1.0;
                    r[s] *= decay;
                }
            }
            const std::size_t d = prep.g[i];
            double lam = params.mu[d];
            for (std::size_t s = 0; s < k; ++s) lam += params.W(s, d) * beta * r[s];
            if (!(lam > 0.0))
                throw std::runtime_error("em_fit: zero intensity at an event");
            log_term.add(std::log(lam));
            s_bg[d] += params.mu[d] / lam;
            for (std::size_t s = 0; s < k; ++s)
                s_w(s, d) += params.W(s, d) * beta * r[s] / lam;
        }

        double comp = 0.0;
        for (std::size_t g = 0; g < k; ++g) comp += params.mu[g] * prep.T;
        for (std::size_t s = 0; s < k; ++s) {
            double row = 0.0;
            for (std::size_t d = 0; d < k; ++d) row += params.W(s, d);
            comp += row * ws.g_mass[s];
        }
        const double loglik = log_term.value() - comp;
        const double pll = loglik + prior_penalty(params, config);
        res.trace.push_back(pll);
        res.loglik = loglik;
        res.penalized = pll;

        if (it > 0 && std::fabs(pll - pll_prev) <= config.tol * (1.0 + std::fabs(pll_prev))) {
            res.converged = true;
            break;
        }
        if (it >= config.max_iter) break;
        pll_prev = pll;

        for (std::size_t g = 0; g < k; ++g)
            params.mu[g] = (a0 - 1.0 + s_bg[g]) / (b0 + prep.T);
        for (std::size_t s = 0; s < k; ++s)
            for (std::size_t d = 0; d < k; ++d)
                params.W(s, d) = (a1 - 1.0 + s_w(s, d)) / (b1 + ws.g_mass[s]);
    }

    res.iterations = res.trace.size() - 1;
    res.params = std::move(params);
    return res;
}

FitResult select_beta(const EventSequence& seq, std::size_t n_groups,
                      const FitConfig& config) {
    config.validate();
    std::vector<double> grid = config.beta_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    FitResult best;
    bool have = false;
    for (double beta : grid) {
        FitResult cur = em_fit(seq, n_groups, config, beta);
        if (!have || cur.penalized > best.penalized + 1e-10) {
            best = std::move(cur);
            have = true;
        }
    }
    return best;
}

std::vector<FitResult> fit_corpus(const std::vector<EventSequence>& sequences,
                                  std::size_t n_groups, const FitConfig& config,
                                  std::size_t n_threads) {
    config.validate();
    std::vector<FitResult> results(sequences.size());
    if (sequences.empty()) return results;

    auto fit_one = [&](std::size_t i) {
        try {
            results[i] = select_beta(sequences[i], n_groups, config);
        } catch (const std::exception& e) {
            FitResult fail;
            fail.url = sequences[i].url;
            fail.category = sequences[i].category;
            fail.error = e.what();
            fail.n_events_per_group.assign(n_groups, 0);
            results[i] = std::move(fail);
        }
    };

    std::size_t workers = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
    workers = std::max<std::size_t>(1, std::min(workers, sequences.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < sequences.size(); ++i) fit_one(i);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= sequences.size()) return;
                fit_one(i);
            }
        });
    for (auto& th : pool) th.join();
    return results;
}

std::string_view agg_category_name(AggCategory cat) {
    switch (cat) {
        case AggCategory::RussianState: return "russian_state";
        case AggCategory::OtherNews: return "other_news";
        case AggCategory::All: return "all";
    }
    return "all";
}

std::vector<double> AggregateResult::pair_samples(AggCategory cat, std::size_t s,
                                                  std::size_t d) const {
    const auto& mats = weight_matrices[static_cast<std::size_t>(cat)];
    std::vector<double> out;
    out.reserve(mats.size());
    for (const auto& w : mats) out.push_back(w(s, d));
    return out;
}

AggregateResult aggregate(const std::vector<FitResult>& fits, std::size_t n_groups,
                          bool include_degenerate) {
    AggregateResult agg;
    agg.n_groups = n_groups;
    for (std::size_t c = 0; c < kAggCategories; ++c) {
        agg.mean_mu[c].clear();
        agg.mean_W[c] = Matrix();
    }

    std::array<std::vector<double>, kAggCategories> mu_sum;
    std::array<Matrix, kAggCategories> w_sum;
    for (std::size_t c = 0; c < kAggCategories; ++c) {
        mu_sum[c].assign(n_groups, 0.0);
        w_sum[c] = Matrix(n_groups, n_groups);
    }

    for (const auto& fit : fits) {
        if (!fit.ok()) continue;
        if (fit.degenerate && !include_degenerate) continue;

        std::vector<std::size_t> cats{static_cast<std::size_t>(AggCategory::All)};
        if (fit.category == UrlCategory::RussianState)
            cats.push_back(static_cast<std::size_t>(AggCategory::RussianState));
        else if (fit.category == UrlCategory::OtherNews)
            cats.push_back(static_cast<std::size_t>(AggCategory::OtherNews));

        for (const std::size_t c : cats) {
            agg.n_fits[c] += 1;
            for (std::size_t g = 0; g < n_groups; ++g) mu_sum[c][g] += fit.params.mu[g];
            for (std::size_t s = 0; s < n_groups; ++s)
                for (std::size_t d = 0; d < n_groups; ++d)
                    w_sum[c](s, d) += fit.params.W(s, d);
            agg.weight_matrices[c].push_back(fit.params.W);
        }
    }

    for (std::size_t c = 0; c < kAggCategories; ++c) {
        if (agg.n_fits[c] == 0) continue;  // empty marker: n_fits == 0, empty means
        const double inv = 1.0 / static_cast<double>(agg.n_fits[c]);
        agg.mean_mu[c].assign(n_groups, 0.0);
        agg.mean_W[c] = Matrix(n_groups, n_groups);
        for (std::size_t g = 0; g < n_groups; ++g) agg.mean_mu[c][g] = mu_sum[c][g] * inv;
        for (std::size_t s = 0; s < n_groups; ++s)
            for (std::size_t d = 0; d < n_groups; ++d)
                agg.mean_W[c](s, d) = w_sum[c](s, d) * inv;
    }
    return agg;
}

} // namespace cascade
