#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "cascade/hawkes.hpp"

namespace cascade {

struct GammaPrior {
    double shape = 1.01;
    double rate = 0.01;
};

struct FitConfig {
    std::vector<double> beta_grid{1.0};  // 1/hours
    std::size_t max_iter = 500;
    double tol = 1e-6;  // relative change in penalized log-likelihood
    GammaPrior mu_prior{1.01, 0.01};
    GammaPrior w_prior{1.01, 0.01};
    std::size_t min_events_full_fit = 3;

    void validate() const;
};

struct FitResult {
    std::string url;
    UrlCategory category = UrlCategory::Other;
    HawkesParams params;
    double beta = 0.0;       // selected decay
    double loglik = 0.0;     // data log-likelihood at the final parameters
    double penalized = 0.0;  // loglik plus the gamma-prior log densities
    std::size_t iterations = 0;
    bool converged = false;
    bool degenerate = false;  // below min_events_full_fit; no EM ran
    std::string error;        // nonempty when the fit failed
    std::vector<std::size_t> n_events_per_group;
    std::vector<double> trace;  // penalized log-likelihood per EM iteration

    [[nodiscard]] bool ok() const { return error.empty(); }
};

// Penalized objective the EM ascends: data log-likelihood plus
// sum_k [(a0-1) ln mu_k - b0 mu_k] + sum_{s,d} [(a1-1) ln W(s,d) - b1 W(s,d)].
[[nodiscard]] double penalized_log_likelihood(const HawkesParams& params,
                                              const PreparedSequence& seq,
                                              const FitConfig& config);

// Per-event latent-parent responsibilities, aggregated by source group.
// background[i] + sum_s by_source_group(i, s) == 1 for every event.
struct Responsibilities {
    std::vector<double> background;
    Matrix by_source_group;  // n_events x K
};

[[nodiscard]] Responsibilities responsibilities(const HawkesParams& params,
                                                const PreparedSequence& seq);

// MAP-EM over the latent branching structure at a fixed kernel decay.
[[nodiscard]] FitResult em_fit(const EventSequence& seq, std::size_t n_groups,
                               const FitConfig& config, double beta);

// Runs em_fit for each grid decay and keeps the best penalized
// log-likelihood; ties (within 1e-10) go to the smaller beta.
[[nodiscard]] FitResult select_beta(const EventSequence& seq, std::size_t n_groups,
                                    const FitConfig& config);

// One fit per sequence, order-preserving. Failures are recorded in the
// result's error field and never abort the corpus. n_threads = 0 means one
// worker per available core; results are identical for any degree.
[[nodiscard]] std::vector<FitResult> fit_corpus(const std::vector<EventSequence>& sequences,
                                                std::size_t n_groups,
                                                const FitConfig& config,
                                                std::size_t n_threads = 0);

// Aggregation categories: the two news classes plus the everything bucket.
enum class AggCategory : std::size_t { RussianState = 0, OtherNews = 1, All = 2 };
inline constexpr std::size_t kAggCategories = 3;

struct AggregateResult {
    std::size_t n_groups = 0;
    std::array<std::size_t, kAggCategories> n_fits{};  // retained per category
    std::array<std::vector<double>, kAggCategories> mean_mu;
    std::array<Matrix, kAggCategories> mean_W;
    // retained per-URL weight matrices, aggregation order
    std::array<std::vector<Matrix>, kAggCategories> weight_matrices;

    [[nodiscard]] std::vector<double> pair_samples(AggCategory cat, std::size_t s,
                                                   std::size_t d) const;
};

[[nodiscard]] std::string_view agg_category_name(AggCategory cat);

// Arithmetic means over retained fits (successful and, by default,
// non-degenerate). Categories with no retained fits have n_fits == 0 and
// empty mean vectors.
[[nodiscard]] AggregateResult aggregate(const std::vector<FitResult>& fits,
                                        std::size_t n_groups,
                                        bool include_degenerate = false);

} // namespace cascade
