#pragma once

#include <cstddef>
#include <vector>

#include "cascade/fit.hpp"
#include "cascade/linalg.hpp"
#include "cascade/stats.hpp"

namespace cascade {

// Percentages of destination-group events attributed to source-group
// events. Entries are NaN where the destination saw no events (absent, not
// zero).
struct ImpactMatrix {
    std::size_t n_groups = 0;
    Matrix direct_pct;  // first-generation offspring only
    Matrix total_pct;   // all generations via the Neumann series
    std::vector<std::size_t> event_counts;
};

// direct onset: pct(s, d) = 100 * W(s, d) * N_s / N_d.
[[nodiscard]] Matrix direct_impact(const Matrix& mean_w,
                                   const std::vector<std::size_t>& event_counts);

// All-generations attribution: expected descendants per source event taken
// from (I - W)^{-1} W. Requires a subcritical weight matrix; throws
// std::domain_error carrying the spectral radius otherwise.
[[nodiscard]] Matrix total_impact(const Matrix& mean_w,
                                  const std::vector<std::size_t>& event_counts);

[[nodiscard]] ImpactMatrix impact(const Matrix& mean_w,
                                  const std::vector<std::size_t>& event_counts);

// Russian-state vs other-news weight comparison for one (source, dest) pair.
struct PairComparison {
    std::size_t source = 0;
    std::size_t dest = 0;
    bool sufficient = false;  // both categories retained at least one fit
    double mean_russian = 0.0;
    double mean_other = 0.0;
    double percent_change = 0.0;  // 100 (R - O) / O
    KsResult ks;
    int stars = 0;  // 1: p < 0.05, 2: p < 0.01
};

struct CategoryComparison {
    std::size_t n_groups = 0;
    std::vector<PairComparison> pairs;  // row-major over (source, dest)
};

[[nodiscard]] CategoryComparison compare_categories(const AggregateResult& agg);

} // namespace cascade
