#include "cascade/influence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cascade {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const Matrix& w, const std::vector<std::size_t>& counts) {
    if (w.rows() != w.cols()) throw std::invalid_argument("impact: W must be square");
    if (counts.size() != w.rows())
        throw std::invalid_argument("impact: event counts must match W's dimension");
}

Matrix attribute(const Matrix& offspring, const std::vector<std::size_t>& counts) {
    const std::size_t k = offspring.rows();
    Matrix pct(k, k);
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t d = 0; d < k; ++d)
            pct(s, d) = counts[d] == 0
                            ? kNaN
                            : 100.0 * offspring(s, d) * static_cast<double>(counts[s]) /
                                  static_cast<double>(counts[d]);
    return pct;
}

} // namespace

Matrix direct_impact(const Matrix& mean_w, const std::vector<std::size_t>& event_counts) {
    check_shapes(mean_w, event_counts);
    return attribute(mean_w, event_counts);
}

Matrix total_impact(const Matrix& mean_w, const std::vector<std::size_t>& event_counts) {
    check_shapes(mean_w, event_counts);
    const double radius = spectral_radius(mean_w);
    if (radius >= 1.0)
        throw std::domain_error("total impact undefined: spectral radius " +
                                std::to_string(radius) + " >= 1");
    // X = (I - W)^{-1} W sums the whole generation series W + W^2 + ...
    const std::size_t k = mean_w.rows();
    Matrix lhs = Matrix::identity(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) lhs(i, j) -= mean_w(i, j);
    return attribute(solve(lhs, mean_w), event_counts);
}

ImpactMatrix impact(const Matrix& mean_w, const std::vector<std::size_t>& event_counts) {
    ImpactMatrix im;
    im.n_groups = mean_w.rows();
    im.event_counts = event_counts;
    im.direct_pct = direct_impact(mean_w, event_counts);
    im.total_pct = total_impact(mean_w, event_counts);
    return im;
}

CategoryComparison compare_categories(const AggregateResult& agg) {
    CategoryComparison cmp;
    cmp.n_groups = agg.n_groups;
    const std::size_t r = static_cast<std::size_t>(AggCategory::RussianState);
    const std::size_t o = static_cast<std::size_t>(AggCategory::OtherNews);
    const bool have_both = agg.n_fits[r] > 0 && agg.n_fits[o] > 0;

    for (std::size_t s = 0; s < agg.n_groups; ++s) {
        for (std::size_t d = 0; d < agg.n_groups; ++d) {
            PairComparison pair;
            pair.source = s;
            pair.dest = d;
            pair.sufficient = have_both;
            if (have_both) {
                pair.mean_russian = agg.mean_W[r](s, d);
                pair.mean_other = agg.mean_W[o](s, d);
                pair.percent_change =
                    pair.mean_other > 0.0
                        ? 100.0 * (pair.mean_russian - pair.mean_other) / pair.mean_other
                        : kNaN;
                pair.ks = ks_two_sample(agg.pair_samples(AggCategory::RussianState, s, d),
                                        agg.pair_samples(AggCategory::OtherNews, s, d));
                pair.stars = pair.ks.p_value < 0.01 ? 2 : (pair.ks.p_value < 0.05 ? 1 : 0);
            } else {
                pair.percent_change = kNaN;
                pair.ks.statistic = kNaN;
                pair.ks.p_value = kNaN;
            }
            cmp.pairs.push_back(pair);
        }
    }
    return cmp;
}

} // namespace cascade
