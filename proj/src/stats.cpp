#include "cascade/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cascade {

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw std::invalid_argument("Ecdf: empty sample");
    for (double v : sorted_)
        if (!std::isfinite(v)) throw std::invalid_argument("Ecdf: non-finite sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, double>> Ecdf::step_points() const {
    std::vector<std::pair<double, double>> pts;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
        pts.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    }
    return pts;
}

double kolmogorov_prob(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1;; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        if (term < 1e-12) break;
        sum += sign * term;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");

    std::vector<double> s1(a), s2(b);
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());

    const std::size_t n1 = s1.size(), n2 = s2.size();

    // Walk the pooled sorted sample keeping integer ranks, evaluating the gap
    // after each tied block is consumed on both sides (the gap before a block
    // was already seen after the previous one). Ranks divide late so D takes
    // exactly the values a direct step-function evaluation produces.
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n1 && j < n2) {
        const double x = std::min(s1[i], s2[j]);
        while (i < n1 && s1[i] == x) ++i;
        while (j < n2 && s2[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / static_cast<double>(n1) -
                                  static_cast<double>(j) / static_cast<double>(n2)));
    }
    d = std::max(d, 1.0 - static_cast<double>(j) / static_cast<double>(n2));
    d = std::max(d, 1.0 - static_cast<double>(i) / static_cast<double>(n1));

    KsResult r;
    r.statistic = d;
    r.n1 = n1;
    r.n2 = n2;
    const double m = static_cast<double>(n1) * static_cast<double>(n2) /
                     static_cast<double>(n1 + n2);
    const double rm = std::sqrt(m);
    r.p_value = kolmogorov_prob((rm + 0.12 + 0.11 / rm) * d);
    return r;
}

} // namespace cascade
