#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cascade {

// Empirical CDF over a finite sample: F(x) = (# samples <= x) / n,
// right-continuous with left limits.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> samples);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] std::size_t size() const { return sorted_.size(); }
    [[nodiscard]] const std::vector<double>& sorted() const { return sorted_; }

    // One (x, F(x)) pair per distinct sample value, ascending in x.
    [[nodiscard]] std::vector<std::pair<double, double>> step_points() const;

private:
    std::vector<double> sorted_;
};

struct KsResult {
    double statistic = 0.0;  // sup_x |F1(x) - F2(x)|
    double p_value = 1.0;    // asymptotic two-sided
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

// Two-sample Kolmogorov-Smirnov test. Exact statistic over the pooled
// sample; p-value from the asymptotic Kolmogorov distribution with the
// small-sample effective-size correction.
[[nodiscard]] KsResult ks_two_sample(const std::vector<double>& a,
                                     const std::vector<double>& b);

// P(K > lambda) for the Kolmogorov distribution,
// 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
[[nodiscard]] double kolmogorov_prob(double lambda);

} // namespace cascade
