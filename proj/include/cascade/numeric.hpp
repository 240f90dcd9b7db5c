#pragma once

#include <cmath>

namespace cascade {

// Neumaier's compensated summation; keeps long log-likelihood sums stable
// enough for tight monotonicity checks.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    [[nodiscard]] double value() const { return sum + comp; }
};

} // namespace cascade
