#include "cascade/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cascade {

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve: shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) < 1e-300)
            throw std::domain_error("solve: singular matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
        x[i] = s / a(i, i);
    }
    return x;
}

Matrix solve(const Matrix& a, const Matrix& b) {
    Matrix x(b.rows(), b.cols());
    std::vector<double> col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        const std::vector<double> xj = solve(a, col);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = xj[i];
    }
    return x;
}

namespace {

// Strongly connected components of the sparsity digraph (edge i->j iff
// w(i,j) > 0), Kosaraju order. The Collatz-Wielandt bounds used below only
// close for irreducible matrices, so the radius is taken blockwise:
// rho(W) = max over components of the block radius.
std::vector<std::vector<std::size_t>> components(const Matrix& w) {
    const std::size_t n = w.rows();
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        // iterative DFS, post-order
        std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
        seen[start] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            bool descended = false;
            for (std::size_t j = next; j < n; ++j) {
                if (w(v, j) > 0.0 && !seen[j]) {
                    next = j + 1;
                    seen[j] = 1;
                    stack.emplace_back(j, 0);
                    descended = true;
                    break;
                }
            }
            if (!descended) {
                order.push_back(v);
                stack.pop_back();
            }
        }
    }
    std::vector<std::vector<std::size_t>> comps;
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t idx = n; idx-- > 0;) {
        const std::size_t root = order[idx];
        if (seen[root]) continue;
        comps.emplace_back();
        std::vector<std::size_t> stack{root};
        seen[root] = 1;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            comps.back().push_back(v);
            for (std::size_t j = 0; j < n; ++j)
                if (w(j, v) > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
        }
    }
    return comps;
}

double irreducible_radius(const Matrix& w, const std::vector<std::size_t>& comp,
                          double rel_tol, std::size_t max_iter) {
    const std::size_t m = comp.size();
    if (m == 1) return w(comp[0], comp[0]);

    double max_row_sum = 0.0;
    for (std::size_t i : comp) {
        double s = 0.0;
        for (std::size_t j : comp) s += w(i, j);
        max_row_sum = std::max(max_row_sum, s);
    }
    // Perron root of W + eps*I is exactly rho(W) + eps for non-negative W;
    // the shift makes periodic blocks primitive so the bounds converge.
    const double eps = 0.1 * max_row_sum;
    std::vector<double> x(m, 1.0), y(m, 0.0);
    for (std::size_t it = 0; it < max_iter; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = eps * x[i];
            for (std::size_t j = 0; j < m; ++j) s += w(comp[i], comp[j]) * x[j];
            y[i] = s;
            const double ratio = s / x[i];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            norm = std::max(norm, s);
        }
        if (hi - lo <= rel_tol * hi) return 0.5 * (hi + lo) - eps;
        const double inv = 1.0 / norm;
        for (std::size_t i = 0; i < m; ++i) x[i] = y[i] * inv;
    }
    throw std::runtime_error("spectral_radius: power iteration did not converge");
}

} // namespace

double spectral_radius(const Matrix& w, double rel_tol, std::size_t max_iter) {
    const std::size_t n = w.rows();
    if (w.cols() != n) throw std::invalid_argument("spectral_radius: matrix not square");
    if (n == 0) return 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(w(i, j) >= 0.0) || !std::isfinite(w(i, j)))
                throw std::invalid_argument("spectral_radius: entries must be finite and >= 0");

    double radius = 0.0;
    for (const auto& comp : components(w))
        radius = std::max(radius, irreducible_radius(w, comp, rel_tol, max_iter));
    return radius;
}

} // namespace cascade
