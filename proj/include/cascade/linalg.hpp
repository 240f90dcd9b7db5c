#pragma once

#include <cstddef>
#include <vector>

namespace cascade {

// Dense row-major matrix. Sized for the K-by-K weight matrices of this
// project (K is the number of monitored groups), not for serious linear
// algebra workloads.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

Matrix transpose(const Matrix& m);
Matrix multiply(const Matrix& a, const Matrix& b);

// Solves A x = b by Gaussian elimination with partial pivoting.
// Throws std::domain_error on a (numerically) singular system.
std::vector<double> solve(Matrix a, std::vector<double> b);

// Solves A X = B column by column.
Matrix solve(const Matrix& a, const Matrix& b);

// Spectral radius of a square matrix with non-negative entries.
// Power iteration on W + eps*I (the shift makes the iteration converge for
// periodic matrices and changes the Perron root by exactly eps), stopping
// when the Collatz-Wielandt bounds agree to rel_tol.
double spectral_radius(const Matrix& w, double rel_tol = 1e-9,
                       std::size_t max_iter = 500000);

} // namespace cascade
