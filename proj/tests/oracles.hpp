// Test-only oracles, kept independent of the library's solver path:
// dense Gaussian elimination with partial pivoting, echelon rank, and a
// deterministic RNG wrapper.
#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

class DenseMatrix {
  public:
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    double& operator()(int i, int j) { return a_[i * cols_ + j]; }
    double operator()(int i, int j) const { return a_[i * cols_ + j]; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

  private:
    int rows_, cols_;
    std::vector<double> a_;
};

inline std::vector<double> gauss_solve(DenseMatrix a, std::vector<double> b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("gauss_solve: shape mismatch");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw std::runtime_error("gauss_solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

/// Numerical rank by row echelon with partial pivoting, relative threshold.
inline int echelon_rank(DenseMatrix a, double rel_tol = 1e-10) {
    const int m = a.rows(), n = a.cols();
    double scale = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) return 0;
    int rank = 0;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int piv = row;
        for (int i = row + 1; i < m; ++i)
            if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
        if (std::abs(a(piv, col)) <= rel_tol * scale) continue;
        if (piv != row)
            for (int j = 0; j < n; ++j) std::swap(a(row, j), a(piv, j));
        for (int i = row + 1; i < m; ++i) {
            double f = a(i, col) / a(row, col);
            for (int j = col; j < n; ++j) a(i, j) -= f * a(row, j);
        }
        ++row;
        ++rank;
    }
    return rank;
}

struct Rng {
    std::mt19937 gen;
    explicit Rng(unsigned seed) : gen(seed) {}
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

}  // namespace oracle
