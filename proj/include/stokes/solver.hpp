#pragma once

#include <memory>
#include <vector>

#include "stokes/assembly.hpp"
#include "stokes/sparse.hpp"

namespace stokes {

/// Sparse LU factorization of a square (possibly indefinite) matrix.
/// Immutable once built; concurrent solves with distinct right-hand sides are
/// serialized internally.
class Factorization {
  public:
    explicit Factorization(const SparseMatrix& m);

    std::vector<double> solve(const std::vector<double>& rhs) const;
    int size() const;
    long long factor_nonzeros() const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

Factorization factor(const SparseMatrix& m);

/// ||M x - rhs||_2 scaled by (||M||_max ||x||_2 + ||rhs||_2).
double relative_residual(const SparseMatrix& m, const std::vector<double>& x,
                         const std::vector<double>& rhs);

struct SaddleSolve {
    THSolution solution;
    double residual = 0.0;  // relative residual of the mean-augmented system
};

// Direct solution of the mean-augmented saddle system. The multiplier couples
// every pressure dof, and that dense row ruins sparse-LU fill, so it is
// eliminated up front: compatibility with the left kernel (0, 1) of the
// saddle block fixes nu = sum(rhs_p)/|Omega|, a pinned sparse solve handles
// the rest, and the pressure is shifted back to the mean-zero gauge. The
// result solves attach_mean_zero(system) to the reported residual.
SaddleSolve solve_saddle(const SaddleSystem& system);

}  // namespace stokes
