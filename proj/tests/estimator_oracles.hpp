// Shared dense oracles for the error-problem block systems.
#pragma once

#include "oracles.hpp"
#include "stokes/estimator.hpp"

namespace oracle {

inline DenseMatrix dense_from(const stokes::SparseMatrix& m) {
    DenseMatrix d(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
            d(r, m.col_index()[k]) = m.values()[k];
    return d;
}

// Dense assembly of [[D_v, B], [-B', S22]] with S22 either zero (the
// velocity-diagonalized problem) or c_s D_p - B' D_v^-1 B (the fully diagonal
// problem in its equivalent block form).
inline DenseMatrix dense_block_system(const stokes::ErrorMatrices& m, bool fully_diagonal) {
    int nv = static_cast<int>(m.d_v.size());
    int np = static_cast<int>(m.d_p.size());
    DenseMatrix d(nv + np, nv + np);
    for (int i = 0; i < nv; ++i) d(i, i) = m.d_v[i];
    DenseMatrix b = dense_from(m.b);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < np; ++j) {
            d(i, nv + j) = b(i, j);
            d(nv + j, i) = -b(i, j);
        }
    if (fully_diagonal) {
        for (int j = 0; j < np; ++j)
            for (int j2 = 0; j2 < np; ++j2) {
                double schur = 0.0;
                for (int l = 0; l < nv; ++l) schur += b(l, j) * b(l, j2) / m.d_v[l];
                d(nv + j, nv + j2) = (j == j2 ? m.c_s * m.d_p[j] : 0.0) - schur;
            }
    }
    return d;
}

inline std::vector<double> stack_residuals(const stokes::ResidualVectors& r) {
    std::vector<double> rhs = r.f_v;
    rhs.insert(rhs.end(), r.f_p.begin(), r.f_p.end());
    return rhs;
}

}  // namespace oracle
