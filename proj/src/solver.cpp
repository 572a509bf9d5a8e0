#include "stokes/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace stokes {

struct Factorization::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    mutable std::mutex solve_mutex;
    int n = 0;
};

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseMatrix& m) {
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(m.nnz());
    const auto& rp = m.row_ptr();
    const auto& ci = m.col_index();
    const auto& v = m.values();
    for (int r = 0; r < m.rows(); ++r)
        for (int k = rp[r]; k < rp[r + 1]; ++k) tr.emplace_back(r, ci[k], v[k]);
    Eigen::SparseMatrix<double> e(m.rows(), m.cols());
    e.setFromTriplets(tr.begin(), tr.end());
    e.makeCompressed();
    return e;
}

}  // namespace

Factorization::Factorization(const SparseMatrix& m) : impl_(std::make_shared<Impl>()) {
    if (m.rows() != m.cols()) throw std::invalid_argument("factor: matrix not square");
    impl_->n = m.rows();
    Eigen::SparseMatrix<double> e = to_eigen(m);
    impl_->lu.analyzePattern(e);
    impl_->lu.factorize(e);
    if (impl_->lu.info() != Eigen::Success)
        throw std::runtime_error("factor: singular matrix (" + impl_->lu.lastErrorMessage() + ")");
}

std::vector<double> Factorization::solve(const std::vector<double>& rhs) const {
    if (static_cast<int>(rhs.size()) != impl_->n)
        throw std::invalid_argument("solve: right-hand side size mismatch");
    std::lock_guard<std::mutex> lock(impl_->solve_mutex);
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
    Eigen::VectorXd x = impl_->lu.solve(b);
    if (impl_->lu.info() != Eigen::Success) throw std::runtime_error("solve: back-solve failed");
    return std::vector<double>(x.data(), x.data() + x.size());
}

int Factorization::size() const { return impl_->n; }

long long Factorization::factor_nonzeros() const { return impl_->lu.nnzL() + impl_->lu.nnzU(); }

Factorization factor(const SparseMatrix& m) { return Factorization(m); }

double relative_residual(const SparseMatrix& m, const std::vector<double>& x,
                         const std::vector<double>& rhs) {
    auto mx = m.multiply(x);
    double num = 0.0, xn = 0.0, bn = 0.0, mmax = 0.0;
    for (size_t i = 0; i < mx.size(); ++i) {
        double r = mx[i] - rhs[i];
        num += r * r;
        bn += rhs[i] * rhs[i];
    }
    for (double v : x) xn += v * v;
    for (double v : m.values()) mmax = std::max(mmax, std::abs(v));
    double denom = mmax * std::sqrt(xn) + std::sqrt(bn);
    return denom > 0.0 ? std::sqrt(num) / denom : std::sqrt(num);
}

SaddleSolve solve_saddle(const SaddleSystem& sys) {
    const int nv = sys.n_v, nq = sys.n_q;
    double omega = 0.0, rhs_p_sum = 0.0;
    for (int j = 0; j < nq; ++j) {
        omega += sys.mean[j];
        rhs_p_sum += sys.rhs_p[j];
    }
    const double nu = rhs_p_sum / omega;

    // Saddle block with the first continuity row (redundant once nu is
    // eliminated) replaced by a pressure pin.
    std::vector<Triplet> tr;
    tr.reserve(sys.A.nnz() + 2 * sys.B.nnz() + 1);
    const auto& arp = sys.A.row_ptr();
    const auto& aci = sys.A.col_index();
    const auto& av = sys.A.values();
    for (int r = 0; r < nv; ++r)
        for (int k = arp[r]; k < arp[r + 1]; ++k) tr.push_back({r, aci[k], av[k]});
    const auto& brp = sys.B.row_ptr();
    const auto& bci = sys.B.col_index();
    const auto& bv = sys.B.values();
    for (int r = 0; r < nv; ++r)
        for (int k = brp[r]; k < brp[r + 1]; ++k) {
            tr.push_back({r, nv + bci[k], bv[k]});
            if (bci[k] != 0) tr.push_back({nv + bci[k], r, -bv[k]});
        }
    tr.push_back({nv, nv, 1.0});
    SparseMatrix pinned = SparseMatrix::from_triplets(nv + nq, nv + nq, std::move(tr));

    std::vector<double> rhs(sys.rhs_v);
    rhs.resize(nv + nq);
    for (int j = 0; j < nq; ++j) rhs[nv + j] = sys.rhs_p[j] - nu * sys.mean[j];
    rhs[nv] = 0.0;

    auto x = factor(pinned).solve(rhs);

    SaddleSolve out;
    out.solution.u.assign(x.begin(), x.begin() + nv);
    out.solution.p.assign(x.begin() + nv, x.begin() + nv + nq);
    out.solution.multiplier = nu;
    double mean_p = 0.0;
    for (int j = 0; j < nq; ++j) mean_p += sys.mean[j] * out.solution.p[j];
    double shift = mean_p / omega;
    for (double& p : out.solution.p) p -= shift;

    // Residual of the full mean-augmented system, assembled blockwise.
    auto r_v = sys.A.multiply(out.solution.u);
    auto bp = sys.B.multiply(out.solution.p);
    auto btu = sys.B.multiply_transpose(out.solution.u);
    double num = 0.0, bn = 0.0, xn = 0.0, mmax = 0.0;
    for (int r = 0; r < nv; ++r) {
        double d = r_v[r] + bp[r] - sys.rhs_v[r];
        num += d * d;
        bn += sys.rhs_v[r] * sys.rhs_v[r];
    }
    double mc = 0.0;
    for (int j = 0; j < nq; ++j) {
        double d = -btu[j] + sys.mean[j] * nu - sys.rhs_p[j];
        num += d * d;
        bn += sys.rhs_p[j] * sys.rhs_p[j];
        mc += sys.mean[j] * out.solution.p[j];
    }
    num += mc * mc;
    for (double v : out.solution.u) xn += v * v;
    for (double v : out.solution.p) xn += v * v;
    xn += nu * nu;
    for (double v : sys.A.values()) mmax = std::max(mmax, std::abs(v));
    for (double v : sys.B.values()) mmax = std::max(mmax, std::abs(v));
    for (double v : sys.mean) mmax = std::max(mmax, std::abs(v));
    double denom = mmax * std::sqrt(xn) + std::sqrt(bn);
    out.residual = denom > 0.0 ? std::sqrt(num) / denom : std::sqrt(num);
    return out;
}

}  // namespace stokes
