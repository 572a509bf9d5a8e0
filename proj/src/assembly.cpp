#include "stokes/assembly.hpp"

#include <stdexcept>

namespace stokes {

SaddleSystem assemble_taylor_hood(const Mesh& mesh, const THDofMap& dofs,
                                  const QuadratureRule& rule) {
    SaddleSystem sys;
    sys.n_v = dofs.n_v;
    sys.n_q = dofs.n_q;
    sys.mean.assign(dofs.n_q, 0.0);
    sys.rhs_v.assign(dofs.n_v, 0.0);
    sys.rhs_p.assign(dofs.n_q, 0.0);
    sys.dirichlet_mask.assign(dofs.n_v, 0);
    sys.dirichlet_values.assign(dofs.n_v, 0.0);

    const int nq = static_cast<int>(rule.points.size());
    // P2 barycentric gradients and P1 values at the rule points are
    // element-independent.
    std::vector<std::array<std::array<double, 3>, 6>> p2g(nq);
    std::vector<std::array<double, 3>> p1v(nq);
    for (int q = 0; q < nq; ++q) {
        const auto& p = rule.points[q];
        for (int i = 0; i < 6; ++i) p2g[q][i] = p2_grad_lambda(i, p[0], p[1], p[2]);
        p1v[q] = {p[0], p[1], p[2]};
    }

    std::vector<Triplet> ta, tb;
    ta.reserve(mesh.n_triangles() * 72);
    tb.reserve(mesh.n_triangles() * 72);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        if (g.area <= 0.0)
            throw std::runtime_error("assemble_taylor_hood: degenerate element " +
                                     std::to_string(t));
        const auto& en = dofs.element_nodes[t];
        double ke[6][6] = {};
        double be[6][2][3] = {};  // node, component, pressure vertex
        for (int q = 0; q < nq; ++q) {
            double w = rule.weights[q] * g.area;
            Vec2 gx[6];
            for (int i = 0; i < 6; ++i) gx[i] = grad_to_xy(p2g[q][i], g);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j) ke[i][j] += w * dot(gx[i], gx[j]);
            for (int i = 0; i < 6; ++i)
                for (int k = 0; k < 3; ++k) {
                    be[i][0][k] -= w * p1v[q][k] * gx[i].x;
                    be[i][1][k] -= w * p1v[q][k] * gx[i].y;
                }
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                for (int c = 0; c < 2; ++c)
                    ta.push_back({dofs.vdof(en[i], c), dofs.vdof(en[j], c), ke[i][j]});
        const auto& tr = mesh.triangles[t];
        for (int i = 0; i < 6; ++i)
            for (int c = 0; c < 2; ++c)
                for (int k = 0; k < 3; ++k)
                    tb.push_back({dofs.vdof(en[i], c), tr.v[k], be[i][c][k]});
        for (int k = 0; k < 3; ++k) sys.mean[tr.v[k]] += g.area / 3.0;
    }
    sys.A = SparseMatrix::from_triplets(dofs.n_v, dofs.n_v, std::move(ta));
    sys.B = SparseMatrix::from_triplets(dofs.n_v, dofs.n_q, std::move(tb));
    return sys;
}

std::vector<double> assemble_rhs(const VectorField& f, const Mesh& mesh, const THDofMap& dofs,
                                 const QuadratureRule& rule) {
    std::vector<double> rhs(dofs.n_v, 0.0);
    if (!f) return rhs;
    const int nq = static_cast<int>(rule.points.size());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        const auto& en = dofs.element_nodes[t];
        for (int q = 0; q < nq; ++q) {
            const auto& p = rule.points[q];
            Vec2 x = p[0] * g.v[0] + p[1] * g.v[1] + p[2] * g.v[2];
            Vec2 fv = f(x);
            double w = rule.weights[q] * g.area;
            for (int i = 0; i < 6; ++i) {
                double v = p2_value(i, p[0], p[1], p[2]);
                rhs[dofs.vdof(en[i], 0)] += w * fv.x * v;
                rhs[dofs.vdof(en[i], 1)] += w * fv.y * v;
            }
        }
    }
    return rhs;
}

SaddleSystem apply_dirichlet(SaddleSystem sys, const THDofMap& dofs, const VectorField& g) {
    for (int n = 0; n < dofs.n_vnodes; ++n) {
        if (!dofs.node_on_boundary[n]) continue;
        Vec2 gv = g ? g(dofs.node_pos[n]) : Vec2{0.0, 0.0};
        sys.dirichlet_mask[dofs.vdof(n, 0)] = 1;
        sys.dirichlet_mask[dofs.vdof(n, 1)] = 1;
        sys.dirichlet_values[dofs.vdof(n, 0)] = gv.x;
        sys.dirichlet_values[dofs.vdof(n, 1)] = gv.y;
    }

    // Move pinned-column coupling to the right-hand sides, then overwrite the
    // pinned rows/columns of A with identity and zero the pinned rows of B.
    auto& av = sys.A.values();
    const auto& arp = sys.A.row_ptr();
    const auto& aci = sys.A.col_index();
    for (int r = 0; r < sys.n_v; ++r) {
        if (sys.dirichlet_mask[r]) continue;
        for (int k = arp[r]; k < arp[r + 1]; ++k)
            if (sys.dirichlet_mask[aci[k]]) {
                sys.rhs_v[r] -= av[k] * sys.dirichlet_values[aci[k]];
                av[k] = 0.0;
            }
    }
    auto& bv = sys.B.values();
    const auto& brp = sys.B.row_ptr();
    const auto& bci = sys.B.col_index();
    for (int r = 0; r < sys.n_v; ++r) {
        if (!sys.dirichlet_mask[r]) continue;
        // Pressure rows see -B' u, so the lifted data contributes +B_{r,j} g_r.
        for (int k = brp[r]; k < brp[r + 1]; ++k) {
            sys.rhs_p[bci[k]] += bv[k] * sys.dirichlet_values[r];
            bv[k] = 0.0;
        }
        for (int k = arp[r]; k < arp[r + 1]; ++k) av[k] = (aci[k] == r) ? 1.0 : 0.0;
        sys.rhs_v[r] = sys.dirichlet_values[r];
    }
    return sys;
}

AugmentedSystem attach_mean_zero(const SaddleSystem& sys) {
    AugmentedSystem out;
    out.n_v = sys.n_v;
    out.n_q = sys.n_q;
    const int n = sys.n_v + sys.n_q + 1;
    std::vector<Triplet> tr;
    tr.reserve(sys.A.nnz() + 2 * sys.B.nnz() + 2 * sys.n_q + 1);
    const auto& arp = sys.A.row_ptr();
    const auto& aci = sys.A.col_index();
    const auto& av = sys.A.values();
    for (int r = 0; r < sys.n_v; ++r)
        for (int k = arp[r]; k < arp[r + 1]; ++k) tr.push_back({r, aci[k], av[k]});
    const auto& brp = sys.B.row_ptr();
    const auto& bci = sys.B.col_index();
    const auto& bv = sys.B.values();
    for (int r = 0; r < sys.n_v; ++r)
        for (int k = brp[r]; k < brp[r + 1]; ++k) {
            tr.push_back({r, sys.n_v + bci[k], bv[k]});
            tr.push_back({sys.n_v + bci[k], r, -bv[k]});
        }
    for (int j = 0; j < sys.n_q; ++j) {
        tr.push_back({sys.n_v + j, n - 1, sys.mean[j]});
        tr.push_back({n - 1, sys.n_v + j, sys.mean[j]});
    }
    out.M = SparseMatrix::from_triplets(n, n, std::move(tr));
    out.rhs = sys.rhs_v;
    out.rhs.insert(out.rhs.end(), sys.rhs_p.begin(), sys.rhs_p.end());
    out.rhs.push_back(0.0);
    return out;
}

THSolution split_solution(const AugmentedSystem& sys, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != sys.n_v + sys.n_q + 1)
        throw std::invalid_argument("split_solution: size mismatch");
    THSolution s;
    s.u.assign(x.begin(), x.begin() + sys.n_v);
    s.p.assign(x.begin() + sys.n_v, x.begin() + sys.n_v + sys.n_q);
    s.multiplier = x.back();
    return s;
}

Vec2 th_velocity(const THSolution& sol, const THDofMap& dofs, int t, double l1, double l2,
                 double l3) {
    const auto& en = dofs.element_nodes[t];
    Vec2 u{0.0, 0.0};
    for (int i = 0; i < 6; ++i) {
        double v = p2_value(i, l1, l2, l3);
        u.x += sol.u[dofs.vdof(en[i], 0)] * v;
        u.y += sol.u[dofs.vdof(en[i], 1)] * v;
    }
    return u;
}

std::array<Vec2, 2> th_velocity_gradient(const THSolution& sol, const THDofMap& dofs,
                                         const ElementGeometry& g, int t, double l1, double l2,
                                         double l3) {
    const auto& en = dofs.element_nodes[t];
    std::array<Vec2, 2> grad{Vec2{0, 0}, Vec2{0, 0}};
    for (int i = 0; i < 6; ++i) {
        Vec2 gx = grad_to_xy(p2_grad_lambda(i, l1, l2, l3), g);
        grad[0] = grad[0] + sol.u[dofs.vdof(en[i], 0)] * gx;
        grad[1] = grad[1] + sol.u[dofs.vdof(en[i], 1)] * gx;
    }
    return grad;
}

double th_pressure(const THSolution& sol, const Mesh& mesh, int t, double l1, double l2,
                   double l3) {
    const auto& tr = mesh.triangles[t];
    return sol.p[tr.v[0]] * l1 + sol.p[tr.v[1]] * l2 + sol.p[tr.v[2]] * l3;
}

double th_divergence(const THSolution& sol, const THDofMap& dofs, const ElementGeometry& g, int t,
                     double l1, double l2, double l3) {
    auto grad = th_velocity_gradient(sol, dofs, g, t, l1, l2, l3);
    return grad[0].x + grad[1].y;
}

}  // namespace stokes
