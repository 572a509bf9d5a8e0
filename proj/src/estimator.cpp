#include "stokes/estimator.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>

namespace stokes {

namespace {

struct ModePointData {
    double value = 0.0;
    Vec2 grad{0.0, 0.0};
};

// The nine bubble modes in canonical local orientation, tabulated once per
// rule: values and barycentric partials at every rule point. Canonical ids:
// 2k = cubic on local edge k, 2k+1 = quartic, 6..8 = element modes. Only the
// cubic is orientation-sensitive and flips sign when the element's global
// vertex order opposes the canonical local order.
struct ModeTable {
    std::vector<std::array<double, 9>> value;               // [point][mode]
    std::vector<std::array<std::array<double, 3>, 9>> dl;   // [point][mode][lambda]
};

const ModeTable& mode_table(const QuadratureRule& rule) {
    static std::mutex mu;
    static std::map<const QuadratureRule*, ModeTable> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(&rule);
    if (it != cache.end()) return it->second;

    std::array<BaryPoly, 9> polys;
    for (int k = 0; k < 3; ++k) {
        BaryPoly la = BaryPoly::lambda((k + 1) % 3), lb = BaryPoly::lambda((k + 2) % 3);
        BaryPoly lab = la * lb;
        polys[2 * k] = lab * la + (lab * lb).scaled(-1.0);
        polys[2 * k + 1] = (la * la) * (lb * lb);
    }
    BaryPoly bt = BaryPoly::lambda(0) * BaryPoly::lambda(1) * BaryPoly::lambda(2);
    polys[6] = bt;
    polys[7] = bt * BaryPoly::lambda(0);
    polys[8] = bt * BaryPoly::lambda(1);

    ModeTable t;
    const int nq = static_cast<int>(rule.points.size());
    t.value.resize(nq);
    t.dl.resize(nq);
    for (int q = 0; q < nq; ++q) {
        const auto& p = rule.points[q];
        for (int i = 0; i < 9; ++i) {
            t.value[q][i] = polys[i].eval(p[0], p[1], p[2]);
            t.dl[q][i] = polys[i].eval_grad_lambda(p[0], p[1], p[2]);
        }
    }
    return cache.emplace(&rule, std::move(t)).first->second;
}

struct ElementModeRef {
    int canonical = 0;   // 0..8
    double sign = 1.0;
};

// Canonical id and cubic orientation sign for every mode of element t, in
// the order of the element's dof-map mode list.
void element_mode_refs(const Mesh& mesh, const BubbleDofMap::ElementModes& em, int t,
                       std::vector<ElementModeRef>& out) {
    const auto& tr = mesh.triangles[t];
    out.clear();
    int n_elem_seen = 0;
    for (const auto& m : em.mode) {
        ElementModeRef ref;
        if (m.kind == BubbleKind::Element) {
            ref.canonical = 6 + n_elem_seen++;
        } else {
            int k = m.local_edge;
            ref.canonical = 2 * k + (m.kind == BubbleKind::EdgeQuartic ? 1 : 0);
            if (m.kind == BubbleKind::EdgeCubic && tr.v[(k + 1) % 3] > tr.v[(k + 2) % 3])
                ref.sign = -1.0;
        }
        out.push_back(ref);
    }
}

// Values and physical gradients of every bubble mode of element t at the
// rule points.
void eval_modes(const Mesh& mesh, const BubbleDofMap::ElementModes& em, int t,
                const ElementGeometry& g, const QuadratureRule& rule,
                std::vector<std::vector<ModePointData>>& out) {
    const ModeTable& table = mode_table(rule);
    static thread_local std::vector<ElementModeRef> refs;
    element_mode_refs(mesh, em, t, refs);
    const int nm = static_cast<int>(em.mode.size());
    const int nq = static_cast<int>(rule.points.size());
    out.assign(nm, std::vector<ModePointData>(nq));
    for (int i = 0; i < nm; ++i) {
        const auto& ref = refs[i];
        for (int q = 0; q < nq; ++q) {
            const auto& dl = table.dl[q][ref.canonical];
            out[i][q].value = ref.sign * table.value[q][ref.canonical];
            out[i][q].grad = ref.sign * grad_to_xy(dl, g);
        }
    }
}

}  // namespace

ResidualVectors assemble_error_residuals(const Mesh& mesh, const DofMaps& dofs,
                                         const THSolution& sol, const VectorField& f,
                                         const QuadratureRule& rule) {
    const BubbleDofMap& bu = dofs.bubble;
    ResidualVectors r;
    r.f_v.assign(bu.n_v, 0.0);
    r.f_p.assign(bu.n_p, 0.0);
    const int nq = static_cast<int>(rule.points.size());
    std::vector<std::vector<ModePointData>> md;
    BaryPoly bt = bubble_pressure_mode();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        const auto& em = bu.elements[t];
        eval_modes(mesh, em, t, g, rule, md);
        double fp = 0.0;
        for (int q = 0; q < nq; ++q) {
            const auto& p = rule.points[q];
            double w = rule.weights[q] * g.area;
            auto grad_u = th_velocity_gradient(sol, dofs.taylor_hood, g, t, p[0], p[1], p[2]);
            double press = th_pressure(sol, mesh, t, p[0], p[1], p[2]);
            Vec2 fv{0.0, 0.0};
            if (f) fv = f(p[0] * g.v[0] + p[1] * g.v[1] + p[2] * g.v[2]);
            for (size_t i = 0; i < em.mode.size(); ++i) {
                const auto& m = md[i][q];
                int base = bu.vdof(em.scalar_mode[i], 0);
                r.f_v[base] += w * (fv.x * m.value - dot(grad_u[0], m.grad) + press * m.grad.x);
                r.f_v[base + 1] += w * (fv.y * m.value - dot(grad_u[1], m.grad) + press * m.grad.y);
            }
            double div_u = grad_u[0].x + grad_u[1].y;
            fp -= w * bt.eval(p[0], p[1], p[2]) * div_u;
        }
        r.f_p[t] = fp;
    }
    return r;
}

ErrorMatrices assemble_error_matrices(const Mesh& mesh, const DofMaps& dofs,
                                      const QuadratureRule& rule) {
    const BubbleDofMap& bu = dofs.bubble;
    ErrorMatrices m;
    m.d_v.assign(bu.n_v, 0.0);
    m.c_s = bu.c_s;
    std::vector<Triplet> tb;
    tb.reserve(mesh.n_triangles() * 18);
    const int nq = static_cast<int>(rule.points.size());
    std::vector<std::vector<ModePointData>> md;
    BaryPoly bt = bubble_pressure_mode();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        const auto& em = bu.elements[t];
        eval_modes(mesh, em, t, g, rule, md);
        for (size_t i = 0; i < em.mode.size(); ++i) {
            double stiff = 0.0, bx = 0.0, by = 0.0;
            for (int q = 0; q < nq; ++q) {
                const auto& p = rule.points[q];
                double w = rule.weights[q] * g.area;
                stiff += w * dot(md[i][q].grad, md[i][q].grad);
                double bq = bt.eval(p[0], p[1], p[2]);
                bx -= w * bq * md[i][q].grad.x;
                by -= w * bq * md[i][q].grad.y;
            }
            int base = bu.vdof(em.scalar_mode[i], 0);
            m.d_v[base] += stiff;
            m.d_v[base + 1] += stiff;
            tb.push_back({base, t, bx});
            tb.push_back({base + 1, t, by});
        }
    }
    m.b = SparseMatrix::from_triplets(bu.n_v, bu.n_p, std::move(tb));

    m.d_p.assign(bu.n_p, 0.0);
    const auto& rp = m.b.row_ptr();
    const auto& ci = m.b.col_index();
    const auto& bv = m.b.values();
    for (int r = 0; r < bu.n_v; ++r) {
        if (m.d_v[r] <= 0.0)
            throw std::runtime_error("assemble_error_matrices: nonpositive stiffness diagonal at "
                                     "bubble dof " +
                                     std::to_string(r));
        for (int k = rp[r]; k < rp[r + 1]; ++k) m.d_p[ci[k]] += bv[k] * bv[k] / m.d_v[r];
    }
    return m;
}

SparseMatrix assemble_bubble_stiffness(const Mesh& mesh, const DofMaps& dofs,
                                       const QuadratureRule& rule) {
    const BubbleDofMap& bu = dofs.bubble;
    std::vector<Triplet> tr;
    tr.reserve(mesh.n_triangles() * 81 * 2);
    const int nq = static_cast<int>(rule.points.size());
    std::vector<std::vector<ModePointData>> md;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        const auto& em = bu.elements[t];
        eval_modes(mesh, em, t, g, rule, md);
        for (size_t i = 0; i < em.mode.size(); ++i)
            for (size_t j = 0; j < em.mode.size(); ++j) {
                double s = 0.0;
                for (int q = 0; q < nq; ++q)
                    s += rule.weights[q] * g.area * dot(md[i][q].grad, md[j][q].grad);
                for (int c = 0; c < 2; ++c)
                    tr.push_back(
                        {bu.vdof(em.scalar_mode[i], c), bu.vdof(em.scalar_mode[j], c), s});
            }
    }
    return SparseMatrix::from_triplets(bu.n_v, bu.n_v, std::move(tr));
}

ErrorCoefficients solve_error_problem_diagonal(const ErrorMatrices& m, const ResidualVectors& r) {
    const int nv = static_cast<int>(m.d_v.size());
    const int np = static_cast<int>(m.d_p.size());
    ErrorCoefficients c;
    c.x_p.assign(np, 0.0);
    c.x_u.assign(nv, 0.0);

    const auto& rp = m.b.row_ptr();
    const auto& ci = m.b.col_index();
    const auto& bv = m.b.values();
    for (int l = 0; l < nv; ++l) {
        if (m.d_v[l] <= 0.0)
            throw std::runtime_error("solve_error_problem_diagonal: zero diagonal at velocity dof " +
                                     std::to_string(l));
        double s = r.f_v[l] / m.d_v[l];
        for (int k = rp[l]; k < rp[l + 1]; ++k) c.x_p[ci[k]] += bv[k] * s;
    }
    for (int j = 0; j < np; ++j) {
        if (m.d_p[j] <= 0.0)
            throw std::runtime_error("solve_error_problem_diagonal: zero diagonal at pressure dof " +
                                     std::to_string(j));
        c.x_p[j] = (r.f_p[j] + c.x_p[j]) / (m.c_s * m.d_p[j]);
    }
    for (int l = 0; l < nv; ++l) {
        double s = r.f_v[l];
        for (int k = rp[l]; k < rp[l + 1]; ++k) s -= bv[k] * c.x_p[ci[k]];
        c.x_u[l] = s / m.d_v[l];
    }
    return c;
}

ErrorCoefficients solve_error_problem_schur(const ErrorMatrices& m, const ResidualVectors& r) {
    const int nv = static_cast<int>(m.d_v.size());
    const int np = static_cast<int>(m.d_p.size());

    // S = B' D_v^-1 B and the matching right-hand side F_p + B' D_v^-1 F_v.
    std::vector<Eigen::Triplet<double>> tr;
    const auto& rp = m.b.row_ptr();
    const auto& ci = m.b.col_index();
    const auto& bv = m.b.values();
    std::vector<double> rhs(r.f_p);
    for (int l = 0; l < nv; ++l) {
        double inv = 1.0 / m.d_v[l];
        for (int k = rp[l]; k < rp[l + 1]; ++k) {
            rhs[ci[k]] += bv[k] * r.f_v[l] * inv;
            for (int k2 = rp[l]; k2 < rp[l + 1]; ++k2)
                tr.emplace_back(ci[k], ci[k2], bv[k] * bv[k2] * inv);
        }
    }
    Eigen::SparseMatrix<double> s(np, np);
    s.setFromTriplets(tr.begin(), tr.end());
    s.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(s);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("solve_error_problem_schur: singular Schur complement");
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), rhs.size());
    Eigen::VectorXd xp = ldlt.solve(b);

    ErrorCoefficients c;
    c.x_p.assign(xp.data(), xp.data() + np);
    c.x_u.assign(nv, 0.0);
    for (int l = 0; l < nv; ++l) {
        double sum = r.f_v[l];
        for (int k = rp[l]; k < rp[l + 1]; ++k) sum -= bv[k] * c.x_p[ci[k]];
        c.x_u[l] = sum / m.d_v[l];
    }
    return c;
}

ErrorCoefficients solve_error_problem_full(const Mesh& mesh, const DofMaps& dofs,
                                           const ErrorMatrices& m, const ResidualVectors& r,
                                           const QuadratureRule& rule) {
    const BubbleDofMap& bu = dofs.bubble;
    SparseMatrix aw = assemble_bubble_stiffness(mesh, dofs, rule);
    const int nv = bu.n_v, np = bu.n_p;
    const int n = nv + np + 1;
    std::vector<Triplet> tr;
    tr.reserve(aw.nnz() + 2 * m.b.nnz() + 2 * np);
    const auto& arp = aw.row_ptr();
    const auto& aci = aw.col_index();
    const auto& av = aw.values();
    for (int row = 0; row < nv; ++row)
        for (int k = arp[row]; k < arp[row + 1]; ++k) tr.push_back({row, aci[k], av[k]});
    const auto& brp = m.b.row_ptr();
    const auto& bci = m.b.col_index();
    const auto& bval = m.b.values();
    for (int row = 0; row < nv; ++row)
        for (int k = brp[row]; k < brp[row + 1]; ++k) {
            tr.push_back({row, nv + bci[k], bval[k]});
            tr.push_back({nv + bci[k], row, -bval[k]});
        }
    // Mean-zero gauge for the bubble pressure block: int_T b_T = |T|/60.
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        double mt = element_geometry(mesh, t).area / 60.0;
        tr.push_back({nv + t, n - 1, mt});
        tr.push_back({n - 1, nv + t, mt});
    }
    SparseMatrix full = SparseMatrix::from_triplets(n, n, std::move(tr));
    std::vector<double> rhs(r.f_v);
    rhs.insert(rhs.end(), r.f_p.begin(), r.f_p.end());
    rhs.push_back(0.0);
    auto x = factor(full).solve(rhs);
    ErrorCoefficients c;
    c.x_u.assign(x.begin(), x.begin() + nv);
    c.x_p.assign(x.begin() + nv, x.begin() + nv + np);
    return c;
}

LocalEstimates local_estimators(const ErrorCoefficients& coeffs, const THSolution& sol,
                                const Mesh& mesh, const DofMaps& dofs,
                                const QuadratureRule& rule) {
    const BubbleDofMap& bu = dofs.bubble;
    LocalEstimates est;
    est.per_element.resize(mesh.n_triangles());
    const int nq = static_cast<int>(rule.points.size());
    std::vector<std::vector<ModePointData>> md;
    BaryPoly bt = bubble_pressure_mode();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        const auto& em = bu.elements[t];
        eval_modes(mesh, em, t, g, rule, md);
        double eta_p2 = 0.0, eta_v2 = 0.0, eta_d2 = 0.0;
        for (int q = 0; q < nq; ++q) {
            const auto& p = rule.points[q];
            double w = rule.weights[q] * g.area;
            double ep = coeffs.x_p[t] * bt.eval(p[0], p[1], p[2]);
            eta_p2 += w * ep * ep;
            double dv = th_divergence(sol, dofs.taylor_hood, g, t, p[0], p[1], p[2]);
            eta_d2 += w * dv * dv;
        }
        // |.|_{D,T}: each mode's own seminorm on T, components separately.
        for (size_t i = 0; i < em.mode.size(); ++i) {
            double stiff_t = 0.0;
            for (int q = 0; q < nq; ++q)
                stiff_t += rule.weights[q] * g.area * dot(md[i][q].grad, md[i][q].grad);
            int base = bu.vdof(em.scalar_mode[i], 0);
            eta_v2 += coeffs.x_u[base] * coeffs.x_u[base] * stiff_t;
            eta_v2 += coeffs.x_u[base + 1] * coeffs.x_u[base + 1] * stiff_t;
        }
        auto& e = est.per_element[t];
        e.eta_p = std::sqrt(eta_p2);
        e.eta_v = std::sqrt(eta_v2);
        e.eta_d = std::sqrt(eta_d2);
        e.eta_total = std::sqrt(eta_p2 + eta_v2 + eta_d2);
    }
    return est;
}

GlobalEstimate global_estimator(const LocalEstimates& locals, const ErrorCoefficients& coeffs,
                                const ErrorMatrices& matrices, const THSolution& sol,
                                const Mesh& mesh, const DofMaps& dofs,
                                const QuadratureRule& rule) {
    GlobalEstimate g;
    double sum = 0.0;
    for (const auto& e : locals.per_element)
        sum += e.eta_p * e.eta_p + e.eta_v * e.eta_v + e.eta_d * e.eta_d;
    g.eta_g = std::sqrt(sum);

    // Cross-check from the coefficient vectors and fresh quadrature.
    double ed2 = 0.0;
    for (size_t l = 0; l < coeffs.x_u.size(); ++l)
        ed2 += coeffs.x_u[l] * coeffs.x_u[l] * matrices.d_v[l];
    BaryPoly bt = bubble_pressure_mode();
    const int nq = static_cast<int>(rule.points.size());
    double div2 = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry ge = element_geometry(mesh, t);
        for (int q = 0; q < nq; ++q) {
            const auto& p = rule.points[q];
            double w = rule.weights[q] * ge.area;
            double ep = coeffs.x_p[t] * bt.eval(p[0], p[1], p[2]);
            ed2 += w * ep * ep;
            double dv = th_divergence(sol, dofs.taylor_hood, ge, t, p[0], p[1], p[2]);
            div2 += w * dv * dv;
        }
    }
    g.e_d_norm2 = ed2;
    g.div_norm2 = div2;
    return g;
}

std::string local_estimates_csv(const LocalEstimates& locals) {
    std::string o = "element_id,eta_p,eta_v,eta_d,eta_total\n";
    char buf[160];
    for (size_t t = 0; t < locals.per_element.size(); ++t) {
        const auto& e = locals.per_element[t];
        std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g\n", t, e.eta_p, e.eta_v,
                      e.eta_d, e.eta_total);
        o += buf;
    }
    return o;
}

Oscillation oscillation(const VectorField& f, const Mesh& mesh, const QuadratureRule& rule) {
    Oscillation osc;
    osc.per_element.assign(mesh.n_triangles(), 0.0);
    if (!f) return osc;
    const int nq = static_cast<int>(rule.points.size());
    double total2 = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        // L2 projection onto [P1]^2 via the barycentric mass matrix.
        Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
        Eigen::Vector3d bx = Eigen::Vector3d::Zero(), by = Eigen::Vector3d::Zero();
        std::vector<Vec2> fq(nq);
        for (int q = 0; q < nq; ++q) {
            const auto& p = rule.points[q];
            double w = rule.weights[q] * g.area;
            fq[q] = f(p[0] * g.v[0] + p[1] * g.v[1] + p[2] * g.v[2]);
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) mass(i, j) += w * p[i] * p[j];
                bx(i) += w * p[i] * fq[q].x;
                by(i) += w * p[i] * fq[q].y;
            }
        }
        Eigen::Vector3d cx = mass.ldlt().solve(bx), cy = mass.ldlt().solve(by);
        double err2 = 0.0;
        for (int q = 0; q < nq; ++q) {
            const auto& p = rule.points[q];
            double w = rule.weights[q] * g.area;
            double px = cx(0) * p[0] + cx(1) * p[1] + cx(2) * p[2];
            double py = cy(0) * p[0] + cy(1) * p[1] + cy(2) * p[2];
            err2 += w * ((fq[q].x - px) * (fq[q].x - px) + (fq[q].y - py) * (fq[q].y - py));
        }
        double h = mesh.diameter(t);
        osc.per_element[t] = h * std::sqrt(err2);
        total2 += h * h * err2;
    }
    osc.total = std::sqrt(total2);
    return osc;
}

std::optional<double> effectivity(double eta_g, double true_error) {
    if (!(true_error > 0.0)) return std::nullopt;
    return eta_g / true_error;
}

double discrete_inf_sup_probe(const Mesh& mesh, const DofMaps& dofs, const QuadratureRule& rule) {
    const BubbleDofMap& bu = dofs.bubble;
    if (bu.n_v > 2000)
        throw std::invalid_argument(
            "discrete_inf_sup_probe: dense probe limited to small meshes, got " +
            std::to_string(bu.n_v) + " bubble velocity dofs");
    SparseMatrix aw = assemble_bubble_stiffness(mesh, dofs, rule);
    ErrorMatrices m = assemble_error_matrices(mesh, dofs, rule);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(bu.n_v, bu.n_v);
    const auto& arp = aw.row_ptr();
    const auto& aci = aw.col_index();
    const auto& av = aw.values();
    for (int r = 0; r < bu.n_v; ++r)
        for (int k = arp[r]; k < arp[r + 1]; ++k) a(r, aci[k]) = av[k];
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(bu.n_v, bu.n_p);
    const auto& brp = m.b.row_ptr();
    const auto& bci = m.b.col_index();
    const auto& bv = m.b.values();
    for (int r = 0; r < bu.n_v; ++r)
        for (int k = brp[r]; k < brp[r + 1]; ++k) b(r, bci[k]) = bv[k];

    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("discrete_inf_sup_probe: bubble stiffness not SPD");
    Eigen::MatrixXd s = b.transpose() * llt.solve(b);

    // Pressure bubble mass matrix is diagonal: int_T b_T^2 = |T|/2520.
    Eigen::VectorXd mp(bu.n_p);
    for (int t = 0; t < mesh.n_triangles(); ++t)
        mp(t) = element_geometry(mesh, t).area / 2520.0;
    Eigen::MatrixXd c = s;
    for (int i = 0; i < bu.n_p; ++i)
        for (int j = 0; j < bu.n_p; ++j) c(i, j) /= std::sqrt(mp(i) * mp(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (c + c.transpose()));
    double lmin = eig.eigenvalues().minCoeff();
    return lmin > 0.0 ? std::sqrt(lmin) : 0.0;
}

double galerkin_orthogonality_gap(const Mesh& mesh, const THDofMap& dofs, const THSolution& sol,
                                  const VectorField& f, const QuadratureRule& rule) {
    std::vector<double> rv(dofs.n_v, 0.0);
    std::vector<double> rq(dofs.n_q, 0.0);
    std::vector<double> mean(dofs.n_q, 0.0);
    double scale = 0.0, omega = 0.0, div_total = 0.0;
    const int nq = static_cast<int>(rule.points.size());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        const auto& en = dofs.element_nodes[t];
        const auto& tv = mesh.triangles[t].v;
        omega += g.area;
        for (int q = 0; q < nq; ++q) {
            const auto& p = rule.points[q];
            double w = rule.weights[q] * g.area;
            auto grad_u = th_velocity_gradient(sol, dofs, g, t, p[0], p[1], p[2]);
            double press = th_pressure(sol, mesh, t, p[0], p[1], p[2]);
            double div_u = grad_u[0].x + grad_u[1].y;
            Vec2 fv{0.0, 0.0};
            if (f) fv = f(p[0] * g.v[0] + p[1] * g.v[1] + p[2] * g.v[2]);
            for (int i = 0; i < 6; ++i) {
                double v = p2_value(i, p[0], p[1], p[2]);
                Vec2 gx = grad_to_xy(p2_grad_lambda(i, p[0], p[1], p[2]), g);
                rv[dofs.vdof(en[i], 0)] += w * (fv.x * v - dot(grad_u[0], gx) + press * gx.x);
                rv[dofs.vdof(en[i], 1)] += w * (fv.y * v - dot(grad_u[1], gx) + press * gx.y);
            }
            for (int k = 0; k < 3; ++k) {
                rq[tv[k]] -= w * p[k] * div_u;
                mean[tv[k]] += w * p[k];
            }
            div_total -= w * div_u;
            scale = std::max(scale, std::abs(press) + norm(grad_u[0]) + norm(grad_u[1]) + 1.0);
        }
    }
    double gap = 0.0;
    for (int n = 0; n < dofs.n_vnodes; ++n) {
        if (dofs.node_on_boundary[n]) continue;
        gap = std::max({gap, std::abs(rv[dofs.vdof(n, 0)]), std::abs(rv[dofs.vdof(n, 1)])});
    }
    // Pressure tests live in the mean-zero space, so test against
    // psi_j - (int psi_j / |Omega|).
    for (int j = 0; j < dofs.n_q; ++j)
        gap = std::max(gap, std::abs(rq[j] - mean[j] / omega * div_total));
    return gap / scale;
}

}  // namespace stokes
