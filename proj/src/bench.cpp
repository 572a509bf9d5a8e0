#include "stokes/bench.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace stokes {

SingularExponent solve_lambda() {
    const double omega = 1.5 * M_PI;
    auto g = [omega](double l) { return std::sin(l * omega) + l * std::sin(omega); };
    double lo = 0.4, hi = 0.9;
    if (!(g(lo) > 0.0 && g(hi) < 0.0))
        throw std::runtime_error("solve_lambda: root not bracketed");
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), omega};
}

LShapeExactSolution::LShapeExactSolution() {
    SingularExponent se = solve_lambda();
    lambda_ = se.lambda;
    omega_ = se.omega;
    cos_lam_om_ = std::cos(lambda_ * omega_);
}

double LShapeExactSolution::psi(double phi) const {
    const double l = lambda_, c = cos_lam_om_;
    return std::sin((1 + l) * phi) * c / (1 + l) - std::cos((1 + l) * phi) -
           std::sin((1 - l) * phi) * c / (1 - l) + std::cos((1 - l) * phi);
}

double LShapeExactSolution::dpsi(double phi) const {
    const double l = lambda_, c = cos_lam_om_;
    return std::cos((1 + l) * phi) * c + (1 + l) * std::sin((1 + l) * phi) -
           std::cos((1 - l) * phi) * c - (1 - l) * std::sin((1 - l) * phi);
}

double LShapeExactSolution::d2psi(double phi) const {
    const double l = lambda_, c = cos_lam_om_;
    return -(1 + l) * std::sin((1 + l) * phi) * c + (1 + l) * (1 + l) * std::cos((1 + l) * phi) +
           (1 - l) * std::sin((1 - l) * phi) * c - (1 - l) * (1 - l) * std::cos((1 - l) * phi);
}

double LShapeExactSolution::d3psi(double phi) const {
    const double l = lambda_, c = cos_lam_om_;
    return -(1 + l) * (1 + l) * std::cos((1 + l) * phi) * c -
           (1 + l) * (1 + l) * (1 + l) * std::sin((1 + l) * phi) +
           (1 - l) * (1 - l) * std::cos((1 - l) * phi) * c +
           (1 - l) * (1 - l) * (1 - l) * std::sin((1 - l) * phi);
}

namespace {

double wrap_angle(Vec2 x) {
    double phi = std::atan2(x.y, x.x);
    if (phi < 0.0) phi += 2.0 * M_PI;
    return phi;
}

}  // namespace

Vec2 LShapeExactSolution::velocity(Vec2 x) const {
    double r = norm(x);
    if (r == 0.0) return {0.0, 0.0};
    double phi = wrap_angle(x);
    double rl = std::pow(r, lambda_);
    double s = std::sin(phi), c = std::cos(phi);
    double P = psi(phi), dP = dpsi(phi);
    return {rl * ((1 + lambda_) * s * P + c * dP), rl * (s * dP - (1 + lambda_) * c * P)};
}

std::array<Vec2, 2> LShapeExactSolution::velocity_gradient(Vec2 x) const {
    double r = norm(x);
    if (r == 0.0)
        throw std::domain_error("LShapeExactSolution: velocity gradient singular at the origin");
    double phi = wrap_angle(x);
    double s = std::sin(phi), c = std::cos(phi);
    double P = psi(phi), dP = dpsi(phi), d2P = d2psi(phi);
    const double l = lambda_;
    // u_i = r^l G_i(phi):
    //   grad u_i = r^(l-1) [l G_i cos - G_i' sin, l G_i sin + G_i' cos].
    double g1 = (1 + l) * s * P + c * dP;
    double g2 = s * dP - (1 + l) * c * P;
    double dg1 = (1 + l) * c * P + l * s * dP + c * d2P;
    double dg2 = (1 + l) * s * P - l * c * dP + s * d2P;
    double rl1 = std::pow(r, l - 1.0);
    return {Vec2{rl1 * (l * g1 * c - dg1 * s), rl1 * (l * g1 * s + dg1 * c)},
            Vec2{rl1 * (l * g2 * c - dg2 * s), rl1 * (l * g2 * s + dg2 * c)}};
}

std::array<Vec2, 2> LShapeExactSolution::velocity_gradient_fd(Vec2 x) const {
    double h = 1e-6 * std::max(norm(x), 1e-3);
    Vec2 uxp = velocity({x.x + h, x.y}), uxm = velocity({x.x - h, x.y});
    Vec2 uyp = velocity({x.x, x.y + h}), uym = velocity({x.x, x.y - h});
    return {Vec2{(uxp.x - uxm.x) / (2 * h), (uyp.x - uym.x) / (2 * h)},
            Vec2{(uxp.y - uxm.y) / (2 * h), (uyp.y - uym.y) / (2 * h)}};
}

double LShapeExactSolution::pressure(Vec2 x) const {
    double r = norm(x);
    if (r == 0.0) throw std::domain_error("LShapeExactSolution: pressure singular at the origin");
    double phi = wrap_angle(x);
    const double l = lambda_;
    return -std::pow(r, l - 1.0) * ((1 + l) * (1 + l) * dpsi(phi) + d3psi(phi)) / (1 - l);
}

ExactSolution LShapeExactSolution::as_exact() const {
    LShapeExactSolution copy = *this;
    ExactSolution e;
    e.velocity = [copy](Vec2 x) { return copy.velocity(x); };
    e.velocity_gradient = [copy](Vec2 x) { return copy.velocity_gradient(x); };
    e.pressure = [copy](Vec2 x) { return copy.pressure(x); };
    return e;
}

double mean_pressure(const Mesh& mesh, const std::function<double(Vec2)>& p,
                     const QuadratureRule& rule) {
    double integral = 0.0, area = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        area += g.area;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& pt = rule.points[q];
            Vec2 x = pt[0] * g.v[0] + pt[1] * g.v[1] + pt[2] * g.v[2];
            integral += rule.weights[q] * g.area * p(x);
        }
    }
    return integral / area;
}

namespace {

// Runs fn(t) for t in [0, n) on `threads` threads over contiguous chunks.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n < 2 * threads) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    int chunk = (n + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
        int lo = k * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

double error_v_norm(const Mesh& mesh, const THDofMap& dofs, const THSolution& sol,
                    const ExactSolution& exact, const QuadratureRule& rule, int threads) {
    double gauge = mean_pressure(mesh, exact.pressure, rule);
    std::vector<double> per_element(mesh.n_triangles(), 0.0);
    parallel_for(mesh.n_triangles(), threads, [&](int t) {
        ElementGeometry g = element_geometry(mesh, t);
        double acc = 0.0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto& pt = rule.points[q];
            double w = rule.weights[q] * g.area;
            Vec2 x = pt[0] * g.v[0] + pt[1] * g.v[1] + pt[2] * g.v[2];
            auto grad_h = th_velocity_gradient(sol, dofs, g, t, pt[0], pt[1], pt[2]);
            auto grad = exact.velocity_gradient(x);
            Vec2 d0 = grad[0] - grad_h[0], d1 = grad[1] - grad_h[1];
            double dp = (exact.pressure(x) - gauge) - th_pressure(sol, mesh, t, pt[0], pt[1], pt[2]);
            acc += w * (dot(d0, d0) + dot(d1, d1) + dp * dp);
        }
        per_element[t] = acc;
    });
    double sum = 0.0;
    for (double v : per_element) sum += v;  // fixed order, independent of threads
    return std::sqrt(sum);
}

std::vector<ConvergenceRow> convergence_table(const std::vector<IterationRecord>& records) {
    std::vector<ConvergenceRow> rows;
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        ConvergenceRow row;
        row.dof = r.dof;
        row.error = r.error.value_or(0.0);
        row.eta_g = r.eta_g;
        row.kappa = r.kappa.value_or(0.0);
        if (i > 0 && records[i - 1].error && r.error) {
            double dl = std::log(static_cast<double>(r.dof) / records[i - 1].dof);
            row.order_error = std::log(*records[i - 1].error / *r.error) / dl;
            row.order_eta = std::log(records[i - 1].eta_g / r.eta_g) / dl;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string convergence_table_csv(const std::vector<ConvergenceRow>& rows) {
    std::string o = "dof,error,order_error,eta_g,order_eta,kappa\n";
    char buf[192];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%.10g,%.4f,%.10g,%.4f,%.4f\n", r.dof, r.error,
                      r.order_error, r.eta_g, r.order_eta, r.kappa);
        o += buf;
    }
    return o;
}

double trailing_order(const std::vector<IterationRecord>& records, int count, bool of_eta) {
    std::vector<std::pair<double, double>> pts;
    for (size_t i = records.size() >= static_cast<size_t>(count) ? records.size() - count : 0;
         i < records.size(); ++i) {
        double e = of_eta ? records[i].eta_g : records[i].error.value_or(0.0);
        if (e <= 0.0) continue;
        pts.emplace_back(std::log(static_cast<double>(records[i].dof)), std::log(e));
    }
    if (pts.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Mesh example1_initial_mesh() { return refine_all(make_lshape_mesh()); }

ProblemSpec example1_problem() {
    LShapeExactSolution ex;
    ProblemSpec p;
    p.initial_mesh = example1_initial_mesh();
    LShapeExactSolution copy = ex;
    p.dirichlet = [copy](Vec2 x) { return copy.velocity(x); };
    p.body_force = {};  // zero
    p.exact = ex.as_exact();
    return p;
}

Mesh example2_initial_mesh() { return make_unit_square_mesh(4); }

Vec2 cavity_boundary_velocity(Vec2 x) {
    const double tol = 1e-12;
    if (x.y > 1.0 - tol && x.x > tol && x.x < 1.0 - tol) return {1.0, 0.0};
    return {0.0, 0.0};
}

ProblemSpec example2_problem() {
    ProblemSpec p;
    p.initial_mesh = example2_initial_mesh();
    p.dirichlet = cavity_boundary_velocity;
    p.body_force = {};
    return p;
}

Example1Result run_example1(const LoopConfig& config, bool with_uniform_comparison,
                            int uniform_steps, const IterationCallback& callback) {
    ProblemSpec problem = example1_problem();
    LoopResult adaptive = adaptive_loop(problem, config, callback);
    Example1Result out;
    out.records = adaptive.records;
    out.table = convergence_table(adaptive.records);
    out.final_mesh = std::move(adaptive.final_mesh);
    out.final_solution = std::move(adaptive.final_solution);
    if (with_uniform_comparison) {
        LoopConfig uniform = config;
        uniform.marking = MarkingMode::Uniform;
        uniform.max_iterations = uniform_steps;
        uniform.max_dof = 0;
        out.uniform_records = adaptive_loop(problem, uniform).records;
    }
    return out;
}

Example2Result run_example2(const LoopConfig& config, const IterationCallback& callback) {
    ProblemSpec problem = example2_problem();
    LoopResult r = adaptive_loop(problem, config, callback);
    return {std::move(r.records), std::move(r.final_mesh), std::move(r.final_solution)};
}

std::string pressure_field_text(const Mesh& mesh, const THSolution& sol) {
    std::string o;
    char buf[128];
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", mesh.vertices[v].x,
                      mesh.vertices[v].y, sol.p[v]);
        o += buf;
    }
    return o;
}

}  // namespace stokes
