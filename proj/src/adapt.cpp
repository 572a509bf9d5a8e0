#include "stokes/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "stokes/bench.hpp"
#include "stokes/solver.hpp"

namespace stokes {

void LoopConfig::validate() const {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("config: theta must be in (0,1)");
    if (!(eps > 0.0)) throw std::invalid_argument("config: eps must be positive");
    if (max_iterations < 0) throw std::invalid_argument("config: max_iterations must be >= 0");
    if (quad_degree < 1 || quad_degree > 14 || error_quad_degree < 1 || error_quad_degree > 14)
        throw std::invalid_argument("config: quadrature degrees must be in 1..14");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
}

std::vector<int> dorfler_mark(const std::vector<double>& eta_sq, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("dorfler_mark: theta must be in (0,1)");
    double total = std::accumulate(eta_sq.begin(), eta_sq.end(), 0.0);
    if (total <= 0.0) return {};
    std::vector<int> order(eta_sq.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (eta_sq[a] != eta_sq[b]) return eta_sq[a] > eta_sq[b];
        return a < b;
    });
    std::vector<int> marked;
    double acc = 0.0;
    for (int id : order) {
        marked.push_back(id);
        acc += eta_sq[id];
        if (acc >= theta * total) break;
    }
    return marked;
}

std::vector<int> dorfler_mark(const LocalEstimates& locals, double theta) {
    std::vector<double> eta_sq(locals.per_element.size());
    for (size_t i = 0; i < eta_sq.size(); ++i) {
        double e = locals.per_element[i].eta_total;
        eta_sq[i] = e * e;
    }
    return dorfler_mark(eta_sq, theta);
}

long long taylor_hood_dof_count(const Mesh& mesh) {
    long long nodes = mesh.n_vertices() + mesh.n_edges();
    return 2 * nodes + mesh.n_vertices();
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

LoopResult adaptive_loop(const ProblemSpec& problem, const LoopConfig& config,
                         const IterationCallback& callback) {
    config.validate();
    if (problem.initial_mesh.n_triangles() == 0)
        throw std::invalid_argument("adaptive_loop: empty initial mesh");

    const QuadratureRule& rule = quadrature_rule(config.quad_degree);
    const QuadratureRule& err_rule = quadrature_rule(config.error_quad_degree);

    LoopResult result;
    Mesh mesh = problem.initial_mesh;

    for (int m = 0;; ++m) {
        IterationRecord rec;
        rec.m = m;
        rec.n_triangles = mesh.n_triangles();
        rec.dof = taylor_hood_dof_count(mesh);

        if (min_angle_deg(mesh) < config.min_angle_floor_deg)
            std::fprintf(stderr, "warning: iteration %d: minimum angle %.3f below floor %.1f\n", m,
                         min_angle_deg(mesh), config.min_angle_floor_deg);

        // SOLVE
        auto t0 = std::chrono::steady_clock::now();
        DofMaps dofs = build_dof_maps(mesh);
        rec.bubble_n_v = dofs.bubble.n_v;
        rec.bubble_n_p = dofs.bubble.n_p;
        SaddleSystem sys = assemble_taylor_hood(mesh, dofs.taylor_hood, rule);
        sys.rhs_v = assemble_rhs(problem.body_force, mesh, dofs.taylor_hood, rule);
        sys = apply_dirichlet(std::move(sys), dofs.taylor_hood, problem.dirichlet);
        SaddleSolve solved;
        try {
            solved = solve_saddle(sys);
        } catch (const std::exception& e) {
            throw std::runtime_error("adaptive_loop: iteration " + std::to_string(m) + ": " +
                                     e.what());
        }
        if (solved.residual > 1e-10)
            std::fprintf(stderr, "warning: iteration %d: solver residual %.3e\n", m,
                         solved.residual);
        THSolution sol = std::move(solved.solution);
        rec.t_solve = seconds_since(t0);

        // ESTIMATE
        t0 = std::chrono::steady_clock::now();
        ResidualVectors res =
            assemble_error_residuals(mesh, dofs, sol, problem.body_force, rule);
        ErrorMatrices mats = assemble_error_matrices(mesh, dofs, rule);
        ErrorProblem which = config.error_problem;
        if (which != ErrorProblem::Diagonal &&
            dofs.bubble.n_v + dofs.bubble.n_p > config.validation_dof_guard) {
            std::fprintf(stderr,
                         "note: iteration %d: %lld bubble dofs exceed the validation guard, "
                         "using the diagonal problem\n",
                         m, static_cast<long long>(dofs.bubble.n_v + dofs.bubble.n_p));
            which = ErrorProblem::Diagonal;
        }
        ErrorCoefficients coeffs;
        switch (which) {
            case ErrorProblem::Diagonal:
                coeffs = solve_error_problem_diagonal(mats, res);
                break;
            case ErrorProblem::DiagonalVelocity:
                coeffs = solve_error_problem_schur(mats, res);
                break;
            case ErrorProblem::Full:
                coeffs = solve_error_problem_full(mesh, dofs, mats, res, rule);
                break;
        }
        LocalEstimates locals = local_estimators(coeffs, sol, mesh, dofs, rule);
        GlobalEstimate global = global_estimator(locals, coeffs, mats, sol, mesh, dofs, rule);
        rec.eta_g = global.eta_g;
        double identity_gap = std::abs(global.eta_g * global.eta_g -
                                       (global.e_d_norm2 + global.div_norm2));
        if (identity_gap > 1e-12 * std::max(global.eta_g * global.eta_g, 1e-300))
            std::fprintf(stderr, "warning: iteration %d: estimator identity gap %.3e\n", m,
                         identity_gap);

        if (problem.exact) {
            double err = error_v_norm(mesh, dofs.taylor_hood, sol, *problem.exact, err_rule,
                                      config.threads);
            rec.error = err;
            rec.kappa = effectivity(global.eta_g, err);
        }
        rec.t_estimate = seconds_since(t0);

        bool stop = global.eta_g <= config.eps || m >= config.max_iterations ||
                    (config.max_dof > 0 && rec.dof >= config.max_dof);

        // MARK
        t0 = std::chrono::steady_clock::now();
        std::vector<int> marks;
        if (!stop) {
            if (config.marking == MarkingMode::Uniform) {
                marks.resize(mesh.n_triangles());
                std::iota(marks.begin(), marks.end(), 0);
            } else {
                marks = dorfler_mark(locals, config.theta);
            }
            if (marks.empty()) stop = true;  // converged: nothing to refine
        }
        rec.marked = static_cast<int>(marks.size());
        rec.t_mark = seconds_since(t0);

        if (callback) callback({mesh, dofs, sol, locals, global, rec});

        if (stop) {
            result.records.push_back(rec);
            result.final_mesh = mesh;
            result.final_solution = std::move(sol);
            break;
        }

        // REFINE
        t0 = std::chrono::steady_clock::now();
        Mesh next = refine(mesh, marks);
        rec.t_refine = seconds_since(t0);
        result.records.push_back(rec);
        mesh = std::move(next);
    }
    return result;
}

std::string records_csv(const std::vector<IterationRecord>& records, bool with_timings) {
    std::string o = "m,nt,dof,eta_g,error,kappa,marked,t_solve,t_estimate,t_mark,t_refine\n";
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%d,%lld,%.10g,", r.m, r.n_triangles, r.dof, r.eta_g);
        o += buf;
        if (r.error) {
            std::snprintf(buf, sizeof buf, "%.10g", *r.error);
            o += buf;
        }
        o += ",";
        if (r.kappa) {
            std::snprintf(buf, sizeof buf, "%.10g", *r.kappa);
            o += buf;
        }
        std::snprintf(buf, sizeof buf, ",%d", r.marked);
        o += buf;
        if (with_timings) {
            std::snprintf(buf, sizeof buf, ",%.3f,%.3f,%.3f,%.3f", r.t_solve, r.t_estimate,
                          r.t_mark, r.t_refine);
            o += buf;
        } else {
            o += ",,,,";
        }
        o += "\n";
    }
    return o;
}

}  // namespace stokes
