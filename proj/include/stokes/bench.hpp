#pragma once

#include <string>
#include <vector>

#include "stokes/adapt.hpp"

namespace stokes {

/// Corner exponent of the re-entrant L-shape: the smallest positive root of
/// sin(lambda*omega) + lambda*sin(omega) = 0 with opening angle
/// omega = 3*pi/2.
struct SingularExponent {
    double lambda = 0.0;
    double omega = 0.0;
};

SingularExponent solve_lambda();

// Closed-form singular Stokes solution on the L-shape (-1,1)^2 minus
// [0,1)x(-1,0], vanishing on the two edges that meet the re-entrant corner.
// Angles are measured from the positive x axis, wrapped to [0, 2*pi), which
// puts the domain into [0, 3*pi/2].
class LShapeExactSolution {
  public:
    LShapeExactSolution();

    double psi(double phi) const;
    double dpsi(double phi) const;
    double d2psi(double phi) const;
    double d3psi(double phi) const;

    Vec2 velocity(Vec2 x) const;
    std::array<Vec2, 2> velocity_gradient(Vec2 x) const;  // rows grad u1, grad u2
    double pressure(Vec2 x) const;                        // throws at the origin

    /// Finite-difference gradient with step 1e-6 * r, for cross-checking.
    std::array<Vec2, 2> velocity_gradient_fd(Vec2 x) const;

    double lambda() const { return lambda_; }
    ExactSolution as_exact() const;

  private:
    double lambda_ = 0.0;
    double omega_ = 0.0;
    double cos_lam_om_ = 0.0;
};

/// ||(u - u_h, p - p_h)||_V with the exact pressure shifted to the discrete
/// mean-zero gauge. Element quadrature may run on `threads` threads; the
/// element sums are reduced in element order, so results do not depend on the
/// thread count.
double error_v_norm(const Mesh& mesh, const THDofMap& dofs, const THSolution& sol,
                    const ExactSolution& exact, const QuadratureRule& rule, int threads = 1);

double mean_pressure(const Mesh& mesh, const std::function<double(Vec2)>& p,
                     const QuadratureRule& rule);

struct ConvergenceRow {
    long long dof = 0;
    double error = 0.0;
    double order_error = 0.0;  // log(e_i/e_{i+1}) / log(dof_{i+1}/dof_i), 0 for the first row
    double eta_g = 0.0;
    double order_eta = 0.0;
    double kappa = 0.0;
};

std::vector<ConvergenceRow> convergence_table(const std::vector<IterationRecord>& records);
std::string convergence_table_csv(const std::vector<ConvergenceRow>& rows);

/// Least-squares slope of log(e) against log(dof) over the trailing `count`
/// records (the convergence order with respect to dofs, made positive).
double trailing_order(const std::vector<IterationRecord>& records, int count, bool of_eta);

/// Initial mesh of the L-shape study: the twelve-triangle base mesh refined
/// uniformly once.
Mesh example1_initial_mesh();

ProblemSpec example1_problem();

/// Lid-driven cavity: unit square, zero body force, u=(1,0) on the interior
/// of the top edge, zero elsewhere; the two top corners are pinned to zero.
Mesh example2_initial_mesh();
ProblemSpec example2_problem();
Vec2 cavity_boundary_velocity(Vec2 x);

struct Example1Result {
    std::vector<IterationRecord> records;          // adaptive run
    std::vector<IterationRecord> uniform_records;  // uniform comparison (may be empty)
    std::vector<ConvergenceRow> table;
    Mesh final_mesh;
    THSolution final_solution;
};

Example1Result run_example1(const LoopConfig& config, bool with_uniform_comparison,
                            int uniform_steps, const IterationCallback& callback = {});

struct Example2Result {
    std::vector<IterationRecord> records;
    Mesh final_mesh;
    THSolution final_solution;
};

Example2Result run_example2(const LoopConfig& config, const IterationCallback& callback = {});

/// Pressure nodal values as "x y p" lines, one per pressure dof.
std::string pressure_field_text(const Mesh& mesh, const THSolution& sol);

}  // namespace stokes
