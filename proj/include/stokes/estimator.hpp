#pragma once

#include <optional>
#include <vector>

#include "stokes/assembly.hpp"
#include "stokes/mesh.hpp"
#include "stokes/quadrature.hpp"
#include "stokes/solver.hpp"
#include "stokes/spaces.hpp"

namespace stokes {

// A posteriori error estimation in the auxiliary bubble space. The
// discretization residual is restated over the velocity/pressure bubble
// bases, giving a saddle problem
//   [ A_W  B ] [x_u]   [F_v]
//   [-B'   0 ] [x_p] = [F_p].
// Replacing A_W by its diagonal D_v yields a problem whose pressure part is a
// Schur complement solve; replacing B' D_v^-1 B by c_s * diag(B' D_v^-1 B)
// in addition makes both solves diagonal. The diagonal form is what drives
// the adaptive loop; the other two exist as validation targets.

struct ResidualVectors {
    std::vector<double> f_v;  // length n_v of the bubble map
    std::vector<double> f_p;  // length n_p
};

struct ErrorMatrices {
    std::vector<double> d_v;  // diag of the bubble stiffness
    SparseMatrix b;           // n_v x n_p coupling, B_{l,j} = -b(phi_l, psi_j)
    std::vector<double> d_p;  // diag of B' D_v^-1 B
    int c_s = 1;
};

struct ErrorCoefficients {
    std::vector<double> x_u;
    std::vector<double> x_p;
};

struct LocalEstimates {
    struct Entry {
        double eta_p = 0.0;
        double eta_v = 0.0;
        double eta_d = 0.0;
        double eta_total = 0.0;
    };
    std::vector<Entry> per_element;
};

struct GlobalEstimate {
    double eta_g = 0.0;
    // Independent recomputation of eta_g^2 = |e|_D^2 + ||div u||^2.
    double e_d_norm2 = 0.0;
    double div_norm2 = 0.0;
};

/// F_{v,j} = f(phi_j) - int grad(u):grad(phi_j) + int p div(phi_j),
/// F_{p,j} = -int psi_j div(u), over the bubble bases.
ResidualVectors assemble_error_residuals(const Mesh& mesh, const DofMaps& dofs,
                                         const THSolution& sol, const VectorField& f,
                                         const QuadratureRule& rule);

ErrorMatrices assemble_error_matrices(const Mesh& mesh, const DofMaps& dofs,
                                      const QuadratureRule& rule);

/// Full stiffness of the bubble velocity space (validation path).
SparseMatrix assemble_bubble_stiffness(const Mesh& mesh, const DofMaps& dofs,
                                       const QuadratureRule& rule);

/// Two diagonal solves:
///   x_p,j = (F_p,j + sum_l B_lj F_v,l / D_v,ll) / (c_s D_p,jj),
///   x_u,l = (F_v,l - sum_j B_lj x_p,j) / D_v,ll.
ErrorCoefficients solve_error_problem_diagonal(const ErrorMatrices& m, const ResidualVectors& r);

/// Pressure from the SPD Schur system B' D_v^-1 B x_p = F_p + B' D_v^-1 F_v,
/// velocity by diagonal back-substitution.
ErrorCoefficients solve_error_problem_schur(const ErrorMatrices& m, const ResidualVectors& r);

/// Full saddle solve over the bubble spaces with a mean-zero multiplier on
/// the pressure block (validation only).
ErrorCoefficients solve_error_problem_full(const Mesh& mesh, const DofMaps& dofs,
                                           const ErrorMatrices& m, const ResidualVectors& r,
                                           const QuadratureRule& rule);

enum class ErrorProblem { Full, DiagonalVelocity, Diagonal };

LocalEstimates local_estimators(const ErrorCoefficients& coeffs, const THSolution& sol,
                                const Mesh& mesh, const DofMaps& dofs, const QuadratureRule& rule);

GlobalEstimate global_estimator(const LocalEstimates& locals, const ErrorCoefficients& coeffs,
                                const ErrorMatrices& matrices, const THSolution& sol,
                                const Mesh& mesh, const DofMaps& dofs, const QuadratureRule& rule);

/// CSV dump "element_id,eta_p,eta_v,eta_d,eta_total", one row per element.
std::string local_estimates_csv(const LocalEstimates& locals);

struct Oscillation {
    std::vector<double> per_element;  // osc(f, T)
    double total = 0.0;
};

/// osc(f,T)^2 = h_T^2 ||f - P1-projection of f||_{0,T}^2 (diagnostic).
Oscillation oscillation(const VectorField& f, const Mesh& mesh, const QuadratureRule& rule);

/// eta_G / true error; empty when the true error vanishes.
std::optional<double> effectivity(double eta_g, double true_error);

/// Smallest generalized singular value of the bubble coupling: the minimum
/// eigenvalue of B' A_W^-1 B against the bubble pressure mass matrix. Dense;
/// intended for meshes of a few dozen elements.
double discrete_inf_sup_probe(const Mesh& mesh, const DofMaps& dofs, const QuadratureRule& rule);

/// Residual functional applied to the Taylor-Hood test space (velocity part
/// directly, pressure part projected onto mean-zero functions). Near zero
/// after an exact solve.
double galerkin_orthogonality_gap(const Mesh& mesh, const THDofMap& dofs, const THSolution& sol,
                                  const VectorField& f, const QuadratureRule& rule);

}  // namespace stokes
