#pragma once

#include <functional>
#include <vector>

#include "stokes/mesh.hpp"
#include "stokes/quadrature.hpp"
#include "stokes/sparse.hpp"
#include "stokes/spaces.hpp"

namespace stokes {

using VectorField = std::function<Vec2(Vec2)>;

// Taylor-Hood saddle-point system
//   [ A  B ] [u]   [rhs_v]
//   [-B' 0 ] [p] = [rhs_p]
// with A the velocity stiffness a(phi_j, phi_l) and B_{l,j} = -b(phi_l, psi_j).
// `mean` holds the integrals of the pressure basis functions, used to pin the
// pressure gauge via a Lagrange multiplier.
struct SaddleSystem {
    int n_v = 0;
    int n_q = 0;
    SparseMatrix A;
    SparseMatrix B;
    std::vector<double> mean;
    std::vector<double> rhs_v;
    std::vector<double> rhs_p;
    std::vector<uint8_t> dirichlet_mask;    // per velocity dof
    std::vector<double> dirichlet_values;
};

SaddleSystem assemble_taylor_hood(const Mesh& mesh, const THDofMap& dofs,
                                  const QuadratureRule& rule);

/// Load vector over the velocity dofs; the pressure block stays zero.
std::vector<double> assemble_rhs(const VectorField& f, const Mesh& mesh, const THDofMap& dofs,
                                 const QuadratureRule& rule);

/// Pin boundary velocity dofs to the nodal interpolant of g: masked rows and
/// columns are replaced by identity and their coupling moved to the rhs.
SaddleSystem apply_dirichlet(SaddleSystem system, const THDofMap& dofs, const VectorField& g);

struct AugmentedSystem {
    SparseMatrix M;  // (n_v + n_q + 1) square
    std::vector<double> rhs;
    int n_v = 0;
    int n_q = 0;
};

/// Append the mean-zero constraint row/column [0 m'; m 0], making the
/// pressure unique.
AugmentedSystem attach_mean_zero(const SaddleSystem& system);

struct THSolution {
    std::vector<double> u;  // velocity coefficients, boundary values included
    std::vector<double> p;
    double multiplier = 0.0;
};

THSolution split_solution(const AugmentedSystem& sys, const std::vector<double>& x);

// Pointwise evaluation of a discrete solution on one element.
Vec2 th_velocity(const THSolution& sol, const THDofMap& dofs, int t, double l1, double l2,
                 double l3);
std::array<Vec2, 2> th_velocity_gradient(const THSolution& sol, const THDofMap& dofs,
                                         const ElementGeometry& g, int t, double l1, double l2,
                                         double l3);
double th_pressure(const THSolution& sol, const Mesh& mesh, int t, double l1, double l2,
                   double l3);
double th_divergence(const THSolution& sol, const THDofMap& dofs, const ElementGeometry& g, int t,
                     double l1, double l2, double l3);

}  // namespace stokes
