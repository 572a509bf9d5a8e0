#pragma once

#include <array>
#include <vector>

#include "stokes/mesh.hpp"

namespace stokes {

/// Polynomial in the barycentric coordinates (l1, l2, l3) of a triangle,
/// stored as a sum of monomial terms c * l1^a l2^b l3^d.
class BaryPoly {
  public:
    struct Term {
        double c = 0.0;
        int a = 0, b = 0, d = 0;
    };

    BaryPoly() = default;
    explicit BaryPoly(std::vector<Term> terms) : terms_(std::move(terms)) {}

    static BaryPoly lambda(int i);
    static BaryPoly one() { return BaryPoly({{1.0, 0, 0, 0}}); }

    double eval(double l1, double l2, double l3) const;
    /// Partial derivative with respect to lambda_i, i in 0..2.
    BaryPoly dlambda(int i) const;
    std::array<double, 3> eval_grad_lambda(double l1, double l2, double l3) const;

    BaryPoly operator*(const BaryPoly& o) const;
    BaryPoly operator+(const BaryPoly& o) const;
    BaryPoly scaled(double s) const;

    /// Exact integral over a triangle of the given area, via
    /// int_T l1^a l2^b l3^d = 2|T| a! b! d! / (a+b+d+2)!.
    double integrate_exact(double area) const;

    const std::vector<Term>& terms() const { return terms_; }

  private:
    std::vector<Term> terms_;
};

/// Affine geometry of one triangle: physical vertices, area, and the
/// (constant) physical gradients of the barycentric coordinates.
struct ElementGeometry {
    std::array<Vec2, 3> v;
    double area = 0.0;
    std::array<Vec2, 3> grad_lambda;
};

ElementGeometry element_geometry(const Mesh& mesh, int t);

// Quadratic Lagrange basis on a triangle. Local nodes 0..2 are the vertices,
// node 3+k sits at the midpoint of the edge opposite vertex k.
double p2_value(int local_index, double l1, double l2, double l3);
std::array<double, 3> p2_grad_lambda(int local_index, double l1, double l2, double l3);
std::pair<double, std::array<double, 3>> p2_eval(int local_index, double l1, double l2, double l3);

inline Vec2 grad_to_xy(const std::array<double, 3>& dl, const ElementGeometry& g) {
    return dl[0] * g.grad_lambda[0] + dl[1] * g.grad_lambda[1] + dl[2] * g.grad_lambda[2];
}

enum class BubbleKind {
    EdgeCubic,    // l_a l_b (l_a - l_b) on an edge, a < b in global ids
    EdgeQuartic,  // l_a^2 l_b^2
    Element,      // b_T, b_T*l1, b_T*l2
};

struct LocalBubble {
    BaryPoly poly;
    BubbleKind kind = BubbleKind::Element;
    int local_edge = -1;  // 0..2 for edge modes (edge opposite that vertex)
};

/// The nine scalar bubble modes of one element: per edge the cubic and
/// quartic edge modes (oriented by global vertex order, so the two elements
/// sharing an edge produce identical traces) and three interior modes
/// b_T, b_T*l1, b_T*l2.
std::vector<LocalBubble> bubble_velocity_modes(const Mesh& mesh, int t);

BaryPoly bubble_pressure_mode();

struct THDofMap {
    int n_vertices = 0;
    int n_edges = 0;
    int n_vnodes = 0;  // n_vertices + n_edges
    int n_v = 0;       // velocity dofs: 2 * n_vnodes, components interleaved
    int n_q = 0;       // pressure dofs: n_vertices
    std::vector<std::array<int, 6>> element_nodes;  // v0 v1 v2, then edge nodes opp. each vertex
    std::vector<Vec2> node_pos;
    std::vector<uint8_t> node_on_boundary;

    int vdof(int node, int comp) const { return 2 * node + comp; }
};

struct BubbleDofMap {
    int n_scalar_modes = 0;  // 2 * n_interior_edges + 3 * n_triangles
    int n_v = 0;             // 2 * n_scalar_modes, components interleaved
    int n_p = 0;             // n_triangles
    int c_s = 0;             // max pressure modes per element

    struct ElementModes {
        std::vector<int> scalar_mode;  // global scalar mode ids
        std::vector<LocalBubble> mode;
    };
    std::vector<ElementModes> elements;

    int vdof(int scalar_mode, int comp) const { return 2 * scalar_mode + comp; }
};

struct DofMaps {
    THDofMap taylor_hood;
    BubbleDofMap bubble;
};

DofMaps build_dof_maps(const Mesh& mesh);

}  // namespace stokes
