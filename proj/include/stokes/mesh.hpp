#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace stokes {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

struct Vertex {
    double x = 0.0;
    double y = 0.0;
};

enum class RefinementState : int {
    Unrefined = 0,
    RedChild = 1,
    GreenChild = 2,
};

/// A leaf triangle of the current mesh. Vertices are stored counter-clockwise.
/// `parent` is the index (in the mesh this one was refined from) of the leaf
/// that covered this triangle, or -1 for triangles of a freshly built mesh.
struct Triangle {
    std::array<int, 3> v{};
    RefinementState state = RefinementState::Unrefined;
    int parent = -1;
};

struct Edge {
    int a = -1;              // a < b, global vertex ids
    int b = -1;
    std::array<int, 2> tri{-1, -1};
    int n_tri = 0;
    bool boundary = false;
    int tag = 0;             // boundary segment tag, 0 for interior
};

/// Edges of the leaf triangulation, sorted by (a, b). An edge is a boundary
/// edge iff it has exactly one adjacent triangle.
struct EdgeTable {
    std::vector<Edge> edges;

    int find(int a, int b) const;  // -1 if absent

  private:
    friend struct Mesh;
    std::map<std::pair<int, int>, int> index_;
};

// Red-green refinable conforming triangle mesh.
//
// The mesh is a value type: refine() returns a new mesh and never mutates its
// input, so meshes can be shared read-only across threads. Internally a mesh
// keeps the "red skeleton" (the triangulation before green closure), the set
// of green-bisected skeleton leaves, and the table of edge midpoints created
// so far. Midpoint coordinates are always the exact average of the endpoint
// coordinates, computed once per edge, so shared midpoints are bit-identical.
//
// Refinement policy: marked triangles are split into four similar children
// (red). Any triangle that ends up with two or more split edges is also red
// refined, iterated to a fixpoint; a triangle with exactly one split edge is
// bisected toward the midpoint (green). Green children are never refined
// further: marking one red-refines its skeleton parent instead, after the
// green pair is discarded. This keeps every leaf either similar to an
// ancestor of the initial mesh or a single bisection of such a triangle.
struct Mesh {
    std::vector<Vertex> vertices;
    std::vector<Triangle> triangles;  // current leaves, greens included
    EdgeTable edges;

    static Mesh from_raw(std::vector<Vertex> vertices,
                         std::vector<std::array<int, 3>> tri_vertices,
                         int default_boundary_tag = 1);

    Vec2 point(int v) const { return {vertices[v].x, vertices[v].y}; }
    double area(int t) const;
    double total_area() const;
    /// Longest edge of leaf t.
    double diameter(int t) const;
    int boundary_tag(int a, int b) const;  // 0 if not a tagged boundary edge

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.edges.size()); }

  private:
    friend Mesh refine(const Mesh&, const std::vector<int>&);
    friend Mesh read_mesh_text(const std::string&);
    friend Mesh make_unit_square_mesh(int);
    friend bool has_hanging_vertices(const Mesh&);

    struct SkeletonTri {
        std::array<int, 3> v{};
        RefinementState state = RefinementState::Unrefined;
        int green_edge = -1;  // local edge with a midpoint, -1 if whole
        int parent = -1;
        std::array<int, 2> green_parents{-1, -1};
    };
    std::vector<SkeletonTri> skeleton_;
    std::vector<int> tri_skeleton_;                 // leaf -> skeleton index
    std::map<std::pair<int, int>, int> midpoints_;  // (a,b) -> midpoint vertex
    std::map<std::pair<int, int>, int> boundary_tags_;

    void rebuild();  // leaves + edge table from skeleton; validates
};

Mesh make_unit_square_mesh(int n);

/// Initial triangulation of (-1,1)^2 minus the quadrant [0,1)x(-1,0]:
/// twelve similar right triangles, reentrant corner exactly at the origin,
/// every boundary edge tagged 1.
Mesh make_lshape_mesh();

EdgeTable build_edges(const Mesh& mesh);

Mesh refine(const Mesh& mesh, const std::vector<int>& marks);

/// Uniform red refinement of every leaf.
Mesh refine_all(const Mesh& mesh);

/// max over leaves of (longest edge / inradius)
double shape_regularity(const Mesh& mesh);

double min_angle_deg(const Mesh& mesh);

bool has_hanging_vertices(const Mesh& mesh);

// Plain-text format. Header line "nv nt ne", then one line per entity:
//   v <x> <y>
//   t <i> <j> <k> <state>
//   e <i> <j> <tag>
// Coordinates are printed with 17 significant digits and round-trip exactly.
std::string write_mesh_text(const Mesh& mesh);
Mesh read_mesh_text(const std::string& text);  // throws with 1-based line numbers

/// Legacy-VTK ASCII export (unstructured grid) for external viewers.
std::string write_mesh_vtk(const Mesh& mesh);

}  // namespace stokes
