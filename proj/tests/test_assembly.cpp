#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stokes/assembly.hpp"
#include "stokes/bench.hpp"
#include "stokes/solver.hpp"

using namespace stokes;

namespace {

SaddleSystem assemble(const Mesh& mesh, const DofMaps& dm, int degree = 8) {
    return assemble_taylor_hood(mesh, dm.taylor_hood, quadrature_rule(degree));
}

THSolution solve_stokes(const Mesh& mesh, const DofMaps& dm, const VectorField& f,
                        const VectorField& g, int degree = 8) {
    SaddleSystem sys = assemble(mesh, dm, degree);
    sys.rhs_v = assemble_rhs(f, mesh, dm.taylor_hood, quadrature_rule(degree));
    sys = apply_dirichlet(std::move(sys), dm.taylor_hood, g);
    AugmentedSystem aug = attach_mean_zero(sys);
    return split_solution(aug, factor(aug.M).solve(aug.rhs));
}

// Manufactured divergence-free quadratic Stokes solution on the unit square:
// u = (y^2, x^2), p = x + y - 1, f = -Lap(u) + grad(p) = (-1, -1).
Vec2 patch_u(Vec2 x) { return {x.y * x.y, x.x * x.x}; }
double patch_p(Vec2 x) { return x.x + x.y - 1.0; }
Vec2 patch_f(Vec2) { return {-1.0, -1.0}; }

}  // namespace

TEST_CASE("stiffness matrix: symmetry, reference-element value, row sums") {
    Mesh mesh = Mesh::from_raw({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}});
    DofMaps dm = build_dof_maps(mesh);
    SaddleSystem sys = assemble(mesh, dm);

    double amax = 0.0, asym = 0.0;
    for (int i = 0; i < sys.n_v; ++i)
        for (int j = 0; j < sys.n_v; ++j) {
            amax = std::max(amax, std::abs(sys.A.coeff(i, j)));
            asym = std::max(asym, std::abs(sys.A.coeff(i, j) - sys.A.coeff(j, i)));
        }
    CHECK(asym <= 1e-12 * amax);

    // a(phi,phi) for the vertex-0 P2 shape on the reference triangle:
    // grad(l0(2 l0 - 1)) = (4 l0 - 1) grad l0, |grad l0|^2 = 2, and
    // int (4 l0 - 1)^2 = 1/2, giving exactly 1.
    BaryPoly l0 = BaryPoly::lambda(0);
    BaryPoly shape = (l0 * l0).scaled(16.0) + l0.scaled(-8.0) + BaryPoly::one();
    CHECK(shape.integrate_exact(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sys.A.coeff(0, 0) == doctest::Approx(1.0).epsilon(1e-13));

    // Gradients of the P2 partition of unity sum to zero, so every row sums
    // to zero over one component.
    for (int c = 0; c < 2; ++c) {
        for (int n = 0; n < dm.taylor_hood.n_vnodes; ++n) {
            double row = 0.0;
            for (int n2 = 0; n2 < dm.taylor_hood.n_vnodes; ++n2)
                row += sys.A.coeff(dm.taylor_hood.vdof(n, c), dm.taylor_hood.vdof(n2, c));
            CHECK(std::abs(row) <= 1e-13);
        }
    }
}

TEST_CASE("constant pressure column behaves like a divergence integral") {
    Mesh mesh = make_unit_square_mesh(2);
    DofMaps dm = build_dof_maps(mesh);
    SaddleSystem sys = assemble(mesh, dm);
    // sum_j B[l,j] = -int div(phi_l): zero for interior velocity dofs.
    for (int n = 0; n < dm.taylor_hood.n_vnodes; ++n) {
        if (dm.taylor_hood.node_on_boundary[n]) continue;
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int j = 0; j < sys.n_q; ++j) s += sys.B.coeff(dm.taylor_hood.vdof(n, c), j);
            CHECK(std::abs(s) <= 1e-14);
        }
    }
    // mean vector applied to the constant-one pressure vector gives |Omega|.
    double total = 0.0;
    for (double v : sys.mean) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("B scales linearly with mesh scaling, A is scale invariant") {
    auto scaled_mesh = [](double s) {
        return Mesh::from_raw({{0, 0}, {s, 0}, {0, s}}, {{{0, 1, 2}}});
    };
    Mesh m1 = scaled_mesh(1.0), m2 = scaled_mesh(2.0);
    DofMaps d1 = build_dof_maps(m1), d2 = build_dof_maps(m2);
    SaddleSystem s1 = assemble(m1, d1), s2 = assemble(m2, d2);
    for (int i = 0; i < s1.n_v; ++i) {
        for (int j = 0; j < s1.n_v; ++j)
            CHECK(s2.A.coeff(i, j) == doctest::Approx(s1.A.coeff(i, j)).epsilon(1e-12));
        for (int j = 0; j < s1.n_q; ++j)
            CHECK(s2.B.coeff(i, j) == doctest::Approx(2.0 * s1.B.coeff(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("rhs assembly: zero force, frozen single-element value, linearity") {
    Mesh mesh = Mesh::from_raw({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}});
    DofMaps dm = build_dof_maps(mesh);
    const auto& rule = quadrature_rule(8);

    auto zero = assemble_rhs({}, mesh, dm.taylor_hood, rule);
    for (double v : zero) CHECK(v == 0.0);

    // f = (1,0): the vertex shape integrates to int l(2l-1) = 2|T|(2*2!/4! - 1/3!) = 0.
    auto rhs = assemble_rhs([](Vec2) { return Vec2{1.0, 0.0}; }, mesh, dm.taylor_hood, rule);
    BaryPoly l0 = BaryPoly::lambda(0);
    double vertex_load = ((l0 * l0).scaled(2.0) + l0.scaled(-1.0)).integrate_exact(0.5);
    CHECK(vertex_load == doctest::Approx(0.0));
    CHECK(rhs[dm.taylor_hood.vdof(0, 0)] == doctest::Approx(vertex_load).epsilon(1e-13));
    // edge shape: int 4 l1 l2 = 4*2|T|/4! = 1/6.
    CHECK(rhs[dm.taylor_hood.vdof(3, 0)] == doctest::Approx(1.0 / 6).epsilon(1e-13));

    auto rhs3 = assemble_rhs([](Vec2) { return Vec2{3.0, 0.0}; }, mesh, dm.taylor_hood, rule);
    for (size_t i = 0; i < rhs.size(); ++i) CHECK(rhs3[i] == doctest::Approx(3.0 * rhs[i]));
}

TEST_CASE("apply_dirichlet with zero data pins rows to identity") {
    Mesh mesh = make_unit_square_mesh(1);
    DofMaps dm = build_dof_maps(mesh);
    SaddleSystem sys = assemble(mesh, dm);
    sys = apply_dirichlet(std::move(sys), dm.taylor_hood, {});
    for (int d = 0; d < sys.n_v; ++d) {
        if (!sys.dirichlet_mask[d]) continue;
        CHECK(sys.rhs_v[d] == 0.0);
        for (int j = 0; j < sys.n_v; ++j)
            CHECK(sys.A.coeff(d, j) == (d == j ? 1.0 : 0.0));
    }
}

TEST_CASE("boundary interpolation hits the exact data at the nodes") {
    LShapeExactSolution ex;
    Mesh mesh = example1_initial_mesh();
    DofMaps dm = build_dof_maps(mesh);
    SaddleSystem sys = assemble(mesh, dm);
    sys = apply_dirichlet(std::move(sys), dm.taylor_hood,
                          [&ex](Vec2 x) { return ex.velocity(x); });
    for (int n = 0; n < dm.taylor_hood.n_vnodes; ++n) {
        if (!dm.taylor_hood.node_on_boundary[n]) continue;
        Vec2 want = ex.velocity(dm.taylor_hood.node_pos[n]);
        CHECK(sys.dirichlet_values[dm.taylor_hood.vdof(n, 0)] ==
              doctest::Approx(want.x).epsilon(1e-14));
        CHECK(sys.dirichlet_values[dm.taylor_hood.vdof(n, 1)] ==
              doctest::Approx(want.y).epsilon(1e-14));
    }
}

TEST_CASE("cavity boundary data: watertight corners, moving lid") {
    CHECK(cavity_boundary_velocity({0.5, 1.0}).x == 1.0);
    CHECK(cavity_boundary_velocity({0.0, 1.0}).x == 0.0);
    CHECK(cavity_boundary_velocity({1.0, 1.0}).x == 0.0);
    CHECK(cavity_boundary_velocity({0.0, 0.0}).x == 0.0);
    CHECK(cavity_boundary_velocity({1.0, 0.5}).x == 0.0);
}

TEST_CASE("patch test: quadratic solution is reproduced to 1e-9") {
    Mesh mesh = make_unit_square_mesh(2);
    DofMaps dm = build_dof_maps(mesh);
    THSolution sol = solve_stokes(mesh, dm, patch_f, patch_u);

    // nodal velocity values match
    for (int n = 0; n < dm.taylor_hood.n_vnodes; ++n) {
        Vec2 want = patch_u(dm.taylor_hood.node_pos[n]);
        CHECK(std::abs(sol.u[dm.taylor_hood.vdof(n, 0)] - want.x) <= 1e-9);
        CHECK(std::abs(sol.u[dm.taylor_hood.vdof(n, 1)] - want.y) <= 1e-9);
    }
    for (int v = 0; v < mesh.n_vertices(); ++v)
        CHECK(std::abs(sol.p[v] - patch_p(mesh.point(v))) <= 1e-9);

    // discrete pressure honors the mean-zero gauge
    DofMaps dm2 = build_dof_maps(mesh);
    SaddleSystem sys = assemble(mesh, dm2);
    double mean = 0.0;
    for (int j = 0; j < sys.n_q; ++j) mean += sys.mean[j] * sol.p[j];
    CHECK(std::abs(mean) <= 1e-10);
}

TEST_CASE("solved cavity pressure has zero mean and exact global mass balance") {
    Mesh mesh = example2_initial_mesh();
    DofMaps dm = build_dof_maps(mesh);
    THSolution sol = solve_stokes(mesh, dm, {}, cavity_boundary_velocity);
    SaddleSystem sys = assemble(mesh, dm);
    double mean = 0.0;
    for (int j = 0; j < sys.n_q; ++j) mean += sys.mean[j] * sol.p[j];
    CHECK(std::abs(mean) <= 1e-10);

    const auto& rule = quadrature_rule(8);
    double div_total = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        ElementGeometry g = element_geometry(mesh, t);
        div_total += integrate(rule, g.area, [&](double l1, double l2, double l3) {
            return th_divergence(sol, dm.taylor_hood, g, t, l1, l2, l3);
        });
    }
    CHECK(std::abs(div_total) <= 1e-10);
}

TEST_CASE("example 1 pressure mean is pinned to zero") {
    LShapeExactSolution ex;
    Mesh mesh = example1_initial_mesh();
    DofMaps dm = build_dof_maps(mesh);
    THSolution sol = solve_stokes(mesh, dm, {}, [&ex](Vec2 x) { return ex.velocity(x); });
    SaddleSystem sys = assemble(mesh, dm);
    double mean = 0.0;
    for (int j = 0; j < sys.n_q; ++j) mean += sys.mean[j] * sol.p[j];
    CHECK(std::abs(mean) <= 1e-10);
}

TEST_CASE("augmented system solve meets the residual contract") {
    Mesh mesh = make_unit_square_mesh(3);
    DofMaps dm = build_dof_maps(mesh);
    SaddleSystem sys = assemble(mesh, dm);
    sys.rhs_v = assemble_rhs(patch_f, mesh, dm.taylor_hood, quadrature_rule(8));
    sys = apply_dirichlet(std::move(sys), dm.taylor_hood, patch_u);
    AugmentedSystem aug = attach_mean_zero(sys);
    auto x = factor(aug.M).solve(aug.rhs);
    CHECK(relative_residual(aug.M, x, aug.rhs) <= 1e-10);
}
