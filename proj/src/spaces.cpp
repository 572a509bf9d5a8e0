#include "stokes/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stokes {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

}  // namespace

BaryPoly BaryPoly::lambda(int i) {
    Term t;
    t.c = 1.0;
    (i == 0 ? t.a : i == 1 ? t.b : t.d) = 1;
    return BaryPoly({t});
}

double BaryPoly::eval(double l1, double l2, double l3) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.c * ipow(l1, t.a) * ipow(l2, t.b) * ipow(l3, t.d);
    return s;
}

BaryPoly BaryPoly::dlambda(int i) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
        Term d = t;
        int& e = (i == 0 ? d.a : i == 1 ? d.b : d.d);
        if (e == 0) continue;
        d.c *= e;
        e -= 1;
        out.push_back(d);
    }
    return BaryPoly(std::move(out));
}

std::array<double, 3> BaryPoly::eval_grad_lambda(double l1, double l2, double l3) const {
    std::array<double, 3> g{0.0, 0.0, 0.0};
    for (const auto& t : terms_) {
        double pa = ipow(l1, t.a), pb = ipow(l2, t.b), pd = ipow(l3, t.d);
        if (t.a > 0) g[0] += t.c * t.a * ipow(l1, t.a - 1) * pb * pd;
        if (t.b > 0) g[1] += t.c * t.b * pa * ipow(l2, t.b - 1) * pd;
        if (t.d > 0) g[2] += t.c * t.d * pa * pb * ipow(l3, t.d - 1);
    }
    return g;
}

BaryPoly BaryPoly::operator*(const BaryPoly& o) const {
    std::vector<Term> out;
    out.reserve(terms_.size() * o.terms_.size());
    for (const auto& s : terms_)
        for (const auto& t : o.terms_)
            out.push_back({s.c * t.c, s.a + t.a, s.b + t.b, s.d + t.d});
    return BaryPoly(std::move(out));
}

BaryPoly BaryPoly::operator+(const BaryPoly& o) const {
    std::vector<Term> out = terms_;
    out.insert(out.end(), o.terms_.begin(), o.terms_.end());
    return BaryPoly(std::move(out));
}

BaryPoly BaryPoly::scaled(double s) const {
    std::vector<Term> out = terms_;
    for (auto& t : out) t.c *= s;
    return BaryPoly(std::move(out));
}

double BaryPoly::integrate_exact(double area) const {
    auto fact = [](int n) {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    double s = 0.0;
    for (const auto& t : terms_)
        s += t.c * 2.0 * area * fact(t.a) * fact(t.b) * fact(t.d) / fact(t.a + t.b + t.d + 2);
    return s;
}

ElementGeometry element_geometry(const Mesh& mesh, int t) {
    const auto& tr = mesh.triangles[t];
    ElementGeometry g;
    for (int k = 0; k < 3; ++k) g.v[k] = mesh.point(tr.v[k]);
    g.area = 0.5 * ((g.v[1].x - g.v[0].x) * (g.v[2].y - g.v[0].y) -
                    (g.v[2].x - g.v[0].x) * (g.v[1].y - g.v[0].y));
    double inv2a = 1.0 / (2.0 * g.area);
    for (int k = 0; k < 3; ++k) {
        const Vec2& p = g.v[(k + 1) % 3];
        const Vec2& q = g.v[(k + 2) % 3];
        g.grad_lambda[k] = {(p.y - q.y) * inv2a, (q.x - p.x) * inv2a};
    }
    return g;
}

double p2_value(int i, double l1, double l2, double l3) {
    const double l[3] = {l1, l2, l3};
    if (i < 0 || i > 5) throw std::out_of_range("p2_value: local index out of range");
    if (i < 3) return l[i] * (2.0 * l[i] - 1.0);
    int k = i - 3;
    return 4.0 * l[(k + 1) % 3] * l[(k + 2) % 3];
}

std::array<double, 3> p2_grad_lambda(int i, double l1, double l2, double l3) {
    const double l[3] = {l1, l2, l3};
    std::array<double, 3> g{0.0, 0.0, 0.0};
    if (i < 0 || i > 5) throw std::out_of_range("p2_grad_lambda: local index out of range");
    if (i < 3) {
        g[i] = 4.0 * l[i] - 1.0;
    } else {
        int p = (i - 3 + 1) % 3, q = (i - 3 + 2) % 3;
        g[p] = 4.0 * l[q];
        g[q] = 4.0 * l[p];
    }
    return g;
}

std::pair<double, std::array<double, 3>> p2_eval(int i, double l1, double l2, double l3) {
    return {p2_value(i, l1, l2, l3), p2_grad_lambda(i, l1, l2, l3)};
}

std::vector<LocalBubble> bubble_velocity_modes(const Mesh& mesh, int t) {
    const auto& tr = mesh.triangles[t];
    std::vector<LocalBubble> modes;
    modes.reserve(9);
    for (int k = 0; k < 3; ++k) {
        int p = (k + 1) % 3, q = (k + 2) % 3;
        if (tr.v[p] > tr.v[q]) std::swap(p, q);  // orient by global vertex order
        BaryPoly la = BaryPoly::lambda(p), lb = BaryPoly::lambda(q);
        BaryPoly lab = la * lb;
        modes.push_back({lab * la + (lab * lb).scaled(-1.0), BubbleKind::EdgeCubic, k});
        modes.push_back({(la * la) * (lb * lb), BubbleKind::EdgeQuartic, k});
    }
    BaryPoly bt = BaryPoly::lambda(0) * BaryPoly::lambda(1) * BaryPoly::lambda(2);
    modes.push_back({bt, BubbleKind::Element, -1});
    modes.push_back({bt * BaryPoly::lambda(0), BubbleKind::Element, -1});
    modes.push_back({bt * BaryPoly::lambda(1), BubbleKind::Element, -1});
    return modes;
}

BaryPoly bubble_pressure_mode() {
    return BaryPoly::lambda(0) * BaryPoly::lambda(1) * BaryPoly::lambda(2);
}

DofMaps build_dof_maps(const Mesh& mesh) {
    DofMaps dm;
    THDofMap& th = dm.taylor_hood;
    th.n_vertices = mesh.n_vertices();
    th.n_edges = mesh.n_edges();
    th.n_vnodes = th.n_vertices + th.n_edges;
    th.n_v = 2 * th.n_vnodes;
    th.n_q = th.n_vertices;

    th.node_pos.resize(th.n_vnodes);
    th.node_on_boundary.assign(th.n_vnodes, 0);
    for (int v = 0; v < th.n_vertices; ++v) th.node_pos[v] = mesh.point(v);
    for (int e = 0; e < th.n_edges; ++e) {
        const Edge& ed = mesh.edges.edges[e];
        th.node_pos[th.n_vertices + e] = 0.5 * (mesh.point(ed.a) + mesh.point(ed.b));
        if (ed.boundary) {
            th.node_on_boundary[th.n_vertices + e] = 1;
            th.node_on_boundary[ed.a] = 1;
            th.node_on_boundary[ed.b] = 1;
        }
    }
    th.element_nodes.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        auto& en = th.element_nodes[t];
        for (int k = 0; k < 3; ++k) en[k] = tr.v[k];
        for (int k = 0; k < 3; ++k) {
            int e = mesh.edges.find(tr.v[(k + 1) % 3], tr.v[(k + 2) % 3]);
            en[3 + k] = th.n_vertices + e;
        }
    }

    BubbleDofMap& bu = dm.bubble;
    // Interior edges carry two modes each; boundary edge modes are excluded.
    std::vector<int> edge_slot(mesh.n_edges(), -1);
    int n_int = 0;
    for (int e = 0; e < mesh.n_edges(); ++e)
        if (!mesh.edges.edges[e].boundary) edge_slot[e] = n_int++;
    bu.n_scalar_modes = 2 * n_int + 3 * mesh.n_triangles();
    bu.n_v = 2 * bu.n_scalar_modes;
    bu.n_p = mesh.n_triangles();
    bu.c_s = mesh.n_triangles() > 0 ? 1 : 0;  // one pressure bubble per element

    bu.elements.resize(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        auto all = bubble_velocity_modes(mesh, t);
        auto& em = bu.elements[t];
        const auto& tr = mesh.triangles[t];
        for (size_t i = 0; i < all.size(); ++i) {
            const auto& mode = all[i];
            int gid;
            if (mode.kind == BubbleKind::Element) {
                gid = 2 * n_int + 3 * t + (static_cast<int>(i) - 6);
            } else {
                int e = mesh.edges.find(tr.v[(mode.local_edge + 1) % 3],
                                        tr.v[(mode.local_edge + 2) % 3]);
                if (edge_slot[e] < 0) continue;  // boundary edge
                gid = 2 * edge_slot[e] + (mode.kind == BubbleKind::EdgeCubic ? 0 : 1);
            }
            em.scalar_mode.push_back(gid);
            em.mode.push_back(mode);
        }
    }
    return dm;
}

}  // namespace stokes
