#include "stokes/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace stokes {

namespace {

std::pair<int, int> edge_key(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

double signed_area(Vec2 a, Vec2 b, Vec2 c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

}  // namespace

int EdgeTable::find(int a, int b) const {
    auto it = index_.find(edge_key(a, b));
    return it == index_.end() ? -1 : it->second;
}

double Mesh::area(int t) const {
    const auto& tr = triangles[t];
    return signed_area(point(tr.v[0]), point(tr.v[1]), point(tr.v[2]));
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (int t = 0; t < n_triangles(); ++t) sum += area(t);
    return sum;
}

double Mesh::diameter(int t) const {
    const auto& tr = triangles[t];
    double h = 0.0;
    for (int k = 0; k < 3; ++k)
        h = std::max(h, norm(point(tr.v[k]) - point(tr.v[(k + 1) % 3])));
    return h;
}

int Mesh::boundary_tag(int a, int b) const {
    auto it = boundary_tags_.find(edge_key(a, b));
    return it == boundary_tags_.end() ? 0 : it->second;
}

void Mesh::rebuild() {
    triangles.clear();
    tri_skeleton_.clear();
    for (int s = 0; s < static_cast<int>(skeleton_.size()); ++s) {
        const auto& sk = skeleton_[s];
        if (sk.green_edge < 0) {
            triangles.push_back({sk.v, sk.state, sk.parent});
            tri_skeleton_.push_back(s);
        } else {
            // Bisect toward the midpoint of local edge k = (k+1, k+2).
            int k = sk.green_edge;
            int p = sk.v[(k + 1) % 3], q = sk.v[(k + 2) % 3], o = sk.v[k];
            auto it = midpoints_.find(edge_key(p, q));
            if (it == midpoints_.end())
                throw std::runtime_error("mesh: green edge without midpoint");
            int m = it->second;
            triangles.push_back({{p, m, o}, RefinementState::GreenChild, sk.green_parents[0]});
            triangles.push_back({{m, q, o}, RefinementState::GreenChild, sk.green_parents[1]});
            tri_skeleton_.push_back(s);
            tri_skeleton_.push_back(s);
        }
    }

    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tr = triangles[t];
        if (tr.v[0] == tr.v[1] || tr.v[1] == tr.v[2] || tr.v[0] == tr.v[2])
            throw std::runtime_error("mesh: repeated vertex in triangle " + std::to_string(t));
        if (area(t) <= 0.0)
            throw std::runtime_error("mesh: non-positive area in triangle " + std::to_string(t));
    }

    edges.edges.clear();
    edges.index_.clear();
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tr = triangles[t];
        for (int k = 0; k < 3; ++k) {
            auto key = edge_key(tr.v[k], tr.v[(k + 1) % 3]);
            auto it = edges.index_.find(key);
            if (it == edges.index_.end()) {
                Edge e;
                e.a = key.first;
                e.b = key.second;
                e.tri[0] = t;
                e.n_tri = 1;
                edges.index_[key] = static_cast<int>(edges.edges.size());
                edges.edges.push_back(e);
            } else {
                Edge& e = edges.edges[it->second];
                if (e.n_tri >= 2)
                    throw std::runtime_error("mesh: non-manifold edge (" + std::to_string(e.a) +
                                             "," + std::to_string(e.b) + ")");
                e.tri[e.n_tri++] = t;
            }
        }
    }
    // Re-sort edges by (a,b) so ids do not depend on triangle traversal order.
    std::vector<int> order(edges.edges.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const Edge &x = edges.edges[i], &y = edges.edges[j];
        return std::make_pair(x.a, x.b) < std::make_pair(y.a, y.b);
    });
    std::vector<Edge> sorted;
    sorted.reserve(edges.edges.size());
    for (int i : order) sorted.push_back(edges.edges[i]);
    edges.edges = std::move(sorted);
    edges.index_.clear();
    for (int i = 0; i < static_cast<int>(edges.edges.size()); ++i)
        edges.index_[{edges.edges[i].a, edges.edges[i].b}] = i;

    for (auto& e : edges.edges) {
        e.boundary = (e.n_tri == 1);
        e.tag = e.boundary ? boundary_tag(e.a, e.b) : 0;
    }
}

Mesh Mesh::from_raw(std::vector<Vertex> vertices, std::vector<std::array<int, 3>> tri_vertices,
                    int default_boundary_tag) {
    Mesh m;
    m.vertices = std::move(vertices);
    for (const auto& tv : tri_vertices)
        m.skeleton_.push_back({tv, RefinementState::Unrefined, -1, -1, {-1, -1}});
    m.rebuild();
    // Everything with a single adjacent triangle starts out tagged.
    for (const auto& e : m.edges.edges)
        if (e.boundary) m.boundary_tags_[{e.a, e.b}] = default_boundary_tag;
    m.rebuild();
    return m;
}

Mesh make_unit_square_mesh(int n) {
    if (n < 1) throw std::invalid_argument("make_unit_square_mesh: n must be >= 1");
    std::vector<Vertex> verts;
    verts.reserve((n + 1) * (n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    auto vid = [n](int i, int j) { return j * (n + 1) + i; };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(2 * n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int ll = vid(i, j), lr = vid(i + 1, j), ur = vid(i + 1, j + 1), ul = vid(i, j + 1);
            tris.push_back({ll, lr, ur});
            tris.push_back({ll, ur, ul});
        }
    Mesh m = Mesh::from_raw(std::move(verts), std::move(tris));
    // Tags: 1 bottom, 2 right, 3 top, 4 left.
    for (auto& [key, tag] : m.boundary_tags_) {
        Vec2 a = m.point(key.first), b = m.point(key.second);
        if (a.y == 0.0 && b.y == 0.0) tag = 1;
        else if (a.x == 1.0 && b.x == 1.0) tag = 2;
        else if (a.y == 1.0 && b.y == 1.0) tag = 3;
        else tag = 4;
    }
    m.rebuild();
    return m;
}

Mesh make_lshape_mesh() {
    // Three unit squares, each cut into four triangles from its center.
    std::vector<Vertex> verts = {
        {-1, 1}, {0, 1}, {1, 1},    // 0 1 2
        {-1, 0}, {0, 0}, {1, 0},    // 3 4 5
        {-1, -1}, {0, -1},          // 6 7
        {-0.5, 0.5}, {0.5, 0.5}, {-0.5, -0.5},  // centers 8 9 10
    };
    auto fan = [](int a, int b, int c, int d, int ctr) {
        // Square with CCW corners a,b,c,d.
        return std::vector<std::array<int, 3>>{
            {a, b, ctr}, {b, c, ctr}, {c, d, ctr}, {d, a, ctr}};
    };
    std::vector<std::array<int, 3>> tris;
    for (const auto& t : fan(3, 4, 1, 0, 8)) tris.push_back(t);   // [-1,0]x[0,1]
    for (const auto& t : fan(4, 5, 2, 1, 9)) tris.push_back(t);   // [0,1]x[0,1]
    for (const auto& t : fan(6, 7, 4, 3, 10)) tris.push_back(t);  // [-1,0]x[-1,0]
    return Mesh::from_raw(std::move(verts), std::move(tris));
}

EdgeTable build_edges(const Mesh& mesh) { return mesh.edges; }

Mesh refine(const Mesh& mesh, const std::vector<int>& marks) {
    if (mesh.n_triangles() == 0) throw std::invalid_argument("refine: empty mesh");
    for (int m : marks)
        if (m < 0 || m >= mesh.n_triangles())
            throw std::invalid_argument("refine: invalid triangle id " + std::to_string(m));

    struct Work {
        std::array<int, 3> v;
        bool alive = true;
        bool marked = false;
        bool fresh = false;  // created by this call
        RefinementState state = RefinementState::Unrefined;
        int parent = -1;                           // covering leaf id in `mesh`
        std::array<int, 2> green_parents{-1, -1};  // old public ids if re-greened
    };

    std::vector<Work> work;
    work.reserve(mesh.skeleton_.size() * 2);
    for (const auto& sk : mesh.skeleton_) {
        Work w;
        w.v = sk.v;
        w.state = sk.state;
        work.push_back(w);
    }
    // Covering public leaves of each skeleton triangle.
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        int s = mesh.tri_skeleton_[t];
        if (mesh.skeleton_[s].green_edge < 0) {
            work[s].parent = t;
            work[s].green_parents = {t, t};
        } else if (work[s].green_parents[0] < 0) {
            work[s].parent = t;
            work[s].green_parents = {t, t + 1};
        }
    }
    for (int m : marks) work[mesh.tri_skeleton_[m]].marked = true;

    Mesh out;
    out.vertices = mesh.vertices;
    out.midpoints_ = mesh.midpoints_;
    out.boundary_tags_ = mesh.boundary_tags_;

    auto midpoint = [&](int a, int b) {
        auto key = edge_key(a, b);
        auto it = out.midpoints_.find(key);
        if (it != out.midpoints_.end()) return it->second;
        int id = out.n_vertices();
        out.vertices.push_back({0.5 * (out.vertices[a].x + out.vertices[b].x),
                                0.5 * (out.vertices[a].y + out.vertices[b].y)});
        out.midpoints_[key] = id;
        auto bt = out.boundary_tags_.find(key);
        if (bt != out.boundary_tags_.end()) {
            int tag = bt->second;
            out.boundary_tags_.erase(bt);
            out.boundary_tags_[edge_key(a, id)] = tag;
            out.boundary_tags_[edge_key(id, b)] = tag;
        }
        return id;
    };
    auto has_mid = [&](int a, int b) { return out.midpoints_.count(edge_key(a, b)) != 0; };
    auto split_edges = [&](const Work& w) {
        int n = 0;
        for (int k = 0; k < 3; ++k)
            if (has_mid(w.v[(k + 1) % 3], w.v[(k + 2) % 3])) ++n;
        return n;
    };
    auto has_deep_split = [&](const Work& w) {
        for (int k = 0; k < 3; ++k) {
            int a = w.v[(k + 1) % 3], b = w.v[(k + 2) % 3];
            auto it = out.midpoints_.find(edge_key(a, b));
            if (it == out.midpoints_.end()) continue;
            if (has_mid(a, it->second) || has_mid(it->second, b)) return true;
        }
        return false;
    };

    // Red refinement to a fixpoint. A triangle is split when it is marked,
    // has two or more split edges, or a neighbor across an already split
    // edge has been refined a second time.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < work.size(); ++i) {
            if (!work[i].alive) continue;
            if (!(work[i].marked || split_edges(work[i]) >= 2 || has_deep_split(work[i])))
                continue;
            // Copy before appending children: push_back may reallocate `work`.
            const std::array<int, 3> v = work[i].v;
            const int parent = work[i].parent;
            int m01 = midpoint(v[0], v[1]);
            int m12 = midpoint(v[1], v[2]);
            int m20 = midpoint(v[2], v[0]);
            work[i].alive = false;
            changed = true;
            for (const auto& cv : {std::array<int, 3>{v[0], m01, m20},
                                   std::array<int, 3>{v[1], m12, m01},
                                   std::array<int, 3>{v[2], m20, m12},
                                   std::array<int, 3>{m01, m12, m20}}) {
                Work c;
                c.v = cv;
                c.fresh = true;
                c.state = RefinementState::RedChild;
                c.parent = parent;
                c.green_parents = {parent, parent};
                work.push_back(c);
            }
        }
    }

    for (const auto& w : work) {
        if (!w.alive) continue;
        Mesh::SkeletonTri sk;
        sk.v = w.v;
        sk.state = w.state;
        sk.parent = w.parent;
        sk.green_parents = w.green_parents;
        int n = split_edges(w);
        if (n == 0) {
            sk.green_edge = -1;
        } else if (n == 1) {
            for (int k = 0; k < 3; ++k)
                if (has_mid(w.v[(k + 1) % 3], w.v[(k + 2) % 3])) sk.green_edge = k;
        } else {
            throw std::runtime_error("refine: closure fixpoint left a doubly split triangle");
        }
        out.skeleton_.push_back(sk);
    }

    out.rebuild();
    return out;
}

Mesh refine_all(const Mesh& mesh) {
    std::vector<int> all(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) all[t] = t;
    return refine(mesh, all);
}

double shape_regularity(const Mesh& mesh) {
    double worst = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        double a = norm(mesh.point(tr.v[1]) - mesh.point(tr.v[0]));
        double b = norm(mesh.point(tr.v[2]) - mesh.point(tr.v[1]));
        double c = norm(mesh.point(tr.v[0]) - mesh.point(tr.v[2]));
        double area = mesh.area(t);
        double s = 0.5 * (a + b + c);
        if (area <= 0.0 || s <= 0.0)
            throw std::runtime_error("shape_regularity: degenerate triangle " + std::to_string(t));
        double inradius = area / s;
        worst = std::max(worst, std::max({a, b, c}) / inradius);
    }
    return worst;
}

double min_angle_deg(const Mesh& mesh) {
    double worst = 180.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            Vec2 p = mesh.point(tr.v[k]);
            Vec2 u = mesh.point(tr.v[(k + 1) % 3]) - p;
            Vec2 w = mesh.point(tr.v[(k + 2) % 3]) - p;
            double cosang = dot(u, w) / (norm(u) * norm(w));
            cosang = std::clamp(cosang, -1.0, 1.0);
            worst = std::min(worst, std::acos(cosang) * 180.0 / M_PI);
        }
    }
    return worst;
}

bool has_hanging_vertices(const Mesh& mesh) {
    for (const auto& e : mesh.edges.edges) {
        if (e.n_tri != 1) continue;
        auto it = mesh.midpoints_.find({e.a, e.b});
        if (it == mesh.midpoints_.end()) continue;
        int m = it->second;
        if (mesh.edges.find(e.a, m) >= 0 || mesh.edges.find(m, e.b) >= 0) return true;
    }
    return false;
}

std::string write_mesh_text(const Mesh& mesh) {
    std::string o;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d %d %d\n", mesh.n_vertices(), mesh.n_triangles(),
                  mesh.n_edges());
    o += buf;
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x, v.y);
        o += buf;
    }
    for (const auto& t : mesh.triangles) {
        std::snprintf(buf, sizeof buf, "t %d %d %d %d\n", t.v[0], t.v[1], t.v[2],
                      static_cast<int>(t.state));
        o += buf;
    }
    for (const auto& e : mesh.edges.edges) {
        std::snprintf(buf, sizeof buf, "e %d %d %d\n", e.a, e.b, e.tag);
        o += buf;
    }
    return o;
}

Mesh read_mesh_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("mesh parse error at line " + std::to_string(lineno) + ": " +
                                    what);
    };
    auto next_line = [&]() {
        if (!std::getline(in, line)) fail("unexpected end of file");
        ++lineno;
    };

    next_line();
    int nv = 0, nt = 0, ne = 0;
    if (std::sscanf(line.c_str(), "%d %d %d", &nv, &nt, &ne) != 3 || nv <= 0 || nt <= 0 || ne < 0)
        fail("expected header 'nv nt ne'");

    Mesh m;
    m.vertices.reserve(nv);
    for (int i = 0; i < nv; ++i) {
        next_line();
        double x = 0, y = 0;
        if (std::sscanf(line.c_str(), "v %lg %lg", &x, &y) != 2) fail("expected 'v x y'");
        if (!std::isfinite(x) || !std::isfinite(y)) fail("non-finite coordinate");
        m.vertices.push_back({x, y});
    }
    for (int i = 0; i < nt; ++i) {
        next_line();
        int a = 0, b = 0, c = 0, st = 0;
        if (std::sscanf(line.c_str(), "t %d %d %d %d", &a, &b, &c, &st) != 4)
            fail("expected 't i j k state'");
        for (int v : {a, b, c})
            if (v < 0 || v >= nv) fail("vertex id out of range");
        if (st < 0 || st > 2) fail("triangle state out of range");
        Mesh::SkeletonTri sk;
        sk.v = {a, b, c};
        sk.state = static_cast<RefinementState>(st);
        m.skeleton_.push_back(sk);
    }
    for (int i = 0; i < ne; ++i) {
        next_line();
        int a = 0, b = 0, tag = 0;
        if (std::sscanf(line.c_str(), "e %d %d %d", &a, &b, &tag) != 3)
            fail("expected 'e i j tag'");
        if (a < 0 || a >= nv || b < 0 || b >= nv) fail("vertex id out of range");
        if (tag != 0) m.boundary_tags_[edge_key(a, b)] = tag;
    }
    m.rebuild();
    return m;
}

std::string write_mesh_vtk(const Mesh& mesh) {
    std::string o = "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "POINTS %d double\n", mesh.n_vertices());
    o += buf;
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v.x, v.y);
        o += buf;
    }
    std::snprintf(buf, sizeof buf, "CELLS %d %d\n", mesh.n_triangles(), 4 * mesh.n_triangles());
    o += buf;
    for (const auto& t : mesh.triangles) {
        std::snprintf(buf, sizeof buf, "3 %d %d %d\n", t.v[0], t.v[1], t.v[2]);
        o += buf;
    }
    std::snprintf(buf, sizeof buf, "CELL_TYPES %d\n", mesh.n_triangles());
    o += buf;
    for (int t = 0; t < mesh.n_triangles(); ++t) o += "5\n";
    return o;
}

}  // namespace stokes
