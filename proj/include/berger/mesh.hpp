#pragma once

#include <berger/surfaces.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace berger {

/**
 * @brief Triangle mesh with unit vertices, boundary-curve tags and an optional
 * tensor-grid chart.
 *
 * Boundary vertices carry the id of the curve they are pinned to and their
 * parameter on it.  Meshes built from parametrizations keep the (i,j) chart in
 * `grid`, which the first-order data extraction and the reflection doubling use.
 */
struct TriMesh {
    enum class Topology { disk, annulus };

    struct BoundaryInfo {
        int curve = -1;
        double param = 0.0;
    };

    struct Grid {
        int nx = 0, ny = 0;
        bool xwrap = false;
        double x0 = 0, dx = 0, y0 = 0, dy = 0;
        std::vector<int> vids;  // row-major, j*nx + i

        int at(int i, int j) const {
            if (xwrap) {
                i %= nx;
                if (i < 0) i += nx;
            }
            return vids[size_t(j) * nx + i];
        }
    };

    std::vector<Vec4> V;
    std::vector<std::array<int, 3>> F;
    std::vector<std::optional<BoundaryInfo>> boundary;
    Topology topology = Topology::disk;
    std::optional<Grid> grid;

    int n_vertices() const { return int(V.size()); }
    int n_faces() const { return int(F.size()); }
    bool is_boundary(int v) const { return boundary[size_t(v)].has_value(); }
};

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

struct GridCurveTags {
    int bottom = 0;   // j = 0
    int top = 1;      // j = ny-1
    int left = 2;     // i = 0 (ignored when xwrap)
    int right = 3;    // i = nx-1 (ignored when xwrap)
};

/// Tensor-grid mesh of a parametrized patch.  When xwrap is set the last
/// column connects back to the first and x1 is the full period.
inline TriMesh grid_mesh(const std::function<Vec4(double, double)>& eval, double x0, double x1,
                         int nx, bool xwrap, double y0, double y1, int ny,
                         TriMesh::Topology topo, const GridCurveTags& tags = {}) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("grid_mesh: need nx, ny >= 2");
    TriMesh m;
    m.topology = topo;
    TriMesh::Grid g;
    g.nx = nx;
    g.ny = ny;
    g.xwrap = xwrap;
    g.x0 = x0;
    g.dx = xwrap ? (x1 - x0) / nx : (x1 - x0) / (nx - 1);
    g.y0 = y0;
    g.dy = (y1 - y0) / (ny - 1);
    g.vids.resize(size_t(nx) * ny);

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double x = g.x0 + i * g.dx, y = g.y0 + j * g.dy;
            Vec4 p = eval(x, y);
            p.normalize();
            g.vids[size_t(j) * nx + i] = int(m.V.size());
            m.V.push_back(p);
            std::optional<TriMesh::BoundaryInfo> b;
            if (j == 0) b = TriMesh::BoundaryInfo{tags.bottom, x};
            else if (j == ny - 1) b = TriMesh::BoundaryInfo{tags.top, x};
            else if (!xwrap && i == 0) b = TriMesh::BoundaryInfo{tags.left, y};
            else if (!xwrap && i == nx - 1) b = TriMesh::BoundaryInfo{tags.right, y};
            m.boundary.push_back(b);
        }

    const int cols = xwrap ? nx : nx - 1;
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < cols; ++i) {
            const int a = g.at(i, j), b = g.at(i + 1, j);
            const int c = g.at(i + 1, j + 1), d = g.at(i, j + 1);
            m.F.push_back({a, b, c});
            m.F.push_back({a, c, d});
        }
    m.grid = g;
    return m;
}

inline TriMesh helicoid_mesh(const HelicoidSpec& spec, int nx, int ny) {
    return grid_mesh([&](double x, double y) { return helicoid_jet(spec, x, y).f; }, 0.0,
                     spec.params.horizontal_length(), nx, true, 0.0, 1.0, ny,
                     TriMesh::Topology::annulus);
}

inline TriMesh umbrella_mesh(const HelicoidSpec& spec, int nx, int ny, double margin = 0.1) {
    if (spec.ell != 0.0) throw std::invalid_argument("umbrella_mesh: spec must have pitch zero");
    const double xmax = kPi / std::sqrt(spec.params.kappa);
    return grid_mesh([&](double x, double y) { return helicoid_jet(spec, x, y).f; }, margin * xmax,
                     (1.0 - margin) * xmax, nx, false, 0.0, 1.0, ny, TriMesh::Topology::disk);
}

inline TriMesh fc_mesh(const FcSpec& spec, double x0, double x1, int nx, bool xwrap, double y0,
                       double y1, int ny) {
    return grid_mesh([&](double x, double y) { return fc_jet(spec, x, y).f; }, x0, x1, nx, xwrap,
                     y0, y1, ny, xwrap ? TriMesh::Topology::annulus : TriMesh::Topology::disk);
}

/// Totally geodesic 2-sphere {b = 0} in the round metric, poles trimmed.
inline TriMesh great_sphere_mesh(int nx, int ny, double polar_margin = 0.15) {
    return grid_mesh(
        [&](double ph, double th) {
            return Vec4(std::cos(th), 0.0, std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph));
        },
        0.0, 2.0 * kPi, nx, true, polar_margin, kPi - polar_margin, ny, TriMesh::Topology::annulus);
}

/// Coons-patch seed over the geodesic polygon: gamma1 bottom, gamma3 top,
/// gamma2 left, gamma4 right.  Boundary curve ids are the arc indices 0..3
/// with the arc parameter recorded.
inline TriMesh polygon_disk_mesh(const BergerParams& par, double lambda, int nx, int ny) {
    const GeodesicPolygon poly = build_polygon(par, lambda);
    const double L0 = poly.arc_length(0), L1 = poly.arc_length(1);
    const double L2 = poly.arc_length(2), L3 = poly.arc_length(3);
    const Vec4 P00 = poly.arc_at(0, 0.0).v, P10 = poly.arc_at(0, L0).v;
    const Vec4 P01 = poly.arc_at(2, 0.0).v, P11 = poly.arc_at(2, L2).v;

    TriMesh m = grid_mesh(
        [&](double u, double v) -> Vec4 {
            const Vec4 B = poly.arc_at(0, u * L0).v;
            const Vec4 T = poly.arc_at(2, u * L2).v;
            const Vec4 Lft = poly.arc_at(1, v * L1).v;
            const Vec4 Rgt = poly.arc_at(3, v * L3).v;
            Vec4 p = (1 - v) * B + v * T + (1 - u) * Lft + u * Rgt -
                     ((1 - u) * (1 - v) * P00 + u * (1 - v) * P10 + (1 - u) * v * P01 +
                      u * v * P11);
            return p;
        },
        0.0, 1.0, nx, false, 0.0, 1.0, ny, TriMesh::Topology::disk, GridCurveTags{0, 2, 1, 3});

    // boundary params in unit coordinates; rescale to the arc parameters
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!m.boundary[size_t(v)]) continue;
        auto& b = *m.boundary[size_t(v)];
        const double len = poly.arc_length(b.curve);
        b.param *= len;
        // snap the pinned vertices onto the exact arcs
        m.V[size_t(v)] = poly.arc_at(b.curve, b.param).v;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Needle repair.
// ---------------------------------------------------------------------------

inline double triangle_aspect(const TriMesh& m, const std::array<int, 3>& f) {
    const Vec4 &a = m.V[size_t(f[0])], &b = m.V[size_t(f[1])], &c = m.V[size_t(f[2])];
    const double e0 = (b - a).norm(), e1 = (c - b).norm(), e2 = (a - c).norm();
    const double lmax = std::max({e0, e1, e2});
    const double s = 0.5 * (e0 + e1 + e2);
    const double area2 = std::max(0.0, s * (s - e0) * (s - e1) * (s - e2));
    const double area = std::sqrt(area2);
    if (area < 1e-300) return std::numeric_limits<double>::infinity();
    return lmax * lmax / (2.0 * area);
}

/// Flip shared edges of needle triangles (aspect beyond the threshold) when the
/// flip improves the worse of the pair.  Grid charts are dropped if anything flips.
inline int repair_needles(TriMesh& m, double max_aspect = 1e3, int max_passes = 8) {
    int flips = 0;
    for (int pass = 0; pass < max_passes; ++pass) {
        std::unordered_map<int64_t, std::pair<int, int>> edge_face;
        auto key = [&](int a, int b) {
            if (a > b) std::swap(a, b);
            return int64_t(a) * (int64_t(m.n_vertices()) + 1) + b;
        };
        edge_face.clear();
        for (int f = 0; f < m.n_faces(); ++f)
            for (int e = 0; e < 3; ++e) {
                const int64_t k = key(m.F[size_t(f)][e], m.F[size_t(f)][(e + 1) % 3]);
                auto it = edge_face.find(k);
                if (it == edge_face.end())
                    edge_face[k] = {f, -1};
                else
                    it->second.second = f;
            }
        bool changed = false;
        for (int f = 0; f < m.n_faces(); ++f) {
            if (triangle_aspect(m, m.F[size_t(f)]) <= max_aspect) continue;
            // longest edge of f
            int ebest = 0;
            double lbest = -1;
            for (int e = 0; e < 3; ++e) {
                const double l =
                    (m.V[size_t(m.F[size_t(f)][(e + 1) % 3])] - m.V[size_t(m.F[size_t(f)][e])]).norm();
                if (l > lbest) { lbest = l; ebest = e; }
            }
            const int a = m.F[size_t(f)][ebest], b = m.F[size_t(f)][(ebest + 1) % 3];
            const int c = m.F[size_t(f)][(ebest + 2) % 3];
            const auto it = edge_face.find(key(a, b));
            if (it == edge_face.end() || it->second.second < 0) continue;
            const int g = it->second.first == f ? it->second.second : it->second.first;
            int d = -1;
            for (int e = 0; e < 3; ++e) {
                const int v = m.F[size_t(g)][e];
                if (v != a && v != b) d = v;
            }
            if (d < 0 || d == c) continue;
            const double before =
                std::max(triangle_aspect(m, m.F[size_t(f)]), triangle_aspect(m, m.F[size_t(g)]));
            const std::array<int, 3> nf = {a, d, c}, ng = {d, b, c};
            const double after = std::max(triangle_aspect(m, nf), triangle_aspect(m, ng));
            if (after < before) {
                m.F[size_t(f)] = nf;
                m.F[size_t(g)] = ng;
                ++flips;
                changed = true;
                break;  // edge map is stale; rebuild
            }
        }
        if (!changed) break;
    }
    if (flips > 0) m.grid.reset();
    return flips;
}

// ---------------------------------------------------------------------------
// Boundary loops.
// ---------------------------------------------------------------------------

/// Vertices on edges that belong to exactly one face.
inline std::vector<char> boundary_vertex_flags(const TriMesh& m) {
    std::unordered_map<int64_t, int> edge_count;
    auto key = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return int64_t(a) * (int64_t(m.n_vertices()) + 1) + b;
    };
    for (const auto& f : m.F)
        for (int e = 0; e < 3; ++e) ++edge_count[key(f[e], f[(e + 1) % 3])];
    std::vector<char> flag(size_t(m.n_vertices()), 0);
    for (const auto& f : m.F)
        for (int e = 0; e < 3; ++e) {
            if (edge_count[key(f[e], f[(e + 1) % 3])] == 1) {
                flag[size_t(f[e])] = 1;
                flag[size_t(f[(e + 1) % 3])] = 1;
            }
        }
    return flag;
}

// ---------------------------------------------------------------------------
// .s3mesh I/O.  Header "s3mesh nv nf nb topology"; then nv vertex lines of
// four floats, nf face lines of three 0-based indices, nb boundary lines of
// "vertex curve parameter".  An optional trailing "grid nx ny xwrap x0 dx y0 dy"
// section carries the chart.
// ---------------------------------------------------------------------------

inline void save_s3mesh(const TriMesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_s3mesh: cannot open " + path);
    char buf[256];
    int nb = 0;
    for (const auto& b : m.boundary) nb += b.has_value();
    out << "s3mesh " << m.n_vertices() << ' ' << m.n_faces() << ' ' << nb << ' '
        << (m.topology == TriMesh::Topology::annulus ? "annulus" : "disk") << '\n';
    for (const Vec4& v : m.V) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", v[0], v[1], v[2], v[3]);
        out << buf;
    }
    for (const auto& f : m.F) out << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.boundary[size_t(v)]) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", v, m.boundary[size_t(v)]->curve,
                          m.boundary[size_t(v)]->param);
            out << buf;
        }
    if (m.grid) {
        const auto& g = *m.grid;
        std::snprintf(buf, sizeof buf, "grid %d %d %d %.17g %.17g %.17g %.17g\n", g.nx, g.ny,
                      int(g.xwrap), g.x0, g.dx, g.y0, g.dy);
        out << buf;
        for (size_t i = 0; i < g.vids.size(); ++i) out << g.vids[i] << '\n';
    }
}

inline TriMesh load_s3mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_s3mesh: cannot open " + path);
    std::string tag, topo;
    int nv = 0, nf = 0, nb = 0;
    in >> tag >> nv >> nf >> nb >> topo;
    if (tag != "s3mesh" || nv <= 0) throw std::runtime_error("load_s3mesh: bad header in " + path);
    TriMesh m;
    m.topology = topo == "annulus" ? TriMesh::Topology::annulus : TriMesh::Topology::disk;
    m.V.resize(size_t(nv));
    m.boundary.assign(size_t(nv), std::nullopt);
    for (auto& v : m.V) in >> v[0] >> v[1] >> v[2] >> v[3];
    m.F.resize(size_t(nf));
    for (auto& f : m.F) in >> f[0] >> f[1] >> f[2];
    for (int k = 0; k < nb; ++k) {
        int v, c;
        double t;
        in >> v >> c >> t;
        m.boundary[size_t(v)] = TriMesh::BoundaryInfo{c, t};
    }
    if (in >> tag && tag == "grid") {
        TriMesh::Grid g;
        int wrap = 0;
        in >> g.nx >> g.ny >> wrap >> g.x0 >> g.dx >> g.y0 >> g.dy;
        g.xwrap = wrap != 0;
        g.vids.resize(size_t(g.nx) * g.ny);
        for (auto& id : g.vids) in >> id;
        m.grid = g;
    }
    if (!in && !in.eof()) throw std::runtime_error("load_s3mesh: truncated file " + path);
    return m;
}

/// View-only OBJ of the Hopf image (on the 2-sphere of radius 1/sqrt(kappa)).
inline void export_obj_hopf(const TriMesh& m, const BergerParams& par, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_obj_hopf: cannot open " + path);
    char buf[200];
    for (const Vec4& v : m.V) {
        S3Point p;
        p.v = v;
        const Vec3 q = hopf_project(par, p);
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", q[0], q[1], q[2]);
        out << buf;
    }
    for (const auto& f : m.F) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

/// View-only OBJ via stereographic projection from (-1,0,0,0).
inline void export_obj_stereographic(const TriMesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_obj_stereographic: cannot open " + path);
    char buf[200];
    for (const Vec4& v : m.V) {
        const double d = 1.0 + v[0];
        const double s = std::abs(d) < 1e-12 ? 1e12 : 1.0 / d;
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", s * v[1], s * v[2], s * v[3]);
        out << buf;
    }
    for (const auto& f : m.F) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

}  // namespace berger
