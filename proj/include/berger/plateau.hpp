#pragma once

#include <berger/mesh.hpp>
#include <berger/parallel.hpp>

#include <cstdint>
#include <unordered_map>

namespace berger {

// ---------------------------------------------------------------------------
// Discrete area in the ambient metric.  Each triangle contributes
// (1/2) sqrt(g(u,u) g(v,v) - g(u,v)^2) with the metric sampled at its
// barycenter projected to the sphere.
// ---------------------------------------------------------------------------

namespace detail {

struct TriQuantities {
    double area = 0.0;
    Vec4 grad[3] = {Vec4::Zero(), Vec4::Zero(), Vec4::Zero()};
};

inline TriQuantities triangle_area_grad(const BergerParams& par, const Vec4& p0, const Vec4& p1,
                                        const Vec4& p2, bool want_grad) {
    TriQuantities out;
    const Vec4 u = p1 - p0, v = p2 - p0;
    const Vec4 b = (p0 + p1 + p2) / 3.0;
    const double r = b.norm();
    const Vec4 mu = b / r;
    const Vec4 m = v_field(mu);
    const double s = 4.0 / par.kappa, e = par.eta() - 1.0;

    const double um = u.dot(m), vm = v.dot(m);
    const double guu = s * (u.dot(u) + e * um * um);
    const double guv = s * (u.dot(v) + e * um * vm);
    const double gvv = s * (v.dot(v) + e * vm * vm);
    const double Q = guu * gvv - guv * guv;
    if (!(Q > 0.0)) return out;  // degenerate triangle contributes nothing
    out.area = 0.5 * std::sqrt(Q);
    if (!want_grad) return out;

    const double cu = gvv / (8.0 * out.area);
    const double cv = guu / (8.0 * out.area);
    const double cx = -guv / (4.0 * out.area);

    const Vec4 Xu = cu * s * (2.0 * u + 2.0 * e * um * m) + cx * s * (v + e * vm * m);
    const Vec4 Xv = cv * s * (2.0 * v + 2.0 * e * vm * m) + cx * s * (u + e * um * m);
    const Vec4 Xm = cu * s * 2.0 * e * um * u + cv * s * 2.0 * e * vm * v +
                    cx * s * e * (vm * u + um * v);
    // m = V(b/|b|): pull Xm back to a barycenter gradient
    const Vec4 VtXm = -v_field(Xm);  // V^T = -V
    const Vec4 Xb = (VtXm - mu.dot(VtXm) * mu) / r;

    out.grad[0] = -Xu - Xv + Xb / 3.0;
    out.grad[1] = Xu + Xb / 3.0;
    out.grad[2] = Xv + Xb / 3.0;
    return out;
}

}  // namespace detail

inline double discrete_area(const BergerParams& par, const TriMesh& m) {
    std::vector<double> per_face(size_t(m.n_faces()));
    parallel_for(m.n_faces(), [&](int f) {
        const auto& t = m.F[size_t(f)];
        per_face[size_t(f)] = detail::triangle_area_grad(par, m.V[size_t(t[0])], m.V[size_t(t[1])],
                                                         m.V[size_t(t[2])], false)
                                  .area;
    });
    double total = 0.0;
    for (double a : per_face) total += a;  // fixed order keeps runs bit-identical
    return total;
}

/// Euclidean gradient of discrete_area per vertex, and the vertex masses
/// (one third of the incident area).
struct AreaGradient {
    std::vector<Vec4> grad;
    std::vector<double> mass;
    double area = 0.0;
};

inline AreaGradient area_gradient(const BergerParams& par, const TriMesh& m) {
    std::vector<detail::TriQuantities> per_face(size_t(m.n_faces()));
    parallel_for(m.n_faces(), [&](int f) {
        const auto& t = m.F[size_t(f)];
        per_face[size_t(f)] = detail::triangle_area_grad(par, m.V[size_t(t[0])], m.V[size_t(t[1])],
                                                         m.V[size_t(t[2])], true);
    });
    AreaGradient out;
    out.grad.assign(size_t(m.n_vertices()), Vec4::Zero());
    out.mass.assign(size_t(m.n_vertices()), 0.0);
    for (int f = 0; f < m.n_faces(); ++f) {
        const auto& t = m.F[size_t(f)];
        const auto& q = per_face[size_t(f)];
        out.area += q.area;
        for (int k = 0; k < 3; ++k) {
            out.grad[size_t(t[k])] += q.grad[k];
            out.mass[size_t(t[k])] += q.area / 3.0;
        }
    }
    return out;
}

namespace detail {

/// Metric-gradient of the area at a vertex, projected to the tangent space
/// orthogonally with respect to the ambient metric.
inline Vec4 metric_tangent_gradient(const BergerParams& par, const Vec4& p, const Vec4& egrad) {
    S3Point sp;
    sp.v = p;
    const Mat4 Ginv = metric_matrix_inverse(par, sp);
    const Vec4 w = Ginv * egrad;
    const Vec4 ng = Ginv * p;  // metric normal direction of the sphere
    return w - (w.dot(p) / ng.dot(p)) * ng;
}

}  // namespace detail

/**
 * @brief Discrete mean-curvature magnitude per vertex: metric norm of the area
 * gradient divided by the vertex mass.  Zero at boundary vertices.
 */
inline std::vector<double> mean_curvature_residual(const BergerParams& par, const TriMesh& m) {
    const AreaGradient ag = area_gradient(par, m);
    std::vector<double> res(size_t(m.n_vertices()), 0.0);
    parallel_for(m.n_vertices(), [&](int v) {
        if (m.is_boundary(v) || ag.mass[size_t(v)] <= 0.0) return;
        const Vec4 wt = detail::metric_tangent_gradient(par, m.V[size_t(v)], ag.grad[size_t(v)]);
        S3Point sp;
        sp.v = m.V[size_t(v)];
        const double g = wt.dot(metric_matrix(par, sp) * wt);
        res[size_t(v)] = std::sqrt(std::max(0.0, g)) / ag.mass[size_t(v)];
    });
    return res;
}

inline double max_interior_residual(const BergerParams& par, const TriMesh& m) {
    const auto r = mean_curvature_residual(par, m);
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, v);
    return worst;
}

// ---------------------------------------------------------------------------
// Fixed-boundary minimization.
// ---------------------------------------------------------------------------

/// Face lists per vertex.
inline std::vector<std::vector<int>> vertex_stars(const TriMesh& m) {
    std::vector<std::vector<int>> star(m.V.size());
    for (int f = 0; f < m.n_faces(); ++f)
        for (int k = 0; k < 3; ++k) star[size_t(m.F[size_t(f)][k])].push_back(f);
    return star;
}

/// Area-weighted discrete surface normal at a vertex, assembled in the frame
/// and mapped back to R^4 (unit in the ambient metric).
inline Vec4 vertex_surface_normal(const BergerParams& par, const TriMesh& m,
                                  const std::vector<std::vector<int>>& star, int v) {
    const Vec4 p = m.V[size_t(v)];
    const Vec4 e1 = frame_e1_raw(par, p), e2 = frame_e2_raw(par, p), xi = frame_xi_raw(par, p);
    Vec3 acc = Vec3::Zero();
    for (int f : star[size_t(v)]) {
        const auto& t = m.F[size_t(f)];
        const int slot = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
        const Vec4 u = m.V[size_t(t[(slot + 1) % 3])] - p;
        const Vec4 w = m.V[size_t(t[(slot + 2) % 3])] - p;
        const Vec3 uf(metric_eval_raw(par, p, u, e1), metric_eval_raw(par, p, u, e2),
                      metric_eval_raw(par, p, u, xi));
        const Vec3 wf(metric_eval_raw(par, p, w, e1), metric_eval_raw(par, p, w, e2),
                      metric_eval_raw(par, p, w, xi));
        acc += uf.cross(wf);
    }
    const double n = acc.norm();
    if (n < 1e-300) return Vec4::Zero();
    acc /= n;
    return acc[0] * e1 + acc[1] * e2 + acc[2] * xi;
}

struct MinimizeConfig {
    double tol = 1e-3;            // residual target (full-gradient norm per mass)
    int max_iterations = 100000;
    double stall = 1e-13;         // relative area decrease considered a stall
    int stall_patience = 60;
    double step0 = 1e-3;
    double step_grow = 1.05;      // gentle regrowth keeps the step under the stability edge
    double step_min = 1e-14;
    int smooth_every = 40;        // area-guarded tangential redistribution cadence
};

struct SolveReport {
    int iterations = 0;
    double final_area = 0.0;
    double max_residual = 0.0;
    bool converged = false;
    bool graphical = false;

    std::string to_json_line() const {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "{\"iterations\":%d,\"final_area\":%.17g,\"max_residual\":%.17g,"
                      "\"converged\":%s,\"graphical\":%s}",
                      iterations, final_area, max_residual, converged ? "true" : "false",
                      graphical ? "true" : "false");
        return buf;
    }
};

namespace detail {

/// Normal-line chart for the descent: interior vertices move on the curves
/// t -> normalize(anchor + phi * line), which kills the tangential
/// mesh-sliding degeneracy of the discrete functional.
struct NormalLineChart {
    std::vector<Vec4> anchor;
    std::vector<Vec4> line;  // zero for pinned vertices
    std::vector<double> phi;

    void rebuild(const BergerParams& par, const TriMesh& m,
                 const std::vector<std::vector<int>>& star) {
        anchor = m.V;
        phi.assign(m.V.size(), 0.0);
        line.assign(m.V.size(), Vec4::Zero());
        for (int v = 0; v < m.n_vertices(); ++v)
            if (!m.is_boundary(v)) line[size_t(v)] = vertex_surface_normal(par, m, star, v);
    }
    Vec4 position(int v) const {
        return (anchor[size_t(v)] + phi[size_t(v)] * line[size_t(v)]).normalized();
    }
    Vec4 velocity(int v) const {
        const Vec4 raw = anchor[size_t(v)] + phi[size_t(v)] * line[size_t(v)];
        const double r = raw.norm();
        const Vec4 x = raw / r;
        return (line[size_t(v)] - x.dot(line[size_t(v)]) * x) / r;
    }
};

/// Area-guarded uniform tangential redistribution; returns true if accepted.
inline bool tangential_smooth(const BergerParams& par, TriMesh& m,
                              const std::vector<std::vector<int>>& star, double& area) {
    std::vector<Vec4> target(m.V.size());
    parallel_for(m.n_vertices(), [&](int v) {
        target[size_t(v)] = m.V[size_t(v)];
        if (m.is_boundary(v) || star[size_t(v)].empty()) return;
        Vec4 mean = Vec4::Zero();
        double cnt = 0;
        for (int f : star[size_t(v)]) {
            for (int k = 0; k < 3; ++k)
                if (m.F[size_t(f)][k] != v) {
                    mean += m.V[size_t(m.F[size_t(f)][k])];
                    cnt += 1;
                }
        }
        mean /= cnt;
        Vec4 d = mean - m.V[size_t(v)];
        const Vec4 n = vertex_surface_normal(par, m, star, v);
        S3Point sp;
        sp.v = m.V[size_t(v)];
        const Mat4 G = metric_matrix(par, sp);
        d -= d.dot(m.V[size_t(v)]) * m.V[size_t(v)];               // stay tangent to the sphere
        if (n.squaredNorm() > 0) d -= (d.dot(G * n)) * n;          // and tangent to the surface
        target[size_t(v)] = m.V[size_t(v)] + d;
    });
    for (double w : {0.5, 0.25, 0.125}) {
        std::vector<Vec4> trial(m.V.size());
        for (int v = 0; v < m.n_vertices(); ++v)
            trial[size_t(v)] = ((1.0 - w) * m.V[size_t(v)] + w * target[size_t(v)]).normalized();
        std::swap(m.V, trial);
        const double a = discrete_area(par, m);
        if (a <= area) {
            area = a;
            return true;
        }
        std::swap(m.V, trial);
    }
    return false;
}

}  // namespace detail

/**
 * @brief Preconditioned gradient descent with backtracking on the interior
 * vertices; boundary vertices never move.
 *
 * Steps run along the normal line field of the current anchor mesh (tangent
 * step plus renormalization); the anchor is refreshed by area-guarded
 * tangential redistribution.  Accepted steps never increase the area.  The
 * convergence criterion is the full mean-curvature residual.
 */
inline SolveReport minimize_area(const BergerParams& par, TriMesh& m,
                                 const MinimizeConfig& cfg = {}) {
    SolveReport rep;
    const auto star = vertex_stars(m);
    detail::NormalLineChart chart;
    chart.rebuild(par, m, star);

    double t = cfg.step0;
    int stalled = 0;
    AreaGradient ag = area_gradient(par, m);
    std::vector<double> dphi(m.V.size(), 0.0);
    std::vector<double> phi_trial(m.V.size());

    for (rep.iterations = 0; rep.iterations < cfg.max_iterations; ++rep.iterations) {
        // full residual for reporting and convergence
        double sup_full = 0.0;
        for (int v = 0; v < m.n_vertices(); ++v) {
            if (m.is_boundary(v) || ag.mass[size_t(v)] <= 0.0) continue;
            const Vec4 wt = detail::metric_tangent_gradient(par, m.V[size_t(v)], ag.grad[size_t(v)]);
            S3Point sp;
            sp.v = m.V[size_t(v)];
            const double g2 = wt.dot(metric_matrix(par, sp) * wt);
            sup_full = std::max(sup_full, std::sqrt(std::max(0.0, g2)) / ag.mass[size_t(v)]);
        }
        rep.max_residual = sup_full;
        rep.final_area = ag.area;
        if (sup_full < cfg.tol) {
            rep.converged = true;
            return rep;
        }

        double decrement = 0.0;
        for (int v = 0; v < m.n_vertices(); ++v) {
            dphi[size_t(v)] = 0.0;
            if (m.is_boundary(v) || ag.mass[size_t(v)] <= 0.0) continue;
            const double slope = ag.grad[size_t(v)].dot(chart.velocity(v));
            dphi[size_t(v)] = slope / ag.mass[size_t(v)];
            decrement += slope * dphi[size_t(v)];
        }

        bool accepted = false;
        while (t >= cfg.step_min) {
            for (int v = 0; v < m.n_vertices(); ++v)
                phi_trial[size_t(v)] = chart.phi[size_t(v)] - t * dphi[size_t(v)];
            std::swap(chart.phi, phi_trial);
            std::vector<Vec4> save = std::move(m.V);
            m.V.resize(save.size());
            parallel_for(m.n_vertices(), [&](int v) { m.V[size_t(v)] = chart.position(v); });
            const AreaGradient ag_new = area_gradient(par, m);
            if (ag_new.area <= ag.area - 1e-4 * t * decrement) {
                ag = ag_new;
                accepted = true;
                t *= cfg.step_grow;
                break;
            }
            m.V = std::move(save);
            std::swap(chart.phi, phi_trial);
            t *= 0.5;
        }
        if (!accepted) {
            // one more chance through redistribution before giving up
            double area = ag.area;
            if (detail::tangential_smooth(par, m, star, area)) {
                chart.rebuild(par, m, star);
                ag = area_gradient(par, m);
                t = cfg.step0;
                continue;
            }
            rep.converged = rep.max_residual < cfg.tol;
            return rep;
        }

        if (cfg.smooth_every > 0 && rep.iterations > 0 && rep.iterations % cfg.smooth_every == 0) {
            double area = ag.area;
            if (detail::tangential_smooth(par, m, star, area)) {
                chart.rebuild(par, m, star);
                ag = area_gradient(par, m);
            }
        }

        if (std::abs(rep.final_area - ag.area) <= cfg.stall * std::max(1.0, ag.area)) {
            if (++stalled >= cfg.stall_patience) {
                rep.final_area = ag.area;
                rep.max_residual = max_interior_residual(par, m);
                rep.converged = rep.max_residual < cfg.tol;
                return rep;
            }
        } else {
            stalled = 0;
        }
    }
    rep.max_residual = max_interior_residual(par, m);
    rep.final_area = discrete_area(par, m);
    rep.converged = rep.max_residual < cfg.tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Graphicality: the Hopf projection is face-injective (no folds).
// ---------------------------------------------------------------------------

/// Faces over the fiber arcs project to degenerate triangles; only genuine
/// orientation conflicts among the non-degenerate faces count as folds.
inline bool hopf_graphical(const BergerParams& par, const TriMesh& m, double degenerate_tol = 1e-12) {
    int pos = 0, neg = 0;
    for (const auto& f : m.F) {
        S3Point a, b, c;
        a.v = m.V[size_t(f[0])];
        b.v = m.V[size_t(f[1])];
        c.v = m.V[size_t(f[2])];
        const Vec3 qa = hopf_project(par, a), qb = hopf_project(par, b), qc = hopf_project(par, c);
        const double s = (qb - qa).cross(qc - qa).dot(qa);
        if (s > degenerate_tol) ++pos;
        else if (s < -degenerate_tol) ++neg;
    }
    return pos == 0 || neg == 0;
}

// ---------------------------------------------------------------------------
// Reflection doubling.
// ---------------------------------------------------------------------------

namespace detail {

struct WeldHash {
    double cell = 1e-6;
    std::unordered_map<uint64_t, std::vector<int>> buckets;

    uint64_t key(int a, int b, int c, int d) const {
        uint64_t h = 1469598103934665603ull;
        for (uint64_t x : {uint64_t(uint32_t(a)), uint64_t(uint32_t(b)), uint64_t(uint32_t(c)),
                           uint64_t(uint32_t(d))}) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
    void insert(const Vec4& p, int id) {
        buckets[key(int(std::floor(p[0] / cell)), int(std::floor(p[1] / cell)),
                    int(std::floor(p[2] / cell)), int(std::floor(p[3] / cell)))]
            .push_back(id);
    }
    template <class Fn>
    void visit_near(const Vec4& p, Fn&& fn) const {
        const int i0 = int(std::floor(p[0] / cell)), i1 = int(std::floor(p[1] / cell));
        const int i2 = int(std::floor(p[2] / cell)), i3 = int(std::floor(p[3] / cell));
        for (int a = i0 - 1; a <= i0 + 1; ++a)
            for (int b = i1 - 1; b <= i1 + 1; ++b)
                for (int c = i2 - 1; c <= i2 + 1; ++c)
                    for (int d = i3 - 1; d <= i3 + 1; ++d) {
                        const auto it = buckets.find(key(a, b, c, d));
                        if (it == buckets.end()) continue;
                        for (int id : it->second) fn(id);
                    }
    }
};

}  // namespace detail

/**
 * @brief Schwarz doubling: weld the mesh with its image under `iso`.
 *
 * `iso` must fix the named glue curve pointwise.  Copied faces get reversed
 * orientation; vertex pairs closer than `weld_tol` are identified, so seams
 * along the glue curve (and along any other pointwise-fixed arcs) close up.
 * Welded vertices become interior and lose their boundary tag.
 */
inline TriMesh extend_by_reflection(const TriMesh& m, const AmbientIsometry& iso, int glue_curve,
                                    double weld_tol = 1e-9) {
    bool glue_seen = false;
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!m.boundary[size_t(v)] || m.boundary[size_t(v)]->curve != glue_curve) continue;
        glue_seen = true;
        if ((iso.A * m.V[size_t(v)] - m.V[size_t(v)]).norm() > 1e-8)
            throw std::invalid_argument("extend_by_reflection: isometry does not fix the glue curve");
    }
    if (!glue_seen)
        throw std::invalid_argument("extend_by_reflection: mesh has no boundary on the glue curve");

    TriMesh out = m;
    detail::WeldHash hash;
    for (int v = 0; v < m.n_vertices(); ++v) hash.insert(m.V[size_t(v)], v);

    std::vector<int> remap(size_t(m.n_vertices()), -1);
    for (int v = 0; v < m.n_vertices(); ++v) {
        const Vec4 q = (iso.A * m.V[size_t(v)]).normalized();
        int hit = -1;
        hash.visit_near(q, [&](int id) {
            if (hit < 0 && (m.V[size_t(id)] - q).norm() < weld_tol) hit = id;
        });
        if (hit >= 0) {
            remap[size_t(v)] = hit;
        } else {
            remap[size_t(v)] = out.n_vertices();
            out.V.push_back(q);
            out.boundary.push_back(m.boundary[size_t(v)]);
        }
    }
    for (const auto& f : m.F)
        out.F.push_back({remap[size_t(f[0])], remap[size_t(f[2])], remap[size_t(f[1])]});

    // refresh boundary tags: welded seams are interior now
    const auto flags = boundary_vertex_flags(out);
    for (int v = 0; v < out.n_vertices(); ++v)
        if (!flags[size_t(v)]) out.boundary[size_t(v)].reset();
    out.grid.reset();
    out.topology = TriMesh::Topology::annulus;
    return out;
}

// ---------------------------------------------------------------------------
// Self-intersection test.
// ---------------------------------------------------------------------------

namespace detail {

// Devillers-Guigue style predicates via Moller's interval method.
inline bool tri_tri_overlap_3d(const Vec3 a[3], const Vec3 b[3], double eps) {
    const Vec3 n1 = (a[1] - a[0]).cross(a[2] - a[0]);
    double db[3];
    for (int i = 0; i < 3; ++i) db[i] = n1.dot(b[i] - a[0]);
    if ((db[0] > eps && db[1] > eps && db[2] > eps) ||
        (db[0] < -eps && db[1] < -eps && db[2] < -eps))
        return false;
    const Vec3 n2 = (b[1] - b[0]).cross(b[2] - b[0]);
    double da[3];
    for (int i = 0; i < 3; ++i) da[i] = n2.dot(a[i] - b[0]);
    if ((da[0] > eps && da[1] > eps && da[2] > eps) ||
        (da[0] < -eps && da[1] < -eps && da[2] < -eps))
        return false;

    const Vec3 D = n1.cross(n2);
    const double dn = D.cwiseAbs().maxCoeff();
    if (dn < eps) {
        // coplanar: project on the dominant axis of n1 and run 2D tests
        int axis = 0;
        n1.cwiseAbs().maxCoeff(&axis);
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        auto orient = [&](const Vec3& p, const Vec3& q, const Vec3& r) {
            return (q[u] - p[u]) * (r[v] - p[v]) - (q[v] - p[v]) * (r[u] - p[u]);
        };
        auto seg_cross = [&](const Vec3& p1, const Vec3& p2, const Vec3& q1, const Vec3& q2) {
            const double o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
            const double o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
            return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
        };
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (seg_cross(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3])) return true;
        auto inside = [&](const Vec3 t[3], const Vec3& p) {
            const double o1 = orient(t[0], t[1], p), o2 = orient(t[1], t[2], p),
                         o3 = orient(t[2], t[0], p);
            return (o1 > 0 && o2 > 0 && o3 > 0) || (o1 < 0 && o2 < 0 && o3 < 0);
        };
        return inside(a, b[0]) || inside(b, a[0]);
    }

    int axis = 0;
    D.cwiseAbs().maxCoeff(&axis);
    auto interval = [&](const Vec3 t[3], const double d[3], double& lo, double& hi) -> bool {
        // vertices on either side of the other plane; parametrize the crossings
        double proj[3];
        for (int i = 0; i < 3; ++i) proj[i] = t[i][axis];
        int pos[3], npos = 0, nneg = 0, nz = 0;
        for (int i = 0; i < 3; ++i) {
            if (d[i] > eps) { pos[i] = 1; ++npos; }
            else if (d[i] < -eps) { pos[i] = -1; ++nneg; }
            else { pos[i] = 0; ++nz; }
        }
        if (npos == 3 || nneg == 3) return false;
        std::vector<double> ts;
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3;
            if (pos[i] == 0) ts.push_back(proj[i]);
            if ((pos[i] > 0 && pos[j] < 0) || (pos[i] < 0 && pos[j] > 0)) {
                const double w = d[i] / (d[i] - d[j]);
                ts.push_back(proj[i] + w * (proj[j] - proj[i]));
            }
        }
        if (ts.empty()) return false;
        lo = *std::min_element(ts.begin(), ts.end());
        hi = *std::max_element(ts.begin(), ts.end());
        return true;
    };
    double alo, ahi, blo, bhi;
    if (!interval(a, da, alo, ahi)) return false;
    if (!interval(b, db, blo, bhi)) return false;
    return std::max(alo, blo) <= std::min(ahi, bhi) + eps;
}

}  // namespace detail

struct IntersectionReport {
    std::vector<std::pair<int, int>> pairs;

    bool clean() const { return pairs.empty(); }
};

/**
 * @brief Exact-tolerance triangle/triangle intersection over the mesh.
 *
 * Candidate pairs come from a spatial hash on the R^4 bounding boxes; each
 * surviving pair is projected to the 3-dimensional gnomonic chart at its
 * midpoint direction and tested there.  Pairs sharing a vertex are skipped.
 */
inline IntersectionReport self_intersection_test(const TriMesh& m) {
    IntersectionReport rep;
    const int nf = m.n_faces();
    if (nf == 0) return rep;

    double diam = 0.0;
    std::vector<Eigen::AlignedBox<double, 4>> boxes{size_t(nf)};
    for (int f = 0; f < nf; ++f) {
        const auto& t = m.F[size_t(f)];
        Eigen::AlignedBox<double, 4> box;
        for (int k = 0; k < 3; ++k) box.extend(m.V[size_t(t[k])]);
        boxes[size_t(f)] = box;
        diam = std::max(diam, box.diagonal().norm());
    }
    const double cell = std::max(diam, 1e-9);

    std::unordered_map<uint64_t, std::vector<int>> grid;
    auto key = [](int a, int b, int c, int d) {
        uint64_t h = 1469598103934665603ull;
        for (uint64_t x : {uint64_t(uint32_t(a)), uint64_t(uint32_t(b)), uint64_t(uint32_t(c)),
                           uint64_t(uint32_t(d))}) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    };
    auto cell_of = [&](const Vec4& p, int idx[4]) {
        for (int k = 0; k < 4; ++k) idx[k] = int(std::floor(p[k] / cell));
    };
    for (int f = 0; f < nf; ++f) {
        int lo[4], hi[4];
        cell_of(boxes[size_t(f)].min(), lo);
        cell_of(boxes[size_t(f)].max(), hi);
        for (int a = lo[0]; a <= hi[0]; ++a)
            for (int b = lo[1]; b <= hi[1]; ++b)
                for (int c = lo[2]; c <= hi[2]; ++c)
                    for (int d = lo[3]; d <= hi[3]; ++d) grid[key(a, b, c, d)].push_back(f);
    }

    std::vector<std::pair<int, int>> cands;
    for (const auto& [k, faces] : grid) {
        (void)k;
        for (size_t i = 0; i < faces.size(); ++i)
            for (size_t j = i + 1; j < faces.size(); ++j)
                cands.emplace_back(std::min(faces[i], faces[j]), std::max(faces[i], faces[j]));
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    std::vector<char> hit(cands.size(), 0);
    parallel_for(int(cands.size()), [&](int ci) {
        const auto [f, g] = cands[size_t(ci)];
        if (!boxes[size_t(f)].intersects(boxes[size_t(g)])) return;
        const auto& tf = m.F[size_t(f)];
        const auto& tg = m.F[size_t(g)];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (tf[a] == tg[b]) return;  // adjacency excluded

        const Vec4 cf = (m.V[size_t(tf[0])] + m.V[size_t(tf[1])] + m.V[size_t(tf[2])]) / 3.0;
        const Vec4 cg = (m.V[size_t(tg[0])] + m.V[size_t(tg[1])] + m.V[size_t(tg[2])]) / 3.0;
        Vec4 n = cf + cg;
        if (n.norm() < 1e-6) return;  // antipodal clusters cannot be close on the sphere
        n.normalize();
        // orthonormal chart basis about n
        Mat4 B = Mat4::Identity();
        B.col(0) = n;
        Eigen::HouseholderQR<Mat4> qr(B);
        const Mat4 Qm = qr.householderQ();
        Vec3 ta[3], tb[3];
        auto project = [&](const Vec4& p, Vec3& q) -> bool {
            const double denom = p.dot(n);
            if (denom < 1e-6) return false;  // beyond the open hemisphere
            const Vec4 x = p / denom;
            q = Vec3(x.dot(Qm.col(1)), x.dot(Qm.col(2)), x.dot(Qm.col(3)));
            return true;
        };
        for (int k = 0; k < 3; ++k) {
            if (!project(m.V[size_t(tf[k])], ta[k])) return;
            if (!project(m.V[size_t(tg[k])], tb[k])) return;
        }
        if (detail::tri_tri_overlap_3d(ta, tb, 1e-13)) hit[size_t(ci)] = 1;
    });
    for (size_t ci = 0; ci < cands.size(); ++ci)
        if (hit[ci]) rep.pairs.push_back(cands[ci]);
    return rep;
}

}  // namespace berger
