#pragma once

#include <berger/core.hpp>

#include <algorithm>
#include <functional>
#include <vector>

namespace berger {

// ---------------------------------------------------------------------------
// The two closed geodesic families.
// ---------------------------------------------------------------------------

/// Fiber through p: v(s) = (e^{i kappa s/4tau} z, e^{-i kappa s/4tau} w).
/// Unit speed, closes at s = 8 tau pi / kappa.
inline S3Point vertical_geodesic(const BergerParams& par, const S3Point& p, double s) {
    const double th = par.kappa / (4.0 * par.tau) * s;
    const Complex rot(std::cos(th), std::sin(th));
    return S3Point::from_zw(rot * p.z(), std::conj(rot) * p.w());
}

/// h(t) = cos(sqrt(kappa) t/2) p + (2/sqrt(kappa)) sin(sqrt(kappa) t/2) F_phi(p).
/// Unit speed, tangent F_phi, closes at t = 4 pi / sqrt(kappa).
inline S3Point horizontal_geodesic(const BergerParams& par, const S3Point& p, double phi, double t) {
    const double a = 0.5 * std::sqrt(par.kappa) * t;
    const Complex e(std::cos(phi), std::sin(phi));
    const Complex z = std::cos(a) * p.z() - std::sin(a) * std::conj(e) * p.w();
    const Complex w = std::cos(a) * p.w() + std::sin(a) * e * p.z();
    return S3Point::from_zw(z, w);
}

inline Vec4 horizontal_geodesic_tangent(const BergerParams& par, const S3Point& p, double phi,
                                        double t) {
    const double r = 0.5 * std::sqrt(par.kappa);
    const double a = r * t;
    const Complex e(std::cos(phi), std::sin(phi));
    const Complex dz = r * (-std::sin(a) * p.z() - std::cos(a) * std::conj(e) * p.w());
    const Complex dw = r * (-std::sin(a) * p.w() + std::cos(a) * e * p.z());
    return Vec4(dz.real(), dz.imag(), dw.real(), dw.imag());
}

struct VerticalGeodesic {
    BergerParams params;
    S3Point base;

    S3Point at(double s) const { return vertical_geodesic(params, base, s); }
    Vec4 tangent(double s) const { return frame_xi_raw(params, at(s).v); }
    double period() const { return params.fiber_length(); }
};

/// Oriented horizontal geodesic: base point, field angle phi of
/// F_phi = cos(phi) E1 + sin(phi) E2, and a traversal sign.
struct HorizontalGeodesic {
    BergerParams params;
    S3Point base;
    double phi = 0.0;
    int orient = +1;

    S3Point at(double t) const { return horizontal_geodesic(params, base, phi, orient * t); }
    Vec4 tangent(double t) const {
        return double(orient) * horizontal_geodesic_tangent(params, base, phi, orient * t);
    }
    double period() const { return params.horizontal_length(); }
};

// ---------------------------------------------------------------------------
// Linkedness (disjointness of the two circles).
// ---------------------------------------------------------------------------

enum class Linkedness { linked, not_linked, indeterminate };

struct LinkednessReport {
    Linkedness cls = Linkedness::indeterminate;
    double min_distance = 0.0;  // chordal distance in R^4
};

namespace detail {

/// Global minimum of |h1(s)-h2(t)| by grid search plus local refinement.
inline double min_curve_distance(const HorizontalGeodesic& h1, const HorizontalGeodesic& h2,
                                 int samples) {
    const double T1 = h1.period(), T2 = h2.period();
    const int n = std::max(samples, 32);
    std::vector<Vec4> a(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = h1.at(T1 * i / n).v;
        b[i] = h2.at(T2 * i / n).v;
    }
    // Best few coarse cells, kept apart so distinct local minima survive.
    struct Cell { double d; int i, j; };
    std::vector<Cell> best;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = (a[i] - b[j]).norm();
            best.push_back({d, i, j});
        }
    std::partial_sort(best.begin(), best.begin() + std::min<size_t>(64, best.size()), best.end(),
                      [](const Cell& x, const Cell& y) { return x.d < y.d; });
    std::vector<Cell> seeds;
    for (const Cell& c : best) {
        bool fresh = true;
        for (const Cell& s : seeds)
            if (std::abs(c.i - s.i) <= 2 && std::abs(c.j - s.j) <= 2) { fresh = false; break; }
        if (fresh) seeds.push_back(c);
        if (seeds.size() >= 8) break;
    }

    double global = std::numeric_limits<double>::infinity();
    for (const Cell& c : seeds) {
        double s0 = T1 * c.i / n, t0 = T2 * c.j / n;
        double ws = T1 / n, wt = T2 / n;
        double dmin = c.d;
        for (int iter = 0; iter < 64; ++iter) {
            double bs = s0, bt = t0;
            for (int di = -2; di <= 2; ++di)
                for (int dj = -2; dj <= 2; ++dj) {
                    const double s = s0 + ws * di / 2.0, t = t0 + wt * dj / 2.0;
                    const double d = (h1.at(s).v - h2.at(t).v).norm();
                    if (d < dmin) { dmin = d; bs = s; bt = t; }
                }
            s0 = bs; t0 = bt;
            ws *= 0.5; wt *= 0.5;
            if (ws < 1e-15 * T1) break;
        }
        global = std::min(global, dmin);
    }
    return global;
}

}  // namespace detail

/**
 * @brief Disjointness test for two horizontal geodesic circles.
 *
 * "Linked" is used in the sense of non-intersecting; the test thresholds the
 * minimum chordal distance (> 1e-6 linked, < 1e-8 not linked, in between
 * indeterminate).  Whether a disjoint pair could be topologically unlinked is
 * not something this reports on.
 */
inline LinkednessReport are_linked(const HorizontalGeodesic& h1, const HorizontalGeodesic& h2,
                                   int samples = 256) {
    if (samples < 32) throw std::invalid_argument("are_linked: need at least 32 samples");
    LinkednessReport rep;
    rep.min_distance = detail::min_curve_distance(h1, h2, samples);
    if (rep.min_distance > 1e-6)
        rep.cls = Linkedness::linked;
    else if (rep.min_distance < 1e-8)
        rep.cls = Linkedness::not_linked;
    else
        rep.cls = Linkedness::indeterminate;
    return rep;
}

// ---------------------------------------------------------------------------
// Connecting vertical segment (normal form behind the helicoid family).
// ---------------------------------------------------------------------------

/// Normal form of a linked-or-identical pair: after a left translation and a
/// vertical rotation, h1 passes through (1,0) with field E1 and h2 through
/// v(sign * ell) with field F_phi.  ell is normalized to the shortest vertical
/// arc, which lands it in [0, 2 tau pi / kappa].
struct SegmentData {
    double ell = 0.0;
    double phi = 0.0;
    int sign = +1;
};

/// Analytic differential of the Hopf projection.
inline Vec3 hopf_differential(const BergerParams& par, const S3Point& p, const Vec4& x) {
    const Complex z = p.z(), w = p.w();
    const Complex dz(x[0], x[1]), dw(x[2], x[3]);
    const Complex m = dz * w + z * dw;
    const double s = 1.0 / std::sqrt(par.kappa);
    return Vec3(s * 2.0 * m.imag(), s * (-2.0) * m.real(),
                s * 2.0 * (std::conj(z) * dz - std::conj(w) * dw).real());
}

/// Field angle of a tangent X at p against the frame: atan2(g(X,E2), g(X,E1)).
inline double field_angle(const BergerParams& par, const S3Point& p, const Vec4& x) {
    const double c1 = metric_eval_raw(par, p.v, x, frame_e1_raw(par, p.v));
    const double c2 = metric_eval_raw(par, p.v, x, frame_e2_raw(par, p.v));
    double a = std::atan2(c2, c1);
    if (a < 0) a += 2.0 * kPi;
    return a;
}

namespace detail {

/// Parameter t in [0, 2 pi / sqrt(kappa)) at which Pi(h(t)) reaches q; the
/// projected curve is a constant-speed circle so the angle solve is exact.
inline double projected_hit_parameter(const BergerParams& par, const HorizontalGeodesic& h,
                                      const Vec3& q) {
    const double rk = std::sqrt(par.kappa);
    const Vec3 c0 = hopf_project(par, h.at(0.0));
    const Vec3 d0 = hopf_differential(par, h.at(0.0), h.tangent(0.0));
    const Vec3 ahat = rk * c0;
    const Vec3 nhat = ahat.cross(d0).normalized();
    const Vec3 bhat = nhat.cross(ahat);
    const Vec3 qhat = rk * q;
    double th = std::atan2(qhat.dot(bhat), qhat.dot(ahat));
    if (th < 0) th += 2.0 * kPi;
    return th / rk;
}

/// Signed fiber phase from x1 to x2 (both on one fiber), in [0, period).
inline double fiber_phase(const BergerParams& par, const S3Point& x1, const S3Point& x2) {
    const Complex z1 = x1.z(), w1 = x1.w(), z2 = x2.z(), w2 = x2.w();
    double th;
    if (std::abs(z1) >= std::abs(w1)) {
        th = std::arg(z2 * std::conj(z1));
        if (std::abs(w1) > 1e-8 &&
            std::abs(std::arg(w2 * std::conj(w1) * Complex(std::cos(th), std::sin(th)))) > 1e-6)
            throw std::invalid_argument("fiber_phase: points are not on a common fiber");
    } else {
        th = -std::arg(w2 * std::conj(w1));
        if (std::abs(z1) > 1e-8 &&
            std::abs(std::arg(z2 * std::conj(z1) * Complex(std::cos(th), -std::sin(th)))) > 1e-6)
            throw std::invalid_argument("fiber_phase: points are not on a common fiber");
    }
    double s = th * 4.0 * par.tau / par.kappa;
    const double P = par.fiber_length();
    s = std::fmod(s, P);
    if (s < 0) s += P;
    return s;
}

}  // namespace detail

/// True when the two parametrizations trace the same circle as a set.
inline bool same_circle(const HorizontalGeodesic& h1, const HorizontalGeodesic& h2,
                        double tol = 1e-9) {
    // h2.base must lie on h1 with parallel tangent there.
    const double T1 = h1.period();
    double best = std::numeric_limits<double>::infinity(), tbest = 0;
    for (int i = 0; i < 1024; ++i) {
        const double t = T1 * i / 1024;
        const double d = (h1.at(t).v - h2.base.v).norm();
        if (d < best) { best = d; tbest = t; }
    }
    double w = T1 / 1024;
    for (int iter = 0; iter < 60; ++iter) {
        for (int di = -2; di <= 2; ++di) {
            const double t = tbest + w * di / 2.0;
            const double d = (h1.at(t).v - h2.base.v).norm();
            if (d < best) { best = d; tbest = t; }
        }
        w *= 0.5;
    }
    if (best > tol) return false;
    Vec4 u = h1.tangent(tbest).normalized();
    Vec4 v = h2.tangent(0.0).normalized();
    return std::abs(std::abs(u.dot(v)) - 1.0) < 1e-6;
}

/**
 * @brief Pitch/angle/orientation normal form for a pair of horizontal geodesics.
 *
 * Identical circles give ell = 0 (phi = 0 for equal orientation, pi for
 * reversed).  Linked pairs are reduced to the vertical segment joining them
 * over an intersection of the projected great circles; among the candidate
 * segments the shortest arc is chosen and its orientation recorded, ties
 * preferring sign = +1.  Intersecting-but-distinct pairs are rejected.
 */
inline SegmentData connecting_vertical_segment(const BergerParams& par,
                                               const HorizontalGeodesic& h1,
                                               const HorizontalGeodesic& h2) {
    if (same_circle(h1, h2)) {
        const Vec4 u = h1.tangent(0.0);
        // locate h1's parameter at h2.base to compare orientations
        SegmentData sd;
        sd.ell = 0.0;
        sd.sign = +1;
        // same oriented circle <=> tangents agree at the common point
        const double T1 = h1.period();
        double best = std::numeric_limits<double>::infinity(), tbest = 0;
        for (int i = 0; i < 4096; ++i) {
            const double t = T1 * i / 4096;
            const double d = (h1.at(t).v - h2.base.v).norm();
            if (d < best) { best = d; tbest = t; }
        }
        const double align = h1.tangent(tbest).normalized().dot(h2.tangent(0.0).normalized());
        sd.phi = align > 0 ? 0.0 : kPi;
        (void)u;
        return sd;
    }
    const auto link = are_linked(h1, h2);
    if (link.cls == Linkedness::not_linked)
        throw std::invalid_argument("connecting_vertical_segment: curves intersect without coinciding");
    if (link.cls == Linkedness::indeterminate)
        throw std::invalid_argument("connecting_vertical_segment: pair is numerically degenerate");

    // Intersection direction of the two projected great circles.
    const Vec3 c10 = hopf_project(par, h1.at(0.0));
    const Vec3 n1 = (par.kappa * c10.cross(hopf_differential(par, h1.at(0.0), h1.tangent(0.0))));
    const Vec3 c20 = hopf_project(par, h2.at(0.0));
    const Vec3 n2 = (par.kappa * c20.cross(hopf_differential(par, h2.at(0.0), h2.tangent(0.0))));
    Vec3 q;
    const Vec3 cr = n1.normalized().cross(n2.normalized());
    if (cr.norm() > 1e-8) {
        q = cr.normalized() / std::sqrt(par.kappa);
    } else {
        q = c10;  // identical projections: every point of h1 sits over h2
    }

    const double t1 = detail::projected_hit_parameter(par, h1, q);
    const double t2 = detail::projected_hit_parameter(par, h2, q);
    const S3Point x1 = h1.at(t1);
    const S3Point x2 = h2.at(t2);

    const double P = par.fiber_length();
    const double s2 = detail::fiber_phase(par, x1, x2);
    const double phi1 = field_angle(par, x1, h1.tangent(t1));
    const double phi2 = field_angle(par, x2, h2.tangent(t2));
    double phi = phi2 - phi1;
    phi = std::fmod(phi, 2.0 * kPi);
    if (phi < 0) phi += 2.0 * kPi;

    // Candidate pitches over both fiber base points and both orientations.
    struct Cand { double ell; int sign; };
    auto wrap = [&](double s) { s = std::fmod(s, P); return s < 0 ? s + P : s; };
    const Cand cands[4] = {{wrap(s2), +1},
                           {wrap(P - s2), -1},
                           {wrap(s2 - P / 2), +1},
                           {wrap(P / 2 - s2), -1}};
    SegmentData sd;
    sd.ell = std::numeric_limits<double>::infinity();
    for (const Cand& c : cands) {
        if (c.ell < sd.ell - 1e-12 ||
            (std::abs(c.ell - sd.ell) <= 1e-12 && c.sign > sd.sign)) {
            sd.ell = c.ell;
            sd.sign = c.sign;
        }
    }
    sd.phi = phi;
    return sd;
}

// ---------------------------------------------------------------------------
// The geodesic polygon Gamma_lambda and its reflections.
// ---------------------------------------------------------------------------

/**
 * @brief Closed geodesic polygon over a convex Hopf sector.
 *
 * Arcs carry their original parametrizations:
 *   gamma1(t) = (cos(rt), sin(rt)),                 t in [0, pi/sqrt(kappa)]
 *   gamma2(t) = (cos(rt), i sin(rt)),               t in [0, lambda]
 *   gamma3(t) = (e^{iat} C, i e^{-iat} S),          t in [0, 2 tau pi/kappa]
 *   gamma4(t) = (i sin(rt), cos(rt)),               t in [0, pi/sqrt(kappa) - lambda]
 * with r = sqrt(kappa)/2, a = kappa/4tau, C = cos(sqrt(kappa) lambda/2),
 * S = sin(sqrt(kappa) lambda/2).  gamma1, gamma2, gamma4 are horizontal,
 * gamma3 is vertical.  Traversed as a cycle the chain is
 * gamma1, gamma4, gamma3 reversed, gamma2 reversed.
 */
struct GeodesicPolygon {
    BergerParams params;
    double lambda = 0.0;

    struct ChainLink {
        int arc;        // 0..3
        bool reversed;  // traverse from the far end
    };

    double arc_length(int k) const {
        const double pk = kPi / std::sqrt(params.kappa);
        switch (k) {
            case 0: return pk;
            case 1: return lambda;
            case 2: return 2.0 * params.tau * kPi / params.kappa;
            default: return pk - lambda;
        }
    }

    S3Point arc_at(int k, double t) const {
        const double r = 0.5 * std::sqrt(params.kappa);
        const double a = params.kappa / (4.0 * params.tau);
        const double C = std::cos(r * lambda), S = std::sin(r * lambda);
        switch (k) {
            case 0: return S3Point::from_zw({std::cos(r * t), 0}, {std::sin(r * t), 0});
            case 1: return S3Point::from_zw({std::cos(r * t), 0}, {0, std::sin(r * t)});
            case 2: {
                const Complex e(std::cos(a * t), std::sin(a * t));
                return S3Point::from_zw(e * C, Complex(0, 1) * std::conj(e) * S);
            }
            default: return S3Point::from_zw({0, std::sin(r * t)}, {std::cos(r * t), 0});
        }
    }

    std::array<ChainLink, 4> chain() const {
        return {ChainLink{0, false}, ChainLink{3, false}, ChainLink{2, true}, ChainLink{1, true}};
    }

    S3Point chain_point(const ChainLink& l, double t) const {
        return arc_at(l.arc, l.reversed ? arc_length(l.arc) - t : t);
    }

    /// Max gap between consecutive chain endpoints (0 for a closed polygon).
    double closure_defect() const {
        const auto ch = chain();
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            const auto& cur = ch[i];
            const auto& nxt = ch[(i + 1) % 4];
            const Vec4 e = chain_point(cur, arc_length(cur.arc)).v;
            const Vec4 s = chain_point(nxt, 0.0).v;
            worst = std::max(worst, (e - s).norm());
        }
        return worst;
    }

    S3Point gamma2_end() const { return arc_at(1, lambda); }

    HorizontalGeodesic boundary_h1() const {
        return HorizontalGeodesic{params, S3Point(Vec4(1, 0, 0, 0)), 0.0, +1};
    }
    HorizontalGeodesic boundary_h2() const {
        const double rl = std::sqrt(params.kappa) * lambda;
        return HorizontalGeodesic{
            params, S3Point::from_zw({std::cos(rl), 0}, {0, std::sin(rl)}), kPi, +1};
    }
};

inline GeodesicPolygon build_polygon(const BergerParams& par, double lambda) {
    const double lmax = kPi / (2.0 * std::sqrt(par.kappa));
    if (!(lambda >= 0.0 && lambda <= lmax + 1e-15))
        throw std::invalid_argument("build_polygon: lambda outside [0, pi/(2 sqrt(kappa))]");
    return GeodesicPolygon{par, lambda};
}

/// rho0(z,w) = (z,-w): geodesic reflection across the fiber through (1,0).
inline AmbientIsometry reflection_rho0(const BergerParams& par) {
    Mat4 A = Mat4::Identity();
    A(2, 2) = -1;
    A(3, 3) = -1;
    return *check_isometry(par, A).iso;
}

/// Reflection across gamma3: conjugate of rho0 by the left translation moving
/// (1,0) to gamma2(lambda).
inline AmbientIsometry reflection_across_gamma3(const BergerParams& par, double lambda) {
    const GeodesicPolygon poly = build_polygon(par, lambda);
    const Mat4 L = left_translation_matrix(poly.gamma2_end());
    Mat4 R0 = Mat4::Identity();
    R0(2, 2) = -1;
    R0(3, 3) = -1;
    const Mat4 A = L * R0 * L.transpose();
    auto chk = check_isometry(par, A);
    if (!chk.accepted())
        throw std::logic_error("reflection_across_gamma3: gate rejected " + chk.reject_reason);
    return *chk.iso;
}

/// Reflection across the gamma2 circle: (z,w) -> (conj z, -conj w).
inline AmbientIsometry reflection_across_gamma2(const BergerParams& par) {
    Mat4 A = Mat4::Zero();
    A(0, 0) = 1; A(1, 1) = -1; A(2, 2) = -1; A(3, 3) = 1;
    return *check_isometry(par, A).iso;
}

/// Reflection across the gamma4 circle: (z,w) -> (-conj z, conj w).
inline AmbientIsometry reflection_across_gamma4(const BergerParams& par) {
    Mat4 A = Mat4::Zero();
    A(0, 0) = -1; A(1, 1) = 1; A(2, 2) = 1; A(3, 3) = -1;
    return *check_isometry(par, A).iso;
}

// ---------------------------------------------------------------------------
// Polyline sampling (CSV export lives in io.hpp).
// ---------------------------------------------------------------------------

struct CurveSample {
    double t;
    Vec4 p;
};

inline std::vector<CurveSample> sample_curve(const std::function<S3Point(double)>& c, double t0,
                                             double t1, int n) {
    std::vector<CurveSample> out;
    out.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * i / n;
        out.push_back({t, c(t).v});
    }
    return out;
}

}  // namespace berger
