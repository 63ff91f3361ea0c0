#pragma once

#include <berger/core.hpp>

#include <utility>
#include <vector>

namespace berger {

// Hyperboloid model: H^2 = { x in R^{2,1} : <x,x> = -1, x0 > 0 } with
// <a,b> = -a0 b0 + a1 b1 + a2 b2.  The product with the height line carries
// the metric <.,.> + dh^2.

inline double mdot(const Vec3& a, const Vec3& b) {
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 minkowski_metric_apply(const Vec3& a) { return Vec3(-a[0], a[1], a[2]); }

/// eta (a x b): Minkowski-orthogonal to both factors.
inline Vec3 mcross(const Vec3& a, const Vec3& b) { return minkowski_metric_apply(a.cross(b)); }

inline Vec3 h2_normalize(const Vec3& x) {
    const double q = -mdot(x, x);
    if (!(q > 0.0)) throw std::invalid_argument("h2_normalize: vector is not timelike");
    Vec3 y = x / std::sqrt(q);
    if (y[0] < 0) y = -y;
    return y;
}

struct H2RPoint {
    Vec3 h2;
    double height = 0.0;

    H2RPoint() : h2(1, 0, 0) {}
    H2RPoint(const Vec3& x, double h) : h2(x), height(h) {
        if (std::abs(mdot(h2, h2) + 1.0) > 1e-10 || h2[0] <= 0.0)
            throw std::invalid_argument("H2RPoint: not on the positive hyperboloid sheet");
        h2 = h2_normalize(h2);
    }
};

/// Rotation by +pi/2 in the tangent plane of H^2 at x (fixes the orientation
/// used for signed curvatures).
inline Vec3 j_rotate_h2(const Vec3& x, const Vec3& v) { return mcross(x, v); }

// ---------------------------------------------------------------------------
// Geodesics with slope alpha and the translations along them.
// ---------------------------------------------------------------------------

/**
 * @brief Unit-speed geodesic with slope alpha against the vertical field:
 * cos(alpha) is the constant height rate, the H^2 part moves at speed
 * sin(alpha) along the geodesic through start in direction dir.
 */
struct H2RGeodesic {
    H2RPoint start;
    double alpha = 0.0;  // 0 vertical, pi/2 horizontal
    Vec3 dir = Vec3(0, 1, 0);

    static H2RGeodesic make(const H2RPoint& p, double alpha, const Vec3& dir) {
        if (!(alpha >= 0.0 && alpha <= 0.5 * kPi + 1e-12))
            throw std::invalid_argument("H2RGeodesic: slope outside [0, pi/2]");
        H2RGeodesic g;
        g.start = p;
        g.alpha = alpha;
        if (alpha > 0.0) {
            Vec3 u = dir;
            u += mdot(u, p.h2) * p.h2;  // project out the base component
            const double n = std::sqrt(mdot(u, u));
            if (!(n > 1e-12))
                throw std::invalid_argument("H2RGeodesic: direction degenerate");
            g.dir = u / n;
        }
        return g;
    }
};

inline H2RPoint h2r_geodesic(const H2RGeodesic& g, double s) {
    const double t = s * std::sin(g.alpha);
    const Vec3 x = h2_normalize(std::cosh(t) * g.start.h2 + std::sinh(t) * g.dir);
    return H2RPoint(x, g.start.height + s * std::cos(g.alpha));
}

/// Isometry (A, dh): p -> (A p_h2, p_h + dh) with A Lorentz.
struct H2RIsometry {
    Mat3 A = Mat3::Identity();
    double dh = 0.0;

    H2RPoint apply(const H2RPoint& p) const { return H2RPoint(h2_normalize(A * p.h2), p.height + dh); }
    Vec3 apply_h2_vector(const Vec3& v) const { return A * v; }
    H2RIsometry compose(const H2RIsometry& o) const { return {A * o.A, dh + o.dh}; }
    H2RIsometry inverse() const {
        const Mat3 eta = minkowski_metric_apply(Vec3(1, 1, 1)).asDiagonal();
        return {eta * A.transpose() * eta, -dh};
    }
};

inline bool is_lorentz(const Mat3& A, double tol = 1e-9) {
    Mat3 eta = Mat3::Identity();
    eta(0, 0) = -1;
    return (A.transpose() * eta * A - eta).cwiseAbs().maxCoeff() < tol;
}

/// Boost by hyperbolic distance d along the geodesic (p, u).
inline Mat3 lorentz_boost(const Vec3& p, const Vec3& u, double d) {
    if (d == 0.0) return Mat3::Identity();
    const Vec3 n = mcross(p, u);
    Mat3 P;
    P.col(0) = p;
    P.col(1) = u;
    P.col(2) = n;
    Mat3 R = Mat3::Identity();
    R(0, 0) = std::cosh(d); R(0, 1) = std::sinh(d);
    R(1, 0) = std::sinh(d); R(1, 1) = std::cosh(d);
    Mat3 eta = Mat3::Identity();
    eta(0, 0) = -1;
    return P * R * (eta * P.transpose() * eta);
}

/**
 * @brief Translation by parameter s along the geodesic g:
 * Phi_s = (boost by s sin(alpha) along the projected geodesic, height shift
 * s cos(alpha)).  Satisfies Phi_s(g(0)) = g(s) and the group law in s.
 */
inline H2RIsometry translation_along(const H2RGeodesic& g, double s) {
    H2RIsometry iso;
    iso.dh = s * std::cos(g.alpha);
    if (g.alpha > 0.0) iso.A = lorentz_boost(g.start.h2, g.dir, s * std::sin(g.alpha));
    return iso;
}

// ---------------------------------------------------------------------------
// Discrete geodesic curvature in H^2.
// ---------------------------------------------------------------------------

/**
 * @brief Signed geodesic curvature of a sampled (approximately unit-speed)
 * curve in H^2 via 5-point covariant stencils.
 *
 * The sign is taken against j_rotate_h2 of the velocity.  Open curves get NaN
 * at the two samples nearest each end.
 */
inline std::vector<double> geodesic_curvature_h2_signed(const std::vector<Vec3>& x, bool closed) {
    const int n = int(x.size());
    if (n < 5) throw std::invalid_argument("geodesic_curvature_h2: need at least 5 samples");
    // uniform spacing estimate from the Minkowski chords
    double h = 0.0;
    int cnt = 0;
    for (int i = 0; i + 1 < n; ++i) {
        const double c = std::max(1.0, -mdot(x[i], x[i + 1]));
        h += std::acosh(c);
        ++cnt;
    }
    h /= cnt;
    if (!(h > 0.0)) throw std::invalid_argument("geodesic_curvature_h2: degenerate spacing");

    auto at = [&](int i) -> const Vec3& {
        if (closed) {
            int k = i % n;
            if (k < 0) k += n;
            return x[size_t(k)];
        }
        return x[size_t(i)];
    };
    std::vector<double> k(n, std::numeric_limits<double>::quiet_NaN());
    const int lo = closed ? 0 : 2;
    const int hi = closed ? n : n - 2;
    for (int i = lo; i < hi; ++i) {
        const Vec3 v = (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) / (12 * h);
        const Vec3 a = (-at(i + 2) + 16 * at(i + 1) - 30 * at(i) + 16 * at(i - 1) - at(i - 2)) /
                       (12 * h * h);
        const Vec3 acov = a - mdot(v, v) * at(i);  // Gauss formula on the hyperboloid
        const double sp2 = mdot(v, v);
        if (!(sp2 > 1e-16)) throw std::invalid_argument("geodesic_curvature_h2: degenerate spacing");
        const Vec3 jn = j_rotate_h2(at(i), v) / std::sqrt(sp2);
        k[size_t(i)] = mdot(acov, jn) / sp2;
    }
    return k;
}

inline std::vector<double> geodesic_curvature_h2(const std::vector<Vec3>& x, bool closed) {
    auto k = geodesic_curvature_h2_signed(x, closed);
    for (double& v : k) v = std::abs(v);
    return k;
}

// ---------------------------------------------------------------------------
// Constant-curvature circles.
// ---------------------------------------------------------------------------

struct CircleGeometry {
    double R;  // intrinsic radius
    double L;  // circumference
    double A;  // enclosed area
};

/// R = acoth(k), L = 2 pi sinh R, A = 2 pi (cosh R - 1); the defect identity
/// -A + L k = 2 pi holds.
inline CircleGeometry circle_geometry(double k) {
    if (!(k > 1.0)) throw std::invalid_argument("circle_geometry: curvature must exceed 1");
    const double R = std::atanh(1.0 / k);
    return {R, 2.0 * kPi * std::sinh(R), 2.0 * kPi * (std::cosh(R) - 1.0)};
}

/// Unit-speed samples of the circle of intrinsic radius R about the model
/// base point (counterclockwise).
inline std::vector<Vec3> h2_circle_samples(double R, int n) {
    std::vector<Vec3> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        out.emplace_back(std::cosh(R), std::sinh(R) * std::cos(th), std::sinh(R) * std::sin(th));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Vertical planes (Gamma x R).
// ---------------------------------------------------------------------------

/// A vertical plane is determined by the geodesic Gamma = n-perp on H^2, n a
/// unit spacelike normal.
struct VerticalPlane {
    Vec3 normal = Vec3(0, 0, 1);

    static VerticalPlane through(const Vec3& point, const Vec3& tangent) {
        Vec3 n = mcross(point, tangent);
        const double q = mdot(n, n);
        if (!(q > 1e-20)) throw std::invalid_argument("VerticalPlane: degenerate data");
        VerticalPlane p;
        p.normal = n / std::sqrt(q);
        return p;
    }

    double deviation(const Vec3& x) const { return std::abs(mdot(x, normal)); }

    /// Two ideal endpoints of Gamma as null directions scaled to x0 = 1.
    std::pair<Vec3, Vec3> ideal_endpoints() const {
        // basis of normal-perp: one timelike, one spacelike
        Vec3 t = Vec3(1, 0, 0);
        t += mdot(t, normal) * normal;  // project out normal (spacelike)
        t = t / std::sqrt(-mdot(t, t));
        Vec3 s = mcross(t, normal);
        s /= std::sqrt(mdot(s, s));
        Vec3 a = t + s, b = t - s;
        return {a / a[0], b / b[0]};
    }
};

enum class PlaneRelation { equal, intersecting, asymptotic, disjoint };

struct PlanePairReport {
    PlaneRelation relation;
    double distance;  // > 0 only for disjoint planes
};

inline PlanePairReport plane_pair(const VerticalPlane& a, const VerticalPlane& b,
                                  double tol = 1e-8) {
    if (std::min((a.normal - b.normal).norm(), (a.normal + b.normal).norm()) < tol)
        return {PlaneRelation::equal, 0.0};
    const double c = std::abs(mdot(a.normal, b.normal));
    if (c > 1.0 + tol) return {PlaneRelation::disjoint, std::acosh(c)};
    if (c > 1.0 - tol) return {PlaneRelation::asymptotic, 0.0};
    return {PlaneRelation::intersecting, 0.0};
}

/// Least-squares fit of a vertical plane to H^2 samples (smallest
/// |<x, n>| in the Lorentz sense over unit spacelike n).
inline VerticalPlane fit_vertical_plane(const std::vector<Vec3>& xs) {
    Mat3 M = Mat3::Zero();
    for (const Vec3& x : xs) M += x * x.transpose();
    Mat3 eta = Mat3::Identity();
    eta(0, 0) = -1;
    // stationarity of <x,n>^2 under <n,n> = 1 is the eigenproblem (M eta) n = lambda n
    const Eigen::EigenSolver<Mat3> es(M * eta);
    VerticalPlane best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        if (std::abs(es.eigenvalues()[i].imag()) > 1e-9) continue;
        Vec3 v = es.eigenvectors().col(i).real();
        const double q = mdot(v, v);
        if (!(q > 1e-14)) continue;  // need a spacelike normal
        v /= std::sqrt(q);
        double cost = 0.0;
        for (const Vec3& x : xs) cost += mdot(x, v) * mdot(x, v);
        if (cost < best_cost) {
            best_cost = cost;
            best.normal = v;
        }
    }
    return best;
}

/// Reflection of H^2 x R through a vertical plane.
inline H2RIsometry reflect_through(const VerticalPlane& p) {
    Mat3 eta = Mat3::Identity();
    eta(0, 0) = -1;
    H2RIsometry iso;
    iso.A = Mat3::Identity() - 2.0 * p.normal * (p.normal.transpose() * eta);
    iso.dh = 0.0;
    return iso;
}

// ---------------------------------------------------------------------------
// Lorentz Procrustes fit and translation classification.
// ---------------------------------------------------------------------------

namespace detail {

inline Mat3 so21_generator(int k) {
    Mat3 K = Mat3::Zero();
    if (k == 0) { K(0, 1) = 1; K(1, 0) = 1; }
    else if (k == 1) { K(0, 2) = 1; K(2, 0) = 1; }
    else { K(1, 2) = -1; K(2, 1) = 1; }
    return K;
}

/// Minkowski Gram-Schmidt on the columns (timelike first).
inline Mat3 relorentzize(const Mat3& A) {
    Vec3 c0 = A.col(0), c1 = A.col(1), c2 = A.col(2);
    c0 /= std::sqrt(-mdot(c0, c0));
    c1 += mdot(c1, c0) * c0;
    c1 /= std::sqrt(mdot(c1, c1));
    c2 += mdot(c2, c0) * c0;
    c2 -= mdot(c2, c1) * c1;
    c2 /= std::sqrt(mdot(c2, c2));
    Mat3 B;
    B.col(0) = c0;
    B.col(1) = c1;
    B.col(2) = c2;
    return B;
}

}  // namespace detail

struct LorentzFit {
    Mat3 A = Mat3::Identity();
    double rms = 0.0;
};

/// Gauss-Newton fit of A in SO+(2,1) minimizing sum |A x_i - y_i|^2.
inline LorentzFit fit_lorentz(const std::vector<std::pair<Vec3, Vec3>>& pairs, int iters = 60) {
    LorentzFit fit;
    if (pairs.empty()) return fit;
    for (int it = 0; it < iters; ++it) {
        Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
        Vec3 Jtr = Vec3::Zero();
        for (const auto& [x, y] : pairs) {
            const Vec3 r = fit.A * x - y;
            Eigen::Matrix3d J;
            for (int k = 0; k < 3; ++k) J.col(k) = detail::so21_generator(k) * (fit.A * x);
            JtJ += J.transpose() * J;
            Jtr += J.transpose() * r;
        }
        const Vec3 step = -(JtJ + 1e-12 * Eigen::Matrix3d::Identity()).ldlt().solve(Jtr);
        Mat3 G = Mat3::Zero();
        for (int k = 0; k < 3; ++k) G += step[k] * detail::so21_generator(k);
        fit.A = detail::relorentzize((Mat3::Identity() + G + 0.5 * G * G) * fit.A);
        if (step.norm() < 1e-14) break;
    }
    double s = 0.0;
    for (const auto& [x, y] : pairs) s += (fit.A * x - y).squaredNorm();
    fit.rms = std::sqrt(s / pairs.size());
    return fit;
}

enum class LorentzClass { identity, hyperbolic, elliptic, parabolic };

struct LorentzClassification {
    LorentzClass cls;
    double translation_length;  // hyperbolic distance moved along the axis
};

inline LorentzClassification classify_lorentz(const Mat3& A, double tol = 1e-7) {
    if ((A - Mat3::Identity()).cwiseAbs().maxCoeff() < tol)
        return {LorentzClass::identity, 0.0};
    const double tr = A.trace();
    if (tr > 3.0 + tol)
        return {LorentzClass::hyperbolic, std::acosh(0.5 * (tr - 1.0))};
    if (tr < 3.0 - tol) return {LorentzClass::elliptic, 0.0};
    return {LorentzClass::parabolic, 0.0};
}

}  // namespace berger
