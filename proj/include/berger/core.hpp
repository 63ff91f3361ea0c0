#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace berger {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kUnitTol = 1e-9;

/**
 * @brief Parameters of the squashed three-sphere metric.
 *
 * The pair (kappa, tau) with kappa > 0, tau != 0 selects the ambient metric
 *   g(X,Y) = (4/kappa) [ <X,Y> + (eta - 1) <X,V> <Y,V> ],   eta = 4 tau^2 / kappa,
 * where V is the fixed vector field V(a,b,c,d) = (-b,a,d,-c).  eta = 1 gives a
 * round sphere of curvature kappa.
 */
struct BergerParams {
    double kappa = 4.0;
    double tau = 1.0;

    static BergerParams make(double kappa, double tau) {
        if (!(kappa > 0.0)) throw std::invalid_argument("BergerParams: kappa must be positive");
        if (tau == 0.0) throw std::invalid_argument("BergerParams: tau must be nonzero");
        return BergerParams{kappa, tau};
    }

    double eta() const { return 4.0 * tau * tau / kappa; }
    bool is_round() const { return std::abs(kappa - 4.0 * tau * tau) <= 1e-12 * kappa; }

    // Closing parameters of the two geodesic families.
    double fiber_length() const { return 8.0 * tau * kPi / kappa; }        // vertical
    double horizontal_length() const { return 4.0 * kPi / std::sqrt(kappa); }
};

/// The fixed matrix V: (a,b,c,d) -> (-b,a,d,-c).  Antisymmetric, orthogonal.
inline Mat4 v_matrix() {
    Mat4 V;
    V << 0, -1, 0, 0,
         1,  0, 0, 0,
         0,  0, 0, 1,
         0,  0, -1, 0;
    return V;
}

inline Vec4 v_field(const Vec4& p) { return Vec4(-p[1], p[0], p[3], -p[2]); }

/**
 * @brief Unit 4-vector on the three-sphere, with complex-pair views.
 *
 * Storage is the 4-vector (a,b,c,d); the complex pair is (z,w) = (a+ib, c+id).
 */
struct S3Point {
    Vec4 v;

    S3Point() : v(1, 0, 0, 0) {}
    explicit S3Point(const Vec4& u) : v(u) {
        const double n = v.norm();
        if (std::abs(n - 1.0) > kUnitTol)
            throw std::invalid_argument("S3Point: vector is not unit length");
        v /= n;
    }
    static S3Point from_zw(Complex z, Complex w) {
        return S3Point(Vec4(z.real(), z.imag(), w.real(), w.imag()));
    }

    Complex z() const { return {v[0], v[1]}; }
    Complex w() const { return {v[2], v[3]}; }
    S3Point antipode() const {
        S3Point q;
        q.v = -v;
        return q;
    }
};

/// Tangent 4-vector attached to a base point (Euclidean orthogonality to the base).
struct S3Tangent {
    S3Point base;
    Vec4 vec;

    S3Tangent() : vec(Vec4::Zero()) {}
    S3Tangent(const S3Point& p, const Vec4& t) : base(p), vec(t) {
        const double d = std::abs(vec.dot(base.v));
        if (d > kUnitTol * std::max(1.0, vec.norm()))
            throw std::invalid_argument("S3Tangent: vector is not tangent to the base point");
    }
};

// ---------------------------------------------------------------------------
// Quaternions.  (z1,w1)(z2,w2) = (z1 z2 - w1 conj(w2), z1 w2 + w1 conj(z2)),
// identity (1,0), inverse (conj(z), -w).
// ---------------------------------------------------------------------------

inline Vec4 quat_mul_raw(const Vec4& p, const Vec4& q) {
    const Complex z1(p[0], p[1]), w1(p[2], p[3]);
    const Complex z2(q[0], q[1]), w2(q[2], q[3]);
    const Complex z = z1 * z2 - w1 * std::conj(w2);
    const Complex w = z1 * w2 + w1 * std::conj(z2);
    return Vec4(z.real(), z.imag(), w.real(), w.imag());
}

inline S3Point quat_mul(const S3Point& p, const S3Point& q) {
    Vec4 r = quat_mul_raw(p.v, q.v);
    r.normalize();
    S3Point out;
    out.v = r;
    return out;
}

inline S3Point quat_inverse(const S3Point& p) {
    return S3Point::from_zw(std::conj(p.z()), -p.w());
}

/// Matrix of the left translation q -> p q.
inline Mat4 left_translation_matrix(const S3Point& p) {
    const double a = p.v[0], b = p.v[1], c = p.v[2], d = p.v[3];
    Mat4 L;
    L << a, -b, -c, -d,
         b,  a, -d,  c,
         c,  d,  a, -b,
         d, -c,  b,  a;
    return L;
}

// Right-multiplication matrices by the imaginary units; these generate the
// left-invariant frame fields.  p*i = V p.
inline Mat4 right_i_matrix() { return v_matrix(); }
inline Mat4 right_j_matrix() {
    Mat4 M;
    M << 0, 0, -1, 0,
         0, 0, 0, -1,
         1, 0, 0, 0,
         0, 1, 0, 0;
    return M;
}
inline Mat4 right_k_matrix() {
    Mat4 M;
    M << 0, 0, 0, -1,
         0, 0, 1, 0,
         0, -1, 0, 0,
         1, 0, 0, 0;
    return M;
}

// ---------------------------------------------------------------------------
// Metric.
// ---------------------------------------------------------------------------

/// g evaluated on raw 4-vectors at base point p (no tangency check).
inline double metric_eval_raw(const BergerParams& par, const Vec4& p, const Vec4& x, const Vec4& y) {
    const Vec4 vp = v_field(p);
    return (4.0 / par.kappa) * (x.dot(y) + (par.eta() - 1.0) * x.dot(vp) * y.dot(vp));
}

inline double metric_eval(const BergerParams& par, const S3Tangent& x, const S3Tangent& y) {
    if ((x.base.v - y.base.v).norm() > kUnitTol)
        throw std::invalid_argument("metric_eval: tangents have different base points");
    return metric_eval_raw(par, x.base.v, x.vec, y.vec);
}

/// 4x4 Gram matrix of g at p (restricted to the tangent space it is the metric).
inline Mat4 metric_matrix(const BergerParams& par, const S3Point& p) {
    const Vec4 vp = v_field(p.v);
    return (4.0 / par.kappa) * (Mat4::Identity() + (par.eta() - 1.0) * vp * vp.transpose());
}

/// Inverse of metric_matrix, in closed form.
inline Mat4 metric_matrix_inverse(const BergerParams& par, const S3Point& p) {
    const Vec4 vp = v_field(p.v);
    const double e = par.eta() - 1.0;
    return (par.kappa / 4.0) * (Mat4::Identity() - (e / (1.0 + e)) * vp * vp.transpose());
}

// ---------------------------------------------------------------------------
// Frame and Hopf fibration.
// ---------------------------------------------------------------------------

struct FrameAtPoint {
    S3Tangent e1, e2, xi;
};

inline Vec4 frame_e1_raw(const BergerParams& par, const Vec4& p) {
    return 0.5 * std::sqrt(par.kappa) * (right_j_matrix() * p);
}
inline Vec4 frame_e2_raw(const BergerParams& par, const Vec4& p) {
    return 0.5 * std::sqrt(par.kappa) * (right_k_matrix() * p);
}
inline Vec4 frame_xi_raw(const BergerParams& par, const Vec4& p) {
    return (par.kappa / (4.0 * par.tau)) * v_field(p);
}

/**
 * @brief The global g-orthonormal frame {E1, E2, xi} at p.
 *
 * E1 = (sqrt(kappa)/2)(-w,z), E2 = (sqrt(kappa)/2)(iw,iz), xi = (kappa/4tau)(iz,-iw)
 * in the complex-pair convention.  xi is the unit vertical (Hopf) field; E1, E2
 * span the horizontal space.  The sign conventions are pinned by the submersion
 * identities of hopf_project (dPi maps E1, E2 to an orthonormal pair and xi to
 * zero); the test suite verifies them by finite differences.
 */
inline FrameAtPoint frame_at(const BergerParams& par, const S3Point& p) {
    FrameAtPoint f;
    f.e1 = S3Tangent(p, frame_e1_raw(par, p.v));
    f.e2 = S3Tangent(p, frame_e2_raw(par, p.v));
    f.xi = S3Tangent(p, frame_xi_raw(par, p.v));
    return f;
}

/// Horizontal field F_phi = cos(phi) E1 + sin(phi) E2 at p.
inline Vec4 horizontal_field_raw(const BergerParams& par, const Vec4& p, double phi) {
    return std::cos(phi) * frame_e1_raw(par, p) + std::sin(phi) * frame_e2_raw(par, p);
}

/**
 * @brief Hopf fibration Pi(z,w) = (1/sqrt(kappa)) (-2 i z w, |z|^2 - |w|^2).
 *
 * Image lies on the two-sphere of radius 1/sqrt(kappa).  The complex first
 * component -2izw is returned as two real coordinates.
 */
inline Vec3 hopf_project(const BergerParams& par, const S3Point& p) {
    const Complex zw = p.z() * p.w();
    const double s = 1.0 / std::sqrt(par.kappa);
    // -2i(u+iv) = 2v - 2iu
    return Vec3(s * 2.0 * zw.imag(), s * (-2.0) * zw.real(),
                s * (std::norm(p.z()) - std::norm(p.w())));
}

// ---------------------------------------------------------------------------
// Isometries.
// ---------------------------------------------------------------------------

/**
 * @brief An accepted ambient isometry of (S^3, g).
 *
 * vcommute records the commutation with V: +1 if AV = VA, -1 if AV = -VA, and
 * 0 when neither holds (possible only in the round case kappa = 4 tau^2, where
 * all of O(4) acts by isometries).
 */
struct AmbientIsometry {
    Mat4 A = Mat4::Identity();
    int vcommute = +1;

    S3Point apply(const S3Point& p) const {
        Vec4 q = A * p.v;
        q.normalize();
        S3Point out;
        out.v = q;
        return out;
    }
    S3Tangent apply(const S3Tangent& t) const { return S3Tangent(apply(t.base), A * t.vec); }
};

struct IsometryCheck {
    std::optional<AmbientIsometry> iso;
    std::string reject_reason;  // empty on acceptance

    bool accepted() const { return iso.has_value(); }
};

/**
 * @brief Gate for 4x4 matrices acting by isometries on (S^3, g).
 *
 * Accepts iff A is orthogonal and, unless the metric is round, AV = +-VA.
 * Rejections carry the failed condition.
 */
inline IsometryCheck check_isometry(const BergerParams& par, const Mat4& A, double tol = 1e-10) {
    IsometryCheck out;
    const double orth = (A.transpose() * A - Mat4::Identity()).cwiseAbs().maxCoeff();
    if (orth > tol) {
        out.reject_reason = "matrix is not orthogonal (|A^T A - I| = " + std::to_string(orth) + ")";
        return out;
    }
    const Mat4 V = v_matrix();
    const double comm = (A * V - V * A).cwiseAbs().maxCoeff();
    const double anti = (A * V + V * A).cwiseAbs().maxCoeff();
    int vc = 0;
    if (comm <= tol)
        vc = +1;
    else if (anti <= tol)
        vc = -1;
    else if (!par.is_round()) {
        out.reject_reason = "AV != +-VA (commutator " + std::to_string(comm) + ", anticommutator " +
                            std::to_string(anti) + ") and kappa != 4 tau^2";
        return out;
    }
    out.iso = AmbientIsometry{A, vc};
    return out;
}

/// Left translation by p as an accepted isometry (always commutes with V).
inline AmbientIsometry left_translation(const BergerParams& par, const S3Point& p) {
    auto chk = check_isometry(par, left_translation_matrix(p));
    return *chk.iso;
}

/// Rotation about the fiber through (1,0): (z,w) -> (z, e^{i theta} w).
inline Mat4 fiber_rotation_matrix(double theta) {
    Mat4 M = Mat4::Identity();
    const double c = std::cos(theta), s = std::sin(theta);
    M(2, 2) = c; M(2, 3) = -s;
    M(3, 2) = s; M(3, 3) = c;
    return M;
}

// ---------------------------------------------------------------------------
// Connection.
// ---------------------------------------------------------------------------

using ConnectionTable = std::array<std::array<std::array<double, 3>, 3>, 3>;

/**
 * @brief Closed-form Levi-Civita connection in the frame {E1, E2, xi}.
 *
 * table[i][j][k] is the E_k-component of the covariant derivative of E_j along
 * E_i (indices 0,1,2 for E1, E2, xi).
 */
inline ConnectionTable connection_table(const BergerParams& par) {
    ConnectionTable c{};
    const double t = par.tau;
    const double m = par.kappa / (2.0 * par.tau) - par.tau;
    c[0][1][2] = t;   // D_{E1} E2 = tau xi
    c[0][2][1] = -t;  // D_{E1} xi = -tau E2
    c[1][0][2] = -t;  // D_{E2} E1 = -tau xi
    c[1][2][0] = t;   // D_{E2} xi = tau E1
    c[2][0][1] = m;   // D_{xi} E1 = (kappa/2tau - tau) E2
    c[2][1][0] = -m;  // D_{xi} E2 = -(kappa/2tau - tau) E1
    return c;
}

namespace detail {

/// normalize(p + t v): a curve on the sphere through p with initial velocity v
/// (for tangent v).  Used for all finite-difference derivatives at p.
inline Vec4 chord_curve(const Vec4& p, const Vec4& v, double t) { return (p + t * v).normalized(); }

}  // namespace detail

/**
 * @brief Finite-difference oracle for the connection coefficients at p.
 *
 * Assembles the Koszul formula from central finite differences of the metric
 * and of the frame fields only; the closed-form connection_table never enters.
 * Truncation error is O(step^2).
 */
inline ConnectionTable christoffel_fd(const BergerParams& par, const S3Point& p, double step = 1e-4) {
    if (!(step >= 1e-8 && step <= 1e-1))
        throw std::invalid_argument("christoffel_fd: step outside [1e-8, 1e-1]");

    const std::array<Mat4, 3> gen = {right_j_matrix(), right_k_matrix(), right_i_matrix()};
    const std::array<double, 3> scale = {0.5 * std::sqrt(par.kappa), 0.5 * std::sqrt(par.kappa),
                                         par.kappa / (4.0 * par.tau)};
    auto field = [&](int k, const Vec4& q) -> Vec4 { return scale[k] * (gen[k] * q); };

    // Directional derivative of q -> g_q(E_a(q), E_b(q)) along E_i.
    auto dmetric = [&](int i, int a, int b) -> double {
        const Vec4 xp = detail::chord_curve(p.v, field(i, p.v), step);
        const Vec4 xm = detail::chord_curve(p.v, field(i, p.v), -step);
        const double fp = metric_eval_raw(par, xp, field(a, xp), field(b, xp));
        const double fm = metric_eval_raw(par, xm, field(a, xm), field(b, xm));
        return (fp - fm) / (2.0 * step);
    };
    // Lie bracket [E_a, E_b](p) by finite differences of the fields.
    auto bracket = [&](int a, int b) -> Vec4 {
        auto dfield = [&](int along, int of) -> Vec4 {
            const Vec4 xp = detail::chord_curve(p.v, field(along, p.v), step);
            const Vec4 xm = detail::chord_curve(p.v, field(along, p.v), -step);
            return (field(of, xp) - field(of, xm)) / (2.0 * step);
        };
        return dfield(a, b) - dfield(b, a);
    };

    std::array<std::array<Vec4, 3>, 3> br;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) br[a][b] = bracket(a, b);

    ConnectionTable out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const double term =
                    dmetric(i, j, k) + dmetric(j, k, i) - dmetric(k, i, j) +
                    metric_eval_raw(par, p.v, br[i][j], field(k, p.v)) -
                    metric_eval_raw(par, p.v, br[j][k], field(i, p.v)) +
                    metric_eval_raw(par, p.v, br[k][i], field(j, p.v));
                out[i][j][k] = 0.5 * term;  // frame is orthonormal, no Gram inverse needed
            }
    return out;
}

// ---------------------------------------------------------------------------
// Sampling helpers (fixed-seed suites live in the tests and in `verify`).
// ---------------------------------------------------------------------------

inline S3Point random_s3_point(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec4 v;
    do {
        v = Vec4(n(rng), n(rng), n(rng), n(rng));
    } while (v.norm() < 1e-6);
    v.normalize();
    S3Point p;
    p.v = v;
    return p;
}

inline S3Tangent random_tangent(std::mt19937_64& rng, const S3Point& p) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec4 v(n(rng), n(rng), n(rng), n(rng));
    v -= v.dot(p.v) * p.v;
    return S3Tangent(p, v);
}

}  // namespace berger
