#pragma once

#include <berger/geodesics.hpp>

#include <functional>
#include <vector>

namespace berger {

/// Second-order jet of a parametrized surface patch in R^4.
struct ParamJet {
    Vec4 f, fx, fy, fxx, fxy, fyy;
};

using SurfaceJetFn = std::function<ParamJet(double, double)>;

namespace detail {

/// All explicit surfaces here have the form
///   (cos(r x) e^{i(u1 y + c1)}, sin(r x) e^{i(u2 y + c2)}),
/// so one jet routine covers them.
struct PhaseSurface {
    double r, u1, u2, c1 = 0.0, c2 = 0.0;

    ParamJet jet(double x, double y) const {
        const double A = std::cos(r * x), B = std::sin(r * x);
        const Complex ea(std::cos(u1 * y + c1), std::sin(u1 * y + c1));
        const Complex eb(std::cos(u2 * y + c2), std::sin(u2 * y + c2));
        const Complex I(0, 1);
        auto pack = [](Complex z, Complex w) { return Vec4(z.real(), z.imag(), w.real(), w.imag()); };
        ParamJet j;
        j.f = pack(A * ea, B * eb);
        j.fx = pack(-r * B * ea, r * A * eb);
        j.fy = pack(I * u1 * A * ea, I * u2 * B * eb);
        j.fxx = pack(-r * r * A * ea, -r * r * B * eb);
        j.fxy = pack(-I * u1 * r * B * ea, I * u2 * r * A * eb);
        j.fyy = pack(-u1 * u1 * A * ea, -u2 * u2 * B * eb);
        return j;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Spherical helicoid, Eq.-(8)-style parametrization.
// ---------------------------------------------------------------------------

/**
 * @brief Ruled minimal annulus with pitch ell and angle phi:
 *   f(x,y) = (cos(sqrt(kappa)x/2) e^{i s a ell y}, sin(sqrt(kappa)x/2) e^{i(phi + s a ell) y}),
 * a = kappa/4tau, s = sign.  The rulings f(.,y) are horizontal geodesics whose
 * field angle grows linearly (phi * y); f(0,.) runs along the vertical axis.
 * ell = 0 with phi = pi is the horizontal umbrella on (0, pi/sqrt(kappa)) x [0,1].
 */
struct HelicoidSpec {
    BergerParams params;
    double ell = 0.0;
    double phi = kPi;
    int sign = -1;

    static HelicoidSpec make(const BergerParams& par, double ell, double phi, int sign) {
        if (!(ell >= 0.0 && ell < par.fiber_length()))
            throw std::invalid_argument("HelicoidSpec: pitch outside [0, 8 tau pi/kappa)");
        if (!(phi >= 0.0 && phi < 2.0 * kPi))
            throw std::invalid_argument("HelicoidSpec: angle outside [0, 2 pi)");
        if (sign != +1 && sign != -1) throw std::invalid_argument("HelicoidSpec: sign must be +-1");
        if (ell == 0.0 && phi != kPi)
            throw std::invalid_argument("HelicoidSpec: the pitch-zero umbrella requires phi = pi");
        return HelicoidSpec{par, ell, phi, sign};
    }

    detail::PhaseSurface phase() const {
        const double a = params.kappa / (4.0 * params.tau);
        return {0.5 * std::sqrt(params.kappa), sign * a * ell, phi + sign * a * ell};
    }
};

inline void helicoid_check_domain(const HelicoidSpec& spec, double x, double y) {
    if (!(y >= -1e-12 && y <= 1.0 + 1e-12))
        throw std::invalid_argument("helicoid_point: y outside [0,1]");
    if (spec.ell == 0.0) {
        const double xmax = kPi / std::sqrt(spec.params.kappa);
        if (!(x > 0.0 && x < xmax))
            throw std::invalid_argument("helicoid_point: umbrella requires x in (0, pi/sqrt(kappa))");
    }
}

inline S3Point helicoid_point(const HelicoidSpec& spec, double x, double y) {
    helicoid_check_domain(spec, x, y);
    S3Point p;
    p.v = spec.phase().jet(x, y).f;
    return p;
}

inline ParamJet helicoid_jet(const HelicoidSpec& spec, double x, double y) {
    return spec.phase().jet(x, y);
}

/// Embedded iff ell in (0, 4 tau pi/kappa] or ell = 0 (umbrella).  The closed
/// upper endpoint follows the stated criterion; the numerical
/// self-intersection test is the arbiter for meshes near the boundary case.
inline bool helicoid_is_embedded(const HelicoidSpec& spec) {
    if (spec.ell == 0.0) return true;
    return spec.ell > 0.0 && spec.ell <= 4.0 * spec.params.tau * kPi / spec.params.kappa;
}

// ---------------------------------------------------------------------------
// Reparametrised family f^c (neck parameter c, mean curvature H of the sister).
// ---------------------------------------------------------------------------

/**
 * @brief f^c(x,y) = (cos(sqrt(kappa)x/2) e^{-i c a y}, sin(sqrt(kappa)x/2) e^{i a y})
 * in S^3(4H^2-1, H), a = kappa/4tau.  c = 1 is the cylinder case, c = 0 the
 * chain-of-spheres case.
 */
struct FcSpec {
    double H = 1.0;
    double c = 1.0;

    static FcSpec make(double H, double c) {
        if (!(H > 0.5)) throw std::invalid_argument("FcSpec: H must exceed 1/2");
        if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("FcSpec: c outside [0,1]");
        return FcSpec{H, c};
    }

    double kappa() const { return 4.0 * H * H - 1.0; }
    double tau() const { return H; }
    BergerParams params() const { return BergerParams::make(kappa(), tau()); }

    detail::PhaseSurface phase() const {
        const double a = kappa() / (4.0 * tau());
        return {0.5 * std::sqrt(kappa()), -c * a, a};
    }
};

inline void fc_check_domain(const FcSpec& spec, double x, double /*y*/) {
    if (spec.c == 0.0) {
        const double xmax = kPi / std::sqrt(spec.kappa());
        // the axis row x = pi/sqrt(kappa) stays available; only x <= 0 is degenerate
        if (!(x > 0.0 && x <= xmax + 1e-12))
            throw std::invalid_argument("fc_point: c = 0 requires x in (0, pi/sqrt(kappa)]");
    }
}

inline S3Point fc_point(const FcSpec& spec, double x, double y) {
    fc_check_domain(spec, x, y);
    S3Point p;
    p.v = spec.phase().jet(x, y).f;
    return p;
}

inline ParamJet fc_jet(const FcSpec& spec, double x, double y) { return spec.phase().jet(x, y); }

/// Shape operator on the axis x = pi/sqrt(kappa), in the orthonormal basis
/// (df/dx, df/dy) there: off-diagonal with entry (c-1) kappa/(4 tau) + tau.
inline Mat2 fc_shape_operator(const FcSpec& spec, double /*y*/) {
    const double m = (spec.c - 1.0) * spec.kappa() / (4.0 * spec.tau()) + spec.tau();
    Mat2 S;
    S << 0, m, m, 0;
    return S;
}

// ---------------------------------------------------------------------------
// Scalar profile of the sister surface.
// ---------------------------------------------------------------------------

/// Curvature of the sister neck curve: 2H + (c-1)(4H^2-1)/(4H) > 1.
inline double sister_neck_curvature(double H, double c) {
    return 2.0 * H + (c - 1.0) * (4.0 * H * H - 1.0) / (4.0 * H);
}

/// Half-period T = pi / sqrt(k^2 - 1) of the sister boundary pair.
inline double sister_half_period(double H, double c) {
    const double k = sister_neck_curvature(H, c);
    return kPi / std::sqrt(k * k - 1.0);
}

/// Total rotation of the ruling field over one half-period:
/// T(c) = (c+1) (4H^2-1)/(4H) * pi / sqrt(k(c)^2-1).  Strictly decreasing in c,
/// with value pi at c = 0 (exactly, when the arithmetic is dyadic as at H = 1).
inline double ruling_turn(double H, double c) {
    const double A = (4.0 * H * H - 1.0) / (4.0 * H);
    const double k = 2.0 * H + (c - 1.0) * A;
    const double B = std::sqrt(k * k - 1.0);
    return (c + 1.0) * (A / B) * kPi;
}

/// Field angle alpha0 at which the two boundary fields become anti-parallel.
inline double alpha_antiparallel(double H, double c) {
    return 4.0 * H * kPi / ((c + 1.0) * (4.0 * H * H - 1.0));
}

struct SisterProfile {
    double k_neck;
    double T_half;
    double alpha0;
    std::function<double(double)> Tcal;  // ruling turn as a function of c, H fixed
};

inline SisterProfile sister_profile(const FcSpec& spec) {
    SisterProfile out;
    out.k_neck = sister_neck_curvature(spec.H, spec.c);
    out.T_half = sister_half_period(spec.H, spec.c);
    out.alpha0 = alpha_antiparallel(spec.H, spec.c);
    const double H = spec.H;
    out.Tcal = [H](double c) { return ruling_turn(H, c); };
    return out;
}

/// Parameter interval of the boundary-pair deformation, (0, 2 alpha0).
inline std::pair<double, double> alpha_interval(const FcSpec& spec) {
    return {0.0, 2.0 * alpha_antiparallel(spec.H, spec.c)};
}

// ---------------------------------------------------------------------------
// Round-sphere items: the Killing flow and the classical helicoid f^n.
// ---------------------------------------------------------------------------

inline Mat4 s3_flow_matrix(double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    Mat4 M = Mat4::Zero();
    M(0, 0) = c; M(0, 2) = -s;
    M(1, 1) = c; M(1, 3) = -s;
    M(2, 0) = s; M(2, 2) = c;
    M(3, 1) = s; M(3, 3) = c;
    return M;
}

/// Flow of the field whose theta-derivative at the identity is E1/2 in the
/// round metric: (z,w) -> (cos(t/2) z - sin(t/2) w, sin(t/2) z + cos(t/2) w).
inline S3Point s3_flow(double theta, const S3Point& p) {
    S3Point q;
    q.v = s3_flow_matrix(theta) * p.v;
    q.v.normalize();
    return q;
}

/// Sister of the unduloid with neck size n in the round sphere (kappa = 4,
/// tau = 1): f^n(x,y) = (cos x e^{-iny}, sin x e^{i(2 pi - n) y}).
inline S3Point lawson_point(double n, double x, double y) {
    if (!(n > 0.0 && n <= kPi)) throw std::invalid_argument("lawson_point: n outside (0, pi]");
    const detail::PhaseSurface ps{1.0, -n, 2.0 * kPi - n};
    S3Point p;
    p.v = ps.jet(x, y).f;
    return p;
}

inline ParamJet lawson_jet(double n, double x, double y) {
    const detail::PhaseSurface ps{1.0, -n, 2.0 * kPi - n};
    return ps.jet(x, y);
}

// ---------------------------------------------------------------------------
// Profile tables.
// ---------------------------------------------------------------------------

struct ProfileRow {
    double H, c, k_neck, T_half, Tcal, alpha0;
};

inline std::vector<ProfileRow> profile_table(const std::vector<double>& Hs, int c_count) {
    if (c_count < 2) throw std::invalid_argument("profile_table: need at least two c samples");
    std::vector<ProfileRow> rows;
    for (double H : Hs) {
        for (int i = 0; i < c_count; ++i) {
            const double c = double(i) / (c_count - 1);
            rows.push_back({H, c, sister_neck_curvature(H, c), sister_half_period(H, c),
                            ruling_turn(H, c), alpha_antiparallel(H, c)});
        }
    }
    return rows;
}

}  // namespace berger
