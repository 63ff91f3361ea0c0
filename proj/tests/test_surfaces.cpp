#include <berger/surfaces.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace berger;

namespace {
const BergerParams kB31 = BergerParams::make(3.0, 1.0);
const BergerParams kRound = BergerParams::make(4.0, 1.0);
}  // namespace

TEST(Helicoid, BottomRulingIsStandardGeodesic) {
    const auto spec = HelicoidSpec::make(kB31, 0.9, 2.2, +1);
    const S3Point one(Vec4(1, 0, 0, 0));
    for (double x : {0.0, 0.7, 2.0, 5.0})
        EXPECT_LT((helicoid_point(spec, x, 0.0).v - horizontal_geodesic(kB31, one, 0.0, x).v).norm(),
                  1e-14);
}

TEST(Helicoid, AxisTraversesFiber) {
    const auto spec = HelicoidSpec::make(kB31, 1.1, 0.4, -1);
    const S3Point one(Vec4(1, 0, 0, 0));
    for (double y : {0.0, 0.25, 0.8, 1.0}) {
        const S3Point expect = vertical_geodesic(kB31, one, spec.sign * spec.ell * y);
        EXPECT_LT((helicoid_point(spec, 0.0, y).v - expect.v).norm(), 1e-14);
    }
}

TEST(Helicoid, RulingFieldAngleGrowsLinearly) {
    const auto spec = HelicoidSpec::make(kB31, 1.3, 2.9, -1);
    for (double y : {0.0, 0.3, 0.6, 1.0}) {
        const ParamJet j = helicoid_jet(spec, 1.234, y);
        S3Point p;
        p.v = j.f;
        double expect = std::fmod(spec.phi * y, 2 * kPi);
        if (expect < 0) expect += 2 * kPi;
        EXPECT_NEAR(field_angle(kB31, p, j.fx), expect, 1e-11);
    }
}

TEST(Helicoid, MatchesLawsonParametrization) {
    // kappa = 4, tau = 1, phi = pi, ell = n/2: the classical family, with the
    // y-scale doubled.
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ux(0.0, 2 * kPi), uy(0.0, 0.5);
    for (double n : {0.8, 1.9, 3.0}) {
        const auto spec = HelicoidSpec::make(kRound, 0.5 * n, kPi, -1);
        double worst = 0;
        for (int it = 0; it < 10000; ++it) {
            const double x = ux(rng), y = uy(rng);
            worst = std::max(worst,
                             (lawson_point(n, x, y).v - helicoid_point(spec, x, 2 * y).v).norm());
        }
        EXPECT_LT(worst, 1e-12) << "n=" << n;
    }
}

TEST(Helicoid, SpecValidation) {
    EXPECT_THROW((void)HelicoidSpec::make(kB31, -0.1, kPi, +1), std::invalid_argument);
    EXPECT_THROW((void)HelicoidSpec::make(kB31, 100.0, kPi, +1), std::invalid_argument);
    EXPECT_THROW((void)HelicoidSpec::make(kB31, 0.0, 1.0, +1), std::invalid_argument);
    EXPECT_THROW((void)HelicoidSpec::make(kB31, 1.0, 1.0, 2), std::invalid_argument);
    const auto umbrella = HelicoidSpec::make(kB31, 0.0, kPi, +1);
    EXPECT_THROW((void)helicoid_point(umbrella, 0.0, 0.5), std::invalid_argument);
    EXPECT_THROW((void)helicoid_point(umbrella, 5.0, 0.5), std::invalid_argument);
    (void)helicoid_point(umbrella, 0.5 * kPi / std::sqrt(3.0), 0.5);
}

TEST(Helicoid, EmbeddedRange) {
    const double bound = 4.0 * kB31.tau * kPi / kB31.kappa;
    EXPECT_TRUE(helicoid_is_embedded(HelicoidSpec::make(kB31, 0.5 * bound, 1.0, +1)));
    EXPECT_TRUE(helicoid_is_embedded(HelicoidSpec::make(kB31, bound, 1.0, +1)));
    EXPECT_FALSE(helicoid_is_embedded(HelicoidSpec::make(kB31, 1.5 * bound, 1.0, +1)));
    EXPECT_TRUE(helicoid_is_embedded(HelicoidSpec::make(kB31, 0.0, kPi, +1)));
}

TEST(Fc, MeridianFieldAngle) {
    const FcSpec spec = FcSpec::make(1.0, 0.6);
    const BergerParams par = spec.params();
    const double a = par.kappa / (4.0 * par.tau);
    for (double y : {0.0, 0.4, 1.1}) {
        const ParamJet j = fc_jet(spec, 0.9, y);
        S3Point p;
        p.v = j.f;
        double expect = std::fmod((spec.c + 1.0) * a * y, 2 * kPi);
        if (expect < 0) expect += 2 * kPi;
        EXPECT_NEAR(field_angle(par, p, j.fx), expect, 1e-11);
    }
}

TEST(Fc, AxisIsVerticalGeodesic) {
    const FcSpec spec = FcSpec::make(1.3, 0.5);
    const double xa = kPi / std::sqrt(spec.kappa());
    const S3Point p0 = fc_point(spec, xa, 0.0);
    for (double y : {0.2, 0.9, 2.0})
        EXPECT_LT((fc_point(spec, xa, y).v - vertical_geodesic(spec.params(), p0, -y).v).norm(),
                  1e-13);
}

TEST(Fc, CliffordTraceIdentity) {
    const FcSpec spec = FcSpec::make(1.0, 1.0);
    for (double x : {0.1, 0.5, 1.0, 1.7}) {
        const S3Point p = fc_point(spec, x, 0.77);
        const double lhs = std::norm(p.z()) - std::norm(p.w());
        EXPECT_NEAR(lhs, std::cos(std::sqrt(spec.kappa()) * x), 1e-14);
    }
}

TEST(Fc, DomainValidation) {
    const FcSpec sphere = FcSpec::make(1.0, 0.0);
    EXPECT_THROW((void)fc_point(sphere, 0.0, 0.3), std::invalid_argument);
    EXPECT_THROW((void)fc_point(sphere, 4.0, 0.3), std::invalid_argument);
    (void)fc_point(sphere, kPi / std::sqrt(3.0), 0.3);  // axis row stays available
    EXPECT_THROW((void)FcSpec::make(0.4, 0.5), std::invalid_argument);
    EXPECT_THROW((void)FcSpec::make(1.0, 1.5), std::invalid_argument);
}

TEST(ShapeOperator, ClosedFormValues) {
    EXPECT_NEAR(fc_shape_operator(FcSpec::make(1.0, 1.0), 0.3)(0, 1), 1.0, 1e-15);
    EXPECT_NEAR(fc_shape_operator(FcSpec::make(1.0, 0.0), 0.3)(0, 1), 0.25, 1e-15);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uh(0.6, 4.0), uc(0.0, 1.0);
    for (int it = 0; it < 50; ++it) {
        const Mat2 S = fc_shape_operator(FcSpec::make(uh(rng), uc(rng)), 0.0);
        EXPECT_EQ(S.trace(), 0.0);
        EXPECT_EQ(S(0, 1), S(1, 0));
        EXPECT_EQ(S(0, 0), 0.0);
    }
}

TEST(Profile, WorkedConstants) {
    const auto p11 = sister_profile(FcSpec::make(1.0, 1.0));
    EXPECT_EQ(p11.k_neck, 2.0);
    EXPECT_NEAR(p11.T_half, kPi / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(p11.alpha0, 2.0 * kPi / 3.0, 1e-15);

    const auto p10 = sister_profile(FcSpec::make(1.0, 0.0));
    EXPECT_EQ(p10.k_neck, 1.25);
    EXPECT_EQ(p10.T_half, kPi / 0.75);  // exactly 4 pi / 3 in dyadic steps
}

TEST(Profile, RulingTurnMonotoneAndPinned) {
    // exact value pi at c = 0 for H = 1 (all intermediates are dyadic)
    EXPECT_EQ(ruling_turn(1.0, 0.0), kPi);
    for (double H : {0.7, 1.0, 2.5}) {
        double prev = ruling_turn(H, 0.0);
        EXPECT_NEAR(prev, kPi, 1e-12);
        for (int i = 1; i < 1000; ++i) {
            const double c = double(i) / 999.0;
            const double cur = ruling_turn(H, c);
            EXPECT_LT(cur, prev) << "H=" << H << " c=" << c;
            prev = cur;
        }
        EXPECT_GT(ruling_turn(H, 1.0), 0.0);
        EXPECT_LT(ruling_turn(H, 1.0), kPi);
    }
}

TEST(Profile, NeckCurvatureExceedsOne) {
    for (int i = 0; i <= 60; ++i) {
        const double H = 0.5 + 1e-3 + (10.0 - 0.5 - 1e-3) * i / 60.0;
        for (int j = 0; j <= 20; ++j) {
            const double c = j / 20.0;
            EXPECT_GT(sister_neck_curvature(H, c), 1.0) << "H=" << H << " c=" << c;
        }
    }
}

TEST(Profile, BoundaryFieldTurnNondegenerate) {
    for (double c : {0.1, 0.5, 1.0}) {
        const FcSpec spec = FcSpec::make(1.0, c);
        const BergerParams par = spec.params();
        const double a = par.kappa / (4.0 * par.tau);
        const double T = sister_half_period(spec.H, spec.c);
        const ParamJet j = fc_jet(spec, 0.8, T);
        S3Point p;
        p.v = j.f;
        const double angle = field_angle(par, p, j.fx);
        const double turn = ruling_turn(spec.H, spec.c);
        EXPECT_NEAR(std::fmod(angle, 2 * kPi), std::fmod((c + 1) * a * T, 2 * kPi), 1e-11);
        EXPECT_NEAR((c + 1) * a * T, turn, 1e-12);
        EXPECT_GT(turn, 1e-3);
        EXPECT_LT(turn, kPi - 1e-3);
    }
}

TEST(Flow, IdentityAndDerivative) {
    std::mt19937_64 rng(43);
    const S3Point p = random_s3_point(rng);
    EXPECT_LT((s3_flow(0.0, p).v - p.v).norm(), 1e-15);
    const double h = 1e-6;
    const Vec4 d = (s3_flow(h, p).v - s3_flow(-h, p).v) / (2 * h);
    EXPECT_LT((d - 0.5 * frame_e1_raw(kRound, p.v)).norm(), 1e-6);
}

TEST(Flow, IsometryGate) {
    const Mat4 M = s3_flow_matrix(kPi / 5.0);
    EXPECT_TRUE(check_isometry(kRound, M).accepted());
    EXPECT_FALSE(check_isometry(kB31, M).accepted());
}

TEST(Tables, RowsAndWorkedValues) {
    const auto rows = profile_table({1.0}, 11);
    ASSERT_EQ(rows.size(), 11u);
    const auto& last = rows.back();  // c = 1
    EXPECT_EQ(last.c, 1.0);
    EXPECT_EQ(last.k_neck, 2.0);
    EXPECT_NEAR(last.T_half, kPi / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(last.alpha0, 2.0 * kPi / 3.0, 1e-15);
    EXPECT_THROW((void)profile_table({1.0}, 1), std::invalid_argument);
}
