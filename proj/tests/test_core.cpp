#include <berger/core.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace berger;

namespace {

const BergerParams kBerger31 = BergerParams::make(3.0, 1.0);   // kappa = 4H^2-1, tau = H at H = 1
const BergerParams kRound = BergerParams::make(4.0, 1.0);
const BergerParams kSquashed = BergerParams::make(2.0, 0.7);

Vec3 hopf_differential(const BergerParams& par, const S3Point& p, const Vec4& x, double h = 1e-6) {
    const Vec4 qp = (p.v + h * x).normalized();
    const Vec4 qm = (p.v - h * x).normalized();
    S3Point pp, pm;
    pp.v = qp;
    pm.v = qm;
    return (hopf_project(par, pp) - hopf_project(par, pm)) / (2.0 * h);
}

}  // namespace

TEST(QuatMul, UnitRelations) {
    const S3Point i(Vec4(0, 1, 0, 0));
    const S3Point j(Vec4(0, 0, 1, 0));
    const S3Point k(Vec4(0, 0, 0, 1));
    EXPECT_LT((quat_mul(i, j).v - k.v).norm(), 1e-15);  // ij = k

    std::mt19937_64 rng(7);
    const S3Point one(Vec4(1, 0, 0, 0));
    for (int it = 0; it < 50; ++it) {
        const S3Point p = random_s3_point(rng);
        EXPECT_LT((quat_mul(one, p).v - p.v).norm(), 1e-15);
        // (z,w)(conj z, -w) = (1,0)
        const S3Point pinv = quat_inverse(p);
        EXPECT_LT((quat_mul(p, pinv).v - one.v).norm(), 1e-14);
    }
}

TEST(QuatMul, LeftTranslationMatrixAgrees) {
    std::mt19937_64 rng(8);
    for (int it = 0; it < 50; ++it) {
        const S3Point p = random_s3_point(rng);
        const S3Point q = random_s3_point(rng);
        EXPECT_LT((left_translation_matrix(p) * q.v - quat_mul(p, q).v).norm(), 1e-14);
    }
}

TEST(Metric, RoundCaseIsScaledEuclidean) {
    std::mt19937_64 rng(9);
    for (int it = 0; it < 100; ++it) {
        const S3Point p = random_s3_point(rng);
        const S3Tangent x = random_tangent(rng, p);
        const S3Tangent y = random_tangent(rng, p);
        const double g = metric_eval(kRound, x, y);
        EXPECT_NEAR(g, (4.0 / kRound.kappa) * x.vec.dot(y.vec), 1e-12 * (1 + std::abs(g)));
    }
}

TEST(Metric, XiIsUnitForAnyParams) {
    std::mt19937_64 rng(10);
    for (const auto& par : {kBerger31, kRound, kSquashed}) {
        for (int it = 0; it < 30; ++it) {
            const S3Point p = random_s3_point(rng);
            const FrameAtPoint f = frame_at(par, p);
            EXPECT_NEAR(metric_eval(par, f.xi, f.xi), 1.0, 1e-12);
        }
    }
}

TEST(Metric, VFieldSquaredNormExample) {
    // kappa = 3, tau = 1: g(V,V) = (4/3)(1 + 1/3) = 16/9
    std::mt19937_64 rng(11);
    const S3Point p = random_s3_point(rng);
    const S3Tangent V(p, v_field(p.v));
    EXPECT_NEAR(metric_eval(kBerger31, V, V), 16.0 / 9.0, 1e-14);
}

TEST(Metric, MismatchedBasePointsThrow) {
    std::mt19937_64 rng(12);
    const S3Point p = random_s3_point(rng);
    const S3Point q = random_s3_point(rng);
    const S3Tangent x = random_tangent(rng, p);
    const S3Tangent y = random_tangent(rng, q);
    EXPECT_THROW((void)metric_eval(kBerger31, x, y), std::invalid_argument);
}

TEST(Metric, SymmetryAndBilinearity) {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 200; ++it) {
        const S3Point p = random_s3_point(rng);
        const S3Tangent x = random_tangent(rng, p);
        const S3Tangent y = random_tangent(rng, p);
        const S3Tangent z = random_tangent(rng, p);
        const double a = 1.7 - 0.01 * it;
        EXPECT_NEAR(metric_eval(kSquashed, x, y), metric_eval(kSquashed, y, x), 1e-12);
        const S3Tangent ax_plus_z(p, a * x.vec + z.vec);
        EXPECT_NEAR(metric_eval(kSquashed, ax_plus_z, y),
                    a * metric_eval(kSquashed, x, y) + metric_eval(kSquashed, z, y), 1e-12);
    }
}

TEST(Frame, ValuesAtIdentity) {
    const S3Point one(Vec4(1, 0, 0, 0));
    for (const auto& par : {kBerger31, kRound, kSquashed}) {
        const FrameAtPoint f = frame_at(par, one);
        const double s = 0.5 * std::sqrt(par.kappa);
        EXPECT_LT((f.e1.vec - Vec4(0, 0, s, 0)).norm(), 1e-15);
        EXPECT_LT((f.e2.vec - Vec4(0, 0, 0, s)).norm(), 1e-15);
        EXPECT_LT((f.xi.vec - Vec4(0, par.kappa / (4 * par.tau), 0, 0)).norm(), 1e-15);
    }
}

TEST(Frame, GramIsIdentity) {
    std::mt19937_64 rng(14);
    for (const auto& par : {kBerger31, kRound, kSquashed}) {
        for (int it = 0; it < 100; ++it) {
            const S3Point p = random_s3_point(rng);
            const FrameAtPoint f = frame_at(par, p);
            const S3Tangent* e[3] = {&f.e1, &f.e2, &f.xi};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    EXPECT_NEAR(metric_eval(par, *e[a], *e[b]), a == b ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(Hopf, BasePointAndRadius) {
    const S3Point one(Vec4(1, 0, 0, 0));
    const double s = 1.0 / std::sqrt(kBerger31.kappa);
    EXPECT_LT((hopf_project(kBerger31, one) - Vec3(0, 0, s)).norm(), 1e-15);

    std::mt19937_64 rng(15);
    for (int it = 0; it < 10000; ++it) {
        const S3Point p = random_s3_point(rng);
        EXPECT_NEAR(hopf_project(kBerger31, p).norm(), s, 1e-12);
    }
}

TEST(Hopf, SubmersionIdentities) {
    // dPi maps {E1, E2} to an orthonormal pair on the sphere of radius
    // 1/sqrt(kappa) and xi to zero; this pins the sign conventions of the frame.
    std::mt19937_64 rng(16);
    for (const auto& par : {kBerger31, kSquashed}) {
        for (int it = 0; it < 25; ++it) {
            const S3Point p = random_s3_point(rng);
            const FrameAtPoint f = frame_at(par, p);
            const Vec3 d1 = hopf_differential(par, p, f.e1.vec);
            const Vec3 d2 = hopf_differential(par, p, f.e2.vec);
            const Vec3 dx = hopf_differential(par, p, f.xi.vec);
            EXPECT_NEAR(d1.norm(), 1.0, 1e-6);
            EXPECT_NEAR(d2.norm(), 1.0, 1e-6);
            EXPECT_NEAR(d1.dot(d2), 0.0, 1e-6);
            EXPECT_LT(dx.norm(), 1e-6);
        }
    }
}

TEST(Isometry, LeftTranslationsAccepted) {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 50; ++it) {
        const S3Point p = random_s3_point(rng);
        const auto chk = check_isometry(kSquashed, left_translation_matrix(p));
        ASSERT_TRUE(chk.accepted());
        EXPECT_EQ(chk.iso->vcommute, +1);
    }
}

TEST(Isometry, DiagonalReflectionAccepted) {
    Mat4 A = Mat4::Identity();
    A(2, 2) = -1;
    A(3, 3) = -1;  // (z,w) -> (z,-w)
    const auto chk = check_isometry(kSquashed, A);
    ASSERT_TRUE(chk.accepted());
    EXPECT_EQ(chk.iso->vcommute, +1);
}

TEST(Isometry, GenericPlaneRotationRejectedUnlessRound) {
    Mat4 A = Mat4::Identity();
    const double t = kPi / 7.0;
    A(0, 0) = std::cos(t); A(0, 2) = -std::sin(t);
    A(2, 0) = std::sin(t); A(2, 2) = std::cos(t);
    const auto bad = check_isometry(kSquashed, A);
    EXPECT_FALSE(bad.accepted());
    EXPECT_FALSE(bad.reject_reason.empty());
    const auto good = check_isometry(kRound, A);
    ASSERT_TRUE(good.accepted());
    EXPECT_EQ(good.iso->vcommute, 0);
}

TEST(Isometry, PreservesMetric) {
    std::mt19937_64 rng(18);
    for (int it = 0; it < 100; ++it) {
        const S3Point p = random_s3_point(rng);
        const auto iso = left_translation(kSquashed, random_s3_point(rng));
        const S3Tangent x = random_tangent(rng, p);
        const S3Tangent y = random_tangent(rng, p);
        EXPECT_NEAR(metric_eval(kSquashed, iso.apply(x), iso.apply(y)),
                    metric_eval(kSquashed, x, y), 1e-10);
    }
}

TEST(Connection, FiniteDifferenceMatchesClosedForm) {
    std::mt19937_64 rng(19);
    for (const auto& par : {kBerger31, kSquashed}) {
        const ConnectionTable exact = connection_table(par);
        for (int it = 0; it < 20; ++it) {
            const S3Point p = random_s3_point(rng);
            const ConnectionTable fd = christoffel_fd(par, p, 1e-4);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        EXPECT_NEAR(fd[i][j][k], exact[i][j][k], 1e-6)
                            << "entry " << i << j << k;
        }
    }
}

TEST(Connection, StepValidation) {
    std::mt19937_64 rng(20);
    const S3Point p = random_s3_point(rng);
    EXPECT_THROW((void)christoffel_fd(kBerger31, p, 1e-12), std::invalid_argument);
    EXPECT_THROW((void)christoffel_fd(kBerger31, p, 0.5), std::invalid_argument);
}

TEST(Params, Validation) {
    EXPECT_THROW((void)BergerParams::make(-1.0, 1.0), std::invalid_argument);
    EXPECT_THROW((void)BergerParams::make(1.0, 0.0), std::invalid_argument);
    EXPECT_NEAR(BergerParams::make(3.0, 1.0).eta(), 4.0 / 3.0, 1e-16);
}
