#include <doctest.h>

#include <random>

#include "fishpose/viewpoint.hpp"
#include "test_support.hpp"

using namespace fishpose;
using namespace fishpose::test;

namespace {

Vec3 randomTranslation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> comp(-2.0, 2.0);
    for (;;) {
        const Vec3 t{comp(rng), comp(rng), comp(rng)};
        if (t.norm() > 0.1) {
            return t;
        }
    }
}

} // namespace

TEST_CASE("tangentFromTranslation examples") {
    const TangentPoint on_axis = tangentFromTranslation({0, 0, 2});
    CHECK(std::abs(on_axis.theta0) < 1e-15);
    CHECK(std::abs(on_axis.phi0) < 1e-15);

    const TangentPoint xz = tangentFromTranslation({1, 0, 1});
    CHECK(xz.theta0 == doctest::Approx(0.0));
    CHECK(xz.phi0 == doctest::Approx(kPi / 4).epsilon(1e-12));

    const TangentPoint yz = tangentFromTranslation({0, 1, 1});
    CHECK(yz.theta0 == doctest::Approx(kPi / 4).epsilon(1e-12));
    CHECK(yz.phi0 == doctest::Approx(0.0));

    CHECK_THROWS_AS(tangentFromTranslation({0, 0, 0}), InvalidInputError);
}

TEST_CASE("rotationAdjust hand-evaluated cases") {
    const auto id = rotationAdjust({0.0, 0.0});
    CHECK(id.r_adj.orthonormalityResidual() < 1e-15);
    for (int i = 0; i < 9; ++i) {
        CHECK(id.r_adj.m[i] == doctest::Approx(RotationMatrix::identity().m[i]));
    }

    const auto side = rotationAdjust({0.0, kPi / 2});
    const double expect_side[9] = {0, 0, -1, 0, 1, 0, 1, 0, 0};
    for (int i = 0; i < 9; ++i) {
        CHECK(side.r_adj.m[i] == doctest::Approx(expect_side[i]).epsilon(1e-12));
    }
    CHECK((side.r_adj * Vec3{1, 0, 0} - Vec3{0, 0, 1}).norm() < 1e-12);

    const auto down = rotationAdjust({kPi / 2, 0.0});
    const double expect_down[9] = {1, 0, 0, 0, 0, -1, 0, 1, 0};
    for (int i = 0; i < 9; ++i) {
        CHECK(down.r_adj.m[i] == doctest::Approx(expect_down[i]).epsilon(1e-12));
    }
    CHECK((down.r_adj * Vec3{0, 1, 0} - Vec3{0, 0, 1}).norm() < 1e-12);
}

TEST_CASE("r_adj maps unit(t) to e_z with orthonormal det=+1 matrices") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 t = randomTranslation(rng);
        const RotationMatrix R = rotationAdjust(tangentFromTranslation(t)).r_adj;
        CHECK(R.orthonormalityResidual() < 1e-12);
        CHECK(std::abs(R.determinant() - 1.0) < 1e-12);
        CHECK((R * t.normalized() - Vec3{0, 0, 1}).norm() < 1e-12);
    }
}

TEST_CASE("apparentOrientation examples") {
    CHECK(geodesicAngle(apparentOrientation(UnitQuaternion::identity(), {0, 0, 2}),
                        UnitQuaternion::identity()) < 1e-12);

    const UnitQuaternion q_adj =
        matrixToQuat(rotationAdjust({0.0, kPi / 4}).r_adj);
    CHECK(geodesicAngle(apparentOrientation(UnitQuaternion::identity(), {1, 0, 1}),
                        q_adj) < 1e-12);

    const UnitQuaternion rz90 = UnitQuaternion::fromAxisAngle({0, 0, 1}, kPi / 2);
    CHECK(geodesicAngle(apparentOrientation(rz90, {1, 0, 1}), q_adj * rz90) < 1e-12);

    CHECK_THROWS_AS(apparentOrientation(rz90, {0, 0, 0}), InvalidInputError);
}

TEST_CASE("recoverGlobalOrientation inverts apparentOrientation") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 10000; ++i) {
        const UnitQuaternion R = randomRotation(rng);
        const Vec3 t = randomTranslation(rng);
        const UnitQuaternion back = recoverGlobalOrientation(apparentOrientation(R, t), t);
        CHECK(geodesicAngle(back, R) < 1e-12);
    }

    // identity apparent orientation recovers R_adj^T
    const Vec3 t{0.4, -0.3, 1.7};
    const UnitQuaternion rec =
        recoverGlobalOrientation(UnitQuaternion::identity(), t);
    const UnitQuaternion expect =
        matrixToQuat(rotationAdjust(tangentFromTranslation(t)).r_adj.transpose());
    CHECK(geodesicAngle(rec, expect) < 1e-12);
}

TEST_CASE("translationInVirtualFrame lands on the optical axis") {
    const Vec3 v = translationInVirtualFrame({1, 0, 1});
    CHECK(std::abs(v.x) < 1e-12);
    CHECK(std::abs(v.y) < 1e-12);
    CHECK(v.z == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    std::mt19937_64 rng(47);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 t = randomTranslation(rng);
        const Vec3 out = translationInVirtualFrame(t);
        CHECK(std::abs(out.norm() - t.norm()) < 1e-12);
        CHECK(std::hypot(out.x, out.y) < 1e-12 * t.norm());
    }
}

TEST_CASE("rotational equivariance about the optical axis") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 t = randomTranslation(rng);
        const double alpha = ang(rng);
        const UnitQuaternion rz = UnitQuaternion::fromAxisAngle({0, 0, 1}, alpha);
        const Vec3 t_rot = rz.rotate(t);
        const RotationMatrix a = rotationAdjust(tangentFromTranslation(t)).r_adj;
        const RotationMatrix b = rotationAdjust(tangentFromTranslation(t_rot)).r_adj;
        // both frames see the translation on their optical axis; conjugating b
        // by Rz(alpha) must agree with a up to an in-plane rotation about e_z,
        // and their third rows are exactly related by the world-side Rz.
        const Vec3 z_a = a.row(2);
        const Vec3 z_b = b.row(2);
        CHECK((rz.rotate(z_a) - z_b).norm() < 1e-9);
    }
}
