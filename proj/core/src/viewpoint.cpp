#include "fishpose/viewpoint.hpp"

#include <cmath>

namespace fishpose {

namespace {

void requireNonZero(const Vec3& t) {
    if (t.norm() <= 1e-9) {
        throw InvalidInputError("translation norm must exceed 1e-9");
    }
}

} // namespace

TangentPoint tangentFromTranslation(const Vec3& t) {
    requireNonZero(t);
    const SphericalCoord s = rayToSpherical(t);
    return {s.theta, s.phi};
}

ViewpointAdjust rotationAdjust(const TangentPoint& t0) {
    const double st = std::sin(t0.theta0), ct = std::cos(t0.theta0);
    const double sp = std::sin(t0.phi0), cp = std::cos(t0.phi0);
    ViewpointAdjust adj;
    adj.tangent = t0;
    adj.r_adj = RotationMatrix::fromRows({cp, 0.0, -sp},
                                         {-st * sp, ct, -st * cp},
                                         {ct * sp, st, ct * cp});
    return adj;
}

UnitQuaternion apparentOrientation(const UnitQuaternion& R, const Vec3& t) {
    requireNonZero(t);
    const auto adj = rotationAdjust(tangentFromTranslation(t));
    return (matrixToQuat(adj.r_adj) * R).canonical();
}

UnitQuaternion recoverGlobalOrientation(const UnitQuaternion& R_p, const Vec3& t) {
    requireNonZero(t);
    const auto adj = rotationAdjust(tangentFromTranslation(t));
    return (matrixToQuat(adj.r_adj.transpose()) * R_p).canonical();
}

Vec3 translationInVirtualFrame(const Vec3& t) {
    requireNonZero(t);
    return rotationAdjust(tangentFromTranslation(t)).r_adj * t;
}

} // namespace fishpose
