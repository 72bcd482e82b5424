#pragma once

#include "fishpose/geometry.hpp"
#include "fishpose/sphere.hpp"

namespace fishpose {

/// Rotation taking camera-frame coordinates into the virtual perspective
/// camera frame whose optical axis pierces the sphere at `tangent`.
/// r_adj * unit(t) == (0, 0, 1) for any translation t over that tangent point.
struct ViewpointAdjust {
    TangentPoint tangent;
    RotationMatrix r_adj;
};

/// Tangent point of the virtual camera axis through the object center:
/// theta0 = asin(y/|t|), phi0 = atan2(x, z).
TangentPoint tangentFromTranslation(const Vec3& t);

ViewpointAdjust rotationAdjust(const TangentPoint& t0);

/// Apparent orientation in the virtual camera frame: R_p = R_adj * R.
UnitQuaternion apparentOrientation(const UnitQuaternion& R, const Vec3& t);

/// Inverse of apparentOrientation: R = R_adj^T * R_p.
UnitQuaternion recoverGlobalOrientation(const UnitQuaternion& R_p, const Vec3& t);

/// R_adj * t; lands on the virtual optical axis, (0, 0, |t|).
Vec3 translationInVirtualFrame(const Vec3& t);

} // namespace fishpose
