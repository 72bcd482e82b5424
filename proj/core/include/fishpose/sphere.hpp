#pragma once

#include "fishpose/fisheye.hpp"
#include "fishpose/geometry.hpp"

namespace fishpose {

/// Polar coordinates on the unit sphere: theta is elevation toward +y
/// (down in the image), phi is azimuth toward +x, measured about the
/// optical axis +z.
struct SphericalCoord {
    double theta{0.0}; // [-pi/2, pi/2]
    double phi{0.0};   // (-pi, pi]
};

/// Sphere location pierced by the virtual camera optical axis.
struct TangentPoint {
    double theta0{0.0};
    double phi0{0.0};
};

/// Tangent-plane coordinates normalized by the virtual focal length f_p.
struct TangentPlaneCoord {
    double x{0.0};
    double y{0.0};
};

/// (theta, phi) -> unit ray (cos(theta)sin(phi), sin(theta), cos(theta)cos(phi)).
Vec3 sphericalToRay(const SphericalCoord& s);

/// Inverse of sphericalToRay. At the poles phi is reported as 0.
SphericalCoord rayToSpherical(const Vec3& ray);

SphericalCoord pixelToSpherical(double u, double v, const FisheyeIntrinsics& K);
PixelCoord sphericalToPixel(const SphericalCoord& s, const FisheyeIntrinsics& K);

/// Gnomonic projection of a spherical point onto the plane tangent at t0.
/// Throws BehindPlaneError when the point is not in front of the plane
/// (angular distance >= pi/2 up to a 1e-12 denominator tolerance).
TangentPlaneCoord gnomonicForward(const SphericalCoord& s, const TangentPoint& t0);

/// Inverse gnomonic mapping; every finite (x, y) lands on the front hemisphere.
SphericalCoord gnomonicInverse(const TangentPlaneCoord& p, const TangentPoint& t0);

} // namespace fishpose
