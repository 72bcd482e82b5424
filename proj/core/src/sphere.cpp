#include "fishpose/sphere.hpp"

#include <algorithm>
#include <cmath>

namespace fishpose {

Vec3 sphericalToRay(const SphericalCoord& s) {
    const double ct = std::cos(s.theta);
    return {ct * std::sin(s.phi), std::sin(s.theta), ct * std::cos(s.phi)};
}

SphericalCoord rayToSpherical(const Vec3& ray) {
    const double n = ray.norm();
    if (n < 1e-12) {
        throw InvalidInputError("cannot map a zero ray to the sphere");
    }
    SphericalCoord s;
    s.theta = std::asin(std::clamp(ray.y / n, -1.0, 1.0));
    // atan2 rather than the printed atan(x/z): stays stable as z -> 0 for
    // incidence angles approaching 90 degrees.
    const double r_xz = std::hypot(ray.x, ray.z);
    s.phi = r_xz < 1e-15 * n ? 0.0 : std::atan2(ray.x, ray.z);
    return s;
}

SphericalCoord pixelToSpherical(double u, double v, const FisheyeIntrinsics& K) {
    return rayToSpherical(pixelToRay(u, v, K));
}

PixelCoord sphericalToPixel(const SphericalCoord& s, const FisheyeIntrinsics& K) {
    return rayToPixel(sphericalToRay(s), K);
}

TangentPlaneCoord gnomonicForward(const SphericalCoord& s, const TangentPoint& t0) {
    const double st0 = std::sin(t0.theta0), ct0 = std::cos(t0.theta0);
    const double st = std::sin(s.theta), ct = std::cos(s.theta);
    const double dphi = s.phi - t0.phi0;
    const double cd = std::cos(dphi);
    // cos of the angular distance between s and the tangent point
    const double denom = st0 * st + ct0 * ct * cd;
    if (denom <= 1e-12) {
        throw BehindPlaneError("spherical point lies behind the tangent plane");
    }
    return {ct * std::sin(dphi) / denom, (ct0 * st - st0 * ct * cd) / denom};
}

SphericalCoord gnomonicInverse(const TangentPlaneCoord& p, const TangentPoint& t0) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw InvalidInputError("tangent-plane coordinates must be finite");
    }
    const double st0 = std::sin(t0.theta0), ct0 = std::cos(t0.theta0);
    const double inv_len = 1.0 / std::sqrt(1.0 + p.x * p.x + p.y * p.y);
    SphericalCoord s;
    s.theta = std::asin(std::clamp((st0 + p.y * ct0) * inv_len, -1.0, 1.0));
    s.phi = t0.phi0 + std::atan2(p.x, ct0 - p.y * st0);
    if (s.phi > M_PI) {
        s.phi -= 2.0 * M_PI;
    } else if (s.phi <= -M_PI) {
        s.phi += 2.0 * M_PI;
    }
    return s;
}

} // namespace fishpose
