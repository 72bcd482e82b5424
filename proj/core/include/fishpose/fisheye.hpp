#pragma once

#include <string>
#include <utility>

#include "fishpose/geometry.hpp"

namespace fishpose {

/// Equidistant fisheye model: radial image distance R = f * theta, where
/// theta is the incidence angle from the optical axis (+z). Camera frame is
/// x right, y down, z forward; pixel coordinates are continuous with the
/// principal point at (cx, cy).
struct FisheyeIntrinsics {
    double f{350.0};   // pixels
    double cx{0.0};    // pixels
    double cy{0.0};    // pixels
    int width{0};
    int height{0};
    double fov_max{0.0}; // full cone angle, radians

    FisheyeIntrinsics() = default;
    FisheyeIntrinsics(double f, double cx, double cy, int width, int height,
                      double fov_max);

    double maxIncidence() const { return 0.5 * fov_max; }
    double maxRadius() const { return f * maxIncidence(); }

    /// Intrinsics for the same lens after integer-factor downsampling.
    FisheyeIntrinsics scaled(int factor) const;
};

struct PixelCoord {
    double u{0.0};
    double v{0.0};
};

/// Project a camera-frame ray to fisheye pixel coordinates.
/// Throws OutOfFovError when the incidence angle exceeds fov_max/2.
PixelCoord rayToPixel(const Vec3& ray, const FisheyeIntrinsics& K);

/// Back-project a fisheye pixel to a unit camera-frame ray.
/// Throws OutOfFovError when the pixel radius implies theta > fov_max/2.
Vec3 pixelToRay(double u, double v, const FisheyeIntrinsics& K);

/// True iff the pixel is inside image bounds and its radius is within the
/// usable FOV circle (closed boundary).
bool isWithinFov(double u, double v, const FisheyeIntrinsics& K);

/// Key-value intrinsics file:
///   model = equidistant
///   f = 350.0
///   cx = 1224.0
///   cy = 1024.0
///   width = 2448
///   height = 2048
///   fov_max_deg = 185.0
FisheyeIntrinsics loadIntrinsics(const std::string& path);
void saveIntrinsics(const FisheyeIntrinsics& K, const std::string& path);

} // namespace fishpose
