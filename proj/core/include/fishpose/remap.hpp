#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fishpose/fisheye.hpp"
#include "fishpose/image.hpp"
#include "fishpose/sphere.hpp"

namespace fishpose {

/// Ideal pinhole camera backing the virtual perspective views, principal
/// point at the image center.
struct VirtualCamera {
    int width{400};
    int height{400};
    double f_p{350.0};

    VirtualCamera() = default;
    VirtualCamera(int w, int h, double f);
};

/// Axis-aligned box on the fisheye image, pixels.
struct RoiBox {
    double u_min{0.0};
    double v_min{0.0};
    double u_max{0.0};
    double v_max{0.0};

    RoiBox() = default;
    RoiBox(double u0, double v0, double u1, double v1);

    double width() const { return u_max - u_min; }
    double height() const { return v_max - v_min; }
    double centerU() const { return 0.5 * (u_min + u_max); }
    double centerV() const { return 0.5 * (v_min + v_max); }
};

/// Per-output-pixel source sampling coordinates plus a validity mask.
/// Coordinates are 32-bit reals; the half-pixel convention places the center
/// of source pixel (i, j) at (i + 0.5, j + 0.5).
struct SampleGrid {
    int width{0};
    int height{0};
    std::vector<float> src_u;
    std::vector<float> src_v;
    std::vector<uint8_t> valid;

    SampleGrid() = default;
    SampleGrid(int w, int h);

    size_t index(int x, int y) const { return static_cast<size_t>(y) * width + x; }

    bool operator==(const SampleGrid& o) const = default;
};

/// Grid mapping a virtual perspective view centered on the tangent point t0
/// back to fisheye source pixels: output pixel -> normalized tangent-plane
/// coordinate -> inverse gnomonic -> fisheye projection.
SampleGrid buildPerspectiveGrid(const TangentPoint& t0, const VirtualCamera& vcam,
                                const FisheyeIntrinsics& K, int workers = 1);

/// Bilinear remap. Invalid grid entries receive the fill value. Deterministic
/// and bit-identical for any worker count.
ImageBuffer remapImage(const ImageBuffer& src, const SampleGrid& grid, float fill,
                       int workers = 1);

struct RoiFeatureGrid {
    SampleGrid grid;        // samples in feature-map coordinates (fisheye px / stride)
    TangentPoint tangent;   // tangent point at the ROI center
    double f_equiv{0.0};    // feature-map pixels per unit tangent-plane coordinate
};

/// Grid reprojecting the feature cells under an ROI onto the tangent plane
/// centered on the ROI. The tangent-plane extent is the bounding box of the
/// four projected ROI corners, so the whole ROI fits.
RoiFeatureGrid buildRoiFeatureGrid(const RoiBox& roi, int stride,
                                   const FisheyeIntrinsics& K);

/// Binary grid cache: magic "GSPH", u16 version=1, u32 width, u32 height,
/// then width*height little-endian (f32 src_u, f32 src_v, u8 valid) records.
void saveGrid(const SampleGrid& grid, const std::string& path);
SampleGrid loadGrid(const std::string& path);

} // namespace fishpose
