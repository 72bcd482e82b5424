#include "fishpose/remap.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "fishpose/parallel.hpp"

namespace fishpose {

VirtualCamera::VirtualCamera(int w, int h, double f) : width(w), height(h), f_p(f) {
    if (w <= 0 || h <= 0 || !(f > 0.0)) {
        throw InvalidInputError("virtual camera dimensions and focal must be positive");
    }
}

RoiBox::RoiBox(double u0, double v0, double u1, double v1)
    : u_min(u0), v_min(v0), u_max(u1), v_max(v1) {
    if (!(u_min < u_max) || !(v_min < v_max)) {
        throw InvalidInputError("ROI box must have positive extent");
    }
}

SampleGrid::SampleGrid(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) {
        throw InvalidInputError("grid dimensions must be positive");
    }
    const size_t n = static_cast<size_t>(w) * h;
    src_u.assign(n, 0.0f);
    src_v.assign(n, 0.0f);
    valid.assign(n, 0);
}

SampleGrid buildPerspectiveGrid(const TangentPoint& t0, const VirtualCamera& vcam,
                                const FisheyeIntrinsics& K, int workers) {
    const Vec3 axis = sphericalToRay({t0.theta0, t0.phi0});
    if (std::acos(std::clamp(axis.z, -1.0, 1.0)) > K.maxIncidence()) {
        throw InvalidInputError("tangent point lies outside the fisheye FOV");
    }
    SampleGrid grid(vcam.width, vcam.height);
    const double half_w = 0.5 * vcam.width;
    const double half_h = 0.5 * vcam.height;
    parallelFor(vcam.height, workers, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < vcam.width; ++x) {
                const TangentPlaneCoord p{(x + 0.5 - half_w) / vcam.f_p,
                                          (y + 0.5 - half_h) / vcam.f_p};
                const size_t i = grid.index(x, y);
                try {
                    const PixelCoord src = sphericalToPixel(gnomonicInverse(p, t0), K);
                    if (isWithinFov(src.u, src.v, K)) {
                        grid.src_u[i] = static_cast<float>(src.u);
                        grid.src_v[i] = static_cast<float>(src.v);
                        grid.valid[i] = 1;
                    }
                } catch (const OutOfFovError&) {
                    // leave invalid
                }
            }
        }
    });
    return grid;
}

ImageBuffer remapImage(const ImageBuffer& src, const SampleGrid& grid, float fill,
                       int workers) {
    if (src.width <= 0 || src.height <= 0) {
        throw InvalidInputError("source image is empty");
    }
    const size_t n = static_cast<size_t>(grid.width) * grid.height;
    for (size_t i = 0; i < n; ++i) {
        if (grid.valid[i] &&
            (grid.src_u[i] < 0.0f || grid.src_v[i] < 0.0f ||
             grid.src_u[i] > static_cast<float>(src.width) ||
             grid.src_v[i] > static_cast<float>(src.height))) {
            throw InvalidInputError(
                "grid samples outside the source image; dimensions mismatch");
        }
    }
    ImageBuffer out(grid.width, grid.height, src.channels, fill);
    parallelFor(grid.height, workers, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < grid.width; ++x) {
                const size_t i = grid.index(x, y);
                if (!grid.valid[i]) {
                    continue;
                }
                const float su = grid.src_u[i];
                const float sv = grid.src_v[i];
                // pixel centers at (i + 0.5, j + 0.5)
                const float fx = su - 0.5f;
                const float fy = sv - 0.5f;
                const int x0 = static_cast<int>(std::floor(fx));
                const int y0i = static_cast<int>(std::floor(fy));
                const float wx = fx - static_cast<float>(x0);
                const float wy = fy - static_cast<float>(y0i);
                const int cx0 = std::clamp(x0, 0, src.width - 1);
                const int cx1 = std::clamp(x0 + 1, 0, src.width - 1);
                const int cy0 = std::clamp(y0i, 0, src.height - 1);
                const int cy1 = std::clamp(y0i + 1, 0, src.height - 1);
                for (int c = 0; c < src.channels; ++c) {
                    const float v00 = src.at(cx0, cy0, c);
                    const float v10 = src.at(cx1, cy0, c);
                    const float v01 = src.at(cx0, cy1, c);
                    const float v11 = src.at(cx1, cy1, c);
                    const float top = v00 + wx * (v10 - v00);
                    const float bot = v01 + wx * (v11 - v01);
                    out.at(x, y, c) = top + wy * (bot - top);
                }
            }
        }
    });
    return out;
}

namespace {

// Clamps a pixel radially into the usable FOV circle so ROI corners slightly
// past the image edge still project.
PixelCoord clampToFov(double u, double v, const FisheyeIntrinsics& K) {
    const double du = u - K.cx;
    const double dv = v - K.cy;
    const double r = std::hypot(du, dv);
    const double r_max = K.maxRadius() * (1.0 - 1e-9);
    if (r <= r_max) {
        return {u, v};
    }
    const double s = r_max / r;
    return {K.cx + du * s, K.cy + dv * s};
}

} // namespace

RoiFeatureGrid buildRoiFeatureGrid(const RoiBox& roi, int stride,
                                   const FisheyeIntrinsics& K) {
    if (stride < 1) {
        throw InvalidInputError("stride must be >= 1");
    }
    const double r_center = std::hypot(roi.centerU() - K.cx, roi.centerV() - K.cy);
    const double corner_r[4] = {
        std::hypot(roi.u_min - K.cx, roi.v_min - K.cy),
        std::hypot(roi.u_max - K.cx, roi.v_min - K.cy),
        std::hypot(roi.u_min - K.cx, roi.v_max - K.cy),
        std::hypot(roi.u_max - K.cx, roi.v_max - K.cy)};
    if (r_center > K.maxRadius() && corner_r[0] > K.maxRadius() &&
        corner_r[1] > K.maxRadius() && corner_r[2] > K.maxRadius() &&
        corner_r[3] > K.maxRadius()) {
        throw InvalidInputError("ROI lies entirely outside the fisheye FOV");
    }

    RoiFeatureGrid out;
    const PixelCoord center = clampToFov(roi.centerU(), roi.centerV(), K);
    const SphericalCoord sc = pixelToSpherical(center.u, center.v, K);
    out.tangent = {sc.theta, sc.phi};

    double ex = 0.0, ey = 0.0;
    const double cu[4] = {roi.u_min, roi.u_max, roi.u_min, roi.u_max};
    const double cv[4] = {roi.v_min, roi.v_min, roi.v_max, roi.v_max};
    for (int i = 0; i < 4; ++i) {
        const PixelCoord pc = clampToFov(cu[i], cv[i], K);
        const TangentPlaneCoord t =
            gnomonicForward(pixelToSpherical(pc.u, pc.v, K), out.tangent);
        ex = std::max(ex, std::abs(t.x));
        ey = std::max(ey, std::abs(t.y));
    }

    const int gw = static_cast<int>(std::ceil(roi.width() / stride));
    const int gh = static_cast<int>(std::ceil(roi.height() / stride));
    out.grid = SampleGrid(std::max(gw, 1), std::max(gh, 1));
    out.f_equiv = ex > 0.0 ? 0.5 * (out.grid.width - 1) / ex : 0.0;

    for (int y = 0; y < out.grid.height; ++y) {
        const double ty = out.grid.height > 1
                              ? -ey + 2.0 * ey * y / (out.grid.height - 1)
                              : 0.0;
        for (int x = 0; x < out.grid.width; ++x) {
            const double tx =
                out.grid.width > 1 ? -ex + 2.0 * ex * x / (out.grid.width - 1) : 0.0;
            const size_t i = out.grid.index(x, y);
            try {
                const PixelCoord src =
                    sphericalToPixel(gnomonicInverse({tx, ty}, out.tangent), K);
                if (isWithinFov(src.u, src.v, K)) {
                    out.grid.src_u[i] = static_cast<float>(src.u / stride);
                    out.grid.src_v[i] = static_cast<float>(src.v / stride);
                    out.grid.valid[i] = 1;
                }
            } catch (const OutOfFovError&) {
                // leave invalid
            }
        }
    }
    return out;
}

namespace {

constexpr char kGridMagic[4] = {'G', 'S', 'P', 'H'};
constexpr uint16_t kGridVersion = 1;

void putU16(std::string& buf, uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>(v >> 8));
}

void putU32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

void putF32(std::string& buf, float f) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    putU32(buf, bits);
}

uint16_t getU16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | p[1] << 8); }

uint32_t getU32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

float getF32(const uint8_t* p) {
    const uint32_t bits = getU32(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

} // namespace

void saveGrid(const SampleGrid& grid, const std::string& path) {
    std::string buf;
    buf.reserve(14 + static_cast<size_t>(grid.width) * grid.height * 9);
    buf.append(kGridMagic, 4);
    putU16(buf, kGridVersion);
    putU32(buf, static_cast<uint32_t>(grid.width));
    putU32(buf, static_cast<uint32_t>(grid.height));
    const size_t n = static_cast<size_t>(grid.width) * grid.height;
    for (size_t i = 0; i < n; ++i) {
        putF32(buf, grid.src_u[i]);
        putF32(buf, grid.src_v[i]);
        buf.push_back(static_cast<char>(grid.valid[i]));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(buf.data(), static_cast<std::streamsize>(buf.size()))) {
        throw FormatError("cannot write grid cache: " + path);
    }
}

SampleGrid loadGrid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open grid cache: " + path);
    }
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const uint8_t*>(buf.data());
    if (buf.size() < 14 || std::memcmp(p, kGridMagic, 4) != 0) {
        throw FormatError("bad grid cache magic: " + path);
    }
    if (getU16(p + 4) != kGridVersion) {
        throw FormatError("unsupported grid cache version: " + path);
    }
    const uint32_t w = getU32(p + 6);
    const uint32_t h = getU32(p + 10);
    const size_t n = static_cast<size_t>(w) * h;
    if (w == 0 || h == 0 || buf.size() != 14 + n * 9) {
        throw FormatError("truncated grid cache: " + path);
    }
    SampleGrid grid(static_cast<int>(w), static_cast<int>(h));
    const uint8_t* rec = p + 14;
    for (size_t i = 0; i < n; ++i, rec += 9) {
        grid.src_u[i] = getF32(rec);
        grid.src_v[i] = getF32(rec + 4);
        grid.valid[i] = rec[8];
    }
    return grid;
}

} // namespace fishpose
