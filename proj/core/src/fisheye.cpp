#include "fishpose/fisheye.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace fishpose {

namespace {
// Below this pixel radius Eq. z = r/tan(r/f) is evaluated by its analytic
// limit: the pixel maps to the optical axis.
constexpr double kOnAxisRadius = 1e-9;
} // namespace

FisheyeIntrinsics::FisheyeIntrinsics(double f_, double cx_, double cy_, int width_,
                                     int height_, double fov_max_)
    : f(f_), cx(cx_), cy(cy_), width(width_), height(height_), fov_max(fov_max_) {
    if (!(f > 0.0)) {
        throw InvalidInputError("focal length must be positive");
    }
    if (!(fov_max > 0.0) || fov_max > 2.0 * std::numbers::pi - 1e-6) {
        throw InvalidInputError("fov_max must lie in (0, 2*pi)");
    }
}

FisheyeIntrinsics FisheyeIntrinsics::scaled(int factor) const {
    if (factor < 1) {
        throw InvalidInputError("downsample factor must be >= 1");
    }
    return FisheyeIntrinsics(f / factor, cx / factor, cy / factor, width / factor,
                             height / factor, fov_max);
}

PixelCoord rayToPixel(const Vec3& ray, const FisheyeIntrinsics& K) {
    const double n = ray.norm();
    if (n < 1e-12) {
        throw InvalidInputError("cannot project a zero ray");
    }
    const double theta = std::acos(std::clamp(ray.z / n, -1.0, 1.0));
    if (theta > K.maxIncidence() + 1e-12) {
        throw OutOfFovError("ray incidence angle exceeds fov_max/2");
    }
    const double r_xy = std::hypot(ray.x, ray.y);
    if (r_xy < 1e-15 * n) {
        return {K.cx, K.cy};
    }
    const double radius = K.f * theta;
    return {K.cx + radius * ray.x / r_xy, K.cy + radius * ray.y / r_xy};
}

Vec3 pixelToRay(double u, double v, const FisheyeIntrinsics& K) {
    const double x = u - K.cx;
    const double y = v - K.cy;
    const double r = std::hypot(x, y);
    if (r < kOnAxisRadius) {
        return {0.0, 0.0, 1.0};
    }
    const double rho = r / K.f; // incidence angle
    if (rho > K.maxIncidence() + 1e-12) {
        throw OutOfFovError("pixel radius exceeds the fov_max/2 circle");
    }
    const double s = std::sin(rho) / r;
    return {x * s, y * s, std::cos(rho)};
}

bool isWithinFov(double u, double v, const FisheyeIntrinsics& K) {
    const double r = std::hypot(u - K.cx, v - K.cy);
    if (r > K.maxRadius()) {
        return false;
    }
    return u >= 0.0 && v >= 0.0 && u < K.width && v < K.height;
}

FisheyeIntrinsics loadIntrinsics(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open intrinsics file: " + path);
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto require = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw FormatError("intrinsics file missing key: " + key);
        }
        return it->second;
    };
    if (require("model") != "equidistant") {
        throw FormatError("unsupported camera model: " + kv["model"]);
    }
    try {
        return FisheyeIntrinsics(
            std::stod(require("f")), std::stod(require("cx")),
            std::stod(require("cy")), std::stoi(require("width")),
            std::stoi(require("height")),
            std::stod(require("fov_max_deg")) * std::numbers::pi / 180.0);
    } catch (const std::invalid_argument&) {
        throw FormatError("non-numeric value in intrinsics file: " + path);
    }
}

void saveIntrinsics(const FisheyeIntrinsics& K, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write intrinsics file: " + path);
    }
    out.precision(17);
    out << "model = equidistant\n"
        << "f = " << K.f << "\n"
        << "cx = " << K.cx << "\n"
        << "cy = " << K.cy << "\n"
        << "width = " << K.width << "\n"
        << "height = " << K.height << "\n"
        << "fov_max_deg = " << K.fov_max * 180.0 / std::numbers::pi << "\n";
}

} // namespace fishpose
