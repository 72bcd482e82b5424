#include "fishpose/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "fishpose/parallel.hpp"
#include "fishpose/sphere.hpp"

namespace fishpose {

namespace {

UnitQuaternion randomRotation(std::mt19937_64& rng) {
    // Shoemake's subgroup algorithm for uniform rotations.
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double u1 = uni(rng), u2 = uni(rng), u3 = uni(rng);
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const double t2 = 2.0 * std::numbers::pi * u2;
    const double t3 = 2.0 * std::numbers::pi * u3;
    return {a * std::sin(t2), a * std::cos(t2), b * std::sin(t3), b * std::cos(t3)};
}

} // namespace

std::vector<ObjectPlacement> generateScene(const SceneSpec& spec,
                                           const FisheyeIntrinsics& K) {
    std::vector<ObjectPlacement> out = spec.placements;
    if (!spec.sampling) {
        return out;
    }
    const PlacementRanges& r = *spec.sampling;
    if (r.count < 0 || r.class_ids.empty() || !(r.dist_min > 0.0) ||
        r.dist_max < r.dist_min || r.elev_max < r.elev_min || r.azim_max < r.azim_min) {
        throw InvalidInputError("degenerate placement sampling ranges");
    }
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> dist(r.dist_min, r.dist_max);
    std::uniform_real_distribution<double> elev(r.elev_min, r.elev_max);
    std::uniform_real_distribution<double> azim(r.azim_min, r.azim_max);
    std::uniform_int_distribution<size_t> cls(0, r.class_ids.size() - 1);

    const double margin = 0.9; // keep object centers inside 90% of the FOV cone
    for (int i = 0; i < r.count; ++i) {
        Vec3 position;
        bool placed = false;
        for (int attempt = 0; attempt < 256 && !placed; ++attempt) {
            const Vec3 dir = sphericalToRay({elev(rng), azim(rng)});
            const double incidence = std::acos(std::clamp(dir.z, -1.0, 1.0));
            if (incidence > margin * K.maxIncidence()) {
                continue;
            }
            position = dir * dist(rng);
            placed = true;
        }
        if (!placed) {
            throw InvalidInputError("placement ranges lie outside the usable FOV");
        }
        out.push_back({r.class_ids[cls(rng)], Pose6D{randomRotation(rng), position}});
    }
    return out;
}

CameraTrajectory generateTrajectory(int n_frames, const MotionSpec& motion) {
    if (n_frames < 1) {
        throw InvalidInputError("trajectory needs at least one frame");
    }
    CameraTrajectory traj;
    traj.frames.reserve(static_cast<size_t>(n_frames));
    for (int k = 0; k < n_frames; ++k) {
        const double alpha =
            n_frames > 1 ? motion.angle_span * k / (n_frames - 1) : 0.0;
        Pose6D pose = motion.base;
        if (std::abs(alpha) > 0.0) {
            const UnitQuaternion rot =
                UnitQuaternion::fromAxisAngle(motion.orbit_axis, alpha);
            pose = Pose6D{(rot * motion.base.rotation).canonical(),
                          rot.rotate(motion.base.translation - motion.orbit_center) +
                              motion.orbit_center};
        }
        traj.frames.push_back({k, motion.timestep * k, pose});
    }
    return traj;
}

std::vector<ProjectedPoint> renderPointProjections(
    const std::vector<ObjectPlacement>& placements, const Pose6D& world_cam,
    const std::map<int, ModelPoints>& models, const FisheyeIntrinsics& K) {
    std::vector<ProjectedPoint> out;
    const Pose6D cam_inv = world_cam.inverse();
    for (size_t oi = 0; oi < placements.size(); ++oi) {
        const auto& obj = placements[oi];
        const auto it = models.find(obj.class_id);
        if (it == models.end()) {
            throw ConfigError("no model points for class " +
                              std::to_string(obj.class_id));
        }
        const Pose6D cam_obj = cam_inv.compose(obj.world_pose);
        for (size_t pi = 0; pi < it->second.points.size(); ++pi) {
            const Vec3 p = cam_obj.transform(it->second.points[pi]);
            try {
                const PixelCoord px = rayToPixel(p, K);
                if (isWithinFov(px.u, px.v, K)) {
                    out.push_back({oi, obj.class_id, pi, px.u, px.v});
                }
            } catch (const Error&) {
                // out of FOV
            }
        }
    }
    return out;
}

void splatPoint(ImageBuffer& img, double u, double v, float value, double radius) {
    const int x0 = std::max(0, static_cast<int>(std::floor(u - radius)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(u + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(v - radius)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(v + radius)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double d = std::hypot(x + 0.5 - u, y + 0.5 - v);
            const double w = 1.0 - d / radius;
            if (w > 0.0) {
                for (int c = 0; c < img.channels; ++c) {
                    img.at(x, y, c) += value * static_cast<float>(w);
                }
            }
        }
    }
}

ImageBuffer renderSyntheticImage(const std::vector<ObjectPlacement>& placements,
                                 const Pose6D& world_cam,
                                 const std::map<int, ModelPoints>& models,
                                 const FisheyeIntrinsics& K, const SceneSpec& spec,
                                 int workers) {
    if (K.width <= 0 || K.height <= 0) {
        throw InvalidInputError("intrinsics must carry image dimensions");
    }
    ImageBuffer img(K.width, K.height, 1, 0.0f);
    const RotationMatrix R_wc = quatToMatrix(world_cam.rotation);
    parallelFor(K.height, workers, [&](int r0, int r1) {
        for (int y = r0; y < r1; ++y) {
            for (int x = 0; x < K.width; ++x) {
                const double u = x + 0.5, v = y + 0.5;
                if (!isWithinFov(u, v, K)) {
                    continue;
                }
                float value = spec.background_value;
                if (spec.background == BackgroundPattern::Checkerboard) {
                    value = 32.0f; // sky
                    const Vec3 d = R_wc * pixelToRay(u, v, K);
                    if (d.y > 1e-6) {
                        const double s =
                            (spec.ground_plane_y - world_cam.translation.y) / d.y;
                        if (s > 0.0) {
                            const Vec3 hit = world_cam.translation + d * s;
                            const long ix = static_cast<long>(
                                std::floor(hit.x / spec.checker_cell));
                            const long iz = static_cast<long>(
                                std::floor(hit.z / spec.checker_cell));
                            value = ((ix + iz) & 1) ? 192.0f : 64.0f;
                        }
                    }
                }
                img.at(x, y, 0) = value;
            }
        }
    });
    for (const auto& pp : renderPointProjections(placements, world_cam, models, K)) {
        splatPoint(img, pp.u, pp.v, 255.0f, 2.0);
    }
    return img;
}

ModelPoints makeBoxModel(int class_id, double sx, double sy, double sz) {
    if (!(sx > 0.0) || !(sy > 0.0) || !(sz > 0.0)) {
        throw InvalidInputError("box extents must be positive");
    }
    ModelPoints model;
    model.class_id = class_id;
    const double hx = 0.5 * sx, hy = 0.5 * sy, hz = 0.5 * sz;
    for (int ix = -1; ix <= 1; ++ix) {
        for (int iy = -1; iy <= 1; ++iy) {
            for (int iz = -1; iz <= 1; ++iz) {
                if (ix == 0 && iy == 0 && iz == 0) {
                    continue;
                }
                model.points.push_back({ix * hx, iy * hy, iz * hz});
            }
        }
    }
    model.points.push_back({0.0, 0.0, 0.0});
    return model;
}

namespace {

using nlohmann::json;

json placementToJson(const ObjectPlacement& p) {
    const auto& q = p.world_pose.rotation;
    const auto& t = p.world_pose.translation;
    return {{"class_id", p.class_id},
            {"q", {q.w, q.x, q.y, q.z}},
            {"t", {t.x, t.y, t.z}}};
}

ObjectPlacement placementFromJson(const json& j) {
    const auto& q = j.at("q");
    const auto& t = j.at("t");
    return {j.at("class_id").get<int>(),
            Pose6D{UnitQuaternion(q.at(0).get<double>(), q.at(1).get<double>(),
                                  q.at(2).get<double>(), q.at(3).get<double>()),
                   Vec3{t.at(0).get<double>(), t.at(1).get<double>(),
                        t.at(2).get<double>()}}};
}

} // namespace

SceneSpec loadSceneSpec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open scene spec: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("malformed scene spec JSON: " + std::string(e.what()));
    }
    SceneSpec spec;
    try {
        spec.seed = doc.value("seed", 0ULL);
        if (doc.contains("placements")) {
            for (const auto& p : doc["placements"]) {
                spec.placements.push_back(placementFromJson(p));
            }
        }
        if (doc.contains("sampling")) {
            const auto& s = doc["sampling"];
            PlacementRanges r;
            r.count = s.at("count").get<int>();
            r.class_ids = s.at("class_ids").get<std::vector<int>>();
            r.dist_min = s.at("dist_min").get<double>();
            r.dist_max = s.at("dist_max").get<double>();
            r.elev_min = s.at("elev_min").get<double>();
            r.elev_max = s.at("elev_max").get<double>();
            r.azim_min = s.at("azim_min").get<double>();
            r.azim_max = s.at("azim_max").get<double>();
            spec.sampling = r;
        }
        const std::string bg = doc.value("background", std::string{"checkerboard"});
        if (bg == "checkerboard") {
            spec.background = BackgroundPattern::Checkerboard;
        } else if (bg == "constant") {
            spec.background = BackgroundPattern::Constant;
        } else {
            throw FormatError("unknown background pattern: " + bg);
        }
        spec.checker_cell = doc.value("checker_cell", spec.checker_cell);
        spec.ground_plane_y = doc.value("ground_plane_y", spec.ground_plane_y);
        spec.background_value = doc.value("background_value", spec.background_value);
    } catch (const json::exception& e) {
        throw FormatError("bad scene spec structure: " + std::string(e.what()));
    }
    return spec;
}

void saveSceneSpec(const SceneSpec& spec, const std::string& path) {
    json doc;
    doc["seed"] = spec.seed;
    json ps = json::array();
    for (const auto& p : spec.placements) {
        ps.push_back(placementToJson(p));
    }
    doc["placements"] = ps;
    if (spec.sampling) {
        const auto& r = *spec.sampling;
        doc["sampling"] = {{"count", r.count},       {"class_ids", r.class_ids},
                           {"dist_min", r.dist_min}, {"dist_max", r.dist_max},
                           {"elev_min", r.elev_min}, {"elev_max", r.elev_max},
                           {"azim_min", r.azim_min}, {"azim_max", r.azim_max}};
    }
    doc["background"] =
        spec.background == BackgroundPattern::Checkerboard ? "checkerboard" : "constant";
    doc["checker_cell"] = spec.checker_cell;
    doc["ground_plane_y"] = spec.ground_plane_y;
    doc["background_value"] = spec.background_value;
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write scene spec: " + path);
    }
    out << doc.dump(2) << '\n';
}

} // namespace fishpose
