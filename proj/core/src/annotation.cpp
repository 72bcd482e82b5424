#include "fishpose/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fishpose {

void CameraTrajectory::validate() const {
    for (size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].frame_id <= frames[i - 1].frame_id) {
            throw InvalidInputError("trajectory frame ids must be unique and ascending");
        }
    }
}

Pose6D cameraFramePose(const Pose6D& world_obj, const Pose6D& world_cam) {
    return world_cam.inverse().compose(world_obj);
}

BboxResult projectBbox(const ModelPoints& model, const Pose6D& pose_cam,
                       const FisheyeIntrinsics& K) {
    if (model.points.empty()) {
        throw InvalidInputError("model point set is empty");
    }
    double u_min = std::numeric_limits<double>::infinity();
    double v_min = std::numeric_limits<double>::infinity();
    double u_max = -std::numeric_limits<double>::infinity();
    double v_max = -std::numeric_limits<double>::infinity();
    size_t visible = 0;
    for (const auto& p : model.points) {
        const Vec3 cam_pt = pose_cam.transform(p);
        try {
            const PixelCoord px = rayToPixel(cam_pt, K);
            if (!isWithinFov(px.u, px.v, K)) {
                continue;
            }
            u_min = std::min(u_min, px.u);
            v_min = std::min(v_min, px.v);
            u_max = std::max(u_max, px.u);
            v_max = std::max(v_max, px.v);
            ++visible;
        } catch (const Error&) {
            // behind the FOV cone or degenerate point
        }
    }
    if (visible == 0) {
        throw NotVisibleError("no model point projects into the fisheye FOV");
    }
    u_min = std::clamp(u_min, 0.0, static_cast<double>(K.width));
    u_max = std::clamp(u_max, 0.0, static_cast<double>(K.width));
    v_min = std::clamp(v_min, 0.0, static_cast<double>(K.height));
    v_max = std::clamp(v_max, 0.0, static_cast<double>(K.height));
    // single projected point: widen to a 1-px box
    if (!(u_min < u_max)) {
        u_min = std::max(0.0, u_min - 0.5);
        u_max = std::min(static_cast<double>(K.width), u_max + 0.5);
    }
    if (!(v_min < v_max)) {
        v_min = std::max(0.0, v_min - 0.5);
        v_max = std::min(static_cast<double>(K.height), v_max + 0.5);
    }
    return {RoiBox{u_min, v_min, u_max, v_max},
            static_cast<double>(visible) / static_cast<double>(model.points.size())};
}

std::vector<AnnotationRecord> filterOutliers(const std::vector<AnnotationRecord>& records,
                                             double max_residual) {
    std::vector<AnnotationRecord> kept;
    kept.reserve(records.size());
    for (const auto& r : records) {
        if (!r.residual || *r.residual <= max_residual) {
            kept.push_back(r);
        }
    }
    return kept;
}

namespace {

using nlohmann::json;

json poseToJson(const Pose6D& pose) {
    return {{"q", {pose.rotation.w, pose.rotation.x, pose.rotation.y, pose.rotation.z}},
            {"t", {pose.translation.x, pose.translation.y, pose.translation.z}}};
}

Pose6D poseFromJson(const json& j) {
    const auto& q = j.at("q");
    const auto& t = j.at("t");
    return {UnitQuaternion(q.at(0).get<double>(), q.at(1).get<double>(),
                           q.at(2).get<double>(), q.at(3).get<double>()),
            Vec3{t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()}};
}

} // namespace

void exportCoco(const std::vector<AnnotationRecord>& records, const DatasetIndex& index,
                const std::string& path) {
    json doc;
    doc["info"] = index.info;
    json images = json::array();
    for (const auto& img : index.images) {
        images.push_back({{"id", img.frame_id},
                          {"file_name", img.path},
                          {"width", img.width},
                          {"height", img.height}});
    }
    doc["images"] = images;
    json cats = json::array();
    for (const auto& c : index.categories) {
        cats.push_back({{"id", c.class_id}, {"name", c.name}});
    }
    doc["categories"] = cats;
    json anns = json::array();
    for (const auto& r : records) {
        json a;
        a["image_id"] = r.frame_id;
        a["category_id"] = r.class_id;
        a["bbox"] = {r.bbox.u_min, r.bbox.v_min, r.bbox.width(), r.bbox.height()};
        a["pose"] = poseToJson(r.pose);
        if (r.apparent_q) {
            a["apparent_q"] = {r.apparent_q->w, r.apparent_q->x, r.apparent_q->y,
                               r.apparent_q->z};
        }
        a["visible_fraction"] = r.visible_fraction;
        if (r.residual) {
            a["residual"] = *r.residual;
        }
        anns.push_back(a);
    }
    doc["annotations"] = anns;

    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write annotation file: " + path);
    }
    out << doc.dump(1) << '\n';
}

CocoDataset importCoco(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open annotation file: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("malformed annotation JSON: " + std::string(e.what()));
    }
    CocoDataset ds;
    try {
        ds.index.info = doc.value("info", std::string{});
        for (const auto& img : doc.at("images")) {
            ds.index.images.push_back({img.at("id").get<int>(),
                                       img.at("file_name").get<std::string>(),
                                       img.value("width", 0), img.value("height", 0)});
        }
        for (const auto& c : doc.at("categories")) {
            ds.index.categories.push_back(
                {c.at("id").get<int>(), c.at("name").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw FormatError("bad annotation file structure: " + std::string(e.what()));
    }
    size_t i = 0;
    for (const auto& a : doc.at("annotations")) {
        AnnotationRecord r;
        try {
            r.frame_id = a.at("image_id").get<int>();
            r.class_id = a.at("category_id").get<int>();
            const auto& b = a.at("bbox");
            r.bbox = RoiBox(b.at(0).get<double>(), b.at(1).get<double>(),
                            b.at(0).get<double>() + b.at(2).get<double>(),
                            b.at(1).get<double>() + b.at(3).get<double>());
            r.pose = poseFromJson(a.at("pose"));
            if (a.contains("apparent_q")) {
                const auto& q = a["apparent_q"];
                r.apparent_q =
                    UnitQuaternion(q.at(0).get<double>(), q.at(1).get<double>(),
                                   q.at(2).get<double>(), q.at(3).get<double>());
            }
            r.visible_fraction = a.value("visible_fraction", 1.0);
            if (a.contains("residual")) {
                r.residual = a["residual"].get<double>();
            }
        } catch (const json::exception& e) {
            throw FormatError("bad annotation record " + std::to_string(i) + ": " +
                              std::string(e.what()));
        }
        ds.records.push_back(r);
        ++i;
    }
    return ds;
}

CameraTrajectory loadTrajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open trajectory file: " + path);
    }
    CameraTrajectory traj;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        TrajectoryFrame f;
        double tx, ty, tz, qw, qx, qy, qz;
        if (!(ls >> f.frame_id >> f.timestamp >> tx >> ty >> tz >> qw >> qx >> qy >> qz)) {
            throw FormatError("malformed trajectory line in " + path + ": " + line);
        }
        f.world_cam = Pose6D{UnitQuaternion(qw, qx, qy, qz), Vec3{tx, ty, tz}};
        traj.frames.push_back(f);
    }
    traj.validate();
    return traj;
}

void saveTrajectory(const CameraTrajectory& traj, const std::string& path) {
    traj.validate();
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write trajectory file: " + path);
    }
    out << std::setprecision(17);
    for (const auto& f : traj.frames) {
        const auto& q = f.world_cam.rotation;
        const auto& t = f.world_cam.translation;
        out << f.frame_id << ' ' << f.timestamp << ' ' << t.x << ' ' << t.y << ' '
            << t.z << ' ' << q.w << ' ' << q.x << ' ' << q.y << ' ' << q.z << '\n';
    }
}

} // namespace fishpose
