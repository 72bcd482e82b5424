// fishpose: fisheye -> sphere -> tangent-plane geometry toolkit CLI.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "fishpose/annotation.hpp"
#include "fishpose/fisheye.hpp"
#include "fishpose/image.hpp"
#include "fishpose/metrics.hpp"
#include "fishpose/remap.hpp"
#include "fishpose/scene.hpp"
#include "fishpose/sphere.hpp"
#include "fishpose/viewpoint.hpp"

namespace fs = std::filesystem;
using namespace fishpose;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::vector<double> parseNumberList(const std::string& s, size_t expected,
                                    const std::string& what) {
    std::vector<double> vals;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError(what + ": expected comma-separated numbers");
        }
    }
    if (expected > 0 && vals.size() != expected) {
        throw CLI::ValidationError(what + ": expected " + std::to_string(expected) +
                                   " comma-separated numbers");
    }
    return vals;
}

TangentPoint tangentFromArgs(const std::string& tangent_deg, const std::string& roi_arg,
                             const FisheyeIntrinsics& K, RoiBox* roi_out = nullptr) {
    if (!tangent_deg.empty()) {
        const auto v = parseNumberList(tangent_deg, 2, "--tangent");
        return {v[0] * kDegToRad, v[1] * kDegToRad};
    }
    const auto v = parseNumberList(roi_arg, 4, "--roi");
    const RoiBox roi(v[0], v[1], v[0] + v[2], v[1] + v[3]);
    if (roi_out) {
        *roi_out = roi;
    }
    const SphericalCoord sc = pixelToSpherical(roi.centerU(), roi.centerV(), K);
    return {sc.theta, sc.phi};
}

std::map<int, ModelPoints> loadModelsDir(const std::string& dir) {
    std::map<int, ModelPoints> models;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("class_", 0) == 0 && entry.path().extension() == ".txt") {
            const int cid = std::stoi(name.substr(6));
            models[cid] = loadModelPoints(cid, entry.path().string());
        }
    }
    if (models.empty()) {
        throw ConfigError("no class_<id>.txt model files in " + dir);
    }
    return models;
}

int cmdSphere(const std::string& intrinsics_path, const std::string& pixel_arg,
              const std::string& spherical_arg) {
    const FisheyeIntrinsics K = loadIntrinsics(intrinsics_path);
    std::cout << std::setprecision(12);
    if (!pixel_arg.empty()) {
        const auto v = parseNumberList(pixel_arg, 2, "--pixel");
        const SphericalCoord s = pixelToSpherical(v[0], v[1], K);
        std::cout << "theta_deg " << s.theta / kDegToRad << "\nphi_deg "
                  << s.phi / kDegToRad << "\n";
    } else {
        const auto v = parseNumberList(spherical_arg, 2, "--spherical");
        const PixelCoord px = sphericalToPixel({v[0] * kDegToRad, v[1] * kDegToRad}, K);
        std::cout << "u " << px.u << "\nv " << px.v << "\n";
    }
    return 0;
}

int cmdViewpoint(const std::string& t_arg, const std::string& q_arg, bool inverse) {
    const auto tv = parseNumberList(t_arg, 3, "--t");
    const Vec3 t{tv[0], tv[1], tv[2]};
    UnitQuaternion q = UnitQuaternion::identity();
    if (!q_arg.empty()) {
        const auto qv = parseNumberList(q_arg, 4, "--q");
        q = UnitQuaternion(qv[0], qv[1], qv[2], qv[3]);
    }
    const TangentPoint t0 = tangentFromTranslation(t);
    const auto adj = rotationAdjust(t0);
    const UnitQuaternion result =
        inverse ? recoverGlobalOrientation(q, t) : apparentOrientation(q, t);
    const Vec3 tv_virtual = translationInVirtualFrame(t);

    std::cout << std::setprecision(12);
    std::cout << "tangent_theta_deg " << t0.theta0 / kDegToRad << "\n"
              << "tangent_phi_deg " << t0.phi0 / kDegToRad << "\n";
    std::cout << "r_adj";
    for (double m : adj.r_adj.m) {
        std::cout << ' ' << m;
    }
    std::cout << "\n"
              << (inverse ? "global_q " : "apparent_q ") << result.w << ' ' << result.x
              << ' ' << result.y << ' ' << result.z << "\n"
              << "t_virtual " << tv_virtual.x << ' ' << tv_virtual.y << ' '
              << tv_virtual.z << "\n";
    return 0;
}

SampleGrid obtainGrid(const TangentPoint& t0, const VirtualCamera& vcam,
                      const FisheyeIntrinsics& K, const std::string& cache_path,
                      int workers) {
    if (!cache_path.empty() && fs::exists(cache_path)) {
        return loadGrid(cache_path);
    }
    SampleGrid grid = buildPerspectiveGrid(t0, vcam, K, workers);
    if (!cache_path.empty()) {
        saveGrid(grid, cache_path);
    }
    return grid;
}

int cmdRemap(const std::string& intrinsics_path, const std::string& image_path,
             const std::string& out_path, const std::string& tangent_arg,
             const std::string& roi_arg, const std::string& vcam_arg,
             const std::string& grid_cache, int workers) {
    const FisheyeIntrinsics K = loadIntrinsics(intrinsics_path);
    const auto vc = parseNumberList(vcam_arg, 3, "--vcam");
    const VirtualCamera vcam(static_cast<int>(vc[0]), static_cast<int>(vc[1]), vc[2]);
    const TangentPoint t0 = tangentFromArgs(tangent_arg, roi_arg, K);
    const SampleGrid grid = obtainGrid(t0, vcam, K, grid_cache, workers);
    const ImageBuffer src = readPng(image_path);
    writePng(remapImage(src, grid, 0.0f, workers), out_path);
    return 0;
}

int cmdGrid(const std::string& intrinsics_path, const std::string& out_path,
            const std::string& tangent_arg, const std::string& roi_arg,
            const std::string& vcam_arg, int workers) {
    const FisheyeIntrinsics K = loadIntrinsics(intrinsics_path);
    const auto vc = parseNumberList(vcam_arg, 3, "--vcam");
    const VirtualCamera vcam(static_cast<int>(vc[0]), static_cast<int>(vc[1]), vc[2]);
    const TangentPoint t0 = tangentFromArgs(tangent_arg, roi_arg, K);
    saveGrid(buildPerspectiveGrid(t0, vcam, K, workers), out_path);
    return 0;
}

std::map<int, SymmetrySpec> defaultSymmetries(const std::map<int, ModelPoints>& models) {
    std::map<int, SymmetrySpec> syms;
    for (const auto& [cid, model] : models) {
        syms[cid] = SymmetrySpec::trivial(cid);
    }
    return syms;
}

int cmdSynth(const std::string& intrinsics_path, const std::string& out_dir,
             uint64_t seed, int n_frames, int n_objects,
             const std::string& scene_path, int workers) {
    const FisheyeIntrinsics K = loadIntrinsics(intrinsics_path);
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/images");
    fs::create_directories(out_dir + "/models");

    SceneSpec spec;
    if (!scene_path.empty()) {
        spec = loadSceneSpec(scene_path);
    } else {
        PlacementRanges ranges;
        ranges.count = n_objects;
        ranges.class_ids = {0, 1, 2};
        spec.sampling = ranges;
    }
    spec.seed = seed;

    std::map<int, ModelPoints> models;
    models[0] = makeBoxModel(0, 0.20, 0.08, 0.06);
    models[1] = makeBoxModel(1, 0.12, 0.12, 0.10);
    models[2] = makeBoxModel(2, 0.05, 0.25, 0.05);
    for (const auto& [cid, model] : models) {
        saveModelPoints(model, out_dir + "/models/class_" + std::to_string(cid) + ".txt");
    }
    saveSymmetrySpecs(defaultSymmetries(models), out_dir + "/symmetries.json");
    saveIntrinsics(K, out_dir + "/intrinsics.txt");

    const auto placements = generateScene(spec, K);
    MotionSpec motion;
    motion.angle_span = 20.0 * kDegToRad;
    motion.orbit_center = {0.0, 0.0, 2.0};
    const CameraTrajectory traj = generateTrajectory(n_frames, motion);
    saveTrajectory(traj, out_dir + "/trajectory.txt");

    DatasetIndex index;
    index.info = "fishpose synthetic dataset";
    index.categories = {{0, "box_flat"}, {1, "box_cube"}, {2, "box_tall"}};
    std::vector<AnnotationRecord> records;
    for (const auto& frame : traj.frames) {
        std::ostringstream name;
        name << "images/frame_" << std::setw(6) << std::setfill('0') << frame.frame_id
             << ".png";
        const ImageBuffer img =
            renderSyntheticImage(placements, frame.world_cam, models, K, spec, workers);
        writePng(img, out_dir + "/" + name.str());
        index.images.push_back({frame.frame_id, name.str(), K.width, K.height});
        for (const auto& obj : placements) {
            const Pose6D cam_pose = cameraFramePose(obj.world_pose, frame.world_cam);
            try {
                const BboxResult bb = projectBbox(models.at(obj.class_id), cam_pose, K);
                AnnotationRecord rec;
                rec.frame_id = frame.frame_id;
                rec.class_id = obj.class_id;
                rec.pose = cam_pose;
                rec.bbox = bb.box;
                rec.visible_fraction = bb.visible_fraction;
                rec.apparent_q =
                    apparentOrientation(cam_pose.rotation, cam_pose.translation);
                records.push_back(rec);
            } catch (const NotVisibleError&) {
                // object out of view in this frame
            }
        }
    }
    exportCoco(records, index, out_dir + "/annotations.json");
    std::cout << "wrote " << traj.frames.size() << " frames, " << records.size()
              << " annotations to " << out_dir << "\n";
    return 0;
}

int cmdAnnotate(const std::string& intrinsics_path, const std::string& trajectory_path,
                const std::string& objects_path, const std::string& models_dir,
                const std::string& out_path, std::optional<double> max_residual) {
    const FisheyeIntrinsics K = loadIntrinsics(intrinsics_path);
    const CameraTrajectory traj = loadTrajectory(trajectory_path);
    const SceneSpec scene = loadSceneSpec(objects_path);
    const auto models = loadModelsDir(models_dir);

    DatasetIndex index;
    index.info = "fishpose batch annotations";
    for (const auto& [cid, model] : models) {
        index.categories.push_back({cid, "class_" + std::to_string(cid)});
    }
    std::vector<AnnotationRecord> records;
    for (const auto& frame : traj.frames) {
        index.images.push_back({frame.frame_id, "", K.width, K.height});
        for (const auto& obj : scene.placements) {
            const Pose6D cam_pose = cameraFramePose(obj.world_pose, frame.world_cam);
            try {
                const BboxResult bb = projectBbox(models.at(obj.class_id), cam_pose, K);
                AnnotationRecord rec;
                rec.frame_id = frame.frame_id;
                rec.class_id = obj.class_id;
                rec.pose = cam_pose;
                rec.bbox = bb.box;
                rec.visible_fraction = bb.visible_fraction;
                rec.apparent_q =
                    apparentOrientation(cam_pose.rotation, cam_pose.translation);
                records.push_back(rec);
            } catch (const NotVisibleError&) {
            }
        }
    }
    if (max_residual) {
        records = filterOutliers(records, *max_residual);
    }
    exportCoco(records, index, out_path);
    std::cout << "wrote " << records.size() << " annotations to " << out_path << "\n";
    return 0;
}

int cmdEval(const std::string& intrinsics_path, const std::string& dataset_path,
            const std::string& models_dir, const std::string& symmetries_path,
            const std::string& predictor_name, uint64_t seed, double sigma_t,
            double sigma_r, const std::string& thresholds_arg,
            const std::string& orient_thresholds_arg, double max_adds,
            bool global_orientation, int workers, const std::string& out_csv) {
    loadIntrinsics(intrinsics_path); // validated; dataset poses are camera-frame
    const CocoDataset coco = importCoco(dataset_path);

    EvalDataset ds;
    ds.models = loadModelsDir(models_dir);
    ds.symmetries = symmetries_path.empty() ? defaultSymmetries(ds.models)
                                            : loadSymmetrySpecs(symmetries_path);
    for (const auto& c : coco.index.categories) {
        ds.class_names[c.class_id] = c.name;
    }
    for (const auto& r : coco.records) {
        ds.records.push_back({r.frame_id, r.class_id, r.pose, r.bbox});
    }

    std::unique_ptr<Predictor> predictor;
    if (predictor_name == "perfect") {
        predictor = std::make_unique<PerfectPredictor>();
    } else if (predictor_name == "noisy") {
        predictor = std::make_unique<NoisyPredictor>(sigma_t, sigma_r, seed);
    } else if (predictor_name == "constant") {
        predictor = std::make_unique<ConstantPredictor>(
            Pose6D{UnitQuaternion::identity(), Vec3{0.0, 0.0, 2.0}});
    } else {
        throw CLI::ValidationError("--predictor must be perfect, noisy or constant");
    }

    HarnessConfig config;
    if (!thresholds_arg.empty()) {
        config.translation_thresholds = parseNumberList(thresholds_arg, 0, "--thresholds");
    }
    if (!orient_thresholds_arg.empty()) {
        config.orientation_thresholds_deg =
            parseNumberList(orient_thresholds_arg, 0, "--orient-thresholds");
    }
    config.max_adds = max_adds;
    config.compare_apparent = !global_orientation;
    config.workers = workers;

    const EvalReport report = runHarness(ds, *predictor, config);
    std::cout << formatReportText(report);
    if (!out_csv.empty()) {
        writeReportCsv(report, out_csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fisheye -> sphere -> tangent-plane geometry toolkit"};
    app.require_subcommand(1);

    std::string intrinsics, image, out, tangent, roi, pixel, spherical;
    std::string vcam = "400,400,350";
    std::string grid_cache, trajectory, objects, models_dir, symmetries, dataset;
    std::string predictor = "perfect", thresholds, orient_thresholds, scene;
    std::string t_arg, q_arg, out_csv;
    int workers = 1, frames = 10, n_objects = 4;
    uint64_t seed = 0;
    double sigma_t = 0.02, sigma_r = 0.1, max_adds = 0.1;
    std::optional<double> max_residual;
    bool inverse = false, global_orientation = false;

    auto* sphere = app.add_subcommand("sphere", "pixel <-> spherical coordinate queries");
    sphere->add_option("--intrinsics", intrinsics)->required();
    auto* pix_opt = sphere->add_option("--pixel", pixel, "u,v pixel coordinates");
    sphere->add_option("--spherical", spherical, "theta,phi in degrees")
        ->excludes(pix_opt);

    auto* remap = app.add_subcommand("remap", "fisheye image -> virtual perspective view");
    remap->add_option("--intrinsics", intrinsics)->required();
    remap->add_option("--image", image)->required();
    remap->add_option("--out", out)->required();
    auto* tan_opt = remap->add_option("--tangent", tangent, "theta,phi in degrees");
    remap->add_option("--roi", roi, "x,y,w,h on the fisheye image")->excludes(tan_opt);
    remap->add_option("--vcam", vcam, "virtual camera W,H,F (default 400,400,350)");
    remap->add_option("--grid", grid_cache, "grid cache path (load if present)");
    remap->add_option("--workers", workers);

    auto* grid = app.add_subcommand("grid", "build and save a sampling grid");
    grid->add_option("--intrinsics", intrinsics)->required();
    grid->add_option("--out", out)->required();
    auto* gtan_opt = grid->add_option("--tangent", tangent, "theta,phi in degrees");
    grid->add_option("--roi", roi, "x,y,w,h on the fisheye image")->excludes(gtan_opt);
    grid->add_option("--vcam", vcam);
    grid->add_option("--workers", workers);

    auto* viewpoint = app.add_subcommand("viewpoint", "R <-> R_p conversions");
    viewpoint->add_option("--t", t_arg, "translation x,y,z meters")->required();
    viewpoint->add_option("--q", q_arg, "orientation w,x,y,z");
    viewpoint->add_flag("--inverse", inverse, "treat --q as R_p and recover R");

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--intrinsics", intrinsics)->required();
    synth->add_option("--out", out)->required();
    synth->add_option("--seed", seed)->required();
    synth->add_option("--frames", frames);
    synth->add_option("--objects", n_objects);
    synth->add_option("--scene", scene, "scene spec JSON (overrides --objects)");
    synth->add_option("--workers", workers);

    auto* annotate = app.add_subcommand("annotate", "trajectory + world poses -> COCO file");
    annotate->add_option("--intrinsics", intrinsics)->required();
    annotate->add_option("--trajectory", trajectory)->required();
    annotate->add_option("--objects", objects, "scene spec JSON with placements")->required();
    annotate->add_option("--models", models_dir)->required();
    annotate->add_option("--out", out)->required();
    annotate->add_option("--max-residual", max_residual);

    auto* eval = app.add_subcommand("eval", "dataset + predictor -> metric tables");
    eval->add_option("--intrinsics", intrinsics)->required();
    eval->add_option("--dataset", dataset)->required();
    eval->add_option("--models", models_dir)->required();
    eval->add_option("--symmetries", symmetries);
    auto* pred_opt = eval->add_option("--predictor", predictor)
                         ->check(CLI::IsMember({"perfect", "noisy", "constant"}));
    auto* seed_opt = eval->add_option("--seed", seed);
    eval->add_option("--sigma-t", sigma_t);
    eval->add_option("--sigma-r", sigma_r);
    eval->add_option("--thresholds", thresholds, "translation thresholds, meters");
    eval->add_option("--orient-thresholds", orient_thresholds, "degrees");
    eval->add_option("--max-add-s", max_adds);
    eval->add_flag("--global-orientation", global_orientation,
                   "compare recovered global orientations instead of apparent");
    eval->add_option("--workers", workers);
    eval->add_option("--out", out_csv, "also write the report as CSV");
    (void)pred_opt;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sphere->parsed()) {
            if (pixel.empty() == spherical.empty()) {
                std::cerr << "sphere: exactly one of --pixel or --spherical required\n";
                return 2;
            }
            return cmdSphere(intrinsics, pixel, spherical);
        }
        if (remap->parsed() || grid->parsed()) {
            if (tangent.empty() == roi.empty()) {
                std::cerr << "exactly one of --tangent or --roi required\n";
                return 2;
            }
            return remap->parsed()
                       ? cmdRemap(intrinsics, image, out, tangent, roi, vcam,
                                  grid_cache, workers)
                       : cmdGrid(intrinsics, out, tangent, roi, vcam, workers);
        }
        if (viewpoint->parsed()) {
            return cmdViewpoint(t_arg, q_arg, inverse);
        }
        if (synth->parsed()) {
            return cmdSynth(intrinsics, out, seed, frames, n_objects, scene, workers);
        }
        if (annotate->parsed()) {
            return cmdAnnotate(intrinsics, trajectory, objects, models_dir, out,
                               max_residual);
        }
        if (eval->parsed()) {
            if (predictor == "noisy" && seed_opt->count() == 0) {
                std::cerr << "eval: --seed is required with --predictor noisy\n";
                return 2;
            }
            return cmdEval(intrinsics, dataset, models_dir, symmetries, predictor, seed,
                           sigma_t, sigma_r, thresholds, orient_thresholds, max_adds,
                           global_orientation, workers, out_csv);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
