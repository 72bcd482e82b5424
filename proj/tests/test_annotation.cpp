#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fishpose/annotation.hpp"
#include "fishpose/scene.hpp"
#include "test_support.hpp"

using namespace fishpose;
using namespace fishpose::test;

namespace fs = std::filesystem;

namespace {

fs::path testDir() {
    const fs::path dir = fs::temp_directory_path() / "fishpose_test_annotation";
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("cameraFramePose examples and roundtrip") {
    // identity camera: the world pose is the camera-frame pose
    const Pose6D obj{UnitQuaternion::fromAxisAngle({0, 1, 0}, 0.3), {1, 2, 3}};
    const Pose6D same = cameraFramePose(obj, Pose6D{});
    CHECK(geodesicAngle(same.rotation, obj.rotation) < 1e-12);
    CHECK((same.translation - obj.translation).norm() < 1e-12);

    // camera translated only: relative translation in camera coordinates
    const Pose6D cam{UnitQuaternion::identity(), {1, 0, 0}};
    const Pose6D rel = cameraFramePose(obj, cam);
    CHECK((rel.translation - Vec3{0, 2, 3}).norm() < 1e-12);

    // composing back recovers the world pose
    std::mt19937_64 rng(61);
    for (int i = 0; i < 1000; ++i) {
        const Pose6D world_obj{randomRotation(rng), {0.5, -0.2, 1.1}};
        const Pose6D world_cam{randomRotation(rng), {-0.3, 0.8, 0.4}};
        const Pose6D cam_obj = cameraFramePose(world_obj, world_cam);
        const Pose6D back = world_cam.compose(cam_obj);
        CHECK(geodesicAngle(back.rotation, world_obj.rotation) < 1e-9);
        CHECK((back.translation - world_obj.translation).norm() < 1e-9);
    }
}

TEST_CASE("projectBbox contains every visible projected point") {
    const FisheyeIntrinsics K = sensorIntrinsics();
    const ModelPoints box = makeBoxModel(0, 0.2, 0.15, 0.1);
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> dist_d(0.8, 3.0);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const Pose6D pose{randomRotation(rng),
                          randomInConeRay(rng, 60.0 * kDeg) * dist_d(rng)};
        BboxResult res;
        try {
            res = projectBbox(box, pose, K);
        } catch (const NotVisibleError&) {
            continue;
        }
        ++checked;
        CHECK(res.visible_fraction > 0.0);
        CHECK(res.visible_fraction <= 1.0);
        CHECK(res.box.u_min >= 0.0);
        CHECK(res.box.v_min >= 0.0);
        CHECK(res.box.u_max <= K.width);
        CHECK(res.box.v_max <= K.height);
        CHECK(res.box.width() > 0.0);
        CHECK(res.box.height() > 0.0);
        // containment oracle: every in-FOV point projection lies in the box
        for (const auto& p : box.points) {
            const Vec3 pc = pose.transform(p);
            PixelCoord px;
            try {
                px = rayToPixel(pc, K);
            } catch (const Error&) {
                continue;
            }
            if (!isWithinFov(px.u, px.v, K)) {
                continue;
            }
            CHECK(px.u >= res.box.u_min - 1e-9);
            CHECK(px.u <= res.box.u_max + 1e-9);
            CHECK(px.v >= res.box.v_min - 1e-9);
            CHECK(px.v <= res.box.v_max + 1e-9);
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("projectBbox rejects a pose fully outside the view") {
    const FisheyeIntrinsics K(600.0, 1224.0, 1024.0, 2448, 2048, 90.0 * kDeg);
    const ModelPoints box = makeBoxModel(0, 0.1, 0.1, 0.1);
    const Pose6D behind{UnitQuaternion::identity(), {0, 0, -2}};
    CHECK_THROWS_AS(projectBbox(box, behind, K), NotVisibleError);
}

TEST_CASE("filterOutliers keeps low-residual and residual-free records") {
    std::vector<AnnotationRecord> recs(4);
    recs[0].frame_id = 0;
    recs[0].residual = 0.4;
    recs[1].frame_id = 1;
    recs[1].residual = 2.5;
    recs[2].frame_id = 2; // no residual recorded
    recs[3].frame_id = 3;
    recs[3].residual = 1.0;

    const auto kept = filterOutliers(recs, 1.0);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].frame_id == 0);
    CHECK(kept[1].frame_id == 2);
    CHECK(kept[2].frame_id == 3);

    // idempotent
    const auto again = filterOutliers(kept, 1.0);
    CHECK(again.size() == kept.size());
}

TEST_CASE("COCO export/import roundtrip") {
    std::mt19937_64 rng(71);
    std::vector<AnnotationRecord> recs;
    for (int i = 0; i < 5; ++i) {
        AnnotationRecord r;
        r.frame_id = i;
        r.class_id = i % 2;
        r.pose = Pose6D{randomRotation(rng), {0.1 * i, -0.2, 1.5 + 0.1 * i}};
        r.bbox = RoiBox(10.0 + i, 20.0, 110.0 + i, 95.0);
        if (i % 2 == 0) {
            r.apparent_q = randomRotation(rng);
        }
        r.visible_fraction = 1.0 - 0.1 * i;
        if (i == 3) {
            r.residual = 0.42;
        }
        recs.push_back(r);
    }
    DatasetIndex index;
    index.info = "synthetic run";
    for (int i = 0; i < 5; ++i) {
        index.images.push_back({i, "frame_" + std::to_string(i) + ".png", 2448, 2048});
    }
    index.categories = {{0, "box_a"}, {1, "box_b"}};

    const std::string path = (testDir() / "annotations.json").string();
    exportCoco(recs, index, path);
    const CocoDataset back = importCoco(path);

    REQUIRE(back.records.size() == recs.size());
    CHECK(back.index.images.size() == index.images.size());
    CHECK(back.index.categories.size() == 2);
    CHECK(back.index.categories[1].name == "box_b");
    for (size_t i = 0; i < recs.size(); ++i) {
        const auto& a = recs[i];
        const auto& b = back.records[i];
        CHECK(a.frame_id == b.frame_id);
        CHECK(a.class_id == b.class_id);
        CHECK(geodesicAngle(a.pose.rotation, b.pose.rotation) < 1e-12);
        CHECK((a.pose.translation - b.pose.translation).norm() < 1e-12);
        CHECK(std::abs(a.bbox.u_min - b.bbox.u_min) < 1e-9);
        CHECK(std::abs(a.bbox.width() - b.bbox.width()) < 1e-9);
        CHECK(a.apparent_q.has_value() == b.apparent_q.has_value());
        if (a.apparent_q) {
            CHECK(geodesicAngle(*a.apparent_q, *b.apparent_q) < 1e-12);
        }
        CHECK(a.visible_fraction == doctest::Approx(b.visible_fraction));
        CHECK(a.residual.has_value() == b.residual.has_value());
        if (a.residual) {
            CHECK(*a.residual == doctest::Approx(*b.residual));
        }
    }
}

TEST_CASE("COCO import reports the offending record on malformed input") {
    const std::string path = (testDir() / "broken.json").string();
    {
        std::ofstream out(path);
        out << R"({"info": "", "images": [], "categories": [],
                   "annotations": [
                     {"image_id": 0, "category_id": 0, "bbox": [0,0,10,10],
                      "pose": {"q": [1,0,0,0], "t": [0,0,1]}, "visible_fraction": 1.0},
                     {"image_id": 1, "category_id": 0, "bbox": [0,0,10,10],
                      "visible_fraction": 1.0}
                   ]})";
    }
    try {
        importCoco(path);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("empty annotation set roundtrips") {
    const std::string path = (testDir() / "empty.json").string();
    exportCoco({}, DatasetIndex{}, path);
    const CocoDataset back = importCoco(path);
    CHECK(back.records.empty());
    CHECK(back.index.images.empty());
}

TEST_CASE("trajectory file roundtrip and validation") {
    CameraTrajectory traj;
    std::mt19937_64 rng(73);
    for (int i = 0; i < 10; ++i) {
        traj.frames.push_back(
            {i, i / 3.0, Pose6D{randomRotation(rng), {0.1 * i, 0.0, -0.05 * i}}});
    }
    traj.validate();

    const std::string path = (testDir() / "traj.txt").string();
    saveTrajectory(traj, path);
    const CameraTrajectory back = loadTrajectory(path);
    REQUIRE(back.frames.size() == traj.frames.size());
    for (size_t i = 0; i < traj.frames.size(); ++i) {
        CHECK(back.frames[i].frame_id == traj.frames[i].frame_id);
        CHECK(back.frames[i].timestamp ==
              doctest::Approx(traj.frames[i].timestamp).epsilon(1e-15));
        CHECK(geodesicAngle(back.frames[i].world_cam.rotation,
                            traj.frames[i].world_cam.rotation) < 1e-12);
        CHECK((back.frames[i].world_cam.translation -
               traj.frames[i].world_cam.translation)
                  .norm() < 1e-12);
    }

    CameraTrajectory dup = traj;
    dup.frames.push_back(dup.frames.back());
    CHECK_THROWS_AS(dup.validate(), InvalidInputError);

    CHECK_THROWS_AS(loadTrajectory((testDir() / "missing.txt").string()), FormatError);
    const std::string bad = (testDir() / "bad_traj.txt").string();
    {
        std::ofstream out(bad);
        out << "0 0.0 1 2 3\n";
    }
    CHECK_THROWS_AS(loadTrajectory(bad), FormatError);
}
