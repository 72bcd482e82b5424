#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "fishpose/scene.hpp"
#include "test_support.hpp"

using namespace fishpose;
using namespace fishpose::test;

namespace fs = std::filesystem;

namespace {

// Independent projection path for the oracle test: rotate by an explicit
// 3x3 matrix built directly from the quaternion components, then apply the
// equidistant formula written out from scratch.
PixelCoord oracleProject(const Vec3& p_obj, const Pose6D& world_obj,
                         const Pose6D& world_cam, const FisheyeIntrinsics& K) {
    auto quatMat = [](const UnitQuaternion& q, double m[9]) {
        m[0] = 1 - 2 * (q.y * q.y + q.z * q.z);
        m[1] = 2 * (q.x * q.y - q.w * q.z);
        m[2] = 2 * (q.x * q.z + q.w * q.y);
        m[3] = 2 * (q.x * q.y + q.w * q.z);
        m[4] = 1 - 2 * (q.x * q.x + q.z * q.z);
        m[5] = 2 * (q.y * q.z - q.w * q.x);
        m[6] = 2 * (q.x * q.z - q.w * q.y);
        m[7] = 2 * (q.y * q.z + q.w * q.x);
        m[8] = 1 - 2 * (q.x * q.x + q.y * q.y);
    };
    double ro[9], rc[9];
    quatMat(world_obj.rotation, ro);
    quatMat(world_cam.rotation, rc);

    // world point
    const double wx = ro[0] * p_obj.x + ro[1] * p_obj.y + ro[2] * p_obj.z +
                      world_obj.translation.x;
    const double wy = ro[3] * p_obj.x + ro[4] * p_obj.y + ro[5] * p_obj.z +
                      world_obj.translation.y;
    const double wz = ro[6] * p_obj.x + ro[7] * p_obj.y + ro[8] * p_obj.z +
                      world_obj.translation.z;

    // camera frame: R_c^T * (w - t_c)
    const double dx = wx - world_cam.translation.x;
    const double dy = wy - world_cam.translation.y;
    const double dz = wz - world_cam.translation.z;
    const double cx = rc[0] * dx + rc[3] * dy + rc[6] * dz;
    const double cy = rc[1] * dx + rc[4] * dy + rc[7] * dz;
    const double cz = rc[2] * dx + rc[5] * dy + rc[8] * dz;

    const double n = std::sqrt(cx * cx + cy * cy + cz * cz);
    const double theta = std::acos(cz / n);
    const double rxy = std::sqrt(cx * cx + cy * cy);
    const double radius = K.f * theta;
    if (rxy < 1e-12) {
        return {K.cx, K.cy};
    }
    return {K.cx + radius * cx / rxy, K.cy + radius * cy / rxy};
}

} // namespace

TEST_CASE("generateScene is deterministic per seed") {
    const FisheyeIntrinsics K = sensorIntrinsics();
    SceneSpec spec;
    spec.seed = 42;
    PlacementRanges ranges;
    ranges.count = 6;
    ranges.class_ids = {0, 1};
    spec.sampling = ranges;

    const auto a = generateScene(spec, K);
    const auto b = generateScene(spec, K);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == 6);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].class_id == b[i].class_id);
        CHECK((a[i].world_pose.translation - b[i].world_pose.translation).norm() == 0.0);
        CHECK(geodesicAngle(a[i].world_pose.rotation, b[i].world_pose.rotation) < 1e-15);
    }

    spec.seed = 43;
    const auto c = generateScene(spec, K);
    bool any_differ = false;
    for (size_t i = 0; i < a.size(); ++i) {
        if ((a[i].world_pose.translation - c[i].world_pose.translation).norm() > 1e-9) {
            any_differ = true;
        }
    }
    CHECK(any_differ);
}

TEST_CASE("sampled placements are in view from the identity camera") {
    const FisheyeIntrinsics K = sensorIntrinsics();
    for (uint64_t seed = 0; seed < 100; ++seed) {
        SceneSpec spec;
        spec.seed = seed;
        PlacementRanges ranges;
        ranges.count = 4;
        ranges.elev_min = -1.0;
        ranges.elev_max = 1.0;
        ranges.azim_min = -1.2;
        ranges.azim_max = 1.2;
        spec.sampling = ranges;
        for (const auto& placement : generateScene(spec, K)) {
            const Vec3 t = placement.world_pose.translation;
            const PixelCoord px = rayToPixel(t, K);
            CHECK(isWithinFov(px.u, px.v, K));
            CHECK(t.norm() >= ranges.dist_min - 1e-12);
            CHECK(t.norm() <= ranges.dist_max + 1e-12);
            const auto& q = placement.world_pose.rotation;
            CHECK(std::abs(q.dot(q) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("infeasible sampling ranges are rejected") {
    const FisheyeIntrinsics K(600.0, 1224.0, 1024.0, 2448, 2048, 60.0 * kDeg);
    SceneSpec spec;
    spec.seed = 1;
    PlacementRanges ranges;
    ranges.count = 1;
    ranges.azim_min = 2.0; // way outside a 60-degree FOV
    ranges.azim_max = 2.2;
    spec.sampling = ranges;
    CHECK_THROWS_AS(generateScene(spec, K), InvalidInputError);
}

TEST_CASE("orbit trajectory closes after a full revolution") {
    MotionSpec motion;
    motion.base = Pose6D{UnitQuaternion::identity(), {0.0, 0.0, -2.0}};
    motion.orbit_axis = {0.0, 1.0, 0.0};
    motion.orbit_center = {0.0, 0.0, 0.0};
    motion.angle_span = 2.0 * kPi;
    const CameraTrajectory traj = generateTrajectory(361, motion);
    REQUIRE(traj.frames.size() == 361);
    traj.validate();

    const auto& first = traj.frames.front().world_cam;
    const auto& last = traj.frames.back().world_cam;
    CHECK((last.translation - first.translation).norm() < 1e-9);
    CHECK(geodesicAngle(last.rotation, first.rotation) < 1e-9);

    // constant orbit radius, unit quaternions throughout
    const double r0 = (first.translation - motion.orbit_center).norm();
    for (const auto& f : traj.frames) {
        CHECK(std::abs((f.world_cam.translation - motion.orbit_center).norm() - r0) <
              1e-9);
        const auto& fq = f.world_cam.rotation;
        CHECK(std::abs(fq.dot(fq) - 1.0) < 1e-12);
    }

    // half-way around, the camera sits on the opposite side
    const auto& mid = traj.frames[180].world_cam;
    CHECK((mid.translation - Vec3{0.0, 0.0, 2.0}).norm() < 1e-9);
}

TEST_CASE("point projections match an independently coded projection path") {
    const FisheyeIntrinsics K = sensorIntrinsics();
    std::mt19937_64 rng(77);
    std::map<int, ModelPoints> models;
    models[0] = makeBoxModel(0, 0.2, 0.12, 0.3);

    for (int trial = 0; trial < 100; ++trial) {
        const Pose6D world_obj{randomRotation(rng),
                               randomInConeRay(rng, 50.0 * kDeg) * 2.0};
        const Pose6D world_cam{randomRotation(rng), {0.05, -0.1, 0.02}};
        std::vector<ObjectPlacement> placements{{0, world_obj}};

        const auto projected = renderPointProjections(placements, world_cam, models, K);
        for (const auto& pp : projected) {
            const PixelCoord oracle = oracleProject(
                models[0].points[pp.point_index], world_obj, world_cam, K);
            CHECK(std::abs(pp.u - oracle.u) < 1e-9);
            CHECK(std::abs(pp.v - oracle.v) < 1e-9);
        }
    }
}

TEST_CASE("splatPoint centroid sits at the requested position") {
    ImageBuffer img(64, 64, 1);
    splatPoint(img, 31.7, 40.2, 255.0f, 2.0);
    double mass = 0.0, mu = 0.0, mv = 0.0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double w = img.at(x, y, 0);
            mass += w;
            mu += w * (x + 0.5);
            mv += w * (y + 0.5);
        }
    }
    REQUIRE(mass > 0.0);
    // discretizing the cone kernel shifts the centroid slightly; well under
    // the half-pixel the downstream blob-center checks rely on
    CHECK(std::abs(mu / mass - 31.7) < 0.05);
    CHECK(std::abs(mv / mass - 40.2) < 0.05);
}

TEST_CASE("synthetic render is deterministic and masked outside the FOV") {
    const FisheyeIntrinsics K(300.0, 512.0, 512.0, 1024, 1024, 185.0 * kDeg);
    SceneSpec spec;
    spec.seed = 5;
    spec.placements.push_back(
        {0, Pose6D{UnitQuaternion::identity(), {0.2, 0.3, 1.5}}});
    std::map<int, ModelPoints> models;
    models[0] = makeBoxModel(0, 0.2, 0.2, 0.2);

    const ImageBuffer a =
        renderSyntheticImage(spec.placements, Pose6D{}, models, K, spec, 1);
    const ImageBuffer b =
        renderSyntheticImage(spec.placements, Pose6D{}, models, K, spec, 7);
    REQUIRE(a.width == K.width);
    REQUIRE(a.height == K.height);
    CHECK(a.data == b.data);

    // a far-corner pixel lies outside the image circle
    CHECK(a.at(0, 0, 0) == 0.0f);
    // checkerboard background: the lower half of the view should not be flat
    float lo = 1e9f, hi = -1e9f;
    for (int x = 256; x < 768; x += 16) {
        const float v = a.at(x, 900, 0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi - lo > 10.0f);

    SceneSpec flat = spec;
    flat.background = BackgroundPattern::Constant;
    const ImageBuffer c =
        renderSyntheticImage(spec.placements, Pose6D{}, models, K, flat, 1);
    CHECK(c.at(300, 900, 0) == doctest::Approx(flat.background_value));
}

TEST_CASE("box model has distinct points spanning the box") {
    const ModelPoints box = makeBoxModel(2, 0.3, 0.2, 0.1);
    CHECK(box.class_id == 2);
    CHECK(box.points.size() == 27);
    double max_x = 0.0, max_y = 0.0, max_z = 0.0;
    for (const auto& p : box.points) {
        max_x = std::max(max_x, std::abs(p.x));
        max_y = std::max(max_y, std::abs(p.y));
        max_z = std::max(max_z, std::abs(p.z));
    }
    CHECK(max_x == doctest::Approx(0.15));
    CHECK(max_y == doctest::Approx(0.10));
    CHECK(max_z == doctest::Approx(0.05));
}

TEST_CASE("scene spec JSON roundtrip") {
    SceneSpec spec;
    spec.seed = 99;
    spec.placements.push_back(
        {1, Pose6D{UnitQuaternion::fromAxisAngle({0, 0, 1}, 0.4), {0.5, -0.1, 2.0}}});
    PlacementRanges ranges;
    ranges.count = 3;
    ranges.class_ids = {0, 2};
    ranges.dist_min = 1.2;
    ranges.dist_max = 2.5;
    spec.sampling = ranges;
    spec.background = BackgroundPattern::Constant;
    spec.background_value = 77.0f;

    const fs::path dir = fs::temp_directory_path() / "fishpose_test_scene";
    fs::create_directories(dir);
    const std::string path = (dir / "scene.json").string();
    saveSceneSpec(spec, path);
    const SceneSpec back = loadSceneSpec(path);

    CHECK(back.seed == spec.seed);
    REQUIRE(back.placements.size() == 1);
    CHECK(back.placements[0].class_id == 1);
    CHECK((back.placements[0].world_pose.translation -
           spec.placements[0].world_pose.translation)
              .norm() < 1e-12);
    REQUIRE(back.sampling.has_value());
    CHECK(back.sampling->count == 3);
    CHECK(back.sampling->class_ids == std::vector<int>{0, 2});
    CHECK(back.sampling->dist_min == doctest::Approx(1.2));
    CHECK(back.background == BackgroundPattern::Constant);
    CHECK(back.background_value == doctest::Approx(77.0f));

    CHECK_THROWS_AS(loadSceneSpec((dir / "missing.json").string()), FormatError);
}
