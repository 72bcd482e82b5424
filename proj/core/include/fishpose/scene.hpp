#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fishpose/annotation.hpp"
#include "fishpose/fisheye.hpp"
#include "fishpose/image.hpp"
#include "fishpose/metrics.hpp"

namespace fishpose {

struct ObjectPlacement {
    int class_id{0};
    Pose6D world_pose;
};

/// Ranges for randomized object placement, relative to the initial camera
/// pose (identity). Angles follow the spherical convention of sphere.hpp.
struct PlacementRanges {
    int count{0};
    std::vector<int> class_ids{0};
    double dist_min{1.0}; // meters
    double dist_max{3.0};
    double elev_min{-0.5}; // radians
    double elev_max{0.5};
    double azim_min{-0.5};
    double azim_max{0.5};
};

enum class BackgroundPattern { Constant, Checkerboard };

struct SceneSpec {
    uint64_t seed{0};
    std::vector<ObjectPlacement> placements; // explicit placements, used as-is
    std::optional<PlacementRanges> sampling; // additional sampled placements
    BackgroundPattern background{BackgroundPattern::Checkerboard};
    double checker_cell{0.5};   // meters on the ground plane
    double ground_plane_y{1.5}; // meters below the initial camera (y is down)
    float background_value{128.0f};
};

/// Camera motion: inclusive arc about an axis. Frame k of n sits at angle
/// span * k / (n - 1); a span of 2*pi closes the orbit (last frame == first).
struct MotionSpec {
    Pose6D base;
    Vec3 orbit_axis{0.0, 1.0, 0.0};
    Vec3 orbit_center{0.0, 0.0, 0.0};
    double angle_span{0.0}; // radians
    double timestep{1.0 / 3.0};
};

/// Deterministic per seed. Sampled placements are guaranteed in-FOV from the
/// identity camera pose; infeasible ranges raise InvalidInputError.
std::vector<ObjectPlacement> generateScene(const SceneSpec& spec,
                                           const FisheyeIntrinsics& K);

CameraTrajectory generateTrajectory(int n_frames, const MotionSpec& motion);

struct ProjectedPoint {
    size_t object_index{0};
    int class_id{0};
    size_t point_index{0};
    double u{0.0};
    double v{0.0};
};

/// Exact fisheye projections of all in-FOV model points of every placed
/// object, as seen from the given camera pose.
std::vector<ProjectedPoint> renderPointProjections(
    const std::vector<ObjectPlacement>& placements, const Pose6D& world_cam,
    const std::map<int, ModelPoints>& models, const FisheyeIntrinsics& K);

/// Grayscale render: background pattern traced through the fisheye model
/// (ground-plane checkerboard or constant), zero outside the FOV circle,
/// object points splatted as small radial-falloff discs.
ImageBuffer renderSyntheticImage(const std::vector<ObjectPlacement>& placements,
                                 const Pose6D& world_cam,
                                 const std::map<int, ModelPoints>& models,
                                 const FisheyeIntrinsics& K, const SceneSpec& spec,
                                 int workers = 1);

/// Additive splat with linear radial falloff; the intensity centroid sits at
/// (u, v) in continuous pixel coordinates.
void splatPoint(ImageBuffer& img, double u, double v, float value, double radius);

/// Box-shaped model point cloud: corners, edge midpoints and face centers.
ModelPoints makeBoxModel(int class_id, double sx, double sy, double sz);

/// JSON scene spec file mirroring the SceneSpec fields.
SceneSpec loadSceneSpec(const std::string& path);
void saveSceneSpec(const SceneSpec& spec, const std::string& path);

} // namespace fishpose
