#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fishpose/fisheye.hpp"
#include "fishpose/geometry.hpp"
#include "fishpose/metrics.hpp"
#include "fishpose/remap.hpp"

namespace fishpose {

struct TrajectoryFrame {
    int frame_id{0};
    double timestamp{0.0};
    Pose6D world_cam; // camera pose in the world frame
};

/// Ordered camera poses; frame ids unique and ascending.
struct CameraTrajectory {
    std::vector<TrajectoryFrame> frames;

    void validate() const;
};

struct AnnotationRecord {
    int frame_id{0};
    int class_id{0};
    Pose6D pose; // object pose in the camera frame
    RoiBox bbox;
    std::optional<UnitQuaternion> apparent_q;
    double visible_fraction{1.0};
    std::optional<double> residual; // reprojection residual, pixels (caller-supplied)
};

struct DatasetImage {
    int frame_id{0};
    std::string path;
    int width{0};
    int height{0};
};

struct DatasetCategory {
    int class_id{0};
    std::string name;
};

struct DatasetIndex {
    std::string info;
    std::vector<DatasetImage> images;
    std::vector<DatasetCategory> categories;
};

/// Object pose in the camera frame: T_cam_obj = T_world_cam^-1 * T_world_obj.
Pose6D cameraFramePose(const Pose6D& world_obj, const Pose6D& world_cam);

struct BboxResult {
    RoiBox box;
    double visible_fraction{0.0};
};

/// Axis-aligned box over the fisheye projections of all in-FOV model points,
/// clamped to image bounds. Throws NotVisibleError when nothing projects.
BboxResult projectBbox(const ModelPoints& model, const Pose6D& pose_cam,
                       const FisheyeIntrinsics& K);

/// Keeps records whose residual is present and <= max_residual; records
/// without a residual are kept. Order preserved.
std::vector<AnnotationRecord> filterOutliers(const std::vector<AnnotationRecord>& records,
                                             double max_residual);

/// COCO-style annotation file:
///   {info, images:[{id, file_name, width, height}],
///    annotations:[{image_id, category_id, bbox:[x,y,w,h],
///                  pose:{q:[w,x,y,z], t:[x,y,z]}, apparent_q?, visible_fraction,
///                  residual?}],
///    categories:[{id, name}]}
void exportCoco(const std::vector<AnnotationRecord>& records, const DatasetIndex& index,
                const std::string& path);

struct CocoDataset {
    std::vector<AnnotationRecord> records;
    DatasetIndex index;
};

CocoDataset importCoco(const std::string& path);

/// Plain-text trajectory file, one frame per line:
///   frame_id timestamp tx ty tz qw qx qy qz
CameraTrajectory loadTrajectory(const std::string& path);
void saveTrajectory(const CameraTrajectory& traj, const std::string& path);

} // namespace fishpose
