#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fishpose/fisheye.hpp"
#include "fishpose/geometry.hpp"
#include "fishpose/remap.hpp"

namespace fishpose {

/// Object-frame model point cloud, meters.
struct ModelPoints {
    int class_id{0};
    std::vector<Vec3> points;
};

/// Shape symmetry of an object class: a discrete rotation group (always
/// containing the identity) and an optional continuous rotation axis.
struct SymmetrySpec {
    int class_id{0};
    std::vector<UnitQuaternion> discrete{UnitQuaternion::identity()};
    std::optional<Vec3> continuous_axis;

    static SymmetrySpec trivial(int class_id = 0) { return {class_id}; }
};

struct GroundTruthRecord {
    int frame_id{0};
    int class_id{0};
    Pose6D pose;
    RoiBox roi;
};

struct PredictionRecord {
    int frame_id{0};
    int class_id{0};
    Pose6D pose;
    RoiBox roi;
};

/// Stand-in for the learned pose regressor: maps a ground-truth record to a
/// prediction. Implementations must be deterministic given their seed,
/// independent of evaluation order.
class Predictor {
public:
    virtual ~Predictor() = default;
    virtual PredictionRecord predict(const GroundTruthRecord& gt) const = 0;
};

class PerfectPredictor final : public Predictor {
public:
    PredictionRecord predict(const GroundTruthRecord& gt) const override;
};

/// Perturbs ground truth with isotropic Gaussian translation noise (sigma_t
/// meters per axis) and a rotation about a random axis with angle ~
/// N(0, sigma_r). The per-record noise stream is derived from (seed,
/// frame_id, class_id), so results do not depend on record order.
class NoisyPredictor final : public Predictor {
public:
    NoisyPredictor(double sigma_t, double sigma_r, uint64_t seed);
    PredictionRecord predict(const GroundTruthRecord& gt) const override;

private:
    double sigma_t_;
    double sigma_r_;
    uint64_t seed_;
};

class ConstantPredictor final : public Predictor {
public:
    explicit ConstantPredictor(const Pose6D& pose) : pose_(pose) {}
    PredictionRecord predict(const GroundTruthRecord& gt) const override;

private:
    Pose6D pose_;
};

double translationError(const Vec3& t_hat, const Vec3& t);

/// Geodesic orientation error reduced over the symmetry group: the minimum
/// over group elements g of the angle between q_hat and q*g. The continuous
/// axis, when present, is minimized in closed form.
double orientationErrorSym(const UnitQuaternion& q_hat, const UnitQuaternion& q,
                           const SymmetrySpec& sym);

/// Average closest-point distance between the two transformed model point
/// sets (symmetry-tolerant pose error).
double addsError(const Pose6D& pose_hat, const Pose6D& pose_gt,
                 const ModelPoints& model);

/// Area under accuracy(tau) = fraction{error < tau} for tau in
/// [0, max_threshold], scaled to [0, 100]. Exact on the sorted step function.
double aucAdds(std::vector<double> errors, double max_threshold);

/// Percentage of errors strictly under each threshold.
std::vector<double> thresholdTable(const std::vector<double>& errors,
                                   const std::vector<double>& thresholds);

/// De-normalizes an object-center offset (in [-1, 1] of the ROI half-extent)
/// to a fisheye pixel and scales the back-projected ray by the range.
Vec3 recoverTranslation(double offset_x, double offset_y, double range,
                        const RoiBox& roi, const FisheyeIntrinsics& K);

struct EvalDataset {
    std::vector<GroundTruthRecord> records;
    std::map<int, ModelPoints> models;
    std::map<int, SymmetrySpec> symmetries;
    std::map<int, std::string> class_names; // optional, for report labels
};

struct HarnessConfig {
    std::vector<double> translation_thresholds{0.05, 0.10, 0.20, 0.30}; // meters
    std::vector<double> orientation_thresholds_deg{5.0, 10.0, 20.0, 30.0};
    double max_adds{0.10}; // meters
    bool compare_apparent{true};
    int workers{1};
};

struct ClassReport {
    int class_id{0}; // -1 for the ALL row
    std::string label;
    int count{0};
    std::vector<double> translation_pct;
    std::vector<double> orientation_pct;
    double adds_auc{0.0};
};

struct EvalReport {
    HarnessConfig config;
    std::vector<ClassReport> classes; // per class, then ALL last
};

EvalReport runHarness(const EvalDataset& dataset, const Predictor& predictor,
                      const HarnessConfig& config);

/// CSV with columns class,metric,threshold,value.
void writeReportCsv(const EvalReport& report, const std::string& path);
std::string formatReportText(const EvalReport& report);

/// Plain-text model points file: one "x y z" line per point, meters.
ModelPoints loadModelPoints(int class_id, const std::string& path);
void saveModelPoints(const ModelPoints& model, const std::string& path);

/// JSON symmetry spec file: a list of
///   {"class_id": int, "discrete": [[w,x,y,z], ...], "axis": [x,y,z]?}
/// Discrete sets must contain the identity and be closed under composition.
std::map<int, SymmetrySpec> loadSymmetrySpecs(const std::string& path);
void saveSymmetrySpecs(const std::map<int, SymmetrySpec>& specs,
                       const std::string& path);

} // namespace fishpose
