#include "fishpose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fishpose/parallel.hpp"
#include "fishpose/viewpoint.hpp"

namespace fishpose {

PredictionRecord PerfectPredictor::predict(const GroundTruthRecord& gt) const {
    return {gt.frame_id, gt.class_id, gt.pose, gt.roi};
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

NoisyPredictor::NoisyPredictor(double sigma_t, double sigma_r, uint64_t seed)
    : sigma_t_(sigma_t), sigma_r_(sigma_r), seed_(seed) {
    if (sigma_t < 0.0 || sigma_r < 0.0) {
        throw InvalidInputError("noise sigmas must be non-negative");
    }
}

PredictionRecord NoisyPredictor::predict(const GroundTruthRecord& gt) const {
    uint64_t h = splitmix64(seed_ ^ splitmix64(static_cast<uint64_t>(gt.frame_id)));
    h = splitmix64(h ^ splitmix64(static_cast<uint64_t>(gt.class_id) + 0x51edULL));
    std::mt19937_64 rng(h);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const Vec3 t{gt.pose.translation.x + sigma_t_ * gauss(rng),
                 gt.pose.translation.y + sigma_t_ * gauss(rng),
                 gt.pose.translation.z + sigma_t_ * gauss(rng)};

    Vec3 axis{gauss(rng), gauss(rng), gauss(rng)};
    if (axis.norm() < 1e-9) {
        axis = {0.0, 0.0, 1.0};
    }
    const double angle = sigma_r_ * gauss(rng);
    const UnitQuaternion q =
        (UnitQuaternion::fromAxisAngle(axis, angle) * gt.pose.rotation).canonical();
    return {gt.frame_id, gt.class_id, Pose6D{q, t}, gt.roi};
}

PredictionRecord ConstantPredictor::predict(const GroundTruthRecord& gt) const {
    return {gt.frame_id, gt.class_id, pose_, gt.roi};
}

double translationError(const Vec3& t_hat, const Vec3& t) {
    if (!t_hat.isFinite() || !t.isFinite()) {
        throw InvalidInputError("translation error requires finite inputs");
    }
    return (t_hat - t).norm();
}

double orientationErrorSym(const UnitQuaternion& q_hat, const UnitQuaternion& q,
                           const SymmetrySpec& sym) {
    double best = std::numbers::pi;
    for (const auto& g : sym.discrete) {
        const UnitQuaternion qg = q * g;
        if (sym.continuous_axis) {
            // min over alpha of angle(q_hat, qg * rot(axis, alpha)):
            // with r = qg^-1 * q_hat, the optimum is
            // 2*acos(sqrt(r.w^2 + (axis . r.xyz)^2)).
            const Vec3 a = sym.continuous_axis->normalized();
            const UnitQuaternion r = qg.conjugate() * q_hat;
            const double proj = a.x * r.x + a.y * r.y + a.z * r.z;
            const double c = std::sqrt(r.w * r.w + proj * proj);
            // residual swing: vector part orthogonal to the axis; atan2 keeps
            // precision for near-zero angles where acos cannot
            const Vec3 perp{r.x - proj * a.x, r.y - proj * a.y, r.z - proj * a.z};
            best = std::min(best, 2.0 * std::atan2(perp.norm(), c));
        } else {
            best = std::min(best, geodesicAngle(q_hat, qg));
        }
    }
    return best;
}

double addsError(const Pose6D& pose_hat, const Pose6D& pose_gt,
                 const ModelPoints& model) {
    if (model.points.empty()) {
        throw InvalidInputError("ADD-S needs a non-empty model point set");
    }
    std::vector<Vec3> gt_pts;
    gt_pts.reserve(model.points.size());
    for (const auto& p : model.points) {
        gt_pts.push_back(pose_gt.transform(p));
    }
    double acc = 0.0;
    for (const auto& p : model.points) {
        const Vec3 q = pose_hat.transform(p);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& g : gt_pts) {
            best = std::min(best, (q - g).squaredNorm());
        }
        acc += std::sqrt(best);
    }
    return acc / static_cast<double>(model.points.size());
}

double aucAdds(std::vector<double> errors, double max_threshold) {
    if (errors.empty()) {
        throw InvalidInputError("AUC needs at least one error sample");
    }
    if (!(max_threshold > 0.0)) {
        throw InvalidInputError("AUC max threshold must be positive");
    }
    std::sort(errors.begin(), errors.end());
    const double n = static_cast<double>(errors.size());
    // accuracy(tau) = count{e < tau}/n is a step function increasing at each
    // error value; integrate segment by segment.
    double area = 0.0;
    for (size_t i = 0; i < errors.size(); ++i) {
        const double lo = std::min(errors[i], max_threshold);
        const double hi =
            i + 1 < errors.size() ? std::min(errors[i + 1], max_threshold) : max_threshold;
        if (hi > lo) {
            area += (hi - lo) * (static_cast<double>(i + 1) / n);
        }
    }
    return 100.0 * area / max_threshold;
}

std::vector<double> thresholdTable(const std::vector<double>& errors,
                                   const std::vector<double>& thresholds) {
    if (errors.empty()) {
        throw InvalidInputError("threshold table needs at least one error sample");
    }
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw InvalidInputError("thresholds must be ascending");
    }
    std::vector<double> out;
    out.reserve(thresholds.size());
    for (const double tau : thresholds) {
        const auto under = std::count_if(errors.begin(), errors.end(),
                                         [tau](double e) { return e < tau; });
        out.push_back(100.0 * static_cast<double>(under) /
                      static_cast<double>(errors.size()));
    }
    return out;
}

Vec3 recoverTranslation(double offset_x, double offset_y, double range,
                        const RoiBox& roi, const FisheyeIntrinsics& K) {
    if (std::abs(offset_x) > 1.0 || std::abs(offset_y) > 1.0) {
        throw InvalidInputError("center offset must lie within the ROI bounds");
    }
    if (!(range > 0.0)) {
        throw InvalidInputError("range must be positive");
    }
    const double u = roi.centerU() + offset_x * 0.5 * roi.width();
    const double v = roi.centerV() + offset_y * 0.5 * roi.height();
    return pixelToRay(u, v, K) * range;
}

namespace {

struct FrameErrors {
    int class_id;
    double translation;
    double orientation;
    double adds;
};

ClassReport buildClassReport(int class_id, const std::string& label,
                             const std::vector<FrameErrors>& all,
                             const HarnessConfig& cfg) {
    std::vector<double> te, oe, ae;
    for (const auto& e : all) {
        if (class_id < 0 || e.class_id == class_id) {
            te.push_back(e.translation);
            oe.push_back(e.orientation);
            ae.push_back(e.adds);
        }
    }
    ClassReport r;
    r.class_id = class_id;
    r.label = label;
    r.count = static_cast<int>(te.size());
    r.translation_pct = thresholdTable(te, cfg.translation_thresholds);
    std::vector<double> orient_thresh_rad;
    for (double d : cfg.orientation_thresholds_deg) {
        orient_thresh_rad.push_back(d * std::numbers::pi / 180.0);
    }
    r.orientation_pct = thresholdTable(oe, orient_thresh_rad);
    r.adds_auc = aucAdds(ae, cfg.max_adds);
    return r;
}

} // namespace

EvalReport runHarness(const EvalDataset& dataset, const Predictor& predictor,
                      const HarnessConfig& config) {
    if (dataset.records.empty()) {
        throw InvalidInputError("evaluation dataset is empty");
    }
    for (const auto& rec : dataset.records) {
        if (!dataset.models.count(rec.class_id)) {
            throw ConfigError("no model points for class " +
                              std::to_string(rec.class_id));
        }
        if (!dataset.symmetries.count(rec.class_id)) {
            throw ConfigError("no symmetry spec for class " +
                              std::to_string(rec.class_id));
        }
    }

    // Fixed evaluation order by (frame, class) keeps the report independent
    // of the input ordering.
    std::vector<GroundTruthRecord> records = dataset.records;
    std::stable_sort(records.begin(), records.end(),
                     [](const GroundTruthRecord& a, const GroundTruthRecord& b) {
                         return std::tie(a.frame_id, a.class_id) <
                                std::tie(b.frame_id, b.class_id);
                     });

    std::vector<FrameErrors> errors(records.size());
    parallelFor(static_cast<int>(records.size()), config.workers, [&](int b, int e) {
        for (int i = b; i < e; ++i) {
            const auto& gt = records[static_cast<size_t>(i)];
            const PredictionRecord pred = predictor.predict(gt);
            const auto& sym = dataset.symmetries.at(gt.class_id);
            const auto& model = dataset.models.at(gt.class_id);

            FrameErrors fe;
            fe.class_id = gt.class_id;
            fe.translation = translationError(pred.pose.translation, gt.pose.translation);
            if (config.compare_apparent) {
                fe.orientation = orientationErrorSym(
                    apparentOrientation(pred.pose.rotation, pred.pose.translation),
                    apparentOrientation(gt.pose.rotation, gt.pose.translation), sym);
            } else {
                fe.orientation =
                    orientationErrorSym(pred.pose.rotation, gt.pose.rotation, sym);
            }
            fe.adds = addsError(pred.pose, gt.pose, model);
            errors[static_cast<size_t>(i)] = fe;
        }
    });

    std::vector<int> class_ids;
    for (const auto& e : errors) {
        if (std::find(class_ids.begin(), class_ids.end(), e.class_id) ==
            class_ids.end()) {
            class_ids.push_back(e.class_id);
        }
    }
    std::sort(class_ids.begin(), class_ids.end());

    EvalReport report;
    report.config = config;
    for (int cid : class_ids) {
        auto it = dataset.class_names.find(cid);
        const std::string label =
            it != dataset.class_names.end() ? it->second : "class_" + std::to_string(cid);
        report.classes.push_back(buildClassReport(cid, label, errors, config));
    }
    report.classes.push_back(buildClassReport(-1, "ALL", errors, config));
    return report;
}

void writeReportCsv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write report: " + path);
    }
    out << "class,metric,threshold,value\n";
    out << std::setprecision(10);
    for (const auto& c : report.classes) {
        for (size_t i = 0; i < c.translation_pct.size(); ++i) {
            out << c.label << ",translation_pct,"
                << report.config.translation_thresholds[i] << ','
                << c.translation_pct[i] << '\n';
        }
        for (size_t i = 0; i < c.orientation_pct.size(); ++i) {
            out << c.label << ",orientation_pct,"
                << report.config.orientation_thresholds_deg[i] << ','
                << c.orientation_pct[i] << '\n';
        }
        out << c.label << ",adds_auc," << report.config.max_adds << ','
            << c.adds_auc << '\n';
    }
}

std::string formatReportText(const EvalReport& report) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);

    auto table = [&](const std::string& title, const std::vector<double>& thresholds,
                     const std::string& unit, auto getter) {
        os << title << '\n';
        os << std::left << std::setw(16) << "class";
        for (double t : thresholds) {
            std::ostringstream h;
            h << "< " << t << unit;
            os << std::right << std::setw(12) << h.str();
        }
        os << '\n';
        for (const auto& c : report.classes) {
            os << std::left << std::setw(16) << c.label;
            const std::vector<double>& vals = getter(c);
            for (double v : vals) {
                os << std::right << std::setw(12) << v;
            }
            os << '\n';
        }
        os << '\n';
    };

    table("Translation accuracy (% under threshold)",
          report.config.translation_thresholds, " m",
          [](const ClassReport& c) -> const std::vector<double>& {
              return c.translation_pct;
          });
    table("Orientation accuracy (% under threshold)",
          report.config.orientation_thresholds_deg, " deg",
          [](const ClassReport& c) -> const std::vector<double>& {
              return c.orientation_pct;
          });

    os << "ADD-S AUC (max threshold " << report.config.max_adds << " m)\n";
    for (const auto& c : report.classes) {
        os << std::left << std::setw(16) << c.label << std::right << std::setw(12)
           << c.adds_auc << '\n';
    }
    return os.str();
}

ModelPoints loadModelPoints(int class_id, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open model points file: " + path);
    }
    ModelPoints model;
    model.class_id = class_id;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p.x >> p.y >> p.z)) {
            throw FormatError("malformed model point line in " + path + ": " + line);
        }
        if (!p.isFinite()) {
            throw FormatError("non-finite model point in " + path);
        }
        model.points.push_back(p);
    }
    if (model.points.empty()) {
        throw FormatError("model points file is empty: " + path);
    }
    return model;
}

void saveModelPoints(const ModelPoints& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write model points file: " + path);
    }
    out << std::setprecision(17);
    for (const auto& p : model.points) {
        out << p.x << ' ' << p.y << ' ' << p.z << '\n';
    }
}

namespace {

using nlohmann::json;

void validateClosure(const SymmetrySpec& spec) {
    bool has_identity = false;
    for (const auto& g : spec.discrete) {
        if (geodesicAngle(g, UnitQuaternion::identity()) < 1e-6) {
            has_identity = true;
        }
    }
    if (!has_identity) {
        throw ConfigError("discrete symmetry group must contain the identity");
    }
    for (const auto& a : spec.discrete) {
        for (const auto& b : spec.discrete) {
            const UnitQuaternion ab = a * b;
            double best = std::numbers::pi;
            for (const auto& c : spec.discrete) {
                best = std::min(best, geodesicAngle(ab, c));
            }
            if (best > 1e-6) {
                throw ConfigError("discrete symmetry set is not closed under composition");
            }
        }
    }
}

} // namespace

std::map<int, SymmetrySpec> loadSymmetrySpecs(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open symmetry spec file: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("malformed symmetry spec JSON: " + std::string(e.what()));
    }
    if (!doc.is_array()) {
        throw FormatError("symmetry spec must be a JSON array");
    }
    std::map<int, SymmetrySpec> specs;
    for (const auto& entry : doc) {
        SymmetrySpec spec;
        try {
            spec.class_id = entry.at("class_id").get<int>();
            spec.discrete.clear();
            for (const auto& q : entry.at("discrete")) {
                spec.discrete.emplace_back(q.at(0).get<double>(), q.at(1).get<double>(),
                                           q.at(2).get<double>(), q.at(3).get<double>());
            }
            if (entry.contains("axis")) {
                const auto& a = entry["axis"];
                spec.continuous_axis =
                    Vec3{a.at(0).get<double>(), a.at(1).get<double>(),
                         a.at(2).get<double>()}
                        .normalized();
            }
        } catch (const json::exception& e) {
            throw FormatError("malformed symmetry spec entry: " + std::string(e.what()));
        }
        validateClosure(spec);
        specs[spec.class_id] = spec;
    }
    return specs;
}

void saveSymmetrySpecs(const std::map<int, SymmetrySpec>& specs,
                       const std::string& path) {
    json doc = json::array();
    for (const auto& [cid, spec] : specs) {
        json entry;
        entry["class_id"] = cid;
        json qs = json::array();
        for (const auto& q : spec.discrete) {
            qs.push_back({q.w, q.x, q.y, q.z});
        }
        entry["discrete"] = qs;
        if (spec.continuous_axis) {
            entry["axis"] = {spec.continuous_axis->x, spec.continuous_axis->y,
                             spec.continuous_axis->z};
        }
        doc.push_back(entry);
    }
    std::ofstream out(path);
    if (!out) {
        throw FormatError("cannot write symmetry spec file: " + path);
    }
    out << doc.dump(2) << '\n';
}

} // namespace fishpose
