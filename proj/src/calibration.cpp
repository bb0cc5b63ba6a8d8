#include "mirage/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace mirage {

namespace {

// Median of chi-square with 3 dof; chi3 median = sqrt of this.
constexpr double kChi2Median3 = 2.3659738843753377;

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

PinholeCamera::PinholeCamera(double fx_, double fy_, double cx_, double cy_,
                             int width_, int height_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw ValidationError("camera focal lengths must be positive");
    if (width <= 0 || height <= 0)
        throw ValidationError("camera resolution must be positive");
    if (cx < 0.0 || cx > width || cy < 0.0 || cy > height)
        throw ValidationError("principal point lies outside the image bounds");
}

Eigen::Vector2d PinholeCamera::project(const Eigen::Vector3d& p) const {
    if (!(p.z() > 0.0))
        throw ProjectionDomainError("point at or behind the camera plane");
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
}

Checkerboard::Checkerboard(int cols_, int rows_, double square_m_)
    : cols(cols_), rows(rows_), square_m(square_m_) {
    if (cols < 2 || rows < 2)
        throw ValidationError("checkerboard needs at least a 2x2 corner grid");
    if (!(square_m > 0.0))
        throw ValidationError("checkerboard square side must be positive");
}

std::vector<Eigen::Vector3d> Checkerboard::corners() const {
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            pts.emplace_back(c * square_m, r * square_m, 0.0);
    return pts;
}

RigidTransform rigid_register(std::span<const Eigen::Vector3d> source,
                              std::span<const Eigen::Vector3d> target,
                              FrameId from, FrameId to) {
    if (source.size() != target.size())
        throw DegenerateConfigurationError(
            "correspondence lists have different lengths");
    const std::size_t n = source.size();
    if (n < 3)
        throw DegenerateConfigurationError(
            "rigid registration needs at least 3 correspondences");

    Eigen::Vector3d sc = Eigen::Vector3d::Zero();
    Eigen::Vector3d tc = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        sc += source[i];
        tc += target[i];
    }
    sc /= static_cast<double>(n);
    tc /= static_cast<double>(n);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d ds = source[i] - sc;
        cov += (target[i] - tc) * ds.transpose();
        scatter += ds * ds.transpose();
    }

    // Collinear (or coincident) sources leave the rotation underdetermined
    // about the point axis.
    Eigen::JacobiSVD<Eigen::Matrix3d> shape_svd(scatter);
    const double s0 = shape_svd.singularValues()(0);
    const double s1 = shape_svd.singularValues()(1);
    if (s0 < 1e-18 || s1 < 1e-12 * s0)
        throw DegenerateConfigurationError(
            "source points are collinear; rotation is underdetermined");

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(
        cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
        d(2, 2) = -1.0; // reflection guard
    const Eigen::Matrix3d r = svd.matrixU() * d * svd.matrixV().transpose();
    return {r, tc - r * sc, from, to};
}

RigidTransform marker_extrinsic(const RigidTransform& hmd_to_board,
                                const RigidTransform& tracker_to_board) {
    if (hmd_to_board.to() != tracker_to_board.to())
        throw FrameMismatchError(
            "marker extrinsic inputs must reference the same board frame");
    return compose(invert(hmd_to_board), tracker_to_board);
}

RigidTransform marker_extrinsic(const MarkerPoseObservation& hmd,
                                const MarkerPoseObservation& tracker,
                                double sync_tolerance_ms) {
    const double gap = std::abs(hmd.timestamp_ms - tracker.timestamp_ms);
    if (gap > sync_tolerance_ms) {
        std::ostringstream msg;
        msg << "marker observations are " << gap
            << " ms apart (tolerance " << sync_tolerance_ms << " ms)";
        throw DesynchronizationError(msg.str());
    }
    return marker_extrinsic(invert(hmd.pose), invert(tracker.pose));
}

ReprojectionStats reprojection_error(const PinholeCamera& cam,
                                     const RigidTransform& extrinsic,
                                     std::span<const Eigen::Vector3d> points3d,
                                     std::span<const Eigen::Vector2d> points2d) {
    if (points3d.size() != points2d.size())
        throw ValidationError("3D and 2D point lists have different lengths");
    if (points3d.empty())
        throw ValidationError("reprojection needs at least one point");
    ReprojectionStats stats;
    stats.per_point_px.reserve(points3d.size());
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < points3d.size(); ++i) {
        const Eigen::Vector2d proj = cam.project(extrinsic.apply(points3d[i]));
        const double d = (proj - points2d[i]).norm();
        stats.per_point_px.push_back(d);
        sq_sum += d * d;
    }
    stats.rms_px = std::sqrt(sq_sum / static_cast<double>(points3d.size()));
    return stats;
}

ErrorStats compute_stats(std::span<const double> values) {
    ErrorStats s;
    if (values.empty()) return s;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / n;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    s.median = (sorted.size() % 2 == 1)
                   ? sorted[mid]
                   : 0.5 * (sorted[mid - 1] + sorted[mid]);

    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / (n - 1.0));
    }
    return s;
}

// Geodesic angle of a^T b, evaluated through the quaternion form, which is
// accurate near 0 and pi where acos((trace-1)/2) loses digits.
double rotation_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    const Eigen::Quaterniond q(Eigen::Matrix3d(a.transpose() * b));
    const double angle = 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
    return angle * 180.0 / std::numbers::pi;
}

CalibrationReport repeatability(const RigidTransform& initial,
                                std::span<const RigidTransform> samples) {
    if (samples.empty())
        throw ValidationError("repeatability needs at least one sample");
    CalibrationReport report;
    report.extrinsic = initial;
    report.translation_errors_m.reserve(samples.size());
    report.rotation_errors_deg.reserve(samples.size());
    for (const RigidTransform& s : samples) {
        report.translation_errors_m.push_back(
            (s.translation() - initial.translation()).norm());
        report.rotation_errors_deg.push_back(
            rotation_angle_deg(initial.rotation(), s.rotation()));
    }
    report.translation = compute_stats(report.translation_errors_m);
    report.rotation = compute_stats(report.rotation_errors_deg);
    return report;
}

RigidTransform mean_transform(std::span<const RigidTransform> samples) {
    if (samples.empty())
        throw ValidationError("mean of zero transforms is undefined");
    Eigen::Matrix3d rot_sum = Eigen::Matrix3d::Zero();
    Eigen::Vector3d t_sum = Eigen::Vector3d::Zero();
    for (const RigidTransform& s : samples) {
        if (s.from() != samples[0].from() || s.to() != samples[0].to())
            throw FrameMismatchError("cannot average transforms across frames");
        rot_sum += s.rotation();
        t_sum += s.translation();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(
        rot_sum, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
        d(2, 2) = -1.0;
    return {svd.matrixU() * d * svd.matrixV().transpose(),
            t_sum / static_cast<double>(samples.size()), samples[0].from(),
            samples[0].to()};
}

double chi3_mean(double sigma) {
    return sigma * std::sqrt(8.0 / std::numbers::pi);
}

double chi3_median(double sigma) { return sigma * std::sqrt(kChi2Median3); }

double fit_isotropic_sigma(double mean_target, double median_target) {
    if (!(mean_target > 0.0) || !(median_target > 0.0))
        throw ValidationError("error statistics targets must be positive");
    const double c_mean = chi3_mean(1.0);
    const double c_median = chi3_median(1.0);
    // Equalize the relative errors of the two reproduced statistics:
    // c_mean*sigma/mean - 1 = 1 - c_median*sigma/median.
    return 2.0 / (c_mean / mean_target + c_median / median_target);
}

nlohmann::json report_to_json(const CalibrationReport& report) {
    auto stats = [](const ErrorStats& s) {
        return nlohmann::json{
            {"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev}};
    };
    return {{"extrinsic", to_json(report.extrinsic)},
            {"translation_errors_m", report.translation_errors_m},
            {"rotation_errors_deg", report.rotation_errors_deg},
            {"translation_stats", stats(report.translation)},
            {"rotation_stats", stats(report.rotation)}};
}

CalibrationReport report_from_json(const nlohmann::json& j) {
    try {
        CalibrationReport r;
        r.extrinsic = rigid_transform_from_json(j.at("extrinsic"));
        r.translation_errors_m =
            j.at("translation_errors_m").get<std::vector<double>>();
        r.rotation_errors_deg =
            j.at("rotation_errors_deg").get<std::vector<double>>();
        r.translation = compute_stats(r.translation_errors_m);
        r.rotation = compute_stats(r.rotation_errors_deg);
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad calibration report JSON: ") + e.what());
    }
}

std::string report_to_csv(const CalibrationReport& report) {
    std::string out =
        "mean_translation_m,median_translation_m,stddev_translation_m,"
        "mean_rotation_deg,median_rotation_deg,stddev_rotation_deg\n";
    const double vals[] = {report.translation.mean,   report.translation.median,
                           report.translation.stddev, report.rotation.mean,
                           report.rotation.median,    report.rotation.stddev};
    for (int i = 0; i < 6; ++i) {
        out += g17(vals[i]);
        out += (i == 5) ? '\n' : ',';
    }
    return out;
}

std::pair<std::vector<Eigen::Vector3d>, std::vector<Eigen::Vector3d>>
correspondences_from_json(const nlohmann::json& j) {
    try {
        auto parse = [](const nlohmann::json& arr) {
            std::vector<Eigen::Vector3d> pts;
            pts.reserve(arr.size());
            for (const auto& p : arr)
                pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                                 p.at(2).get<double>());
            return pts;
        };
        return {parse(j.at("source")), parse(j.at("target"))};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad correspondences JSON: ") + e.what());
    }
}

nlohmann::json observation_to_json(const MarkerPoseObservation& obs) {
    return {{"pose", to_json(obs.pose)},
            {"timestamp_ms", obs.timestamp_ms},
            {"camera", std::string(frame_name(obs.camera))}};
}

MarkerPoseObservation observation_from_json(const nlohmann::json& j) {
    try {
        MarkerPoseObservation obs;
        obs.pose = rigid_transform_from_json(j.at("pose"));
        obs.timestamp_ms = j.at("timestamp_ms").get<double>();
        obs.camera = frame_from_name(j.at("camera").get<std::string>());
        return obs;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad marker observation JSON: ") + e.what());
    }
}

} // namespace mirage
