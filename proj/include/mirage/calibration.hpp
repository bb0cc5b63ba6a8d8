#ifndef MIRAGE_CALIBRATION_HPP
#define MIRAGE_CALIBRATION_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mirage/geometry.hpp"

namespace mirage {

/// Ideal pinhole camera, no lens distortion. Pixel units.
struct PinholeCamera {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;

    PinholeCamera() = default;
    PinholeCamera(double fx, double fy, double cx, double cy, int width,
                  int height);

    /// Projects a camera-frame point; throws ProjectionDomainError when the
    /// point is at or behind the camera plane.
    Eigen::Vector2d project(const Eigen::Vector3d& p_cam) const;
};

/// A marker detection: pose of the marker board in the observing camera.
struct MarkerPoseObservation {
    RigidTransform pose =
        RigidTransform::identity(FrameId::MarkerBoard, FrameId::HmdRgb);
    double timestamp_ms = 0.0;
    FrameId camera = FrameId::HmdRgb;
};

/// Planar calibration target described by its inner-corner grid.
struct Checkerboard {
    int cols = 12;
    int rows = 7;
    double square_m = 0.045;

    Checkerboard() = default;
    Checkerboard(int cols, int rows, double square_m);

    /// Inner corners in the board frame (z = 0), row-major.
    std::vector<Eigen::Vector3d> corners() const;
};

/// Closed-form least-squares rigid alignment (SVD, reflection-guarded):
/// minimizes sum |R s_i + t - t_i|^2 over rotations with det +1.
/// Throws DegenerateConfigurationError for fewer than 3 correspondences,
/// mismatched lengths, or a collinear source set.
RigidTransform rigid_register(std::span<const Eigen::Vector3d> source,
                              std::span<const Eigen::Vector3d> target,
                              FrameId from = FrameId::Object,
                              FrameId to = FrameId::Object);

/// Extrinsic between two cameras watching the same board:
/// invert(hmd_to_board) o tracker_to_board. Both inputs must map into the
/// same board frame.
RigidTransform marker_extrinsic(const RigidTransform& hmd_to_board,
                                const RigidTransform& tracker_to_board);

/// Observation-level variant: checks the timestamp gap against the sync
/// tolerance (default one tracker frame at 30 Hz), then applies the formula
/// to the inverted marker poses. Throws DesynchronizationError when stale.
RigidTransform marker_extrinsic(const MarkerPoseObservation& hmd,
                                const MarkerPoseObservation& tracker,
                                double sync_tolerance_ms = 33.0);

struct ReprojectionStats {
    double rms_px = 0.0;
    std::vector<double> per_point_px;
};

/// Pixel distance between projected model points and observations.
/// extrinsic maps the points' frame into the camera frame.
ReprojectionStats reprojection_error(const PinholeCamera& cam,
                                     const RigidTransform& extrinsic,
                                     std::span<const Eigen::Vector3d> points3d,
                                     std::span<const Eigen::Vector2d> points2d);

struct ErrorStats {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0; // sample standard deviation, 0 for fewer than 2 values
};

ErrorStats compute_stats(std::span<const double> values);

/// Geodesic angle between two rotations, degrees.
double rotation_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

struct CalibrationReport {
    RigidTransform extrinsic; // the initial calibration
    std::vector<double> translation_errors_m;
    std::vector<double> rotation_errors_deg;
    ErrorStats translation;
    ErrorStats rotation;
};

/// Per-sample deviation from the initial calibration: Euclidean translation
/// distance and geodesic rotation angle, with mean/median/stddev of each.
CalibrationReport repeatability(const RigidTransform& initial,
                                std::span<const RigidTransform> samples);

/// Chordal mean of rigid transforms (translations averaged, rotation sum
/// projected back to SO(3)). All inputs must share the same frame pair.
RigidTransform mean_transform(std::span<const RigidTransform> samples);

/// Scale of an isotropic Gaussian error vector whose magnitude statistics
/// (chi distribution, 3 dof) best compromise between a target mean and a
/// target median: the two relative errors come out equal and opposite.
double fit_isotropic_sigma(double mean_target, double median_target);

/// Magnitude statistics of an isotropic 3D Gaussian with scale sigma.
double chi3_mean(double sigma);
double chi3_median(double sigma);

nlohmann::json report_to_json(const CalibrationReport& report);
CalibrationReport report_from_json(const nlohmann::json& j);

/// Two-line CSV (header + one row): mean/median/stddev for translation
/// (meters) and rotation (degrees).
std::string report_to_csv(const CalibrationReport& report);

/// Correspondence sets: {"source": [[x,y,z],...], "target": [[x,y,z],...]}.
std::pair<std::vector<Eigen::Vector3d>, std::vector<Eigen::Vector3d>>
correspondences_from_json(const nlohmann::json& j);

nlohmann::json observation_to_json(const MarkerPoseObservation& obs);
MarkerPoseObservation observation_from_json(const nlohmann::json& j);

} // namespace mirage

#endif
