#ifndef MIRAGE_PIPELINE_HPP
#define MIRAGE_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mirage/avatar.hpp"
#include "mirage/mirror.hpp"
#include "mirage/sensing.hpp"

namespace mirage {

struct LatencyModel {
    double mean_ms = 20.0;
    double jitter_ms = 0.0;
};

struct NoiseModel {
    double joint_sigma_m = 0.0;        // depth tracker joint noise
    double marker_trans_sigma_m = 0.0; // visor marker detection noise
    double marker_rot_sigma_deg = 0.0;
    double calib_trans_sigma_m = 0.0;  // co-calibration marker noise
    double calib_rot_sigma_deg = 0.0;
};

enum class MirrorPolicy { PerDetection, HoldFirst };

/// Parametric upper-body motion. Arm swing modulates elbow flexion
/// sinusoidally (left by sin, right by cos); sway moves the body laterally.
struct MotionScript {
    Eigen::Vector3d base_position{0.0, 0.95, 1.0}; // HipCenter, world
    double facing_deg = 180.0;                     // yaw about +Y from +Z
    double sway_amplitude_m = 0.0;
    double sway_frequency_hz = 0.25;
    ArmPose left{0.26, 0.0, 0.8};
    ArmPose right{0.26, 0.0, 0.8};
    double arm_swing_deg = 20.0;
    double arm_swing_hz = 0.5;
};

/// Full synthetic ground truth driving one simulated session. The mirror
/// plane, device mounting and HMD trajectory are exact; every observation
/// stream derives from them plus the configured noise.
struct Scenario {
    std::uint64_t seed = 1;
    double duration_s = 10.0;
    double frame_rate_hz = 30.0;

    BodyDimensions body;
    MotionScript motion;

    MirrorPlane mirror{Eigen::Vector3d(0.0, 0.0, 1.0), 0.0, FrameId::World};
    RigidTransform mounting = RigidTransform::from_axis_angle(
        Eigen::Vector3d::UnitX(), 0.05, Eigen::Vector3d(0.0, 0.06, 0.02),
        FrameId::TrackerRgb, FrameId::RenderCam);
    RigidTransform hmd_rgb_to_render =
        RigidTransform::identity(FrameId::HmdRgb, FrameId::RenderCam);
    Eigen::Vector3d eye_offset{0.0, 0.10, 0.04}; // render cam from Head, body frame
    PinholeCamera render_camera{1500.0, 1500.0, 672.0, 378.0, 1344, 756};

    LatencyModel latency;
    NoiseModel noise;

    MirrorPolicy mirror_policy = MirrorPolicy::PerDetection;
    MirrorDetectorConfig mirror_detector;
    double sync_tolerance_ms = 33.0;
    int calib_pair_count = 1;
    int body_fit_frames = 10;

    bool marker_enabled = true;
    int marker_every_n = 1;
    double marker_stop_after_ms = -1.0; // < 0: never stops

    std::optional<IrModel> ir; // reflected-range gating when present
    DepthSensorSpec sensor;

    Eigen::Vector3d board_position{0.6, 1.0, 0.6}; // co-calibration target

    void validate() const; // throws ValidationError
};

Scenario default_scenario();
Scenario scenario_from_json(const nlohmann::json& j);

/// Ground truth evaluators (pure in t).
PoseParams pose_at(const Scenario& sc, double t_ms);
Skeleton ground_truth_skeleton(const Scenario& sc, double t_ms);
/// Joint positions pushed through the true mirror; labels stay anatomical.
Skeleton ground_truth_reflected(const Scenario& sc, double t_ms);
/// World -> RenderCam at time t (the pose a SLAM stack would report).
RigidTransform hmd_pose(const Scenario& sc, double t_ms);

struct TrackedFrame {
    int index = 0;
    double send_ms = 0.0;
    std::optional<Skeleton> skeleton; // TrackerRgb frame, chirality Reflected
    bool head_occluded = false;       // IR saturation verdict for the frame
};

struct CalibrationPair {
    MarkerPoseObservation hmd;
    MarkerPoseObservation tracker;
};

struct ObservationStreams {
    std::vector<TrackedFrame> frames;
    std::vector<MarkerPoseObservation> visor_detections; // HmdRgb frame
    std::vector<CalibrationPair> calibration_pairs;
    std::vector<std::pair<double, RigidTransform>> hmd_poses;
};

/// Reflects the true skeleton through the true plane, expresses it in the
/// tracker frame with tracker-style (inverted) joint labels, applies noise,
/// and drops frames whose subject is out of IR range. Deterministic in the
/// scenario seed.
ObservationStreams synthesize_observations(const Scenario& sc);

struct FrameMessage {
    Skeleton payload;
    double send_ms = 0.0;
    double arrival_ms = 0.0;
    double delay_ms = 0.0; // arrival - send; kept explicit so a constant
                           // configured delay is reported exactly
    int frame_index = 0;
};

/// arrival = send + max(0, mean + jitter draw); arrivals are clamped to be
/// monotone so messages never reorder.
std::vector<FrameMessage> transport(std::span<const TrackedFrame> frames,
                                    const LatencyModel& latency,
                                    std::uint64_t seed);

nlohmann::json frame_message_to_json(const FrameMessage& m);
FrameMessage frame_message_from_json(const nlohmann::json& j);

struct FrameRecord {
    int frame = 0;
    double send_ms = 0.0;
    std::string status; // augmented | fitting | no_mirror | tracking_lost
    std::optional<double> use_ms;
    std::optional<double> age_ms;
    std::optional<double> anchor_error_m;
    std::optional<double> joint_rms_m;
    std::optional<double> image_rms_px;
    std::optional<double> plane_angle_err_deg;
    std::optional<double> plane_offset_err_m;
    std::optional<double> plane_source_ms;
    bool head_occluded = false;
};

struct Aggregate {
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
};

struct OverlayMetrics {
    std::vector<FrameRecord> frames;
    std::string status; // ok | no_mirror | no_augmented
    int total_frames = 0;
    int augmented_frames = 0;
    int fitting_frames = 0;
    int tracking_lost_frames = 0;
    std::optional<Aggregate> anchor_error_m;
    std::optional<Aggregate> joint_rms_m;
    std::optional<Aggregate> image_rms_px;
    std::optional<Aggregate> frame_age_ms;
    std::optional<Aggregate> plane_angle_err_deg;
};

struct Snapshot {
    double requested_ms = 0.0;
    double actual_ms = 0.0;
    std::vector<Eigen::Vector3d> vertices;
};

struct RunOptions {
    std::vector<double> snapshot_times_ms;
};

struct RunResult {
    OverlayMetrics metrics;
    std::vector<Snapshot> snapshots;
    SkinnedMesh posed_mesh_topology; // personalized mesh; triangles for export
};

/// Full augmentation loop: classify scene, estimate the mirror per policy,
/// calibrate the mounting from marker pairs, personalize once from the first
/// stable frames, then retarget/anchor/skin per frame and score the overlay
/// against the ground-truth reflection at use time.
RunResult run_pipeline(const Scenario& sc, const Armature& armature,
                       const SkinnedMesh& mesh, const RunOptions& options = {});

/// Same, with the reference rig built from the scenario body dimensions.
RunResult run_pipeline(const Scenario& sc, const RunOptions& options = {});

std::string metrics_to_csv(const OverlayMetrics& m);
nlohmann::json metrics_summary_json(const OverlayMetrics& m);

/// Writes metrics.csv, summary.json and snapshot_<t>ms.ply files.
void write_report(const RunResult& result, const std::string& out_dir);

} // namespace mirage

#endif
