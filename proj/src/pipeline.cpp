#include "mirage/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "mirage/ply.hpp"
#include "mirage/random.hpp"

namespace mirage {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? g17(*v) : std::string();
}

std::optional<Aggregate> make_aggregate(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    const ErrorStats s = compute_stats(values);
    return Aggregate{s.mean, s.median,
                     *std::max_element(values.begin(), values.end())};
}

nlohmann::json aggregate_json(const std::optional<Aggregate>& a) {
    if (!a) return nullptr;
    return {{"mean", a->mean}, {"median", a->median}, {"max", a->max}};
}

Eigen::Vector3d vec3_from_json(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

ArmPose arm_pose_from_json(const nlohmann::json& j, const ArmPose& base) {
    ArmPose p = base;
    if (j.contains("shoulder_abduction_deg"))
        p.shoulder_abduction = j["shoulder_abduction_deg"].get<double>() * kDegToRad;
    if (j.contains("shoulder_flexion_deg"))
        p.shoulder_flexion = j["shoulder_flexion_deg"].get<double>() * kDegToRad;
    if (j.contains("elbow_flexion_deg"))
        p.elbow_flexion = j["elbow_flexion_deg"].get<double>() * kDegToRad;
    return p;
}

} // namespace

void Scenario::validate() const {
    if (!(duration_s > 0.0)) throw ValidationError("scenario duration must be positive");
    if (!(frame_rate_hz > 0.0)) throw ValidationError("frame rate must be positive");
    if (latency.mean_ms < 0.0 || latency.jitter_ms < 0.0)
        throw ValidationError("latency parameters must be nonnegative");
    if (std::abs(mirror.normal.squaredNorm() - 1.0) > 1e-9)
        throw ValidationError("scenario mirror normal must be unit length");
    const double sigmas[] = {noise.joint_sigma_m, noise.marker_trans_sigma_m,
                             noise.marker_rot_sigma_deg, noise.calib_trans_sigma_m,
                             noise.calib_rot_sigma_deg};
    for (double s : sigmas)
        if (s < 0.0) throw ValidationError("noise sigmas must be nonnegative");
    if (body_fit_frames < 1)
        throw ValidationError("body fit needs at least one frame");
    if (calib_pair_count < 1)
        throw ValidationError("calibration needs at least one observation pair");
    if (marker_every_n < 1)
        throw ValidationError("marker cadence must be at least 1");
    body.validate();
    sensor.validate();
    if (ir) ir->validate();
}

Scenario default_scenario() { return Scenario{}; }

Scenario scenario_from_json(const nlohmann::json& j) {
    try {
        Scenario sc;
        if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("duration_s")) sc.duration_s = j["duration_s"].get<double>();
        if (j.contains("frame_rate_hz"))
            sc.frame_rate_hz = j["frame_rate_hz"].get<double>();

        if (j.contains("body")) {
            const auto& b = j["body"];
            auto field = [&](const char* key, double& out) {
                if (b.contains(key)) out = b[key].get<double>();
            };
            field("shoulder_width", sc.body.shoulder_width);
            field("torso_height", sc.body.torso_height);
            field("neck_length", sc.body.neck_length);
            field("spine_ratio", sc.body.spine_ratio);
            field("upper_arm_length", sc.body.upper_arm_length);
            field("forearm_length", sc.body.forearm_length);
            field("hand_length", sc.body.hand_length);
            field("hip_width", sc.body.hip_width);
            field("thigh_length", sc.body.thigh_length);
            field("shin_length", sc.body.shin_length);
            field("foot_length", sc.body.foot_length);
        }

        if (j.contains("motion")) {
            const auto& m = j["motion"];
            if (m.contains("base_position"))
                sc.motion.base_position = vec3_from_json(m["base_position"]);
            if (m.contains("facing_deg"))
                sc.motion.facing_deg = m["facing_deg"].get<double>();
            if (m.contains("sway_amplitude_m"))
                sc.motion.sway_amplitude_m = m["sway_amplitude_m"].get<double>();
            if (m.contains("sway_frequency_hz"))
                sc.motion.sway_frequency_hz = m["sway_frequency_hz"].get<double>();
            if (m.contains("left_arm"))
                sc.motion.left = arm_pose_from_json(m["left_arm"], sc.motion.left);
            if (m.contains("right_arm"))
                sc.motion.right = arm_pose_from_json(m["right_arm"], sc.motion.right);
            if (m.contains("arm_swing_deg"))
                sc.motion.arm_swing_deg = m["arm_swing_deg"].get<double>();
            if (m.contains("arm_swing_hz"))
                sc.motion.arm_swing_hz = m["arm_swing_hz"].get<double>();
        }

        if (j.contains("mirror")) {
            const auto& m = j["mirror"];
            Eigen::Vector3d n = vec3_from_json(m.at("normal"));
            if (n.norm() < 1e-12)
                throw ValidationError("mirror normal must be nonzero");
            sc.mirror.normal = n.normalized();
            sc.mirror.offset = m.at("offset_m").get<double>();
            sc.mirror.frame = FrameId::World;
        }

        if (j.contains("mounting"))
            sc.mounting = rigid_transform_from_json(j["mounting"]);
        if (j.contains("hmd_rgb_to_render"))
            sc.hmd_rgb_to_render = rigid_transform_from_json(j["hmd_rgb_to_render"]);
        if (j.contains("eye_offset")) sc.eye_offset = vec3_from_json(j["eye_offset"]);

        if (j.contains("render_camera")) {
            const auto& c = j["render_camera"];
            sc.render_camera = PinholeCamera(
                c.at("fx").get<double>(), c.at("fy").get<double>(),
                c.at("cx").get<double>(), c.at("cy").get<double>(),
                c.at("width").get<int>(), c.at("height").get<int>());
        }

        if (j.contains("latency")) {
            const auto& l = j["latency"];
            if (l.contains("mean_ms")) sc.latency.mean_ms = l["mean_ms"].get<double>();
            if (l.contains("jitter_ms"))
                sc.latency.jitter_ms = l["jitter_ms"].get<double>();
        }

        if (j.contains("noise")) {
            const auto& n = j["noise"];
            auto field = [&](const char* key, double& out) {
                if (n.contains(key)) out = n[key].get<double>();
            };
            field("joint_sigma_m", sc.noise.joint_sigma_m);
            field("marker_trans_sigma_m", sc.noise.marker_trans_sigma_m);
            field("marker_rot_sigma_deg", sc.noise.marker_rot_sigma_deg);
            field("calib_trans_sigma_m", sc.noise.calib_trans_sigma_m);
            field("calib_rot_sigma_deg", sc.noise.calib_rot_sigma_deg);
        }

        if (j.contains("mirror_policy")) {
            const std::string p = j["mirror_policy"].get<std::string>();
            if (p == "per_detection") sc.mirror_policy = MirrorPolicy::PerDetection;
            else if (p == "hold_first") sc.mirror_policy = MirrorPolicy::HoldFirst;
            else throw ParseError("unknown mirror policy: " + p);
        }

        if (j.contains("mirror_detector")) {
            const auto& d = j["mirror_detector"];
            if (d.contains("min_range_m"))
                sc.mirror_detector.min_range_m = d["min_range_m"].get<double>();
            if (d.contains("staleness_ms"))
                sc.mirror_detector.staleness_ms = d["staleness_ms"].get<double>();
            if (d.contains("marker_offset"))
                sc.mirror_detector.marker_offset = vec3_from_json(d["marker_offset"]);
        }

        if (j.contains("sync_tolerance_ms"))
            sc.sync_tolerance_ms = j["sync_tolerance_ms"].get<double>();
        if (j.contains("calib_pair_count"))
            sc.calib_pair_count = j["calib_pair_count"].get<int>();
        if (j.contains("body_fit_frames"))
            sc.body_fit_frames = j["body_fit_frames"].get<int>();

        if (j.contains("marker")) {
            const auto& m = j["marker"];
            if (m.contains("enabled")) sc.marker_enabled = m["enabled"].get<bool>();
            if (m.contains("every_n")) sc.marker_every_n = m["every_n"].get<int>();
            if (m.contains("stop_after_ms") && !m["stop_after_ms"].is_null())
                sc.marker_stop_after_ms = m["stop_after_ms"].get<double>();
        }

        if (j.contains("ir")) {
            if (j["ir"].is_null()) sc.ir.reset();
            else sc.ir = ir_model_from_json(j["ir"]);
        }

        if (j.contains("sensor")) {
            const auto& s = j["sensor"];
            if (s.contains("width")) sc.sensor.width = s["width"].get<int>();
            if (s.contains("height")) sc.sensor.height = s["height"].get<int>();
            if (s.contains("frame_rate_hz"))
                sc.sensor.frame_rate_hz = s["frame_rate_hz"].get<double>();
            if (s.contains("head_saturation"))
                sc.sensor.head_saturation = s["head_saturation"].get<bool>();
        }

        if (j.contains("board_position"))
            sc.board_position = vec3_from_json(j["board_position"]);

        sc.validate();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad scenario JSON: ") + e.what());
    }
}

PoseParams pose_at(const Scenario& sc, double t_ms) {
    const double t = t_ms / 1000.0;
    const MotionScript& m = sc.motion;

    Eigen::Vector3d pos = m.base_position;
    pos.x() += m.sway_amplitude_m *
               std::sin(2.0 * std::numbers::pi * m.sway_frequency_hz * t);

    PoseParams pose;
    pose.torso = RigidTransform::from_axis_angle(
        Eigen::Vector3d::UnitY(), m.facing_deg * kDegToRad, pos, FrameId::Object,
        FrameId::World);

    const double swing = m.arm_swing_deg * kDegToRad;
    const double phase = 2.0 * std::numbers::pi * m.arm_swing_hz * t;
    pose.left = m.left;
    pose.right = m.right;
    pose.left.elbow_flexion += swing * std::sin(phase);
    pose.right.elbow_flexion += swing * std::cos(phase);
    return pose;
}

Skeleton ground_truth_skeleton(const Scenario& sc, double t_ms) {
    return synth_skeleton(pose_at(sc, t_ms), sc.body, t_ms);
}

Skeleton ground_truth_reflected(const Scenario& sc, double t_ms) {
    return reflect_skeleton(ground_truth_skeleton(sc, t_ms),
                            reflection_about(sc.mirror));
}

RigidTransform hmd_pose(const Scenario& sc, double t_ms) {
    const PoseParams pose = pose_at(sc, t_ms);
    const Skeleton gt = synth_skeleton(pose, sc.body, t_ms);

    const Eigen::Vector3d cam_pos =
        gt[JointId::Head] + pose.torso.rotation() * sc.eye_offset;
    // Optical axis along the chest-forward direction, image y down.
    const Eigen::Vector3d forward = pose.torso.rotation() * Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d down(0.0, -1.0, 0.0);
    Eigen::Matrix3d cam_to_world;
    cam_to_world.col(2) = forward;
    cam_to_world.col(1) = down;
    cam_to_world.col(0) = down.cross(forward);
    const RigidTransform cam(cam_to_world, cam_pos, FrameId::RenderCam,
                             FrameId::World);
    return invert(cam);
}

ObservationStreams synthesize_observations(const Scenario& sc) {
    sc.validate();
    ObservationStreams streams;
    const int frame_count =
        static_cast<int>(std::llround(sc.duration_s * sc.frame_rate_hz));
    const double period_ms = 1000.0 / sc.frame_rate_hz;

    DepthSensorSpec noisy_sensor = sc.sensor;
    noisy_sensor.joint_sigma_m = sc.noise.joint_sigma_m;

    const RigidTransform board_to_world(
        Eigen::Matrix3d::Identity(), sc.board_position, FrameId::MarkerBoard,
        FrameId::World);

    for (int k = 0; k < frame_count; ++k) {
        const double t = static_cast<double>(k) * period_ms;
        const RigidTransform world_to_cam = hmd_pose(sc, t);
        streams.hmd_poses.emplace_back(t, world_to_cam);

        const RigidTransform world_to_tracker =
            compose(invert(sc.mounting), world_to_cam);
        const RigidTransform world_to_hmd_rgb =
            compose(invert(sc.hmd_rgb_to_render), world_to_cam);

        // Skeleton stream (tracker frame, labels inverted by the mirror).
        Skeleton reflected_world = ground_truth_reflected(sc, t);
        Skeleton in_tracker = transform_skeleton(reflected_world, world_to_tracker);
        bool lost = false;
        if (sc.ir) {
            const double range = in_tracker[JointId::ShoulderCenter].norm();
            lost = range > max_tracking_distance(*sc.ir, true);
        }
        if (lost) {
            streams.frames.push_back({k, t, std::nullopt, false});
        } else {
            Skeleton observed = swap_chirality(in_tracker);
            observed.timestamp_ms = t;
            PerturbedSample sample = sample_skeleton(
                observed, noisy_sensor,
                derive_seed(sc.seed, "joints", static_cast<std::uint64_t>(k)));
            streams.frames.push_back(
                {k, t, std::move(sample.skeleton), sample.head_occluded});
        }

        // Visor marker stream: the camera sees its own marker in the mirror.
        const bool marker_due =
            sc.marker_enabled && (k % sc.marker_every_n == 0) &&
            (sc.marker_stop_after_ms < 0.0 || t <= sc.marker_stop_after_ms);
        if (marker_due) {
            const MirrorPlane plane_h = transform_plane(sc.mirror, world_to_hmd_rgb);
            const ReflectionTransform refl_h = reflection_about(plane_h);
            Eigen::Vector3d center = refl_h.apply(sc.mirror_detector.marker_offset);
            Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
            if (sc.noise.marker_trans_sigma_m > 0.0 ||
                sc.noise.marker_rot_sigma_deg > 0.0) {
                Rng rng(derive_seed(sc.seed, "marker",
                                    static_cast<std::uint64_t>(k)));
                center += rng.normal3(sc.noise.marker_trans_sigma_m);
                rot = rng.rotation_perturbation(sc.noise.marker_rot_sigma_deg *
                                                kDegToRad);
            }
            MarkerPoseObservation obs;
            obs.pose = RigidTransform(rot, center, FrameId::MarkerBoard,
                                      FrameId::HmdRgb);
            obs.timestamp_ms = t;
            obs.camera = FrameId::HmdRgb;
            streams.visor_detections.push_back(std::move(obs));
        }

        // Co-calibration pairs from the first frames.
        if (k < sc.calib_pair_count) {
            Rng rng(derive_seed(sc.seed, "calib", static_cast<std::uint64_t>(k)));
            auto observe = [&](const RigidTransform& world_to_camera,
                               FrameId camera) {
                RigidTransform exact = compose(world_to_camera, board_to_world);
                Eigen::Matrix3d rot = exact.rotation();
                Eigen::Vector3d trans = exact.translation();
                if (sc.noise.calib_rot_sigma_deg > 0.0)
                    rot = rng.rotation_perturbation(sc.noise.calib_rot_sigma_deg *
                                                    kDegToRad) *
                          rot;
                if (sc.noise.calib_trans_sigma_m > 0.0)
                    trans += rng.normal3(sc.noise.calib_trans_sigma_m);
                MarkerPoseObservation obs;
                obs.pose = RigidTransform(rot, trans, FrameId::MarkerBoard, camera);
                obs.timestamp_ms = t;
                obs.camera = camera;
                return obs;
            };
            streams.calibration_pairs.push_back(
                {observe(world_to_hmd_rgb, FrameId::HmdRgb),
                 observe(world_to_tracker, FrameId::TrackerRgb)});
        }
    }
    return streams;
}

std::vector<FrameMessage> transport(std::span<const TrackedFrame> frames,
                                    const LatencyModel& latency,
                                    std::uint64_t seed) {
    if (latency.mean_ms < 0.0 || latency.jitter_ms < 0.0)
        throw ValidationError("latency parameters must be nonnegative");
    Rng rng(seed);
    std::vector<FrameMessage> messages;
    double prev_arrival = -std::numeric_limits<double>::infinity();
    for (const TrackedFrame& f : frames) {
        if (!f.skeleton) continue;
        double delay = latency.mean_ms;
        if (latency.jitter_ms > 0.0) delay += rng.normal(latency.jitter_ms);
        delay = std::max(0.0, delay);
        double arrival = f.send_ms + delay;
        if (arrival < prev_arrival) { // keep arrivals monotone
            arrival = prev_arrival;
            delay = arrival - f.send_ms;
        }
        prev_arrival = arrival;
        messages.push_back({*f.skeleton, f.send_ms, arrival, delay, f.index});
    }
    return messages;
}

nlohmann::json frame_message_to_json(const FrameMessage& m) {
    return {{"payload", skeleton_to_json(m.payload)},
            {"send_ms", m.send_ms},
            {"arrival_ms", m.arrival_ms},
            {"frame_index", m.frame_index}};
}

FrameMessage frame_message_from_json(const nlohmann::json& j) {
    try {
        FrameMessage m;
        m.payload = skeleton_from_json(j.at("payload"));
        m.send_ms = j.at("send_ms").get<double>();
        m.arrival_ms = j.at("arrival_ms").get<double>();
        m.frame_index = j.value("frame_index", 0);
        if (m.arrival_ms < m.send_ms)
            throw ValidationError("frame message arrives before it is sent");
        m.delay_ms = m.arrival_ms - m.send_ms;
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad frame message JSON: ") + e.what());
    }
}

namespace {

struct ArmRollState {
    std::optional<Eigen::Vector3d> left;
    std::optional<Eigen::Vector3d> right;
};

RollTargets compute_rolls(const Skeleton& s, ArmRollState& state) {
    RollTargets rolls;
    auto arm = [&](JointId shoulder, JointId elbow, JointId wrist,
                   std::optional<Eigen::Vector3d>& held, const char* upper_bone,
                   const char* fore_bone) {
        const Eigen::Vector3d upper = s[elbow] - s[shoulder];
        const Eigen::Vector3d fore = s[wrist] - s[elbow];
        const Eigen::Vector3d toward_torso =
            (s[JointId::ShoulderCenter] - s[shoulder]).normalized();
        std::optional<Eigen::Vector3d> axis;
        try {
            axis = arm_roll_axis(upper, fore, toward_torso);
            held = axis;
        } catch (const DegeneratePoseError&) {
            axis = held; // straight arm: hold the previous roll
        }
        if (axis) {
            rolls.axis_by_bone[upper_bone] = *axis;
            rolls.axis_by_bone[fore_bone] = *axis;
        }
    };
    arm(JointId::ShoulderLeft, JointId::ElbowLeft, JointId::WristLeft,
        state.left, "upper_arm_l", "forearm_l");
    arm(JointId::ShoulderRight, JointId::ElbowRight, JointId::WristRight,
        state.right, "upper_arm_r", "forearm_r");
    return rolls;
}

} // namespace

RunResult run_pipeline(const Scenario& sc, const Armature& armature,
                       const SkinnedMesh& mesh, const RunOptions& options) {
    sc.validate();
    try {
        mesh.validate(armature.bones().size());
    } catch (const Error& e) {
        throw PipelineError(std::string("rig rejected: ") + e.what());
    }

    const ObservationStreams streams = synthesize_observations(sc);
    const std::vector<FrameMessage> messages =
        transport(streams.frames, sc.latency, derive_seed(sc.seed, "transport"));

    // Mounting calibration from the recorded marker pairs.
    RigidTransform mounting_est;
    try {
        if (streams.calibration_pairs.empty())
            throw DegenerateConfigurationError("no calibration pairs recorded");
        std::vector<RigidTransform> estimates;
        estimates.reserve(streams.calibration_pairs.size());
        for (const CalibrationPair& pair : streams.calibration_pairs)
            estimates.push_back(
                marker_extrinsic(pair.hmd, pair.tracker, sc.sync_tolerance_ms));
        mounting_est =
            compose(sc.hmd_rgb_to_render, mean_transform(estimates));
    } catch (const Error& e) {
        throw PipelineError(std::string("mounting calibration failed: ") +
                            e.what());
    }

    OverlayMetrics metrics;
    metrics.total_frames = static_cast<int>(streams.frames.size());
    metrics.frames.reserve(streams.frames.size());
    for (const TrackedFrame& f : streams.frames) {
        FrameRecord rec;
        rec.frame = f.index;
        rec.send_ms = f.send_ms;
        rec.status = f.skeleton ? "no_mirror" : "tracking_lost";
        rec.head_occluded = f.head_occluded;
        if (!f.skeleton) ++metrics.tracking_lost_frames;
        metrics.frames.push_back(std::move(rec));
    }

    // Personalization state.
    bool fitted = false;
    int fit_count = 0;
    double fit_shoulder_sum = 0.0, fit_torso_sum = 0.0;
    std::optional<Armature> fitted_armature;
    std::optional<SkinnedMesh> fitted_mesh;

    std::optional<MirrorEstimate> held_estimate;
    ArmRollState roll_state;
    bool any_reflected = false;

    struct SnapshotSlot {
        double requested_ms;
        double best_gap = std::numeric_limits<double>::infinity();
        Snapshot snap;
    };
    std::vector<SnapshotSlot> snapshot_slots;
    for (double t : options.snapshot_times_ms)
        snapshot_slots.push_back({t, std::numeric_limits<double>::infinity(),
                                  {t, 0.0, {}}});

    std::vector<double> anchor_errors, joint_rmses, image_rmses, ages,
        plane_angles;

    std::size_t detection_cursor = 0;
    std::vector<MarkerPoseObservation> seen_detections;
    seen_detections.reserve(streams.visor_detections.size());

    for (const FrameMessage& msg : messages) {
        const double use_ms = msg.arrival_ms;
        FrameRecord& rec = metrics.frames[static_cast<std::size_t>(msg.frame_index)];
        rec.use_ms = use_ms;
        rec.age_ms = msg.delay_ms;
        ages.push_back(msg.delay_ms);

        while (detection_cursor < streams.visor_detections.size() &&
               streams.visor_detections[detection_cursor].timestamp_ms <= use_ms)
            seen_detections.push_back(streams.visor_detections[detection_cursor++]);

        std::optional<MirrorEstimate> estimate;
        if (sc.mirror_policy == MirrorPolicy::HoldFirst && held_estimate) {
            estimate = held_estimate;
        } else {
            SceneClassification c =
                classify_scene(seen_detections, use_ms, sc.mirror_detector);
            if (c.kind == SceneKind::ReflectedScene) {
                estimate = c.evidence;
                if (!held_estimate) held_estimate = c.evidence;
            }
        }
        if (!estimate) {
            rec.status = "no_mirror";
            continue;
        }
        any_reflected = true;

        // Plane quality, judged against the true plane at detection time.
        {
            const double t_det = estimate->source.timestamp_ms;
            const MirrorPlane true_plane = transform_plane(
                sc.mirror,
                compose(invert(sc.hmd_rgb_to_render), hmd_pose(sc, t_det)));
            Eigen::Vector3d n_true = true_plane.normal;
            double d_true = true_plane.offset;
            if (n_true.dot(estimate->plane.normal) < 0.0) {
                n_true = -n_true;
                d_true = -d_true;
            }
            const double cosang =
                std::clamp(n_true.dot(estimate->plane.normal), -1.0, 1.0);
            rec.plane_angle_err_deg = std::acos(cosang) / kDegToRad;
            rec.plane_offset_err_m = std::abs(estimate->plane.offset - d_true);
            rec.plane_source_ms = t_det;
        }

        // Labels back to anatomical, positions into the render frame, then
        // into the world with the HMD pose at use time.
        const Skeleton corrected = swap_chirality(msg.payload);
        const Skeleton in_render = transform_skeleton(corrected, mounting_est);
        const Skeleton used_world =
            transform_skeleton(in_render, invert(hmd_pose(sc, use_ms)));

        if (!fitted) {
            const BodyMeasurements m = measure_body(corrected);
            fit_shoulder_sum += m.shoulder_distance;
            fit_torso_sum += m.torso_height;
            ++fit_count;
            rec.status = "fitting";
            ++metrics.fitting_frames;
            if (fit_count >= sc.body_fit_frames) {
                const BodyMeasurements avg{fit_shoulder_sum / fit_count,
                                           fit_torso_sum / fit_count};
                try {
                    auto [pa, pm] = personalize(armature, mesh, avg);
                    fitted_armature = std::move(pa);
                    fitted_mesh = std::move(pm);
                } catch (const Error& e) {
                    throw PipelineError(std::string("personalization failed: ") +
                                        e.what());
                }
                fitted = true;
            }
            continue;
        }

        const RollTargets rolls = compute_rolls(used_world, roll_state);
        const PosedArmature posed = retarget(*fitted_armature, used_world, rolls);
        const RigidTransform anchor_shift =
            anchor(posed, *fitted_armature, used_world);
        PosedArmature placed;
        placed.bone_transforms.reserve(posed.bone_transforms.size());
        for (const RigidTransform& t : posed.bone_transforms)
            placed.bone_transforms.push_back(compose(anchor_shift, t));

        const Skeleton target = ground_truth_reflected(sc, use_ms);
        const RigidTransform world_to_cam = hmd_pose(sc, use_ms);

        const auto anchor_pos = posed_joint_position(
            *fitted_armature, placed, fitted_armature->anchor_joint());
        rec.anchor_error_m =
            (*anchor_pos - target[fitted_armature->anchor_joint()]).norm();

        double sq_sum = 0.0;
        int joint_count = 0;
        double px_sq_sum = 0.0;
        int px_count = 0;
        for (JointId id : fitted_armature->mapped_joints()) {
            const auto pos = posed_joint_position(*fitted_armature, placed, id);
            if (!pos) continue;
            sq_sum += (*pos - target[id]).squaredNorm();
            ++joint_count;
            const Eigen::Vector3d cam_model = world_to_cam.apply(*pos);
            const Eigen::Vector3d cam_target = world_to_cam.apply(target[id]);
            if (cam_model.z() > 0.0 && cam_target.z() > 0.0) {
                const Eigen::Vector2d a = sc.render_camera.project(cam_model);
                const Eigen::Vector2d b = sc.render_camera.project(cam_target);
                px_sq_sum += (a - b).squaredNorm();
                ++px_count;
            }
        }
        rec.joint_rms_m = std::sqrt(sq_sum / std::max(joint_count, 1));
        if (px_count > 0)
            rec.image_rms_px = std::sqrt(px_sq_sum / px_count);

        // The deformed surface is what the display would render; snapshots
        // capture the frame closest to each requested time.
        const std::vector<Eigen::Vector3d> surface = skin(*fitted_mesh, placed);
        for (SnapshotSlot& slot : snapshot_slots) {
            const double gap = std::abs(use_ms - slot.requested_ms);
            if (gap < slot.best_gap) {
                slot.best_gap = gap;
                slot.snap.actual_ms = use_ms;
                slot.snap.vertices = surface;
            }
        }

        rec.status = "augmented";
        ++metrics.augmented_frames;
        anchor_errors.push_back(*rec.anchor_error_m);
        joint_rmses.push_back(*rec.joint_rms_m);
        if (rec.image_rms_px) image_rmses.push_back(*rec.image_rms_px);
        plane_angles.push_back(*rec.plane_angle_err_deg);
    }

    metrics.anchor_error_m = make_aggregate(anchor_errors);
    metrics.joint_rms_m = make_aggregate(joint_rmses);
    metrics.image_rms_px = make_aggregate(image_rmses);
    metrics.frame_age_ms = make_aggregate(ages);
    metrics.plane_angle_err_deg = make_aggregate(plane_angles);
    if (metrics.augmented_frames > 0)
        metrics.status = "ok";
    else if (!any_reflected)
        metrics.status = "no_mirror";
    else
        metrics.status = "no_augmented";

    RunResult result;
    result.metrics = std::move(metrics);
    result.posed_mesh_topology = fitted_mesh ? *fitted_mesh : mesh;
    for (SnapshotSlot& slot : snapshot_slots)
        if (!slot.snap.vertices.empty())
            result.snapshots.push_back(std::move(slot.snap));
    return result;
}

RunResult run_pipeline(const Scenario& sc, const RunOptions& options) {
    auto [armature, mesh] = build_reference_rig({sc.body, 12, 6});
    return run_pipeline(sc, armature, mesh, options);
}

std::string metrics_to_csv(const OverlayMetrics& m) {
    std::string out =
        "frame,send_ms,status,use_ms,age_ms,anchor_error_m,joint_rms_m,"
        "image_rms_px,plane_angle_err_deg,plane_offset_err_m,plane_source_ms,"
        "head_occluded\n";
    for (const FrameRecord& r : m.frames) {
        out += std::to_string(r.frame);
        out += ',';
        out += g17(r.send_ms);
        out += ',';
        out += r.status;
        out += ',';
        out += opt_field(r.use_ms);
        out += ',';
        out += opt_field(r.age_ms);
        out += ',';
        out += opt_field(r.anchor_error_m);
        out += ',';
        out += opt_field(r.joint_rms_m);
        out += ',';
        out += opt_field(r.image_rms_px);
        out += ',';
        out += opt_field(r.plane_angle_err_deg);
        out += ',';
        out += opt_field(r.plane_offset_err_m);
        out += ',';
        out += opt_field(r.plane_source_ms);
        out += ',';
        out += r.head_occluded ? '1' : '0';
        out += '\n';
    }
    return out;
}

nlohmann::json metrics_summary_json(const OverlayMetrics& m) {
    return {{"status", m.status},
            {"total_frames", m.total_frames},
            {"augmented_frames", m.augmented_frames},
            {"fitting_frames", m.fitting_frames},
            {"tracking_lost_frames", m.tracking_lost_frames},
            {"anchor_error_m", aggregate_json(m.anchor_error_m)},
            {"joint_rms_m", aggregate_json(m.joint_rms_m)},
            {"image_rms_px", aggregate_json(m.image_rms_px)},
            {"frame_age_ms", aggregate_json(m.frame_age_ms)},
            {"plane_angle_err_deg", aggregate_json(m.plane_angle_err_deg)}};
}

void write_report(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    {
        std::ofstream csv(out_dir + "/metrics.csv");
        if (!csv) throw IoError("cannot write " + out_dir + "/metrics.csv");
        csv << metrics_to_csv(result.metrics);
    }
    {
        std::ofstream js(out_dir + "/summary.json");
        if (!js) throw IoError("cannot write " + out_dir + "/summary.json");
        js << metrics_summary_json(result.metrics).dump(2) << '\n';
    }
    for (const Snapshot& snap : result.snapshots) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%gms.ply", snap.requested_ms);
        save_ply(out_dir + "/" + name, snap.vertices,
                 result.posed_mesh_topology.triangles);
    }
}

} // namespace mirage
