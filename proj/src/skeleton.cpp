#include "mirage/skeleton.hpp"

#include <cmath>

namespace mirage {

namespace {

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "HipCenter",  "Spine",      "ShoulderCenter", "Head",
    "ShoulderLeft", "ShoulderRight", "ElbowLeft",  "ElbowRight",
    "WristLeft",  "WristRight", "HandLeft",       "HandRight",
    "HipLeft",    "HipRight",   "KneeLeft",       "KneeRight",
    "AnkleLeft",  "AnkleRight", "FootLeft",       "FootRight",
};

Eigen::Matrix3d rot_x(double a) {
    return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix();
}
Eigen::Matrix3d rot_z(double a) {
    return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

} // namespace

std::string_view joint_name(JointId id) {
    return kJointNames[static_cast<std::size_t>(id)];
}

JointId joint_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kJointNames.size(); ++i) {
        if (kJointNames[i] == name) return static_cast<JointId>(i);
    }
    throw ParseError("unknown joint label: " + std::string(name));
}

bool is_central_joint(JointId id) {
    return static_cast<int>(id) < 4;
}

JointId mirror_joint(JointId id) {
    const int i = static_cast<int>(id);
    if (i < 4) return id;
    // Left/right pairs are adjacent in the enum, left first.
    return static_cast<JointId>((i % 2 == 0) ? i + 1 : i - 1);
}

std::string_view chirality_name(Chirality c) {
    return c == Chirality::Real ? "Real" : "Reflected";
}

Chirality chirality_from_name(std::string_view name) {
    if (name == "Real") return Chirality::Real;
    if (name == "Reflected") return Chirality::Reflected;
    throw ParseError("unknown chirality label: " + std::string(name));
}

void Skeleton::validate() const {
    for (int i = 0; i < kJointCount; ++i) {
        if (!joints[static_cast<std::size_t>(i)].allFinite())
            throw ValidationError(
                "skeleton joint " +
                std::string(joint_name(static_cast<JointId>(i))) +
                " has non-finite coordinates");
    }
    if (!std::isfinite(timestamp_ms))
        throw ValidationError("skeleton timestamp is non-finite");
}

Skeleton swap_chirality(const Skeleton& s) {
    Skeleton out = s;
    for (int i = 0; i < kJointCount; ++i) {
        const auto id = static_cast<JointId>(i);
        out[id] = s[mirror_joint(id)];
    }
    out.chirality =
        s.chirality == Chirality::Real ? Chirality::Reflected : Chirality::Real;
    return out;
}

Skeleton transform_skeleton(const Skeleton& s, const RigidTransform& t) {
    if (t.from() != s.frame)
        throw FrameMismatchError(
            "skeleton in frame '" + std::string(frame_name(s.frame)) +
            "' cannot be mapped by a transform from '" +
            std::string(frame_name(t.from())) + "'");
    Skeleton out = s;
    for (auto& p : out.joints) p = t.apply(p);
    out.frame = t.to();
    return out;
}

Skeleton reflect_skeleton(const Skeleton& s, const ReflectionTransform& r) {
    if (r.frame() != s.frame)
        throw FrameMismatchError(
            "skeleton frame '" + std::string(frame_name(s.frame)) +
            "' does not match reflection frame '" +
            std::string(frame_name(r.frame())) + "'");
    Skeleton out = s;
    for (auto& p : out.joints) p = r.apply(p);
    return out;
}

Eigen::Vector3d arm_roll_axis(const Eigen::Vector3d& upper_arm,
                              const Eigen::Vector3d& forearm,
                              const Eigen::Vector3d& torso_dir) {
    const double nu = upper_arm.norm();
    const double nf = forearm.norm();
    if (nu < 1e-12 || nf < 1e-12)
        throw DegeneratePoseError("arm bone vector has zero length");
    const Eigen::Vector3d cross = upper_arm.cross(forearm);
    // |u x f| = |u||f| sin(angle); the rule is undefined for a straight arm.
    if (cross.norm() < 1e-3 * nu * nf)
        throw DegeneratePoseError(
            "arm is near straight; roll axis is undefined");
    Eigen::Vector3d axis = cross.normalized();
    if (axis.dot(torso_dir) < 0.0) axis = -axis;
    return axis;
}

BodyMeasurements measure_body(const Skeleton& s) {
    return {(s[JointId::ShoulderLeft] - s[JointId::ShoulderRight]).norm(),
            (s[JointId::ShoulderCenter] - s[JointId::HipCenter]).norm()};
}

BoneFrame::BoneFrame(JointId origin_, const Eigen::Vector3d& direction_,
                     const Eigen::Vector3d& roll_axis_)
    : origin(origin_), direction(direction_), roll_axis(roll_axis_) {
    if (std::abs(direction.norm() - 1.0) > 1e-9 ||
        std::abs(roll_axis.norm() - 1.0) > 1e-9)
        throw ValidationError("bone frame axes must be unit length");
    if (std::abs(direction.dot(roll_axis)) > 1e-9)
        throw ValidationError("bone roll axis must be orthogonal to direction");
}

void BodyDimensions::validate() const {
    const double lengths[] = {shoulder_width, torso_height,  neck_length,
                              upper_arm_length, forearm_length, hand_length,
                              hip_width,      thigh_length,  shin_length,
                              foot_length};
    for (double v : lengths) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("body dimensions must be positive");
    }
    if (!(spine_ratio > 0.0 && spine_ratio < 1.0))
        throw ValidationError("spine ratio must lie in (0, 1)");
}

Skeleton synth_skeleton(const PoseParams& pose, const BodyDimensions& dims,
                        double timestamp_ms) {
    dims.validate();

    const Eigen::Vector3d down(0.0, -1.0, 0.0);
    Skeleton s;
    s.timestamp_ms = timestamp_ms;
    s.chirality = Chirality::Real;
    s.frame = pose.torso.to();

    // Body local frame: origin at HipCenter, X anatomical left, Y up,
    // Z chest-forward.
    auto set = [&s](JointId id, const Eigen::Vector3d& p) { s[id] = p; };

    set(JointId::HipCenter, {0.0, 0.0, 0.0});
    set(JointId::Spine, {0.0, dims.spine_ratio * dims.torso_height, 0.0});
    set(JointId::ShoulderCenter, {0.0, dims.torso_height, 0.0});
    set(JointId::Head, {0.0, dims.torso_height + dims.neck_length, 0.0});

    const Eigen::Vector3d shoulder_l(dims.shoulder_width / 2.0,
                                     dims.torso_height, 0.0);
    const Eigen::Vector3d shoulder_r(-dims.shoulder_width / 2.0,
                                     dims.torso_height, 0.0);
    set(JointId::ShoulderLeft, shoulder_l);
    set(JointId::ShoulderRight, shoulder_r);

    // side = +1 for the left arm so positive abduction raises both arms
    // laterally outward.
    auto chain_arm = [&](const Eigen::Vector3d& shoulder, const ArmPose& arm,
                         double side, JointId elbow, JointId wrist,
                         JointId hand) {
        const Eigen::Matrix3d shoulder_rot =
            rot_z(side * arm.shoulder_abduction) * rot_x(arm.shoulder_flexion);
        const Eigen::Vector3d upper_dir = shoulder_rot * down;
        const Eigen::Vector3d fore_dir =
            shoulder_rot * (rot_x(arm.elbow_flexion) * down);
        const Eigen::Vector3d e = shoulder + dims.upper_arm_length * upper_dir;
        const Eigen::Vector3d w = e + dims.forearm_length * fore_dir;
        set(elbow, e);
        set(wrist, w);
        set(hand, w + dims.hand_length * fore_dir);
    };
    chain_arm(shoulder_l, pose.left, +1.0, JointId::ElbowLeft,
              JointId::WristLeft, JointId::HandLeft);
    chain_arm(shoulder_r, pose.right, -1.0, JointId::ElbowRight,
              JointId::WristRight, JointId::HandRight);

    auto chain_leg = [&](double side, JointId hip, JointId knee, JointId ankle,
                         JointId foot) {
        const Eigen::Vector3d h(side * dims.hip_width / 2.0, 0.0, 0.0);
        const Eigen::Vector3d k = h + dims.thigh_length * down;
        const Eigen::Vector3d a = k + dims.shin_length * down;
        set(hip, h);
        set(knee, k);
        set(ankle, a);
        set(foot, a + Eigen::Vector3d(0.0, 0.0, dims.foot_length));
    };
    chain_leg(+1.0, JointId::HipLeft, JointId::KneeLeft, JointId::AnkleLeft,
              JointId::FootLeft);
    chain_leg(-1.0, JointId::HipRight, JointId::KneeRight, JointId::AnkleRight,
              JointId::FootRight);

    for (auto& p : s.joints) p = pose.torso.apply(p);
    return s;
}

nlohmann::json skeleton_to_json(const Skeleton& s) {
    nlohmann::json joints;
    for (int i = 0; i < kJointCount; ++i) {
        const auto id = static_cast<JointId>(i);
        const Eigen::Vector3d& p = s[id];
        joints[std::string(joint_name(id))] = {p.x(), p.y(), p.z()};
    }
    return {{"joints", joints},
            {"timestamp_ms", s.timestamp_ms},
            {"chirality", std::string(chirality_name(s.chirality))},
            {"frame", std::string(frame_name(s.frame))}};
}

Skeleton skeleton_from_json(const nlohmann::json& j) {
    try {
        Skeleton s;
        const auto& joints = j.at("joints");
        if (joints.size() != static_cast<std::size_t>(kJointCount))
            throw ParseError("skeleton JSON must carry exactly 20 joints");
        for (int i = 0; i < kJointCount; ++i) {
            const auto id = static_cast<JointId>(i);
            const auto& p = joints.at(std::string(joint_name(id)));
            s[id] = Eigen::Vector3d(p.at(0).get<double>(), p.at(1).get<double>(),
                                    p.at(2).get<double>());
        }
        s.timestamp_ms = j.at("timestamp_ms").get<double>();
        s.chirality = chirality_from_name(j.at("chirality").get<std::string>());
        s.frame = frame_from_name(j.at("frame").get<std::string>());
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad skeleton JSON: ") + e.what());
    }
}

} // namespace mirage
