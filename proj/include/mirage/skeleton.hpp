#ifndef MIRAGE_SKELETON_HPP
#define MIRAGE_SKELETON_HPP

#include <array>
#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "mirage/geometry.hpp"

namespace mirage {

/// The 20 joints of the consumer depth tracker's skeleton model.
enum class JointId : int {
    HipCenter = 0,
    Spine,
    ShoulderCenter,
    Head,
    ShoulderLeft,
    ShoulderRight,
    ElbowLeft,
    ElbowRight,
    WristLeft,
    WristRight,
    HandLeft,
    HandRight,
    HipLeft,
    HipRight,
    KneeLeft,
    KneeRight,
    AnkleLeft,
    AnkleRight,
    FootLeft,
    FootRight,
};

inline constexpr int kJointCount = 20;

std::string_view joint_name(JointId id);
JointId joint_from_name(std::string_view name); // throws ParseError

/// Left <-> right counterpart; central joints map to themselves.
JointId mirror_joint(JointId id);
bool is_central_joint(JointId id);

/// Whether the joint labels follow the person's anatomical left/right (Real)
/// or are mirrored as a tracker labels them in a reflection (Reflected).
enum class Chirality { Real, Reflected };

std::string_view chirality_name(Chirality c);
Chirality chirality_from_name(std::string_view name);

struct Skeleton {
    std::array<Eigen::Vector3d, kJointCount> joints{};
    double timestamp_ms = 0.0;
    Chirality chirality = Chirality::Real;
    FrameId frame = FrameId::World;

    Eigen::Vector3d& operator[](JointId id) {
        return joints[static_cast<std::size_t>(id)];
    }
    const Eigen::Vector3d& operator[](JointId id) const {
        return joints[static_cast<std::size_t>(id)];
    }

    /// Throws ValidationError if any coordinate is non-finite.
    void validate() const;
};

/// Exchanges every left joint with its right counterpart and toggles the
/// chirality flag; central joints and the timestamp are untouched.
Skeleton swap_chirality(const Skeleton& s);

/// Maps all joint positions through a rigid transform (t.from must match the
/// skeleton frame); labels, chirality and timestamp are preserved.
Skeleton transform_skeleton(const Skeleton& s, const RigidTransform& t);

/// Applies a reflection to all joint positions. Labels are preserved, so the
/// caller is responsible for the chirality bookkeeping (see mirror module).
Skeleton reflect_skeleton(const Skeleton& s, const ReflectionTransform& r);

/// Normalized cross product of the two arm bone vectors, sign-aligned with
/// torso_dir. Throws DegeneratePoseError when the bones are near parallel
/// (sin of the enclosed angle below 1e-3); callers hold the last valid axis.
Eigen::Vector3d arm_roll_axis(const Eigen::Vector3d& upper_arm,
                              const Eigen::Vector3d& forearm,
                              const Eigen::Vector3d& torso_dir);

struct BodyMeasurements {
    double shoulder_distance = 0.0; // |ShoulderLeft - ShoulderRight|, meters
    double torso_height = 0.0;      // |ShoulderCenter - HipCenter|, meters
};

BodyMeasurements measure_body(const Skeleton& s);

/// Derived orthonormal frame of a bone (unit direction plus roll axis).
struct BoneFrame {
    JointId origin;
    Eigen::Vector3d direction;
    Eigen::Vector3d roll_axis;

    BoneFrame(JointId origin, const Eigen::Vector3d& direction,
              const Eigen::Vector3d& roll_axis);
};

/// Segment lengths of the synthetic body, meters. The Spine joint sits at
/// spine_ratio of the way from HipCenter to ShoulderCenter.
struct BodyDimensions {
    double shoulder_width = 0.40;
    double torso_height = 0.52;
    double neck_length = 0.14;
    double spine_ratio = 0.5;
    double upper_arm_length = 0.28;
    double forearm_length = 0.26;
    double hand_length = 0.09;
    double hip_width = 0.30;
    double thigh_length = 0.44;
    double shin_length = 0.41;
    double foot_length = 0.20;

    void validate() const; // throws ValidationError
};

/// Shoulder and elbow angles of one arm, radians. At zero the arm hangs
/// straight down; abduction raises it laterally, flexion swings it forward,
/// elbow flexion folds the forearm toward the chest.
struct ArmPose {
    double shoulder_abduction = 0.0;
    double shoulder_flexion = 0.0;
    double elbow_flexion = 0.0;
};

/// Torso placement plus both arm poses. The torso transform maps the body
/// local frame (origin HipCenter, X anatomical left, Y up, Z chest-forward)
/// into the output frame.
struct PoseParams {
    RigidTransform torso = RigidTransform::identity(FrameId::Object, FrameId::World);
    ArmPose left;
    ArmPose right;
};

/// Deterministic forward kinematics; all segment lengths equal the requested
/// dimensions for every pose.
Skeleton synth_skeleton(const PoseParams& pose, const BodyDimensions& dims,
                        double timestamp_ms);

/// Transport payload layout: 20 named joints, timestamp, chirality, frame.
nlohmann::json skeleton_to_json(const Skeleton& s);
Skeleton skeleton_from_json(const nlohmann::json& j);

} // namespace mirage

#endif
