#ifndef MIRAGE_GEOMETRY_HPP
#define MIRAGE_GEOMETRY_HPP

#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "mirage/error.hpp"

namespace mirage {

/// Coordinate frames of the mirror-augmentation setup. Every transform names
/// the frame it maps from and the frame it maps into; composition is checked
/// against these labels.
enum class FrameId {
    World,
    RenderCam,
    HmdRgb,
    DepthCam,
    TrackerRgb,
    ReflectionSpace,
    MarkerBoard,
    Object,
};

std::string_view frame_name(FrameId id);
FrameId frame_from_name(std::string_view name); // throws ParseError

/// SE(3) pose: p_to = R * p_from + t. Units are meters throughout.
///
/// The rotation is kept orthonormal: construction re-orthonormalizes (nearest
/// rotation by SVD) whenever ||R^T R - I|| drifts beyond 1e-9, and rejects
/// matrices with non-positive determinant outright.
class RigidTransform {
public:
    RigidTransform(); // identity, World -> World

    RigidTransform(const Eigen::Matrix3d& rotation,
                   const Eigen::Vector3d& translation, FrameId from, FrameId to);

    static RigidTransform identity(FrameId from, FrameId to);
    static RigidTransform from_axis_angle(const Eigen::Vector3d& axis,
                                          double angle_rad,
                                          const Eigen::Vector3d& translation,
                                          FrameId from, FrameId to);
    static RigidTransform from_quaternion(const Eigen::Quaterniond& q,
                                          const Eigen::Vector3d& translation,
                                          FrameId from, FrameId to);

    const Eigen::Matrix3d& rotation() const { return rotation_; }
    const Eigen::Vector3d& translation() const { return translation_; }
    FrameId from() const { return from_; }
    FrameId to() const { return to_; }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
        return rotation_ * p + translation_;
    }

    /// 4x4 homogeneous form.
    Eigen::Matrix4d matrix() const;

private:
    Eigen::Matrix3d rotation_;
    Eigen::Vector3d translation_;
    FrameId from_;
    FrameId to_;
};

/// a o b: requires a.from() == b.to() so the chain b.from -> b.to == a.from
/// -> a.to is well formed. Throws FrameMismatchError naming both frames.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    return compose(a, b);
}

/// Oriented plane { x : normal . x = offset } in a named frame.
/// Both normal signs describe the same point set and the same reflection;
/// the mirror module fixes the reporting convention (normal from the camera
/// toward the mirror, offset >= 0).
struct MirrorPlane {
    Eigen::Vector3d normal{0.0, 0.0, 1.0};
    double offset = 0.0; // meters
    FrameId frame = FrameId::World;

    /// Normalizes the given direction; throws ValidationError on a zero vector.
    static MirrorPlane from_point_normal(const Eigen::Vector3d& point,
                                         const Eigen::Vector3d& direction,
                                         FrameId frame);

    double signed_distance(const Eigen::Vector3d& p) const {
        return normal.dot(p) - offset;
    }
};

/// Re-expresses a plane in the frame t.to(); requires t.from() == plane.frame.
MirrorPlane transform_plane(const MirrorPlane& plane, const RigidTransform& t);

/// Involutive isometry of a mirror: homogeneous matrix with linear part
/// I - 2 n n^T (determinant -1) and translation 2 d n.
class ReflectionTransform {
public:
    ReflectionTransform(const Eigen::Matrix4d& matrix, FrameId frame);

    const Eigen::Matrix4d& matrix() const { return matrix_; }
    FrameId frame() const { return frame_; }

    Eigen::Matrix3d linear() const { return matrix_.topLeftCorner<3, 3>(); }
    Eigen::Vector3d translation() const { return matrix_.topRightCorner<3, 1>(); }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
        return linear() * p + translation();
    }

private:
    Eigen::Matrix4d matrix_;
    FrameId frame_;
};

/// Builds the reflection across a plane. Throws ValidationError if the plane
/// normal is not unit length.
ReflectionTransform reflection_about(const MirrorPlane& plane);

inline Eigen::Vector3d apply_point(const RigidTransform& t, const Eigen::Vector3d& p) {
    return t.apply(p);
}
inline Eigen::Vector3d apply_point(const ReflectionTransform& t, const Eigen::Vector3d& p) {
    return t.apply(p);
}

/// JSON layout: 9 rotation entries row-major, 3 translation entries, frame
/// labels. Restore validates orthonormality before constructing.
nlohmann::json to_json(const RigidTransform& t);
RigidTransform rigid_transform_from_json(const nlohmann::json& j);

} // namespace mirage

#endif
