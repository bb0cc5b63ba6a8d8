#include "mirage/geometry.hpp"

#include <array>
#include <sstream>

namespace mirage {

namespace {

constexpr std::array<std::string_view, 8> kFrameNames = {
    "World",        "RenderCam",       "HmdRgb",      "DepthCam",
    "TrackerRgb",   "ReflectionSpace", "MarkerBoard", "Object",
};

// Nearest rotation in the Frobenius sense.
Eigen::Matrix3d project_to_so3(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

} // namespace

std::string_view frame_name(FrameId id) {
    return kFrameNames[static_cast<std::size_t>(id)];
}

FrameId frame_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFrameNames.size(); ++i) {
        if (kFrameNames[i] == name) return static_cast<FrameId>(i);
    }
    throw ParseError("unknown frame label: " + std::string(name));
}

RigidTransform::RigidTransform()
    : rotation_(Eigen::Matrix3d::Identity()),
      translation_(Eigen::Vector3d::Zero()),
      from_(FrameId::World),
      to_(FrameId::World) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation, FrameId from,
                               FrameId to)
    : rotation_(rotation), translation_(translation), from_(from), to_(to) {
    if (!rotation_.allFinite() || !translation_.allFinite())
        throw ValidationError("rigid transform has non-finite entries");
    if (rotation_.determinant() <= 0.0)
        throw ValidationError("rotation matrix has non-positive determinant");
    const double drift =
        (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff();
    if (drift > 1e-9) rotation_ = project_to_so3(rotation_);
}

RigidTransform RigidTransform::identity(FrameId from, FrameId to) {
    return {Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), from, to};
}

RigidTransform RigidTransform::from_axis_angle(const Eigen::Vector3d& axis,
                                               double angle_rad,
                                               const Eigen::Vector3d& translation,
                                               FrameId from, FrameId to) {
    const double n = axis.norm();
    if (n < 1e-12) throw ValidationError("axis-angle rotation with zero axis");
    return {Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix(), translation,
            from, to};
}

RigidTransform RigidTransform::from_quaternion(const Eigen::Quaterniond& q,
                                               const Eigen::Vector3d& translation,
                                               FrameId from, FrameId to) {
    if (q.norm() < 1e-12) throw ValidationError("zero quaternion");
    return {q.normalized().toRotationMatrix(), translation, from, to};
}

Eigen::Matrix4d RigidTransform::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    if (a.from() != b.to()) {
        std::ostringstream msg;
        msg << "transform chain mismatch: left expects '" << frame_name(a.from())
            << "' but right produces '" << frame_name(b.to()) << "'";
        throw FrameMismatchError(msg.str());
    }
    return {a.rotation() * b.rotation(),
            a.rotation() * b.translation() + a.translation(), b.from(), a.to()};
}

RigidTransform invert(const RigidTransform& t) {
    const Eigen::Matrix3d rt = t.rotation().transpose();
    return {rt, -(rt * t.translation()), t.to(), t.from()};
}

MirrorPlane MirrorPlane::from_point_normal(const Eigen::Vector3d& point,
                                           const Eigen::Vector3d& direction,
                                           FrameId frame) {
    const double n = direction.norm();
    if (n < 1e-12) throw ValidationError("plane normal must be nonzero");
    const Eigen::Vector3d unit = direction / n;
    return {unit, unit.dot(point), frame};
}

MirrorPlane transform_plane(const MirrorPlane& plane, const RigidTransform& t) {
    if (t.from() != plane.frame) {
        std::ostringstream msg;
        msg << "plane in frame '" << frame_name(plane.frame)
            << "' cannot be mapped by a transform from '" << frame_name(t.from())
            << "'";
        throw FrameMismatchError(msg.str());
    }
    // n.x = d with x = R^T (y - t)  =>  (R n).y = d + (R n).t
    const Eigen::Vector3d n = t.rotation() * plane.normal;
    return {n, plane.offset + n.dot(t.translation()), t.to()};
}

ReflectionTransform::ReflectionTransform(const Eigen::Matrix4d& matrix,
                                         FrameId frame)
    : matrix_(matrix), frame_(frame) {
    if (!matrix_.allFinite())
        throw ValidationError("reflection matrix has non-finite entries");
    const Eigen::Matrix3d lin = matrix_.topLeftCorner<3, 3>();
    if ((matrix_ * matrix_ - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() >
        1e-9)
        throw ValidationError("reflection matrix is not involutive");
    if (std::abs(lin.determinant() + 1.0) > 1e-9)
        throw ValidationError("reflection linear part must have determinant -1");
    if (matrix_.row(3) != Eigen::RowVector4d(0, 0, 0, 1))
        throw ValidationError("reflection matrix is not affine homogeneous");
}

ReflectionTransform reflection_about(const MirrorPlane& plane) {
    if (std::abs(plane.normal.squaredNorm() - 1.0) > 1e-9)
        throw ValidationError("mirror plane normal must be unit length");
    const Eigen::Vector3d& n = plane.normal;
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() =
        Eigen::Matrix3d::Identity() - 2.0 * (n * n.transpose());
    m.topRightCorner<3, 1>() = 2.0 * plane.offset * n;
    return {m, plane.frame};
}

nlohmann::json to_json(const RigidTransform& t) {
    nlohmann::json j;
    auto& rot = j["rotation"] = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot.push_back(t.rotation()(r, c));
    j["translation"] = {t.translation().x(), t.translation().y(),
                        t.translation().z()};
    j["from"] = std::string(frame_name(t.from()));
    j["to"] = std::string(frame_name(t.to()));
    return j;
}

RigidTransform rigid_transform_from_json(const nlohmann::json& j) {
    try {
        const auto& rot = j.at("rotation");
        const auto& tr = j.at("translation");
        if (rot.size() != 9 || tr.size() != 3)
            throw ParseError("transform JSON needs 9 rotation and 3 translation entries");
        Eigen::Matrix3d r;
        for (int k = 0; k < 9; ++k) r(k / 3, k % 3) = rot.at(k).get<double>();
        const Eigen::Vector3d t(tr.at(0).get<double>(), tr.at(1).get<double>(),
                                tr.at(2).get<double>());
        const double drift =
            (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        if (drift > 1e-6)
            throw ValidationError("stored rotation is not orthonormal");
        return {r, t, frame_from_name(j.at("from").get<std::string>()),
                frame_from_name(j.at("to").get<std::string>())};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad transform JSON: ") + e.what());
    }
}

} // namespace mirage
