#include "mirage/mirror.hpp"

#include <algorithm>
#include <sstream>

namespace mirage {

MirrorEstimate estimate_mirror(const Eigen::Vector3d& marker_center,
                               FrameId camera, double timestamp_ms,
                               const MirrorDetectorConfig& config) {
    const double range = marker_center.norm();
    if (!(range > config.min_range_m)) {
        std::ostringstream msg;
        msg << "marker at " << range << " m is inside the minimum range of "
            << config.min_range_m << " m";
        throw UnreliableEstimateError(msg.str());
    }

    // The observed center is the reflection of the real marker, so the
    // mirror bisects the segment between them.
    const Eigen::Vector3d axis = marker_center - config.marker_offset;
    if (axis.norm() < 1e-9)
        throw UnreliableEstimateError(
            "marker image coincides with the marker itself");
    const Eigen::Vector3d midpoint = 0.5 * (marker_center + config.marker_offset);
    MirrorPlane plane = MirrorPlane::from_point_normal(midpoint, axis, camera);
    if (plane.offset < 0.0) { // normal toward the mirror, offset >= 0
        plane.normal = -plane.normal;
        plane.offset = -plane.offset;
    }

    MarkerPoseObservation source;
    source.pose = RigidTransform(Eigen::Matrix3d::Identity(), marker_center,
                                 FrameId::MarkerBoard, camera);
    source.timestamp_ms = timestamp_ms;
    source.camera = camera;
    return {plane, reflection_about(plane), source};
}

MirrorEstimate estimate_mirror(const MarkerPoseObservation& obs,
                               const MirrorDetectorConfig& config) {
    MirrorEstimate est = estimate_mirror(obs.pose.translation(), obs.camera,
                                         obs.timestamp_ms, config);
    est.source = obs;
    return est;
}

SceneClassification classify_scene(
    std::span<const MarkerPoseObservation> detections, double now_ms,
    const MirrorDetectorConfig& config) {
    // Newest first; skip anything stale or unusable.
    std::vector<const MarkerPoseObservation*> order;
    order.reserve(detections.size());
    for (const auto& d : detections) order.push_back(&d);
    std::stable_sort(order.begin(), order.end(),
                     [](const MarkerPoseObservation* a,
                        const MarkerPoseObservation* b) {
                         return a->timestamp_ms > b->timestamp_ms;
                     });
    for (const MarkerPoseObservation* d : order) {
        if (d->timestamp_ms > now_ms) continue; // not yet observed
        if (now_ms - d->timestamp_ms > config.staleness_ms) break;
        try {
            return {SceneKind::ReflectedScene, estimate_mirror(*d, config)};
        } catch (const UnreliableEstimateError&) {
            continue;
        }
    }
    return {SceneKind::RealScene, std::nullopt};
}

Skeleton to_real_space(const Skeleton& s, const MirrorEstimate& m) {
    if (s.chirality != Chirality::Reflected)
        throw ChiralityError(
            "to_real_space expects a skeleton tracked in a reflection");
    if (s.frame != m.plane.frame)
        throw FrameMismatchError(
            "skeleton frame '" + std::string(frame_name(s.frame)) +
            "' does not match mirror frame '" +
            std::string(frame_name(m.plane.frame)) + "'");
    // Positions back through the mirror, then left/right labels restored.
    return swap_chirality(reflect_skeleton(s, m.reflection));
}

nlohmann::json mirror_estimate_to_json(const MirrorEstimate& m) {
    nlohmann::json refl = nlohmann::json::array();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) refl.push_back(m.reflection.matrix()(r, c));
    return {{"normal",
             {m.plane.normal.x(), m.plane.normal.y(), m.plane.normal.z()}},
            {"offset_m", m.plane.offset},
            {"frame", std::string(frame_name(m.plane.frame))},
            {"reflection", refl},
            {"source_timestamp_ms", m.source.timestamp_ms}};
}

nlohmann::json detections_to_json(
    std::span<const MarkerPoseObservation> detections) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : detections) arr.push_back(observation_to_json(d));
    return arr;
}

std::vector<MarkerPoseObservation> detections_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("detection log must be a JSON array");
    std::vector<MarkerPoseObservation> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(observation_from_json(item));
    return out;
}

} // namespace mirage
