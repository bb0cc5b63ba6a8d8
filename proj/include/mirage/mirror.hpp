#ifndef MIRAGE_MIRROR_HPP
#define MIRAGE_MIRROR_HPP

#include <optional>
#include <span>

#include "mirage/calibration.hpp"
#include "mirage/skeleton.hpp"

namespace mirage {

/// A mirror plane recovered from one visor-marker detection, with the
/// reflection operator it induces.
struct MirrorEstimate {
    MirrorPlane plane;
    ReflectionTransform reflection;
    MarkerPoseObservation source;
};

enum class SceneKind { RealScene, ReflectedScene };

struct SceneClassification {
    SceneKind kind = SceneKind::RealScene;
    std::optional<MirrorEstimate> evidence;
};

struct MirrorDetectorConfig {
    /// Below this marker range the midpoint rule is dominated by the
    /// unmodeled marker-to-camera offset.
    double min_range_m = 0.2;
    /// A detection older than this no longer certifies a reflected scene.
    double staleness_ms = 500.0;
    /// Real marker position in the observing camera frame. The visor marker
    /// sits next to the camera, so zero by default; setting it lets the
    /// simulator quantify the error of the co-location assumption.
    Eigen::Vector3d marker_offset = Eigen::Vector3d::Zero();
};

/// Midpoint rule: the mirror passes through the midpoint of the real marker
/// and its observed image, with the connecting line as the normal. With zero
/// offset this is a plane through marker_center/2 with normal along
/// marker_center. Throws UnreliableEstimateError below the minimum range.
///
/// Convention fixed here: the normal points from the camera toward the
/// mirror, so the offset is nonnegative.
MirrorEstimate estimate_mirror(const Eigen::Vector3d& marker_center,
                               FrameId camera, double timestamp_ms,
                               const MirrorDetectorConfig& config = {});

/// Same rule fed from a full marker observation (only its center is used).
MirrorEstimate estimate_mirror(const MarkerPoseObservation& obs,
                               const MirrorDetectorConfig& config = {});

/// Marker visible => mirror. Returns ReflectedScene with the estimate from
/// the most recent detection inside the staleness window; detections that
/// cannot produce a reliable estimate are skipped. Never throws.
SceneClassification classify_scene(std::span<const MarkerPoseObservation> detections,
                                   double now_ms,
                                   const MirrorDetectorConfig& config = {});

/// Maps a reflected skeleton back onto the real user: every joint through
/// the reflection, labels re-associated so left/right are anatomically
/// correct again. Requires chirality Reflected and matching frames.
Skeleton to_real_space(const Skeleton& s, const MirrorEstimate& m);

/// JSON: normal, offset, frame, 4x4 reflection row-major, source timestamp.
nlohmann::json mirror_estimate_to_json(const MirrorEstimate& m);

nlohmann::json detections_to_json(std::span<const MarkerPoseObservation> detections);
std::vector<MarkerPoseObservation> detections_from_json(const nlohmann::json& j);

} // namespace mirage

#endif
