#include <doctest.h>

#include <cmath>

#include "mirage/mirror.hpp"
#include "mirage/random.hpp"
#include "mirage/skeleton.hpp"

using namespace mirage;

namespace {

MarkerPoseObservation detection_at(const Eigen::Vector3d& center, double t_ms) {
    MarkerPoseObservation obs;
    obs.pose = RigidTransform(Eigen::Matrix3d::Identity(), center,
                              FrameId::MarkerBoard, FrameId::HmdRgb);
    obs.timestamp_ms = t_ms;
    obs.camera = FrameId::HmdRgb;
    return obs;
}

Skeleton plausible_skeleton(Rng& rng, FrameId frame) {
    PoseParams pose;
    pose.torso = RigidTransform::from_axis_angle(
        Eigen::Vector3d::UnitY(), rng.uniform(-3.0, 3.0),
        Eigen::Vector3d(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.1),
                        rng.uniform(0.8, 2.0)),
        FrameId::Object, frame);
    pose.left = {rng.uniform(0.0, 1.2), rng.uniform(-0.5, 0.5), rng.uniform(0.3, 1.5)};
    pose.right = {rng.uniform(0.0, 1.2), rng.uniform(-0.5, 0.5), rng.uniform(0.3, 1.5)};
    return synth_skeleton(pose, BodyDimensions{}, rng.uniform(0.0, 5000.0));
}

} // namespace

TEST_SUITE("mirror") {

TEST_CASE("estimate_mirror: midpoint-rule examples") {
    const MirrorEstimate a = estimate_mirror({0, 0, 2}, FrameId::HmdRgb, 0.0);
    CHECK((a.plane.normal - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
    CHECK(a.plane.offset == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.plane.frame == FrameId::HmdRgb);

    const MirrorEstimate b = estimate_mirror({1, 0, 1}, FrameId::HmdRgb, 0.0);
    CHECK((b.plane.normal - Eigen::Vector3d(1, 0, 1).normalized()).norm() < 1e-12);
    CHECK(b.plane.offset == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("estimate_mirror: the marker's image reflects onto the camera") {
    Rng rng(51);
    for (int i = 0; i < 300; ++i) {
        const Eigen::Vector3d center = rng.unit_vector() * rng.uniform(0.21, 5.0);
        const MirrorEstimate est = estimate_mirror(center, FrameId::HmdRgb, 0.0);
        CHECK(est.reflection.apply(center).norm() < 1e-12);
        // Geometry-module invariants hold for the attached operator.
        const Eigen::Matrix4d m = est.reflection.matrix();
        CHECK((m * m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(std::abs(est.reflection.linear().determinant() + 1.0) < 1e-9);
        CHECK(est.plane.offset >= 0.0);
    }
}

TEST_CASE("estimate_mirror: minimum range and offset handling") {
    CHECK_THROWS_AS(estimate_mirror({0, 0, 0.15}, FrameId::HmdRgb, 0.0),
                    UnreliableEstimateError);
    CHECK_THROWS_AS(estimate_mirror({0, 0, 0.2}, FrameId::HmdRgb, 0.0),
                    UnreliableEstimateError);

    // With the true marker offset configured, the estimate is exact even for
    // a marker mounted away from the camera center.
    Rng rng(52);
    for (int i = 0; i < 50; ++i) {
        const MirrorPlane truth{rng.unit_vector(), rng.uniform(0.5, 2.0),
                                FrameId::HmdRgb};
        MirrorDetectorConfig config;
        config.marker_offset = rng.normal3(0.05);
        const Eigen::Vector3d image =
            reflection_about(truth).apply(config.marker_offset);
        if (image.norm() <= config.min_range_m) continue;
        const MirrorEstimate est =
            estimate_mirror(image, FrameId::HmdRgb, 0.0, config);
        Eigen::Vector3d n = truth.normal;
        double d = truth.offset;
        if (n.dot(est.plane.normal) < 0.0) { n = -n; d = -d; }
        CHECK((est.plane.normal - n).norm() < 1e-9);
        CHECK(est.plane.offset == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("classify_scene: marker presence, staleness, reliability fallback") {
    const MirrorDetectorConfig config;

    CHECK(classify_scene({}, 100.0, config).kind == SceneKind::RealScene);
    CHECK_FALSE(classify_scene({}, 100.0, config).evidence.has_value());

    std::vector<MarkerPoseObservation> one = {detection_at({0, 0, 2}, 100.0)};
    const SceneClassification c = classify_scene(one, 150.0, config);
    CHECK(c.kind == SceneKind::ReflectedScene);
    REQUIRE(c.evidence.has_value());
    CHECK(c.evidence->plane.offset == doctest::Approx(1.0).epsilon(1e-12));

    // Older than the staleness window.
    CHECK(classify_scene(one, 100.0 + config.staleness_ms + 1.0, config).kind ==
          SceneKind::RealScene);
    // Future detections are not visible yet.
    CHECK(classify_scene(one, 50.0, config).kind == SceneKind::RealScene);

    // The newest usable detection wins; too-close ones are skipped.
    std::vector<MarkerPoseObservation> log = {
        detection_at({0, 0, 1.8}, 400.0),
        detection_at({0, 0, 0.05}, 450.0),
    };
    const SceneClassification fallback = classify_scene(log, 500.0, config);
    CHECK(fallback.kind == SceneKind::ReflectedScene);
    REQUIRE(fallback.evidence.has_value());
    CHECK(fallback.evidence->source.timestamp_ms == 400.0);
    CHECK(fallback.evidence->plane.offset == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("to_real_space: recovers ground truth from a synthetic reflection") {
    Rng rng(53);
    for (int i = 0; i < 100; ++i) {
        const Skeleton truth = plausible_skeleton(rng, FrameId::HmdRgb);

        // A mirror somewhere in front, estimated from its own marker image.
        const Eigen::Vector3d marker_center =
            rng.unit_vector() * rng.uniform(0.5, 4.0);
        const MirrorEstimate est =
            estimate_mirror(marker_center, FrameId::HmdRgb, truth.timestamp_ms);

        const Skeleton observed =
            swap_chirality(reflect_skeleton(truth, est.reflection));
        CHECK(observed.chirality == Chirality::Reflected);

        const Skeleton recovered = to_real_space(observed, est);
        CHECK(recovered.chirality == Chirality::Real);
        CHECK(recovered.timestamp_ms == truth.timestamp_ms);
        for (int k = 0; k < kJointCount; ++k)
            CHECK((recovered.joints[k] - truth.joints[k]).norm() < 1e-9);

        // Applying the forward map again reproduces the observation.
        const Skeleton rereflected =
            swap_chirality(reflect_skeleton(recovered, est.reflection));
        for (int k = 0; k < kJointCount; ++k)
            CHECK((rereflected.joints[k] - observed.joints[k]).norm() < 1e-9);
    }
}

TEST_CASE("to_real_space: joint on the mirror plane is fixed") {
    const MirrorEstimate est = estimate_mirror({0, 0, 2}, FrameId::HmdRgb, 0.0);
    Rng rng(54);
    Skeleton s = plausible_skeleton(rng, FrameId::HmdRgb);
    s.chirality = Chirality::Reflected;
    s[JointId::HipCenter] = {0.3, -0.2, 1.0}; // on the plane z = 1
    const Skeleton real = to_real_space(s, est);
    CHECK((real[JointId::HipCenter] - Eigen::Vector3d(0.3, -0.2, 1.0)).norm() <
          1e-12);
}

TEST_CASE("to_real_space: misuse and frame errors") {
    Rng rng(55);
    const MirrorEstimate est = estimate_mirror({0, 0, 2}, FrameId::HmdRgb, 0.0);

    Skeleton real_flagged = plausible_skeleton(rng, FrameId::HmdRgb);
    real_flagged.chirality = Chirality::Real;
    CHECK_THROWS_AS(to_real_space(real_flagged, est), ChiralityError);

    Skeleton wrong_frame = plausible_skeleton(rng, FrameId::TrackerRgb);
    wrong_frame.chirality = Chirality::Reflected;
    CHECK_THROWS_AS(to_real_space(wrong_frame, est), FrameMismatchError);
}

TEST_CASE("mirror estimate and detection log serialization") {
    const MirrorEstimate est = estimate_mirror({0, 0, 2}, FrameId::HmdRgb, 77.0);
    const nlohmann::json j = mirror_estimate_to_json(est);
    CHECK(j["normal"].size() == 3);
    CHECK(j["offset_m"] == doctest::Approx(1.0));
    CHECK(j["reflection"].size() == 16);
    CHECK(j["source_timestamp_ms"] == doctest::Approx(77.0));
    CHECK(j["frame"] == "HmdRgb");

    std::vector<MarkerPoseObservation> log = {detection_at({0, 0, 2}, 1.0),
                                              detection_at({0.5, 0, 1.5}, 2.0)};
    const auto restored = detections_from_json(detections_to_json(log));
    REQUIRE(restored.size() == 2);
    CHECK(restored[1].timestamp_ms == 2.0);
    CHECK((restored[1].pose.translation() - Eigen::Vector3d(0.5, 0, 1.5)).norm() ==
          0.0);
    CHECK_THROWS_AS(detections_from_json(nlohmann::json::object()), ParseError);
}

} // TEST_SUITE
