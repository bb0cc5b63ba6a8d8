#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mirage/random.hpp"
#include "mirage/skeleton.hpp"

using namespace mirage;

namespace {

Skeleton random_skeleton(Rng& rng) {
    Skeleton s;
    for (auto& p : s.joints) p = rng.normal3(1.0);
    s.timestamp_ms = rng.uniform(0.0, 1e4);
    s.chirality = rng.uniform() < 0.5 ? Chirality::Real : Chirality::Reflected;
    s.frame = FrameId::TrackerRgb;
    return s;
}

std::vector<double> sorted_coords(const Skeleton& s) {
    std::vector<double> v;
    for (const auto& p : s.joints) {
        v.push_back(p.x());
        v.push_back(p.y());
        v.push_back(p.z());
    }
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_SUITE("skeleton") {

TEST_CASE("joint enumeration: 20 joints, 4 central, 8 left/right pairs") {
    CHECK(kJointCount == 20);
    int central = 0, left = 0, right = 0;
    for (int i = 0; i < kJointCount; ++i) {
        const auto id = static_cast<JointId>(i);
        CHECK(joint_from_name(joint_name(id)) == id);
        const std::string name(joint_name(id));
        if (is_central_joint(id)) {
            ++central;
            CHECK(mirror_joint(id) == id);
        } else if (name.ends_with("Left")) {
            ++left;
            const std::string other = name.substr(0, name.size() - 4) + "Right";
            CHECK(mirror_joint(id) == joint_from_name(other));
        } else {
            ++right;
            CHECK(mirror_joint(mirror_joint(id)) == id);
        }
    }
    CHECK(central == 4);
    CHECK(left == 8);
    CHECK(right == 8);
    CHECK_THROWS_AS(joint_from_name("Elbow"), ParseError);
}

TEST_CASE("swap_chirality: definitional exchange and involution") {
    Rng rng(21);
    Skeleton s = random_skeleton(rng);
    s[JointId::ShoulderLeft] = {-0.2, 0.0, 1.0};
    s[JointId::ShoulderRight] = {0.2, 0.0, 1.0};
    s.chirality = Chirality::Real;

    const Skeleton w = swap_chirality(s);
    CHECK(w[JointId::ShoulderLeft] == Eigen::Vector3d(0.2, 0.0, 1.0));
    CHECK(w[JointId::ShoulderRight] == Eigen::Vector3d(-0.2, 0.0, 1.0));
    CHECK(w[JointId::HipCenter] == s[JointId::HipCenter]);
    CHECK(w.chirality == Chirality::Reflected);
    CHECK(w.timestamp_ms == s.timestamp_ms);

    for (int i = 0; i < 100; ++i) {
        const Skeleton r = random_skeleton(rng);
        const Skeleton rr = swap_chirality(swap_chirality(r));
        for (int k = 0; k < kJointCount; ++k)
            CHECK(rr.joints[k] == r.joints[k]);
        CHECK(rr.chirality == r.chirality);
        // Multiset of positions is preserved by the exchange.
        CHECK(sorted_coords(swap_chirality(r)) == sorted_coords(r));
    }
}

TEST_CASE("arm_roll_axis: hand-computed example, sign rule, degeneracy") {
    const Eigen::Vector3d u(0, -1, 0);
    const Eigen::Vector3d f(1, 0, 0);
    CHECK((arm_roll_axis(u, f, {0, 0, 1}) - Eigen::Vector3d(0, 0, 1)).norm() <
          1e-15);
    CHECK((arm_roll_axis(u, f, {0, 0, -1}) - Eigen::Vector3d(0, 0, -1)).norm() <
          1e-15);
    CHECK_THROWS_AS(arm_roll_axis(u, 2.0 * u, {0, 0, 1}), DegeneratePoseError);
    CHECK_THROWS_AS(arm_roll_axis(u, -0.5 * u, {0, 0, 1}), DegeneratePoseError);
    CHECK_THROWS_AS(arm_roll_axis(Eigen::Vector3d::Zero(), f, {0, 0, 1}),
                    DegeneratePoseError);

    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector3d a = rng.normal3(1.0);
        const Eigen::Vector3d b = rng.normal3(1.0);
        const Eigen::Vector3d torso = rng.unit_vector();
        if (a.cross(b).norm() < 1e-2 * a.norm() * b.norm()) continue;
        const Eigen::Vector3d axis = arm_roll_axis(a, b, torso);
        CHECK(std::abs(axis.norm() - 1.0) < 1e-12);
        CHECK(std::abs(axis.dot(a)) < 1e-9 * a.norm());
        CHECK(std::abs(axis.dot(b)) < 1e-9 * b.norm());
        CHECK(axis.dot(torso) >= 0.0);
    }
}

TEST_CASE("measure_body: examples and rigid invariance") {
    Rng rng(23);
    Skeleton s = random_skeleton(rng);
    s[JointId::ShoulderLeft] = {0.2, 0.0, 1.0};
    s[JointId::ShoulderRight] = {-0.2, 0.0, 1.0};
    s[JointId::ShoulderCenter] = {0.0, 1.4, 1.0};
    s[JointId::HipCenter] = {0.0, 0.9, 1.0};

    const BodyMeasurements m = measure_body(s);
    CHECK(m.shoulder_distance == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(m.torso_height == doctest::Approx(0.5).epsilon(1e-12));

    for (int i = 0; i < 50; ++i) {
        const RigidTransform t(rng.rotation(), rng.normal3(1.0),
                               FrameId::TrackerRgb, FrameId::World);
        const BodyMeasurements moved = measure_body(transform_skeleton(s, t));
        CHECK(std::abs(moved.shoulder_distance - m.shoulder_distance) < 1e-9);
        CHECK(std::abs(moved.torso_height - m.torso_height) < 1e-9);
    }
}

TEST_CASE("synth_skeleton: constructed measurements and determinism") {
    BodyDimensions dims;
    dims.shoulder_width = 0.4;
    PoseParams tpose;
    tpose.left.shoulder_abduction = M_PI / 2.0;
    tpose.right.shoulder_abduction = M_PI / 2.0;

    const Skeleton s = synth_skeleton(tpose, dims, 0.0);
    CHECK(measure_body(s).shoulder_distance == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(measure_body(s).torso_height ==
          doctest::Approx(dims.torso_height).epsilon(1e-12));
    CHECK(s.chirality == Chirality::Real);

    // Static pose: same joints at different timestamps.
    const Skeleton a = synth_skeleton(tpose, dims, 100.0);
    const Skeleton b = synth_skeleton(tpose, dims, 133.3);
    for (int k = 0; k < kJointCount; ++k) CHECK(a.joints[k] == b.joints[k]);
    CHECK(a.timestamp_ms != b.timestamp_ms);
}

TEST_CASE("synth_skeleton: segment lengths track dimensions over a sequence") {
    BodyDimensions dims;
    Rng rng(24);
    // Animated 100-frame sequence with varying arm angles and torso motion.
    for (int frame = 0; frame < 100; ++frame) {
        const double t = frame / 30.0;
        PoseParams pose;
        pose.torso = RigidTransform::from_axis_angle(
            Eigen::Vector3d::UnitY(), 0.3 * std::sin(t),
            Eigen::Vector3d(0.05 * std::sin(2 * t), 0.9, 1.0 + 0.1 * std::cos(t)),
            FrameId::Object, FrameId::World);
        pose.left = {0.4 + 0.3 * std::sin(t), 0.2 * std::cos(t),
                     0.8 + 0.4 * std::sin(2 * t)};
        pose.right = {0.4 - 0.3 * std::sin(t), -0.1 * std::cos(t),
                      0.8 + 0.4 * std::cos(2 * t)};
        const Skeleton s = synth_skeleton(pose, dims, 1000.0 * t);

        auto len = [&](JointId a, JointId b) { return (s[a] - s[b]).norm(); };
        CHECK(std::abs(len(JointId::ShoulderLeft, JointId::ElbowLeft) -
                       dims.upper_arm_length) < 1e-12);
        CHECK(std::abs(len(JointId::ElbowLeft, JointId::WristLeft) -
                       dims.forearm_length) < 1e-12);
        CHECK(std::abs(len(JointId::WristLeft, JointId::HandLeft) -
                       dims.hand_length) < 1e-12);
        CHECK(std::abs(len(JointId::ShoulderRight, JointId::ElbowRight) -
                       dims.upper_arm_length) < 1e-12);
        CHECK(std::abs(len(JointId::ElbowRight, JointId::WristRight) -
                       dims.forearm_length) < 1e-12);
        CHECK(std::abs(len(JointId::ShoulderCenter, JointId::Head) -
                       dims.neck_length) < 1e-12);
        CHECK(std::abs(len(JointId::HipCenter, JointId::ShoulderCenter) -
                       dims.torso_height) < 1e-12);
        CHECK(std::abs(len(JointId::ShoulderLeft, JointId::ShoulderRight) -
                       dims.shoulder_width) < 1e-12);
        CHECK(std::abs(len(JointId::HipLeft, JointId::KneeLeft) -
                       dims.thigh_length) < 1e-12);
        CHECK(std::abs(len(JointId::KneeLeft, JointId::AnkleLeft) -
                       dims.shin_length) < 1e-12);
    }
}

TEST_CASE("synth_skeleton rejects invalid dimensions") {
    BodyDimensions bad;
    bad.torso_height = -0.5;
    CHECK_THROWS_AS(synth_skeleton(PoseParams{}, bad, 0.0), ValidationError);
    BodyDimensions zero;
    zero.upper_arm_length = 0.0;
    CHECK_THROWS_AS(synth_skeleton(PoseParams{}, zero, 0.0), ValidationError);
    BodyDimensions ratio;
    ratio.spine_ratio = 1.5;
    CHECK_THROWS_AS(synth_skeleton(PoseParams{}, ratio, 0.0), ValidationError);
}

TEST_CASE("skeleton JSON round trip and payload shape") {
    Rng rng(25);
    const Skeleton s = random_skeleton(rng);
    const nlohmann::json j = skeleton_to_json(s);
    CHECK(j["joints"].size() == 20);
    CHECK(j.contains("timestamp_ms"));
    CHECK(j.contains("chirality"));
    CHECK(j.contains("frame"));

    const Skeleton back = skeleton_from_json(j);
    for (int k = 0; k < kJointCount; ++k) CHECK(back.joints[k] == s.joints[k]);
    CHECK(back.timestamp_ms == s.timestamp_ms);
    CHECK(back.chirality == s.chirality);
    CHECK(back.frame == s.frame);

    nlohmann::json truncated = j;
    truncated["joints"].erase("Head");
    CHECK_THROWS_AS(skeleton_from_json(truncated), ParseError);

    nlohmann::json badc = j;
    badc["chirality"] = "Mirrored";
    CHECK_THROWS_AS(skeleton_from_json(badc), ParseError);
}

TEST_CASE("validate rejects non-finite joints") {
    Rng rng(26);
    Skeleton s = random_skeleton(rng);
    s[JointId::Head].y() = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("bone frame invariants") {
    CHECK_THROWS_AS(BoneFrame(JointId::ShoulderLeft, {1, 0, 0}, {1, 0, 0}),
                    ValidationError);
    CHECK_THROWS_AS(BoneFrame(JointId::ShoulderLeft, {2, 0, 0}, {0, 1, 0}),
                    ValidationError);
    const BoneFrame f(JointId::ShoulderLeft, {1, 0, 0}, {0, 0, 1});
    CHECK(f.direction.dot(f.roll_axis) == 0.0);
}

TEST_CASE("transform and reflect keep labels, check frames") {
    Rng rng(27);
    const Skeleton s = random_skeleton(rng);
    const RigidTransform wrong(rng.rotation(), rng.normal3(1.0), FrameId::World,
                               FrameId::HmdRgb);
    if (s.frame != wrong.from())
        CHECK_THROWS_AS(transform_skeleton(s, wrong), FrameMismatchError);

    const ReflectionTransform refl = reflection_about(
        MirrorPlane{Eigen::Vector3d(0, 0, 1), 0.5, FrameId::World});
    if (s.frame != refl.frame())
        CHECK_THROWS_AS(reflect_skeleton(s, refl), FrameMismatchError);
}

} // TEST_SUITE
