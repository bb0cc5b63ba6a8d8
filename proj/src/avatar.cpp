#include "mirage/avatar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

#include "mirage/ply.hpp"

namespace mirage {

namespace {

Eigen::Vector3d orthogonal_unit(const Eigen::Vector3d& u) {
    const Eigen::Vector3d ax = u.cwiseAbs();
    Eigen::Vector3d e = Eigen::Vector3d::UnitX();
    if (ax.y() <= ax.x() && ax.y() <= ax.z()) e = Eigen::Vector3d::UnitY();
    else if (ax.z() <= ax.x() && ax.z() <= ax.y()) e = Eigen::Vector3d::UnitZ();
    return u.cross(e).normalized();
}

Eigen::Matrix3d minimal_rotation(const Eigen::Vector3d& u,
                                 const Eigen::Vector3d& v) {
    const double c = u.dot(v);
    const Eigen::Vector3d axis = u.cross(v);
    const double s = axis.norm();
    if (s < 1e-12) {
        if (c > 0.0) return Eigen::Matrix3d::Identity();
        return Eigen::AngleAxisd(std::numbers::pi, orthogonal_unit(u))
            .toRotationMatrix();
    }
    return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

/// Columns [dir, roll, dir x roll]; roll is projected off dir first.
std::optional<Eigen::Matrix3d> bone_basis(const Eigen::Vector3d& dir,
                                          const Eigen::Vector3d& roll) {
    Eigen::Vector3d r = roll - roll.dot(dir) * dir;
    const double n = r.norm();
    if (n < 1e-9) return std::nullopt;
    r /= n;
    Eigen::Matrix3d m;
    m.col(0) = dir;
    m.col(1) = r;
    m.col(2) = dir.cross(r);
    return m;
}

Eigen::Vector3d default_roll_reference(const Eigen::Vector3d& dir) {
    Eigen::Vector3d r =
        Eigen::Vector3d::UnitZ() - Eigen::Vector3d::UnitZ().dot(dir) * dir;
    if (r.norm() < 1e-6)
        r = Eigen::Vector3d::UnitY() - Eigen::Vector3d::UnitY().dot(dir) * dir;
    return r.normalized();
}

} // namespace

Armature::Armature(std::vector<Bone> bones,
                   std::map<std::string, std::pair<JointId, JointId>> bone_map,
                   JointId anchor_joint)
    : bones_(std::move(bones)),
      bone_map_(std::move(bone_map)),
      anchor_joint_(anchor_joint) {
    if (bones_.empty()) throw MalformedRigError("armature has no bones");

    for (std::size_t i = 0; i < bones_.size(); ++i) {
        const Bone& b = bones_[i];
        if (b.id.empty()) throw MalformedRigError("bone with empty id");
        if (!index_.emplace(b.id, static_cast<int>(i)).second)
            throw MalformedRigError("duplicate bone id: " + b.id);
        if ((b.tail - b.head).norm() < 1e-12)
            throw MalformedRigError("bone '" + b.id + "' has zero length");
    }

    int roots = 0;
    for (const Bone& b : bones_) {
        if (!b.parent) {
            ++roots;
        } else if (!index_.count(*b.parent)) {
            throw MalformedRigError("bone '" + b.id +
                                    "' references unknown parent '" +
                                    *b.parent + "'");
        }
    }
    if (roots != 1)
        throw MalformedRigError("armature must have exactly one root bone");

    // Parent links form a tree when a walk from the root reaches every bone.
    std::vector<std::vector<int>> children(bones_.size());
    for (std::size_t i = 0; i < bones_.size(); ++i)
        if (bones_[i].parent)
            children[static_cast<std::size_t>(bone_index(*bones_[i].parent))]
                .push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < bones_.size(); ++i)
        if (!bones_[i].parent) topo_order_.push_back(static_cast<int>(i));
    for (std::size_t k = 0; k < topo_order_.size(); ++k)
        for (int c : children[static_cast<std::size_t>(topo_order_[k])])
            topo_order_.push_back(c);
    if (topo_order_.size() != bones_.size())
        throw MalformedRigError("armature parent links contain a cycle");

    for (const auto& [id, joints] : bone_map_) {
        if (!index_.count(id))
            throw MalformedRigError("mapping references unknown bone '" + id +
                                    "'");
        if (joints.first == joints.second)
            throw MalformedRigError("bone '" + id +
                                    "' maps a joint onto itself");
    }

    if (!bone_of_joint(anchor_joint_))
        throw MalformedRigError(
            "anchor joint " + std::string(joint_name(anchor_joint_)) +
            " is not covered by the bone mapping");
}

int Armature::bone_index(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        throw MalformedRigError("unknown bone id: " + id);
    return it->second;
}

std::optional<int> Armature::parent_index(int bone) const {
    const auto& b = bones_[static_cast<std::size_t>(bone)];
    if (!b.parent) return std::nullopt;
    return bone_index(*b.parent);
}

std::optional<Eigen::Vector3d> Armature::bind_joint_position(JointId id) const {
    for (const auto& [bone_id, joints] : bone_map_) {
        const Bone& b = bones_[static_cast<std::size_t>(bone_index(bone_id))];
        if (joints.first == id) return b.head;
        if (joints.second == id) return b.tail;
    }
    return std::nullopt;
}

std::optional<int> Armature::bone_of_joint(JointId id) const {
    for (const auto& [bone_id, joints] : bone_map_) {
        if (joints.first == id || joints.second == id) return bone_index(bone_id);
    }
    return std::nullopt;
}

std::vector<JointId> Armature::mapped_joints() const {
    std::set<JointId> ids;
    for (const auto& [bone_id, joints] : bone_map_) {
        ids.insert(joints.first);
        ids.insert(joints.second);
    }
    return {ids.begin(), ids.end()};
}

void SkinnedMesh::validate(std::size_t bone_count) const {
    if (influences.size() != vertices.size())
        throw ValidationError("weight table size does not match vertex count");
    for (std::size_t v = 0; v < influences.size(); ++v) {
        double sum = 0.0;
        for (const VertexInfluence& inf : influences[v]) {
            if (inf.bone < 0 || static_cast<std::size_t>(inf.bone) >= bone_count)
                throw ValidationError("vertex " + std::to_string(v) +
                                      " references an unknown bone");
            if (inf.weight < 0.0)
                throw ValidationError("vertex " + std::to_string(v) +
                                      " has a negative weight");
            sum += inf.weight;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ValidationError("vertex " + std::to_string(v) +
                                  " weights sum to " + std::to_string(sum));
    }
    for (const auto& t : triangles) {
        for (int i : t)
            if (i < 0 || static_cast<std::size_t>(i) >= vertices.size())
                throw ValidationError("triangle index out of range");
    }
}

std::pair<Armature, SkinnedMesh> personalize(const Armature& armature,
                                             const SkinnedMesh& mesh,
                                             const BodyMeasurements& measured) {
    if (!(measured.shoulder_distance > 0.0) || !(measured.torso_height > 0.0))
        throw ValidationError("body measurements must be positive");

    const auto sl = armature.bind_joint_position(JointId::ShoulderLeft);
    const auto sr = armature.bind_joint_position(JointId::ShoulderRight);
    const auto sc = armature.bind_joint_position(JointId::ShoulderCenter);
    const auto hc = armature.bind_joint_position(JointId::HipCenter);
    if (!sl || !sr || !sc || !hc)
        throw MalformedRigError(
            "personalization needs shoulder and torso joints in the mapping");

    const Eigen::Vector3d shoulder_axis = *sl - *sr;
    const Eigen::Vector3d torso_axis = *sc - *hc;
    const double model_shoulder = shoulder_axis.norm();
    const double model_torso = torso_axis.norm();
    if (model_shoulder < 1e-12 || model_torso < 1e-12)
        throw MalformedRigError("model shoulder or torso span is zero");

    // The scale factors are per axis, so the measured segments must be
    // axis-aligned in the bind frame for the fit to be exact.
    if (std::hypot(shoulder_axis.y(), shoulder_axis.z()) >
        1e-6 * model_shoulder)
        throw MalformedRigError(
            "bind pose shoulders are not separated along the lateral axis");
    if (std::hypot(torso_axis.x(), torso_axis.z()) > 1e-6 * model_torso)
        throw MalformedRigError(
            "bind pose torso does not run along the longitudinal axis");

    const double sx = measured.shoulder_distance / model_shoulder;
    const double sy = measured.torso_height / model_torso;
    const double sz = std::sqrt(sx * sy);
    const Eigen::Array3d scale(sx, sy, sz);

    const Eigen::Vector3d pivot =
        *armature.bind_joint_position(armature.anchor_joint());
    auto rescale = [&](const Eigen::Vector3d& p) -> Eigen::Vector3d {
        return pivot.array() + scale * (p - pivot).array();
    };

    std::vector<Bone> bones = armature.bones();
    for (Bone& b : bones) {
        b.head = rescale(b.head);
        b.tail = rescale(b.tail);
        if (b.bind_roll) {
            const Eigen::Vector3d r = (scale * b.bind_roll->array()).matrix();
            b.bind_roll = r.normalized();
        }
    }

    SkinnedMesh scaled = mesh;
    for (auto& v : scaled.vertices) v = rescale(v);

    return {Armature(std::move(bones), armature.bone_map(),
                     armature.anchor_joint()),
            std::move(scaled)};
}

PosedArmature retarget(const Armature& armature, const Skeleton& skeleton,
                       const RollTargets& rolls, const ExtraBonePoses& extras) {
    for (const auto& [id, rot] : extras.local_rotation_by_bone) {
        armature.bone_index(id); // throws on unknown bones
        if (armature.bone_map().count(id))
            throw ValidationError("bone '" + id +
                                  "' is skeleton-mapped; explicit poses drive "
                                  "only unmapped bones");
        if (!rot.allFinite() ||
            (rot.transpose() * rot - Eigen::Matrix3d::Identity())
                    .cwiseAbs()
                    .maxCoeff() > 1e-6 ||
            rot.determinant() < 0.0)
            throw ValidationError("explicit pose for bone '" + id +
                                  "' is not a rotation");
    }

    std::vector<std::string> missing;
    for (const auto& [bone_id, joints] : armature.bone_map()) {
        if (!skeleton[joints.first].allFinite())
            missing.emplace_back(joint_name(joints.first));
        if (!skeleton[joints.second].allFinite())
            missing.emplace_back(joint_name(joints.second));
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()),
                      missing.end());
        std::ostringstream msg;
        msg << "skeleton joints unavailable for retargeting:";
        for (const auto& m : missing) msg << ' ' << m;
        throw RetargetError(msg.str());
    }

    const auto& bones = armature.bones();
    std::vector<Eigen::Matrix3d> rot(bones.size(), Eigen::Matrix3d::Identity());
    std::vector<Eigen::Vector3d> head_posed(bones.size());

    for (int idx : armature.topo_order()) {
        const Bone& bone = bones[static_cast<std::size_t>(idx)];
        const Eigen::Vector3d u = (bone.tail - bone.head).normalized();

        auto mapped = armature.bone_map().find(bone.id);
        if (mapped != armature.bone_map().end()) {
            const Eigen::Vector3d seg = skeleton[mapped->second.second] -
                                        skeleton[mapped->second.first];
            if (seg.norm() < 1e-9)
                throw RetargetError(
                    "zero-length skeleton bone between " +
                    std::string(joint_name(mapped->second.first)) + " and " +
                    std::string(joint_name(mapped->second.second)));
            const Eigen::Vector3d v = seg.normalized();

            auto roll_it = rolls.axis_by_bone.find(bone.id);
            bool oriented = false;
            if (roll_it != rolls.axis_by_bone.end()) {
                const Eigen::Vector3d bind_roll =
                    bone.bind_roll ? bone.bind_roll->normalized()
                                   : default_roll_reference(u);
                const auto source = bone_basis(u, bind_roll);
                const auto target = bone_basis(v, roll_it->second);
                if (source && target) {
                    rot[static_cast<std::size_t>(idx)] =
                        *target * source->transpose();
                    oriented = true;
                }
            }
            if (!oriented)
                rot[static_cast<std::size_t>(idx)] = minimal_rotation(u, v);
        } else {
            Eigen::Matrix3d inherited = Eigen::Matrix3d::Identity();
            if (auto p = armature.parent_index(idx))
                inherited = rot[static_cast<std::size_t>(*p)];
            auto extra = extras.local_rotation_by_bone.find(bone.id);
            rot[static_cast<std::size_t>(idx)] =
                extra != extras.local_rotation_by_bone.end()
                    ? Eigen::Matrix3d(inherited * extra->second)
                    : inherited;
        }

        if (auto p = armature.parent_index(idx)) {
            const Bone& parent = bones[static_cast<std::size_t>(*p)];
            head_posed[static_cast<std::size_t>(idx)] =
                head_posed[static_cast<std::size_t>(*p)] +
                rot[static_cast<std::size_t>(*p)] * (bone.head - parent.head);
        } else {
            head_posed[static_cast<std::size_t>(idx)] = bone.head;
        }
    }

    PosedArmature posed;
    posed.bone_transforms.reserve(bones.size());
    for (std::size_t i = 0; i < bones.size(); ++i) {
        posed.bone_transforms.emplace_back(
            rot[i], head_posed[i] - rot[i] * bones[i].head, FrameId::Object,
            skeleton.frame);
    }
    return posed;
}

RigidTransform anchor(const PosedArmature& posed, const Armature& armature,
                      const Skeleton& skeleton) {
    const JointId id = armature.anchor_joint();
    if (!skeleton[id].allFinite())
        throw AnchoringError("anchor joint " + std::string(joint_name(id)) +
                             " is not tracked");
    const auto bone = armature.bone_of_joint(id);
    const auto bind = armature.bind_joint_position(id);
    if (!bone || !bind)
        throw AnchoringError("anchor joint " + std::string(joint_name(id)) +
                             " is not mapped on the armature");
    if (posed.bone_transforms.size() != armature.bones().size())
        throw AnchoringError("posed armature does not match the rig");
    const Eigen::Vector3d current =
        posed.bone_transforms[static_cast<std::size_t>(*bone)].apply(*bind);
    const RigidTransform& any = posed.bone_transforms.front();
    return {Eigen::Matrix3d::Identity(), skeleton[id] - current, any.to(),
            any.to()};
}

std::vector<Eigen::Vector3d> skin(const SkinnedMesh& mesh,
                                  const PosedArmature& posed) {
    std::vector<Eigen::Vector3d> out(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        Eigen::Vector3d acc = Eigen::Vector3d::Zero();
        for (const VertexInfluence& inf : mesh.influences[v]) {
            acc += inf.weight *
                   posed.bone_transforms[static_cast<std::size_t>(inf.bone)]
                       .apply(mesh.vertices[v]);
        }
        out[v] = acc;
    }
    return out;
}

std::optional<Eigen::Vector3d> posed_joint_position(const Armature& armature,
                                                    const PosedArmature& posed,
                                                    JointId id) {
    const auto bone = armature.bone_of_joint(id);
    const auto bind = armature.bind_joint_position(id);
    if (!bone || !bind) return std::nullopt;
    return posed.bone_transforms[static_cast<std::size_t>(*bone)].apply(*bind);
}

nlohmann::json rig_sidecar_to_json(const Armature& armature,
                                   const SkinnedMesh& mesh) {
    nlohmann::json bones = nlohmann::json::array();
    for (const Bone& b : armature.bones()) {
        nlohmann::json jb = {{"id", b.id},
                             {"head", {b.head.x(), b.head.y(), b.head.z()}},
                             {"tail", {b.tail.x(), b.tail.y(), b.tail.z()}}};
        jb["parent"] = b.parent ? nlohmann::json(*b.parent) : nlohmann::json();
        if (b.bind_roll)
            jb["bind_roll"] = {b.bind_roll->x(), b.bind_roll->y(),
                               b.bind_roll->z()};
        bones.push_back(std::move(jb));
    }
    nlohmann::json mapping;
    for (const auto& [id, joints] : armature.bone_map())
        mapping[id] = {std::string(joint_name(joints.first)),
                       std::string(joint_name(joints.second))};
    nlohmann::json weights = nlohmann::json::array();
    for (const auto& infs : mesh.influences) {
        nlohmann::json row = nlohmann::json::array();
        for (const VertexInfluence& inf : infs)
            row.push_back({armature.bones()[static_cast<std::size_t>(inf.bone)].id,
                           inf.weight});
        weights.push_back(std::move(row));
    }
    return {{"bones", bones},
            {"mapping", mapping},
            {"anchor_joint", std::string(joint_name(armature.anchor_joint()))},
            {"weights", weights}};
}

std::pair<Armature, SkinnedMesh> rig_from_parts(
    const nlohmann::json& sidecar, std::vector<Eigen::Vector3d> vertices,
    std::vector<std::array<int, 3>> triangles) {
    try {
        std::vector<Bone> bones;
        for (const auto& jb : sidecar.at("bones")) {
            Bone b;
            b.id = jb.at("id").get<std::string>();
            if (jb.contains("parent") && !jb.at("parent").is_null())
                b.parent = jb.at("parent").get<std::string>();
            const auto& h = jb.at("head");
            const auto& t = jb.at("tail");
            b.head = {h.at(0).get<double>(), h.at(1).get<double>(),
                      h.at(2).get<double>()};
            b.tail = {t.at(0).get<double>(), t.at(1).get<double>(),
                      t.at(2).get<double>()};
            if (jb.contains("bind_roll")) {
                const auto& r = jb.at("bind_roll");
                b.bind_roll = Eigen::Vector3d(r.at(0).get<double>(),
                                              r.at(1).get<double>(),
                                              r.at(2).get<double>());
            }
            bones.push_back(std::move(b));
        }

        std::map<std::string, std::pair<JointId, JointId>> mapping;
        for (const auto& [id, joints] : sidecar.at("mapping").items()) {
            mapping[id] = {joint_from_name(joints.at(0).get<std::string>()),
                           joint_from_name(joints.at(1).get<std::string>())};
        }

        Armature armature(std::move(bones), std::move(mapping),
                          joint_from_name(
                              sidecar.at("anchor_joint").get<std::string>()));

        SkinnedMesh mesh;
        mesh.vertices = std::move(vertices);
        mesh.triangles = std::move(triangles);
        for (const auto& row : sidecar.at("weights")) {
            std::vector<VertexInfluence> infs;
            infs.reserve(row.size());
            for (const auto& entry : row)
                infs.push_back(
                    {armature.bone_index(entry.at(0).get<std::string>()),
                     entry.at(1).get<double>()});
            mesh.influences.push_back(std::move(infs));
        }
        mesh.validate(armature.bones().size());
        return {std::move(armature), std::move(mesh)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad rig sidecar JSON: ") + e.what());
    }
}

std::pair<Armature, SkinnedMesh> load_rig(const std::string& mesh_path,
                                          const std::string& sidecar_path) {
    PlyMesh ply = load_ply(mesh_path);
    std::ifstream in(sidecar_path);
    if (!in) throw IoError("cannot open rig sidecar: " + sidecar_path);
    nlohmann::json sidecar;
    try {
        in >> sidecar;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(sidecar_path + ": " + e.what());
    }
    return rig_from_parts(sidecar, std::move(ply.vertices),
                          std::move(ply.triangles));
}

void save_rig(const std::string& mesh_path, const std::string& sidecar_path,
              const Armature& armature, const SkinnedMesh& mesh) {
    save_ply(mesh_path, mesh.vertices, mesh.triangles);
    std::ofstream out(sidecar_path);
    if (!out) throw IoError("cannot write rig sidecar: " + sidecar_path);
    out << rig_sidecar_to_json(armature, mesh).dump(2) << '\n';
}

std::pair<Armature, SkinnedMesh> build_reference_rig(
    const ReferenceRigParams& params) {
    params.dims.validate();
    if (params.radial_segments < 3 || params.axial_segments < 1)
        throw ValidationError("reference rig needs >= 3 radial and >= 1 axial "
                              "segments");

    const Skeleton bind = synth_skeleton(
        PoseParams{RigidTransform::identity(FrameId::Object, FrameId::Object),
                   {}, {}},
        params.dims, 0.0);

    struct Spec {
        const char* id;
        const char* parent;
        JointId a;
        JointId b;
        double radius;
        bool arm;
    };
    const Spec specs[] = {
        {"spine", nullptr, JointId::HipCenter, JointId::ShoulderCenter, 0.12, false},
        {"neck", "spine", JointId::ShoulderCenter, JointId::Head, 0.05, false},
        {"clavicle_l", "spine", JointId::ShoulderCenter, JointId::ShoulderLeft, 0.045, false},
        {"clavicle_r", "spine", JointId::ShoulderCenter, JointId::ShoulderRight, 0.045, false},
        {"upper_arm_l", "clavicle_l", JointId::ShoulderLeft, JointId::ElbowLeft, 0.042, true},
        {"upper_arm_r", "clavicle_r", JointId::ShoulderRight, JointId::ElbowRight, 0.042, true},
        {"forearm_l", "upper_arm_l", JointId::ElbowLeft, JointId::WristLeft, 0.036, true},
        {"forearm_r", "upper_arm_r", JointId::ElbowRight, JointId::WristRight, 0.036, true},
        {"hand_l", "forearm_l", JointId::WristLeft, JointId::HandLeft, 0.03, false},
        {"hand_r", "forearm_r", JointId::WristRight, JointId::HandRight, 0.03, false},
    };

    std::vector<Bone> bones;
    std::map<std::string, std::pair<JointId, JointId>> mapping;
    std::map<std::string, int> parent_of;
    for (const Spec& sp : specs) {
        Bone b;
        b.id = sp.id;
        if (sp.parent) b.parent = sp.parent;
        b.head = bind[sp.a];
        b.tail = bind[sp.b];
        if (sp.arm) b.bind_roll = Eigen::Vector3d::UnitZ();
        mapping[sp.id] = {sp.a, sp.b};
        bones.push_back(std::move(b));
    }

    SkinnedMesh mesh;
    const int radial = params.radial_segments;
    const int axial = params.axial_segments;
    constexpr double kBlend = 0.25; // parent-blend zone near the bone head

    for (std::size_t bi = 0; bi < std::size(specs); ++bi) {
        const Spec& sp = specs[bi];
        const Eigen::Vector3d head = bind[sp.a];
        const Eigen::Vector3d tail = bind[sp.b];
        const Eigen::Vector3d axis = (tail - head).normalized();
        const Eigen::Vector3d u = orthogonal_unit(axis);
        const Eigen::Vector3d v = axis.cross(u);

        const int base = static_cast<int>(mesh.vertices.size());
        for (int ring = 0; ring <= axial; ++ring) {
            const double t = static_cast<double>(ring) / axial;
            const Eigen::Vector3d center = head + t * (tail - head);
            for (int j = 0; j < radial; ++j) {
                const double ang =
                    2.0 * std::numbers::pi * static_cast<double>(j) / radial;
                mesh.vertices.push_back(center + sp.radius *
                                                     (std::cos(ang) * u +
                                                      std::sin(ang) * v));
                std::vector<VertexInfluence> infs;
                if (sp.parent && t < kBlend) {
                    const double wp = 0.5 * (1.0 - t / kBlend);
                    infs.push_back(
                        {static_cast<int>(bi), 1.0 - wp});
                    int pi = 0;
                    for (std::size_t k = 0; k < std::size(specs); ++k)
                        if (std::string_view(specs[k].id) == sp.parent)
                            pi = static_cast<int>(k);
                    infs.push_back({pi, wp});
                } else {
                    infs.push_back({static_cast<int>(bi), 1.0});
                }
                mesh.influences.push_back(std::move(infs));
            }
        }
        for (int ring = 0; ring < axial; ++ring) {
            for (int j = 0; j < radial; ++j) {
                const int j1 = (j + 1) % radial;
                const int a0 = base + ring * radial + j;
                const int a1 = base + ring * radial + j1;
                const int b0 = base + (ring + 1) * radial + j;
                const int b1 = base + (ring + 1) * radial + j1;
                mesh.triangles.push_back({a0, a1, b1});
                mesh.triangles.push_back({a0, b1, b0});
            }
        }
    }

    Armature armature(std::move(bones), std::move(mapping),
                      JointId::ShoulderCenter);
    mesh.validate(armature.bones().size());
    return {std::move(armature), std::move(mesh)};
}

} // namespace mirage
