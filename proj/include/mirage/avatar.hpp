#ifndef MIRAGE_AVATAR_HPP
#define MIRAGE_AVATAR_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mirage/skeleton.hpp"

namespace mirage {

/// One armature bone in bind pose. The optional bind_roll records the
/// reference facing direction used when a runtime roll axis is supplied.
struct Bone {
    std::string id;
    std::optional<std::string> parent;
    Eigen::Vector3d head = Eigen::Vector3d::Zero();
    Eigen::Vector3d tail = Eigen::Vector3d::Zero();
    std::optional<Eigen::Vector3d> bind_roll;
};

/// Bone hierarchy plus the skeleton-joint mapping that drives it.
///
/// Bind pose convention: X lateral (anatomical left), Y longitudinal (up),
/// Z depth (chest-forward), with the shoulder pair separated purely along X
/// and the hip-to-shoulder segment running purely along Y. Personalization
/// relies on this alignment.
class Armature {
public:
    Armature(std::vector<Bone> bones,
             std::map<std::string, std::pair<JointId, JointId>> bone_map,
             JointId anchor_joint);

    const std::vector<Bone>& bones() const { return bones_; }
    const std::map<std::string, std::pair<JointId, JointId>>& bone_map() const {
        return bone_map_;
    }
    JointId anchor_joint() const { return anchor_joint_; }

    int bone_index(const std::string& id) const; // throws MalformedRigError
    const std::vector<int>& topo_order() const { return topo_order_; }
    std::optional<int> parent_index(int bone) const;

    /// Bind-pose position of a mapped skeleton joint (head or tail of the
    /// first bone that references it).
    std::optional<Eigen::Vector3d> bind_joint_position(JointId id) const;

    /// Index of a bone whose mapping touches the joint, if any.
    std::optional<int> bone_of_joint(JointId id) const;

    std::vector<JointId> mapped_joints() const;

private:
    std::vector<Bone> bones_;
    std::map<std::string, std::pair<JointId, JointId>> bone_map_;
    JointId anchor_joint_;
    std::map<std::string, int> index_;
    std::vector<int> topo_order_;
};

struct VertexInfluence {
    int bone = 0;
    double weight = 0.0;
};

struct SkinnedMesh {
    std::vector<Eigen::Vector3d> vertices; // bind pose
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::vector<VertexInfluence>> influences; // per vertex

    /// Weight and index invariants; throws ValidationError.
    void validate(std::size_t bone_count) const;
};

/// Per-bone rigid transforms from bind pose to the current pose.
struct PosedArmature {
    std::vector<RigidTransform> bone_transforms; // aligned with Armature::bones
};

/// Scales armature and mesh about the anchor joint so the model reproduces
/// the measured shoulder distance (lateral axis) and torso height
/// (longitudinal axis); the depth axis gets the geometric mean of the two.
std::pair<Armature, SkinnedMesh> personalize(const Armature& armature,
                                             const SkinnedMesh& mesh,
                                             const BodyMeasurements& measured);

/// Runtime roll axes keyed by bone id (typically the four arm bones).
struct RollTargets {
    std::map<std::string, Eigen::Vector3d> axis_by_bone;
};

/// Explicit local rotations for bones outside the skeleton mapping
/// (animation bones such as a helmet visor). Applied on top of the
/// inherited parent rotation, pivoting at the bone head.
struct ExtraBonePoses {
    std::map<std::string, Eigen::Matrix3d> local_rotation_by_bone;
};

/// Rotates every mapped bone so its direction matches the skeleton bone
/// between its mapped joints; bones with a roll target are additionally
/// twisted so the bind roll reference lands on the given axis. Unmapped
/// bones inherit the parent rotation, composed with their explicit pose
/// when one is given (naming a mapped bone there is an error). Bone
/// lengths are preserved; global placement is resolved by anchor().
PosedArmature retarget(const Armature& armature, const Skeleton& skeleton,
                       const RollTargets& rolls = {},
                       const ExtraBonePoses& extras = {});

/// Pure translation that moves the posed armature's anchor joint exactly
/// onto the skeleton's anchor joint.
RigidTransform anchor(const PosedArmature& posed, const Armature& armature,
                      const Skeleton& skeleton);

/// Linear blend skinning: v' = sum_b w_vb * T_b(v_bind).
std::vector<Eigen::Vector3d> skin(const SkinnedMesh& mesh,
                                  const PosedArmature& posed);

/// Position of a mapped joint under the posed armature.
std::optional<Eigen::Vector3d> posed_joint_position(const Armature& armature,
                                                    const PosedArmature& posed,
                                                    JointId id);

/// Rig interchange: PLY mesh plus JSON sidecar (bones, mapping, anchor
/// joint, per-vertex weights keyed by bone id).
std::pair<Armature, SkinnedMesh> load_rig(const std::string& mesh_path,
                                          const std::string& sidecar_path);
void save_rig(const std::string& mesh_path, const std::string& sidecar_path,
              const Armature& armature, const SkinnedMesh& mesh);

nlohmann::json rig_sidecar_to_json(const Armature& armature,
                                   const SkinnedMesh& mesh);
std::pair<Armature, SkinnedMesh> rig_from_parts(const nlohmann::json& sidecar,
                                                std::vector<Eigen::Vector3d> vertices,
                                                std::vector<std::array<int, 3>> triangles);

/// Procedural upper-body rig (tube segments around each bone) sized from
/// the given body dimensions; serves as the default simulation asset.
struct ReferenceRigParams {
    BodyDimensions dims;
    int radial_segments = 12;
    int axial_segments = 6;
};

std::pair<Armature, SkinnedMesh> build_reference_rig(const ReferenceRigParams& params);

} // namespace mirage

#endif
