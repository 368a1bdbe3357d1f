#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wornsim/geom.hpp"

namespace wornsim {

using JointVector = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

enum class JointKind { kRevolute, kPrismatic };

struct JointLimits {
  double min = -M_PI;
  double max = M_PI;
};

/// One joint of a serial chain. `offset` is the fixed link transform from
/// the parent joint frame to this joint's frame before motion; the joint then
/// rotates about (or slides along) `axis`, expressed in that frame. `name`
/// labels the frame after the joint motion.
struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kRevolute;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  JointLimits limits;
  Rigid offset;
};

/// Motion contributed by a single joint at value `value`.
Rigid joint_motion(const JointSpec& joint, double value);

/// Immutable serial chain base -> joints -> tip. A chain without joints is a
/// fixed transform.
class KinematicChain {
 public:
  KinematicChain(FrameId base, std::vector<JointSpec> joints, FrameId tip,
                 Rigid tip_offset = Rigid::identity());

  const FrameId& base() const noexcept { return base_; }
  const FrameId& tip() const noexcept { return tip_; }
  const std::vector<JointSpec>& joints() const noexcept { return joints_; }
  const Rigid& tip_offset() const noexcept { return tip_offset_; }
  std::size_t dof() const noexcept { return joints_.size(); }

  /// T_{tip -> base}.
  Transform forward(const JointVector& q) const;

  /// T_{frame -> base} for the base, a joint frame, or the tip.
  Transform forward_to(const FrameId& frame, const JointVector& q) const;

  /// Geometric Jacobian of the tip in the base frame: rows 0-2 linear,
  /// rows 3-5 angular.
  Jacobian jacobian(const JointVector& q) const;

  /// Clamp to joint limits; `clamped` is set when any value moved.
  JointVector clamp(const JointVector& q, bool* clamped = nullptr) const;
  bool within_limits(const JointVector& q, double tol = 0.0) const;

  /// Upper bound on the tip distance from the base origin.
  double reach_bound() const;

  /// Index of the joint whose post-motion frame is `frame`, if any.
  std::optional<std::size_t> joint_index(const FrameId& frame) const;

 private:
  void check_dimension(const JointVector& q) const;

  FrameId base_;
  std::vector<JointSpec> joints_;
  FrameId tip_;
  Rigid tip_offset_;
};

/// forward_kinematics(chain, q): T_{tip -> base}.
inline Transform forward_kinematics(const KinematicChain& chain, const JointVector& q) {
  return chain.forward(q);
}

/// Serially connect `extension` at `attach_frame` of `human` (its base, a
/// joint frame, or its tip). The combined chain keeps the human joints up to
/// the attach frame followed by every extension joint, and satisfies
/// FK(combined) = compose(FK(extension), FK(human at attach_frame)).
KinematicChain connect_serial(const KinematicChain& human, const FrameId& attach_frame,
                              const KinematicChain& extension);

/// Branched chain (tree of joints) with named frames hanging off joints.
class KinematicTree {
 public:
  struct Joint {
    JointSpec spec;
    int parent = -1;  // -1: root
  };
  struct Frame {
    FrameId name;
    int parent = -1;  // joint index, -1: root
    Rigid offset;
  };
  struct Path {
    KinematicChain chain;
    std::vector<std::size_t> joint_indices;

    JointVector gather(const JointVector& full) const;
  };

  KinematicTree(FrameId root, std::vector<Joint> joints, std::vector<Frame> frames);

  const FrameId& root() const noexcept { return root_; }
  std::size_t dof() const noexcept { return joints_.size(); }
  const std::vector<Joint>& joints() const noexcept { return joints_; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }
  bool has_frame(const FrameId& frame) const;
  std::optional<std::size_t> joint_index(std::string_view name) const;

  /// Serial chain from the root to `frame`. Throws UnknownFrame.
  Path path_to(const FrameId& frame) const;

  /// T_{frame -> world} for every named frame given T_{root -> world}.
  std::map<FrameId, Transform> frame_poses(const JointVector& q,
                                           const Transform& root_pose) const;

  JointVector clamp(const JointVector& q, bool* clamped = nullptr) const;

 private:
  FrameId root_;
  std::vector<Joint> joints_;
  std::vector<Frame> frames_;
};

}  // namespace wornsim
