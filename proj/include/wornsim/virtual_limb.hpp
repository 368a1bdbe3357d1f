#pragma once

#include <map>
#include <optional>
#include <variant>

#include "wornsim/geom.hpp"
#include "wornsim/kinematics.hpp"
#include "wornsim/servo.hpp"

namespace wornsim {

using BodyPoses = std::map<FrameId, Transform>;  // T_{frame -> W}

/// Virtual arm with its own joints. The chain base sits at `mount` in E_H.
struct ChainLinkage {
  KinematicChain chain;
  JointVector q;
  Transform mount;  // T_{chain base -> E_H}
  double max_joint_velocity = 2.0;
};

/// T_{E_AR -> E_H}: a fixed offset or a chain-backed virtual arm.
using VirtualLinkage = std::variant<Transform, ChainLinkage>;

/// Default linkage: E_AR 0.4 m ahead of the attachment frame.
VirtualLinkage default_linkage();

/// Current T_{E_AR -> E_H}.
Transform linkage_pose(const VirtualLinkage& linkage);

struct TwistCaps {
  double linear = 0.5;   // m/s
  double angular = 1.5;  // rad/s
};

/// Joystick-like input: a twist of E_AR expressed in E_H plus a gripper bit.
struct AuxiliaryCommand {
  Vector6d twist = Vector6d::Zero();  // (v; omega)
  bool gripper = false;
  double timestamp = 0.0;
};

/// Scale the linear and angular parts independently down to their caps.
Vector6d cap_twist(const Vector6d& twist, const TwistCaps& caps);

enum class AttachMode { kPreserveLinkage, kPreserveWorld };

struct VirtualLimbState {
  std::optional<FrameId> attachment;  // empty when detached
  VirtualLinkage linkage = default_linkage();
  Transform last_world_pose = Transform::identity(frames::kVirtualEffector, frames::kWorld);
  bool gripper = false;

  bool attached() const noexcept { return attachment.has_value(); }
};

/// T_{E_AR -> W} = T_{E_AR -> E_H} * T_{E_H -> W}.
Transform virtual_effector_world(const Transform& linkage_pose, const Transform& body_pose);

/// Pose of body frame `frame` relabeled as E_H -> W. Throws UnknownFrame.
Transform attachment_pose(const BodyPoses& body, const FrameId& frame);

/// Fresh limb attached to `frame`.
VirtualLimbState make_virtual_limb(const FrameId& frame, VirtualLinkage linkage, const BodyPoses& body);

/// Integrate an auxiliary twist over dt. Throws Detached.
VirtualLimbState apply_aux_command(const VirtualLimbState& state, const AuxiliaryCommand& cmd, double dt,
                                   const TwistCaps& caps = {});

/// Attach (or move the attachment) to `frame`. Throws UnknownFrame.
VirtualLimbState attach(const VirtualLimbState& state, const FrameId& frame, const BodyPoses& body,
                        AttachMode mode = AttachMode::kPreserveWorld);

/// Freeze the world pose. Throws Detached when already detached.
VirtualLimbState detach(const VirtualLimbState& state);

/// Recompute last_world_pose from the current body poses; no-op when detached.
VirtualLimbState refresh(const VirtualLimbState& state, const BodyPoses& body);

}  // namespace wornsim
