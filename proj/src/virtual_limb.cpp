#include "wornsim/virtual_limb.hpp"

#include "wornsim/errors.hpp"

namespace wornsim {

namespace {

Transform integrate_twist(const Transform& pose, const Vector6d& twist, double dt) {
  const Eigen::Quaterniond turn = from_rotation_vector(twist.tail<3>() * dt);
  const Rigid motion(turn * pose.rotation(), pose.translation() + twist.head<3>() * dt);
  return Transform(pose.from(), pose.to(), motion);
}

}  // namespace

VirtualLinkage default_linkage() {
  return Transform(frames::kVirtualEffector, frames::kBody, Rigid::translate(0.4, 0.0, 0.0));
}

Transform linkage_pose(const VirtualLinkage& linkage) {
  if (const auto* fixed = std::get_if<Transform>(&linkage)) {
    if (fixed->from() != frames::kVirtualEffector || fixed->to() != frames::kBody) {
      throw FrameMismatch("linkage offset must map E_AR to E_H");
    }
    return *fixed;
  }
  const auto& arm = std::get<ChainLinkage>(linkage);
  if (arm.mount.from() != arm.chain.base() || arm.mount.to() != frames::kBody) {
    throw FrameMismatch("linkage mount must map " + arm.chain.base().name() + " to E_H");
  }
  const Transform tip = arm.chain.forward(arm.q).relabeled(frames::kVirtualEffector, arm.chain.base());
  return compose(tip, arm.mount);
}

Vector6d cap_twist(const Vector6d& twist, const TwistCaps& caps) {
  Vector6d out = twist;
  const double v = twist.head<3>().norm();
  const double w = twist.tail<3>().norm();
  if (v > caps.linear) out.head<3>() *= caps.linear / v;
  if (w > caps.angular) out.tail<3>() *= caps.angular / w;
  return out;
}

Transform virtual_effector_world(const Transform& linkage_pose, const Transform& body_pose) {
  return compose(linkage_pose, body_pose);
}

Transform attachment_pose(const BodyPoses& body, const FrameId& frame) {
  const auto it = body.find(frame);
  if (it == body.end()) throw UnknownFrame("no body frame named " + frame.name());
  return it->second.relabeled(frames::kBody, it->second.to());
}

VirtualLimbState make_virtual_limb(const FrameId& frame, VirtualLinkage linkage, const BodyPoses& body) {
  VirtualLimbState state;
  state.attachment = frame;
  state.linkage = std::move(linkage);
  state.last_world_pose = virtual_effector_world(linkage_pose(state.linkage), attachment_pose(body, frame));
  return state;
}

VirtualLimbState apply_aux_command(const VirtualLimbState& state, const AuxiliaryCommand& cmd, double dt,
                                   const TwistCaps& caps) {
  if (!(dt > 0.0)) throw DomainError("apply_aux_command: dt must be positive");
  if (!state.attached()) throw Detached("apply_aux_command: virtual limb is detached");
  VirtualLimbState next = state;
  next.gripper = cmd.gripper;
  if (cmd.twist.isZero(0.0)) return next;
  const Vector6d twist = cap_twist(cmd.twist, caps);

  if (auto* fixed = std::get_if<Transform>(&next.linkage)) {
    *fixed = integrate_twist(*fixed, twist, dt);
    return next;
  }
  auto& arm = std::get<ChainLinkage>(next.linkage);
  const Transform goal = integrate_twist(linkage_pose(state.linkage), twist, dt);
  const Transform in_base = compose(goal, inverse(arm.mount)).relabeled(arm.chain.tip(), arm.chain.base());
  ServoConfig cfg;
  cfg.position_gain = 1.0 / dt;
  cfg.max_joint_velocity = arm.max_joint_velocity;
  arm.q = ik_step(arm.chain, arm.q, in_base, cfg, dt).q;
  return next;
}

VirtualLimbState attach(const VirtualLimbState& state, const FrameId& frame, const BodyPoses& body,
                        AttachMode mode) {
  const Transform body_pose = attachment_pose(body, frame);
  VirtualLimbState next = state;
  next.attachment = frame;
  if (mode == AttachMode::kPreserveWorld && state.attachment != frame) {
    // Keep T_{E_AR -> W} at this instant and solve for the new linkage.
    const Transform world = refresh(state, body).last_world_pose;
    const Transform linkage = compose(world, inverse(body_pose));
    if (auto* fixed = std::get_if<Transform>(&next.linkage)) {
      *fixed = linkage;
    } else {
      auto& arm = std::get<ChainLinkage>(next.linkage);
      const Transform tip = arm.chain.forward(arm.q).relabeled(frames::kVirtualEffector, arm.chain.base());
      arm.mount = compose(inverse(tip), linkage);
    }
    next.last_world_pose = world;
    return next;
  }
  next.last_world_pose = virtual_effector_world(linkage_pose(next.linkage), body_pose);
  return next;
}

VirtualLimbState detach(const VirtualLimbState& state) {
  if (!state.attached()) throw Detached("detach: virtual limb is already detached");
  VirtualLimbState next = state;
  next.attachment.reset();
  return next;
}

VirtualLimbState refresh(const VirtualLimbState& state, const BodyPoses& body) {
  if (!state.attached()) return state;
  VirtualLimbState next = state;
  next.last_world_pose = virtual_effector_world(linkage_pose(state.linkage), attachment_pose(body, *state.attachment));
  return next;
}

}  // namespace wornsim
