#include "wornsim/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wornsim/errors.hpp"

namespace wornsim {

Rigid joint_motion(const JointSpec& joint, double value) {
  if (joint.kind == JointKind::kRevolute) {
    return Rigid(Eigen::Quaterniond(Eigen::AngleAxisd(value, joint.axis)),
                 Eigen::Vector3d::Zero());
  }
  return Rigid::translate(joint.axis * value);
}

KinematicChain::KinematicChain(FrameId base, std::vector<JointSpec> joints, FrameId tip,
                               Rigid tip_offset)
    : base_(std::move(base)),
      joints_(std::move(joints)),
      tip_(std::move(tip)),
      tip_offset_(tip_offset) {
  std::set<std::string> names{base_.name(), tip_.name()};
  if (base_ == tip_) throw InvalidModel("chain base and tip share the name " + base_.name());
  for (const auto& joint : joints_) {
    if (std::abs(joint.axis.norm() - 1.0) > 1e-9) {
      throw InvalidModel("joint " + joint.name + ": axis is not a unit vector");
    }
    if (!(joint.limits.min <= joint.limits.max)) {
      throw InvalidModel("joint " + joint.name + ": limits min > max");
    }
    if (joint.name.empty() || !names.insert(joint.name).second) {
      throw InvalidModel("joint frame name '" + joint.name + "' is empty or repeated");
    }
  }
}

void KinematicChain::check_dimension(const JointVector& q) const {
  if (static_cast<std::size_t>(q.size()) != joints_.size()) {
    throw DimensionMismatch("joint vector has " + std::to_string(q.size()) +
                            " values, chain has " + std::to_string(joints_.size()) +
                            " joints");
  }
}

Transform KinematicChain::forward(const JointVector& q) const {
  check_dimension(q);
  Rigid pose;
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    pose = pose * joints_[i].offset * joint_motion(joints_[i], q[static_cast<Eigen::Index>(i)]);
  }
  return Transform(tip_, base_, pose * tip_offset_);
}

Transform KinematicChain::forward_to(const FrameId& frame, const JointVector& q) const {
  check_dimension(q);
  if (frame == base_) return Transform::identity(base_, base_);
  if (frame == tip_) return forward(q);
  const auto index = joint_index(frame);
  if (!index) throw UnknownFrame("chain has no frame " + frame.name());
  Rigid pose;
  for (std::size_t i = 0; i <= *index; ++i) {
    pose = pose * joints_[i].offset * joint_motion(joints_[i], q[static_cast<Eigen::Index>(i)]);
  }
  return Transform(frame, base_, pose);
}

Jacobian KinematicChain::jacobian(const JointVector& q) const {
  check_dimension(q);
  const auto n = static_cast<Eigen::Index>(joints_.size());
  std::vector<Eigen::Vector3d> axes(joints_.size());
  std::vector<Eigen::Vector3d> origins(joints_.size());
  Rigid pose;
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    pose = pose * joints_[i].offset;
    axes[i] = pose.rotation * joints_[i].axis;
    origins[i] = pose.translation;
    pose = pose * joint_motion(joints_[i], q[static_cast<Eigen::Index>(i)]);
  }
  const Eigen::Vector3d tip = (pose * tip_offset_).translation;

  Jacobian jac(6, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (joints_[k].kind == JointKind::kRevolute) {
      jac.col(i).head<3>() = axes[k].cross(tip - origins[k]);
      jac.col(i).tail<3>() = axes[k];
    } else {
      jac.col(i).head<3>() = axes[k];
      jac.col(i).tail<3>().setZero();
    }
  }
  return jac;
}

JointVector KinematicChain::clamp(const JointVector& q, bool* clamped) const {
  check_dimension(q);
  JointVector out = q;
  bool moved = false;
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const double v = std::clamp(q[k], joints_[i].limits.min, joints_[i].limits.max);
    moved = moved || v != q[k];
    out[k] = v;
  }
  if (clamped) *clamped = moved;
  return out;
}

bool KinematicChain::within_limits(const JointVector& q, double tol) const {
  check_dimension(q);
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const double v = q[static_cast<Eigen::Index>(i)];
    if (v < joints_[i].limits.min - tol || v > joints_[i].limits.max + tol) return false;
  }
  return true;
}

double KinematicChain::reach_bound() const {
  double reach = 0.0;
  for (const auto& joint : joints_) {
    reach += joint.offset.translation.norm();
    if (joint.kind == JointKind::kPrismatic) {
      reach += std::max(std::abs(joint.limits.min), std::abs(joint.limits.max));
    }
  }
  return reach + tip_offset_.translation.norm();
}

std::optional<std::size_t> KinematicChain::joint_index(const FrameId& frame) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == frame.name()) return i;
  }
  return std::nullopt;
}

KinematicChain connect_serial(const KinematicChain& human, const FrameId& attach_frame,
                              const KinematicChain& extension) {
  std::vector<JointSpec> joints;
  Rigid carry;  // fixed transform between the last kept human frame and the extension base
  if (attach_frame == human.base()) {
    // nothing from the human chain
  } else if (attach_frame == human.tip()) {
    joints = human.joints();
    carry = human.tip_offset();
  } else if (const auto index = human.joint_index(attach_frame)) {
    joints.assign(human.joints().begin(),
                  human.joints().begin() + static_cast<std::ptrdiff_t>(*index) + 1);
  } else {
    throw UnknownFrame("connect_serial: human chain has no frame " + attach_frame.name());
  }

  Rigid tip_offset = extension.tip_offset();
  if (extension.dof() == 0) {
    tip_offset = carry * tip_offset;
  } else {
    for (std::size_t i = 0; i < extension.dof(); ++i) {
      JointSpec joint = extension.joints()[i];
      if (i == 0) joint.offset = carry * joint.offset;
      joints.push_back(std::move(joint));
    }
  }
  return KinematicChain(human.base(), std::move(joints), extension.tip(), tip_offset);
}

JointVector KinematicTree::Path::gather(const JointVector& full) const {
  JointVector q(static_cast<Eigen::Index>(joint_indices.size()));
  for (std::size_t i = 0; i < joint_indices.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(joint_indices[i]);
    if (src >= full.size()) throw DimensionMismatch("joint vector too short for path");
    q[static_cast<Eigen::Index>(i)] = full[src];
  }
  return q;
}

KinematicTree::KinematicTree(FrameId root, std::vector<Joint> joints, std::vector<Frame> frames)
    : root_(std::move(root)), joints_(std::move(joints)), frames_(std::move(frames)) {
  std::set<std::string> names{root_.name()};
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].parent >= static_cast<int>(i)) {
      throw InvalidModel("joint " + joints_[i].spec.name + " must follow its parent");
    }
    if (!names.insert(joints_[i].spec.name).second) {
      throw InvalidModel("repeated frame name " + joints_[i].spec.name);
    }
  }
  for (const auto& frame : frames_) {
    if (frame.parent >= static_cast<int>(joints_.size())) {
      throw InvalidModel("frame " + frame.name.name() + " hangs off a missing joint");
    }
    if (!names.insert(frame.name.name()).second) {
      throw InvalidModel("repeated frame name " + frame.name.name());
    }
  }
}

bool KinematicTree::has_frame(const FrameId& frame) const {
  return std::any_of(frames_.begin(), frames_.end(),
                     [&](const Frame& f) { return f.name == frame; });
}

std::optional<std::size_t> KinematicTree::joint_index(std::string_view name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].spec.name == name) return i;
  }
  return std::nullopt;
}

KinematicTree::Path KinematicTree::path_to(const FrameId& frame) const {
  const auto it = std::find_if(frames_.begin(), frames_.end(),
                               [&](const Frame& f) { return f.name == frame; });
  if (it == frames_.end()) throw UnknownFrame("body model has no frame " + frame.name());

  std::vector<std::size_t> indices;
  for (int j = it->parent; j >= 0; j = joints_[static_cast<std::size_t>(j)].parent) {
    indices.push_back(static_cast<std::size_t>(j));
  }
  std::reverse(indices.begin(), indices.end());

  std::vector<JointSpec> specs;
  specs.reserve(indices.size());
  for (auto index : indices) specs.push_back(joints_[index].spec);
  return Path{KinematicChain(root_, std::move(specs), frame, it->offset), std::move(indices)};
}

std::map<FrameId, Transform> KinematicTree::frame_poses(const JointVector& q,
                                                        const Transform& root_pose) const {
  if (static_cast<std::size_t>(q.size()) != joints_.size()) {
    throw DimensionMismatch("joint vector has " + std::to_string(q.size()) +
                            " values, tree has " + std::to_string(joints_.size()));
  }
  if (root_pose.from() != root_) {
    throw FrameMismatch("root pose must start at " + root_.name());
  }
  // Joints are stored parent-first, so one forward sweep suffices.
  std::vector<Rigid> joint_pose(joints_.size());
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const auto& joint = joints_[i];
    const Rigid parent = joint.parent < 0 ? root_pose.motion()
                                          : joint_pose[static_cast<std::size_t>(joint.parent)];
    joint_pose[i] = parent * joint.spec.offset *
                    joint_motion(joint.spec, q[static_cast<Eigen::Index>(i)]);
  }
  std::map<FrameId, Transform> out;
  for (const auto& frame : frames_) {
    const Rigid parent = frame.parent < 0 ? root_pose.motion()
                                          : joint_pose[static_cast<std::size_t>(frame.parent)];
    out.emplace(frame.name, Transform(frame.name, root_pose.to(), parent * frame.offset));
  }
  return out;
}

JointVector KinematicTree::clamp(const JointVector& q, bool* clamped) const {
  if (static_cast<std::size_t>(q.size()) != joints_.size()) {
    throw DimensionMismatch("joint vector size does not match the tree");
  }
  JointVector out = q;
  bool moved = false;
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[k] = std::clamp(q[k], joints_[i].spec.limits.min, joints_[i].spec.limits.max);
    moved = moved || out[k] != q[k];
  }
  if (clamped) *clamped = moved;
  return out;
}

}  // namespace wornsim
