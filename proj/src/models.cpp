#include "wornsim/models.hpp"

#include <cmath>

#include "wornsim/errors.hpp"

namespace wornsim {

void BodyModel::validate() const {
  const std::pair<const char*, double> lengths[] = {{"trunk", trunk},
                                                    {"upper_arm", upper_arm},
                                                    {"forearm", forearm},
                                                    {"neck", neck},
                                                    {"shoulder_offset", shoulder_offset}};
  for (const auto& [name, value] : lengths) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw InvalidModel(std::string("body segment ") + name + " must be positive");
    }
  }
}

std::vector<FrameId> human::attachable_frames() {
  return {human::kHead, human::kTrunk, human::kUpperArm, human::kForearm, human::kHand};
}

namespace {

JointSpec revolute(std::string_view name, const Eigen::Vector3d& axis, double lo, double hi,
                   const Rigid& offset = Rigid::identity()) {
  JointSpec joint;
  joint.name = std::string(name);
  joint.kind = JointKind::kRevolute;
  joint.axis = axis;
  joint.limits = {lo, hi};
  joint.offset = offset;
  return joint;
}

}  // namespace

KinematicTree make_human_model(const BodyModel& body) {
  body.validate();
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const auto& names = human::kJointNames;

  // Flexion joints turn about -y so positive values move segments forward (+x).
  std::vector<KinematicTree::Joint> joints = {
      {revolute(names[0], z, -1.0, 1.0), -1},
      {revolute(names[1], y, -0.5, 1.2), 0},
      {revolute(names[2], x, -0.6, 0.6), 1},
      {revolute(names[3], -y, -1.0, 3.0, Rigid::translate(0.0, -body.shoulder_offset, body.trunk)),
       2},
      {revolute(names[4], x, -1.4, 1.4), 3},
      {revolute(names[5], z, -1.5, 1.5), 4},
      {revolute(names[6], -y, 0.0, 2.6, Rigid::translate(0.0, 0.0, -body.upper_arm)), 5},
      {revolute(names[7], y, -0.8, 1.0, Rigid::translate(0.0, 0.0, body.trunk)), 2},
      {revolute(names[8], z, -1.3, 1.3), 7},
  };
  std::vector<KinematicTree::Frame> frames = {
      {human::kTrunk, 2, Rigid::translate(0.0, 0.0, body.trunk)},
      {human::kUpperArm, 5, Rigid::identity()},
      {human::kForearm, 6, Rigid::identity()},
      {human::kHand, 6, Rigid::translate(0.0, 0.0, -body.forearm)},
      {human::kHead, 8, Rigid::translate(0.0, 0.0, body.neck)},
  };
  return KinematicTree(human::kPelvis, std::move(joints), std::move(frames));
}

KinematicChain make_manipulator() {
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  // Link lengths: 0.2 base column, 0.35 upper arm, 0.25 forearm, 0.1 tool.
  // Elbow and wrist-pitch limits keep the arm clear of the stretched-elbow and
  // aligned-wrist singularities. Yaw and roll joints are effectively
  // continuous; two full turns either way keep them from winding into a stop.
  std::vector<JointSpec> joints = {
      revolute("base_yaw", z, -4 * M_PI, 4 * M_PI),
      revolute("shoulder", y, -M_PI / 2, M_PI / 2, Rigid::translate(0.0, 0.0, 0.2)),
      revolute("elbow", y, -1.3, 1.3, Rigid::translate(0.0, 0.0, 0.35)),
      revolute("wrist_roll", z, -4 * M_PI, 4 * M_PI, Rigid::rot_y(M_PI / 2) * Rigid::translate(0.0, 0.0, 0.25)),
      revolute("wrist_pitch", y, -1.4, 1.4),
      revolute("wrist_yaw", x, -4 * M_PI, 4 * M_PI),
  };
  return KinematicChain(frames::kRobotBase, std::move(joints), frames::kRobotEffector,
                        Rigid::translate(0.0, 0.0, 0.1));
}

StandardModels standard_models() { return {make_human_model(), make_manipulator()}; }

}  // namespace wornsim
