#pragma once

#include <Eigen/Core>

#include "wornsim/geom.hpp"
#include "wornsim/kinematics.hpp"

namespace wornsim {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Parameters of the servo map: a first-order pose lag followed by damped
/// least-squares velocity IK.
struct ServoConfig {
  double control_period = 0.01;    // s
  double time_constant = 0.15;     // s, lag tau
  double dls_damping = 0.05;       // lambda
  double max_joint_velocity = 1.0; // rad/s (m/s for prismatic joints)
  double position_gain = 8.0;      // 1/s
  double tol_translation = 1e-4;   // m
  double tol_rotation = 1e-3;      // rad

  /// Throws ConfigError naming the offending field (e.g. "time_constant").
  void validate() const;
};

struct ServoFlags {
  bool singular = false;     // smallest singular value of J below 1e-6
  bool unreachable = false;  // target beyond reach, or the step stalled short of it
  bool clamped = false;      // a joint limit or the velocity cap was active
};

/// Deported manipulator: its chain and where its base sits in the world.
struct Manipulator {
  KinematicChain chain;
  Transform base_pose;  // T_{robot_base -> W}

  /// T_{E_R -> W}.
  Transform tip_world(const JointVector& q) const;
};

struct ServoState {
  JointVector q;
  Transform filtered_target;  // lagged T_{E_AR -> W}
  Transform raw_target;       // latest T_{E_AR -> W}, held until the next tick
};

/// State at rest at `q`: both targets sit on the current tip pose,
/// relabeled as E_AR.
ServoState make_servo_state(const Manipulator& robot, const JointVector& q);

/// First-order lag step: filtered <- interpolate(filtered, target, 1 - exp(-dt/tau)).
Transform delay_filter(const Transform& filtered, const Transform& new_target, double dt,
                       double tau);

/// Damped least-squares joint velocity J^T (J J^T + lambda^2 I)^-1 e.
Eigen::VectorXd dls_velocity(const Jacobian& jac, const Vector6d& error, double damping);

/// Scale qdot uniformly so that no joint exceeds `max_velocity`. Keeps the
/// direction of the DLS step.
Eigen::VectorXd cap_joint_velocity(const Eigen::VectorXd& qdot, double max_velocity,
                                   bool* capped = nullptr);

double min_singular_value(const Jacobian& jac);

/// 6-vector (translation; rotation vector) taking `current` onto `target`,
/// both expressed in the same reference frame.
Vector6d pose_delta(const Transform& current, const Transform& target);

struct IkStep {
  JointVector q;
  ServoFlags flags;
  PoseError error;  // before the step
};

/// One DLS velocity step toward `target` (expressed in the chain base frame).
IkStep ik_step(const KinematicChain& chain, const JointVector& q, const Transform& target,
               const ServoConfig& cfg, double dt);

struct ServoTick {
  ServoState state;
  ServoFlags flags;
};

/// The servo map f for one control period. The raw target is held between
/// ticks (zero-order hold): the lag first integrates the target latched at
/// the previous tick over dt, the IK step then tracks the filtered pose, and
/// `raw_target` is latched for the next tick.
ServoTick servo_tick(const ServoState& state, const Manipulator& robot, const Transform& raw_target,
                     const ServoConfig& cfg, double dt);

/// Per-tick tracking error between the robot effector and the virtual one.
inline PoseError tracking_metrics(const Transform& robot_pose, const Transform& virtual_pose) {
  return pose_error(robot_pose, virtual_pose);
}

}  // namespace wornsim
