#include "wornsim/servo.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "wornsim/errors.hpp"

namespace wornsim {

void ServoConfig::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"control_period", control_period}, {"time_constant", time_constant},
      {"dls_damping", dls_damping},       {"max_joint_velocity", max_joint_velocity},
      {"position_gain", position_gain},   {"convergence_tol", tol_translation},
      {"convergence_tol", tol_rotation}};
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError(name, "must be positive");
  }
  if (control_period > time_constant) {
    throw ConfigError("control_period", "must not exceed time_constant");
  }
}

Transform Manipulator::tip_world(const JointVector& q) const {
  return compose(chain.forward(q), base_pose);
}

ServoState make_servo_state(const Manipulator& robot, const JointVector& q) {
  const Transform tip = robot.tip_world(q).relabeled(frames::kVirtualEffector, robot.base_pose.to());
  return ServoState{q, tip, tip};
}

Transform delay_filter(const Transform& filtered, const Transform& new_target, double dt,
                       double tau) {
  if (!(dt > 0.0)) throw DomainError("delay_filter: dt must be positive");
  if (!(tau > 0.0)) throw DomainError("delay_filter: time constant must be positive");
  const double alpha = -std::expm1(-dt / tau);
  return interpolate(filtered, new_target, alpha);
}

Eigen::VectorXd dls_velocity(const Jacobian& jac, const Vector6d& error, double damping) {
  Eigen::Matrix<double, 6, 6> gram = jac * jac.transpose();
  gram.diagonal().array() += damping * damping;
  return jac.transpose() * gram.ldlt().solve(error);
}

Eigen::VectorXd cap_joint_velocity(const Eigen::VectorXd& qdot, double max_velocity,
                                   bool* capped) {
  const double peak = qdot.size() ? qdot.cwiseAbs().maxCoeff() : 0.0;
  const bool over = peak > max_velocity;
  if (capped) *capped = over;
  if (!over) return qdot;
  Eigen::VectorXd scaled = qdot * (max_velocity / peak);
  // Rounding in the scale can leave a component a hair above the cap.
  return scaled.cwiseMax(-max_velocity).cwiseMin(max_velocity);
}

double min_singular_value(const Jacobian& jac) {
  if (jac.cols() == 0) return 0.0;
  const Eigen::MatrixXd gram =
      jac.cols() >= 6 ? Eigen::MatrixXd(jac * jac.transpose()) : Eigen::MatrixXd(jac.transpose() * jac);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
}

Vector6d pose_delta(const Transform& current, const Transform& target) {
  if (current.to() != target.to()) {
    throw FrameMismatch("pose_delta: poses expressed in different frames");
  }
  Vector6d delta;
  delta.head<3>() = target.translation() - current.translation();
  delta.tail<3>() = rotation_vector(target.rotation() * current.rotation().conjugate());
  return delta;
}

IkStep ik_step(const KinematicChain& chain, const JointVector& q, const Transform& target,
               const ServoConfig& cfg, double dt) {
  if (!(dt > 0.0)) throw DomainError("ik_step: dt must be positive");
  if (target.to() != chain.base()) {
    throw FrameMismatch("ik_step: target must be expressed in " + chain.base().name());
  }
  const Transform current = chain.forward(q);
  IkStep step;
  step.error = pose_error(current, target);

  const Jacobian jac = chain.jacobian(q);
  step.flags.singular = min_singular_value(jac) < 1e-6;

  const Vector6d error = cfg.position_gain * pose_delta(current, target);
  bool capped = false;
  const Eigen::VectorXd qdot =
      cap_joint_velocity(dls_velocity(jac, error, cfg.dls_damping), cfg.max_joint_velocity, &capped);
  bool limited = false;
  step.q = chain.clamp(q + qdot * dt, &limited);
  step.flags.clamped = capped || limited;

  const bool converged =
      step.error.translation < cfg.tol_translation && step.error.rotation < cfg.tol_rotation;
  const bool beyond_reach = target.translation().norm() > chain.reach_bound();
  const bool stalled = (step.q - q).cwiseAbs().maxCoeff() < 1e-6 * dt;
  step.flags.unreachable = !converged && (beyond_reach || stalled);
  return step;
}

ServoTick servo_tick(const ServoState& state, const Manipulator& robot, const Transform& raw_target,
                     const ServoConfig& cfg, double dt) {
  if (raw_target.to() != robot.base_pose.to()) {
    throw FrameMismatch("servo_tick: target must be expressed in " + robot.base_pose.to().name());
  }
  ServoTick tick;
  tick.state.filtered_target =
      delay_filter(state.filtered_target, state.raw_target, dt, cfg.time_constant);
  const Transform target_in_base = compose(tick.state.filtered_target, inverse(robot.base_pose));
  IkStep step = ik_step(robot.chain, state.q, target_in_base, cfg, dt);
  tick.state.q = std::move(step.q);
  tick.state.raw_target = raw_target;
  tick.flags = step.flags;
  return tick;
}

}  // namespace wornsim
