#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "servo_fixtures.hpp"
#include "wornsim/errors.hpp"
#include "wornsim/models.hpp"
#include "wornsim/servo.hpp"

using namespace wornsim;

namespace {

const FrameId A{"A"}, B{"B"};

KinematicChain planar_2r(double l1 = 1.0, double l2 = 1.0) {
  JointSpec j1{"j1", JointKind::kRevolute, Eigen::Vector3d::UnitZ(), {-M_PI, M_PI}, Rigid::identity()};
  JointSpec j2{"j2", JointKind::kRevolute, Eigen::Vector3d::UnitZ(), {-M_PI, M_PI}, Rigid::translate(l1, 0, 0)};
  return KinematicChain(FrameId{"base"}, {j1, j2}, FrameId{"tip"}, Rigid::translate(l2, 0, 0));
}

Transform step_response(double dt, double elapsed, double tau) {
  const Transform start = Transform::identity(A, B);
  const Transform goal(A, B, Rigid::translate(1.0, 0.0, 0.0));
  Transform filtered = start;
  const int n = static_cast<int>(std::lround(elapsed / dt));
  for (int i = 0; i < n; ++i) filtered = delay_filter(filtered, goal, dt, tau);
  return filtered;
}

}  // namespace

TEST_CASE("delay_filter: fixed point") {
  const Transform t(A, B, Rigid::rot_z(0.3) * Rigid::translate(0.1, 0.2, 0.3));
  CHECK(delay_filter(t, t, 0.01, 0.15) == t);
}

TEST_CASE("delay_filter: step response after one time constant") {
  const double tau = 0.15;
  const double traveled = step_response(1e-4, tau, tau).translation().x();
  CHECK(traveled == doctest::Approx(0.6321).epsilon(0.005 / 0.6321));
  // The discretization is exact for a held target.
  CHECK(std::abs(traveled - (1.0 - std::exp(-1.0))) < 1e-9);
  CHECK(std::abs(step_response(0.01, tau, tau).translation().x() - (1.0 - std::exp(-1.0))) < 1e-9);
}

TEST_CASE("delay_filter: rotation follows the same response") {
  const double tau = 0.2;
  const Transform goal(A, B, Rigid::rot_y(1.0));
  Transform filtered = Transform::identity(A, B);
  for (int i = 0; i < 200; ++i) filtered = delay_filter(filtered, goal, 0.001, tau);
  CHECK(rotation_angle(filtered.rotation()) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("delay_filter: very slow lag barely moves") {
  const double dt = 0.01;
  const Transform filtered = step_response(dt, dt, dt * 1e6);
  CHECK(filtered.translation().x() > 0.0);
  CHECK(filtered.translation().x() < 1e-5);
}

TEST_CASE("delay_filter: refinement consistency") {
  for (double elapsed : {0.05, 0.15, 0.4}) {
    const double coarse = step_response(0.01, elapsed, 0.15).translation().x();
    const double fine = step_response(0.005, elapsed, 0.15).translation().x();
    CHECK(std::abs(coarse - fine) / fine < 1e-3);
  }
}

TEST_CASE("delay_filter: domain errors") {
  const Transform t = Transform::identity(A, B);
  CHECK_THROWS_AS(delay_filter(t, t, 0.0, 0.15), DomainError);
  CHECK_THROWS_AS(delay_filter(t, t, -0.01, 0.15), DomainError);
  CHECK_THROWS_AS(delay_filter(t, t, 0.01, 0.0), DomainError);
  CHECK_THROWS_AS(delay_filter(t, t, 0.01, -1.0), DomainError);
}

TEST_CASE("ik_step: target at the current pose leaves q unchanged") {
  const KinematicChain chain = make_manipulator();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd q = oracle::random_q(rng, chain);
    const IkStep step = ik_step(chain, q, chain.forward(q), ServoConfig{}, 0.01);
    CHECK((step.q - q).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(step.error.translation <= 1e-15);
  }
}

TEST_CASE("ik_step: planar 2R converges to a reachable target") {
  const KinematicChain chain = planar_2r();
  const Eigen::Vector2d q_star(0.7, -1.1);
  const Transform target = chain.forward(q_star);
  Eigen::VectorXd q = Eigen::Vector2d(-0.2, 0.4);
  for (int i = 0; i < 5000; ++i) q = ik_step(chain, q, target, ServoConfig{}, 0.01).q;
  const PoseError e = pose_error(chain.forward(q), target);
  CHECK(e.translation < 1e-4);
  CHECK(e.rotation < 1e-3);
  // Closed-form tip position of the oracle.
  const Eigen::Vector3d tip(std::cos(q[0]) + std::cos(q[0] + q[1]), std::sin(q[0]) + std::sin(q[0] + q[1]), 0.0);
  CHECK((tip - target.translation()).norm() < 1e-4);
}

TEST_CASE("ik_step: out-of-reach target ends at the boundary") {
  const KinematicChain chain = planar_2r();
  for (const Eigen::Vector3d p : {Eigen::Vector3d(3.0, 0.0, 0.0), Eigen::Vector3d(1.5, 2.0, 0.0)}) {
    const Transform target(chain.tip(), chain.base(),
                           Rigid::translate(p) * Rigid::rot_z(std::atan2(p.y(), p.x())));
    Eigen::VectorXd q = Eigen::Vector2d(0.3, 0.5);
    IkStep step;
    for (int i = 0; i < 5000; ++i) {
      step = ik_step(chain, q, target, ServoConfig{}, 0.01);
      q = step.q;
    }
    const PoseError e = pose_error(chain.forward(q), target);
    CHECK(e.translation == doctest::Approx(p.norm() - 2.0).epsilon(1e-3 / (p.norm() - 2.0)));
    CHECK(step.flags.unreachable);
  }
}

TEST_CASE("ik_step: bounded output at and near singular configurations") {
  const ServoConfig cfg;
  const double dt = 0.01;
  auto check_step = [&](const KinematicChain& chain, const Eigen::VectorXd& q, const Transform& target) {
    const IkStep step = ik_step(chain, q, target, cfg, dt);
    REQUIRE(step.q.allFinite());
    CHECK(chain.within_limits(step.q));
    CHECK((step.q - q).cwiseAbs().maxCoeff() <= cfg.max_joint_velocity * dt + 1e-12);
    return step;
  };

  // Two coincident axes: the Jacobian columns are identical.
  JointSpec j1{"j1", JointKind::kRevolute, Eigen::Vector3d::UnitZ(), {-M_PI, M_PI}, Rigid::identity()};
  JointSpec j2{"j2", JointKind::kRevolute, Eigen::Vector3d::UnitZ(), {-M_PI, M_PI}, Rigid::identity()};
  const KinematicChain coincident(FrameId{"base"}, {j1, j2}, FrameId{"tip"}, Rigid::translate(1, 0, 0));
  const IkStep degenerate = check_step(coincident, Eigen::Vector2d(0.0, 0.0),
                                       Transform(coincident.tip(), coincident.base(), Rigid::translate(0, 5, 0)));
  CHECK(degenerate.flags.singular);

  const KinematicChain chain = make_manipulator();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd q = oracle::random_q(rng, chain);
    if (i % 2 == 0) q[3] = q[5] = 0.0;  // wrist pitch/yaw interplay at the shoulder
    if (i % 5 == 0) q[4] = chain.joints()[4].limits.max;
    const Transform target(chain.tip(), chain.base(), oracle::random_rigid(rng, 2.0));
    check_step(chain, q, target);
  }
}

TEST_CASE("ik_step: argument checks") {
  const KinematicChain chain = make_manipulator();
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(6);
  CHECK_THROWS_AS(ik_step(chain, Eigen::VectorXd::Zero(5), chain.forward(q), ServoConfig{}, 0.01),
                  DimensionMismatch);
  CHECK_THROWS_AS(ik_step(chain, q, chain.forward(q).relabeled(chain.tip(), frames::kWorld), ServoConfig{}, 0.01),
                  FrameMismatch);
  CHECK_THROWS_AS(ik_step(chain, q, chain.forward(q), ServoConfig{}, 0.0), DomainError);
}

TEST_CASE("cap_joint_velocity keeps direction") {
  bool capped = false;
  const Eigen::VectorXd v = cap_joint_velocity(Eigen::Vector3d(4.0, -2.0, 1.0), 1.0, &capped);
  CHECK(capped);
  CHECK(v.isApprox(Eigen::Vector3d(1.0, -0.5, 0.25)));
  CHECK(cap_joint_velocity(Eigen::Vector3d(0.5, -0.5, 0.0), 1.0, &capped) == Eigen::Vector3d(0.5, -0.5, 0.0));
  CHECK_FALSE(capped);
}

TEST_CASE("servo_tick: fixed point at rest") {
  const Manipulator robot = fixtures::standard_robot();
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd q = oracle::random_q(rng, robot.chain);
    const ServoState state = make_servo_state(robot, q);
    const ServoTick tick = servo_tick(state, robot, state.raw_target, ServoConfig{}, 0.01);
    CHECK((tick.state.q - q).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(pose_error(tick.state.filtered_target, state.filtered_target).translation == 0.0);
  }
}

TEST_CASE("servo_tick: converges to a constant target") {
  const Manipulator robot = fixtures::standard_robot();
  const ServoConfig cfg;
  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const Transform target = fixtures::reachable_target(rng, robot);
    ServoState state = make_servo_state(robot, Eigen::VectorXd::Zero(6));
    int ticks = 0;
    while (ticks < 2000 && !fixtures::converged(robot.tip_world(state.q), target, cfg)) {
      state = servo_tick(state, robot, target, cfg, cfg.control_period).state;
      ++ticks;
    }
    CHECK(ticks < 2000);
  }
}

TEST_CASE("servo_tick: error is non-increasing once the lag has settled") {
  const Manipulator robot = fixtures::standard_robot();
  const ServoConfig cfg;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 30; ++i) {
    const Transform target = fixtures::reachable_target(rng, robot);
    ServoState state = make_servo_state(robot, Eigen::VectorXd::Zero(6));
    const int n = 1500;
    std::vector<double> error;
    for (int k = 0; k < n; ++k) {
      state = servo_tick(state, robot, target, cfg, cfg.control_period).state;
      error.push_back(pose_delta(robot.tip_world(state.q), target).norm());
    }
    int increases = 0;
    for (int k = n / 5 + 1; k < n; ++k) {
      if (error[k] > error[k - 1] + 1e-12) ++increases;
    }
    CHECK(increases == 0);
  }
}

TEST_CASE("servo_tick: sinusoid lag matches the first-order frequency response") {
  // Stiff IK so the robot follows the lagged target within a tick.
  ServoConfig cfg;
  cfg.position_gain = 1.0 / cfg.control_period;
  const fixtures::SineFit fit = fixtures::sine_tracking(cfg, 0.2, 0.1);
  const double omega_tau = 2 * M_PI * 0.2 * cfg.time_constant;
  const double lag_deg = std::atan(omega_tau) * 180.0 / M_PI;
  CHECK(std::abs(lag_deg - 10.66) < 0.05);
  CHECK(fit.filter_lag_deg == doctest::Approx(lag_deg).epsilon(1.0 / lag_deg));
  CHECK(fit.robot_lag_deg == doctest::Approx(lag_deg).epsilon(1.0 / lag_deg));
  const double error_gain = omega_tau / std::sqrt(1.0 + omega_tau * omega_tau);
  CHECK(fit.rms_error == doctest::Approx(0.1 * error_gain / std::sqrt(2.0)).epsilon(0.05));
  CHECK(fit.robot_gain == doctest::Approx(1.0 / std::sqrt(1.0 + omega_tau * omega_tau)).epsilon(0.05));
}

TEST_CASE("servo_tick: target frame checked") {
  const Manipulator robot = fixtures::standard_robot();
  const ServoState state = make_servo_state(robot, Eigen::VectorXd::Zero(6));
  CHECK_THROWS_AS(servo_tick(state, robot, state.raw_target.relabeled(frames::kVirtualEffector, frames::kBody),
                             ServoConfig{}, 0.01),
                  FrameMismatch);
}

TEST_CASE("ServoConfig validation names the field") {
  ServoConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.time_constant = -0.1;
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "time_constant");
  }
  cfg = ServoConfig{};
  cfg.control_period = 0.2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ServoConfig{};
  cfg.dls_damping = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("tracking_metrics") {
  const Transform a(frames::kRobotEffector, frames::kWorld, Rigid::rot_x(0.4) * Rigid::translate(0.2, 0.1, 1.0));
  const PoseError zero = tracking_metrics(a, a.relabeled(frames::kVirtualEffector, frames::kWorld));
  CHECK(zero.translation == 0.0);
  CHECK(zero.rotation == 0.0);
  const Transform b(frames::kVirtualEffector, frames::kWorld,
                    Rigid::translate(0.05, 0.0, 0.0) * a.motion());
  const PoseError offset = tracking_metrics(a, b);
  CHECK(offset.translation == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(offset.rotation <= 1e-12);
}
