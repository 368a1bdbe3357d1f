#include <doctest.h>

#include <cmath>
#include <random>

#include "wornsim/errors.hpp"
#include "wornsim/json_io.hpp"

using namespace wornsim;

namespace {

const char* kMinimal = R"({"version": 1, "duration": 2.0, "dt": 0.01})";

std::string config_error_path(const std::string& text, const LoadOptions& options = {}) {
  try {
    load_scenario_text(text, options);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("eval_trajectory at t = 0 is the initial pose") {
  HumanMotion motion;
  motion.initial = {{"shoulder_flex", 0.4}, {"elbow_flex", 0.7}, {"root.x", 0.2}};
  motion.sinusoids = {{"trunk_yaw", 0.3, 0.5, 0.0}};
  const BodyModel body;
  const BodyState s = eval_trajectory(motion, body, 0.0, 5.0);
  JointVector expected = JointVector::Zero(human::kDof);
  expected[3] = 0.4;
  expected[6] = 0.7;
  CHECK((s.q - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.root_pose.translation().isApprox(Eigen::Vector3d(0.2, 0.0, 1.0), 1e-15));
  CHECK(s.root_pose.from() == human::kPelvis);
  CHECK(s.root_pose.to() == frames::kWorld);
}

TEST_CASE("sinusoid at a quarter period gives exactly its amplitude") {
  HumanMotion motion;
  motion.sinusoids = {{"elbow_flex", 0.35, 0.5, 0.0}};
  const Eigen::VectorXd v = eval_channels(motion, 0.5, 10.0);
  CHECK(v[6] == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("mixed trajectory matches an independent closed form") {
  HumanMotion motion;
  motion.initial = {{"trunk_pitch", 0.1}, {"neck_yaw", -0.2}};
  motion.sinusoids = {{"trunk_pitch", 0.05, 0.7, 0.3}, {"neck_yaw", 0.2, 0.25, 1.1}, {"root.z", 0.02, 1.3, 0.0}};
  motion.waypoints = {{"shoulder_flex", {{0.5, 0.0}, {1.5, 1.0}, {2.5, 0.4}}}, {"neck_yaw", {{0.0, 0.1}, {3.0, -0.5}}}};

  const auto closed_form = [](double t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(13);
    v[1] = 0.1 + 0.05 * std::sin(2 * M_PI * 0.7 * t + 0.3);
    double shoulder = 0.0;
    if (t >= 0.5 && t < 1.5) shoulder = (t - 0.5) / 1.0;
    else if (t >= 1.5 && t < 2.5) shoulder = 1.0 + (t - 1.5) / 1.0 * (0.4 - 1.0);
    else if (t >= 2.5) shoulder = 0.4;
    v[3] = shoulder;
    v[8] = 0.1 + t / 3.0 * (-0.6) + 0.2 * std::sin(2 * M_PI * 0.25 * t + 1.1);
    v[11] = 0.02 * std::sin(2 * M_PI * 1.3 * t);
    return v;
  };

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> time(0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double t = i < 4 ? std::vector<double>{0.0, 0.5, 1.5, 3.0}[static_cast<std::size_t>(i)] : time(rng);
    worst = std::max(worst, (eval_channels(motion, t, 3.0) - closed_form(t)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("waypoints hold outside their span and jump at repeated times") {
  HumanMotion motion;
  motion.waypoints = {{"root.x", {{1.0, 0.0}, {1.0, 0.1}, {2.0, 0.3}}}};
  CHECK(eval_channels(motion, 0.5, 3.0)[9] == 0.0);
  CHECK(eval_channels(motion, 1.0, 3.0)[9] == 0.1);
  CHECK(eval_channels(motion, 1.5, 3.0)[9] == doctest::Approx(0.2));
  CHECK(eval_channels(motion, 2.5, 3.0)[9] == 0.3);
}

TEST_CASE("eval_trajectory outside the duration throws DomainError") {
  HumanMotion motion;
  CHECK_THROWS_AS(eval_trajectory(motion, BodyModel{}, -1e-9, 1.0), DomainError);
  CHECK_THROWS_AS(eval_trajectory(motion, BodyModel{}, 1.0 + 1e-9, 1.0), DomainError);
  CHECK_NOTHROW(eval_trajectory(motion, BodyModel{}, 1.0, 1.0));
}

TEST_CASE("minimal scenario loads with defaults") {
  const Scenario s = load_scenario_text(kMinimal);
  CHECK(s.tick_count() == 200);
  CHECK(s.servo_every() == 1);
  CHECK(s.attachment == human::kTrunk);
  CHECK(s.servo.time_constant == 0.15);
  CHECK(std::holds_alternative<Transform>(s.linkage));
}

TEST_CASE("scenario JSON round-trips through the full form") {
  const std::string text = R"({
    "version": 1, "name": "rt", "duration": 4.0, "dt": 0.005, "seed": 9, "display": false,
    "human": {"initial": {"elbow_flex": 0.5},
              "sinusoids": [{"channel": "root.y", "amplitude": 0.1, "frequency": 0.3, "phase": 0.2}],
              "waypoints": [{"channel": "trunk_yaw", "points": [[0, 0], [2, 0.4]]}]},
    "attachment": "head",
    "linkage": {"chain": {"joints": [{"name": "slide", "type": "prismatic", "axis": [1, 0, 0], "limits": [-0.2, 0.5]},
                                     {"name": "twist", "axis": [0, 0, 1]}],
                          "tip_offset": {"translation": [0.1, 0, 0]}, "q": [0.2, 0.1]}},
    "aux": {"max_linear": 0.3, "max_angular": 1.0},
    "events": [{"t": 1.0, "type": "attach", "frame": "forearm", "mode": "preserve_linkage"},
               {"t": 1.5, "type": "aux_twist", "twist": [0.1, 0, 0, 0, 0, 0.2]},
               {"t": 2.0, "type": "gripper", "closed": true},
               {"t": 3.0, "type": "detach"}],
    "robot": {"initial_q": [0, 0.2, 0.1, 0, 0, 0]},
    "servo": {"time_constant": 0.2, "convergence_tol": [1e-3, 1e-2]},
    "sensing": {"backend": "imu", "sigma_r": 0.01, "drift_rate": 0.001, "seed": 4, "calibration_points": 5}
  })";
  const Scenario s = load_scenario_text(text);
  const Json full = scenario_to_json(s);
  const Scenario again = scenario_from_json(full);
  CHECK(scenario_to_json(again).dump() == full.dump());
  CHECK(s.events.size() == 4);
  CHECK(std::get<ChainLinkage>(s.linkage).chain.dof() == 2);
  CHECK(s.sensing.backend == SensingBackend::kImu);
  CHECK(s.servo.tol_rotation == 1e-2);
}

TEST_CASE("unknown fields are rejected with their path") {
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "durration": 2})") == "durration");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "servo": {"tau": 0.1}})") == "servo.tau");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01,
                              "events": [{"t": 0, "type": "gripper", "closed": true, "force": 2}]})") ==
        "events[0].force");
}

TEST_CASE("invalid values name the offending field") {
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0})") == "dt");
  CHECK(config_error_path(R"({"version": 1, "duration": 0, "dt": 0.01})") == "duration");
  CHECK(config_error_path(R"({"version": 2, "duration": 1, "dt": 0.01})") == "version");
  CHECK(config_error_path(R"({"duration": 1, "dt": 0.01})") == "version");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.02})") == "dt");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.003})") == "servo.control_period");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "servo": {"time_constant": -0.1}})") ==
        "servo.time_constant");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "attachment": "knee"})") == "attachment");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "human": {"initial": {"wrist": 1}}})") ==
        "human.initial.wrist");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01,
                              "human": {"sinusoids": [{"channel": "root.w", "amplitude": 1, "frequency": 1}]}})") ==
        "human.sinusoids[0].channel");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "events": [{"t": 2, "type": "detach"}]})") ==
        "events[0].t");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "events": [{"t": 0, "type": "wave"}]})") ==
        "events[0].type");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "robot": {"initial_q": [0, 0, 0]}})") ==
        "robot.initial_q");
  CHECK(config_error_path(R"({"version": 1, "duration": 1, "dt": 0.01, "sensing": {"calibration_points": 2}})") ==
        "sensing.calibration_points");
  CHECK(config_error_path(R"({"version": 1, "duration": "1", "dt": 0.01})") == "duration");
  CHECK(config_error_path("{not json") == "");
}

TEST_CASE("overrides edit existing fields only") {
  LoadOptions options;
  options.overrides = {"servo.time_constant=0.3", "human.initial.elbow_flex=0.5", "name=renamed", "dt=0.005"};
  const Scenario s = load_scenario_text(kMinimal, options);
  CHECK(s.servo.time_constant == 0.3);
  CHECK(s.name == "renamed");
  CHECK(s.dt == 0.005);
  REQUIRE(s.human.initial.size() == 1);
  CHECK(s.human.initial[0].second == 0.5);

  CHECK(config_error_path(kMinimal, LoadOptions{{"servo.tau=0.3"}, {}}) == "servo.tau");
  CHECK(config_error_path(kMinimal, LoadOptions{{"dt=0"}, {}}) == "dt");
  CHECK(config_error_path(kMinimal, LoadOptions{{"servo.time_constant=-1"}, {}}) == "servo.time_constant");
  CHECK(config_error_path(kMinimal, LoadOptions{{"events[0].t=1"}, {}}) == "events[0].t");
}

TEST_CASE("seed option replaces the scenario seed") {
  LoadOptions options;
  options.seed = 77;
  CHECK(load_scenario_text(kMinimal, options).seed == 77);
}

TEST_CASE("transform wire form round-trips") {
  const Transform t(frames::kVirtualEffector, frames::kWorld,
                    Rigid::translate(0.1, -0.2, 0.3) * Rigid::rotate(Eigen::Vector3d(1, 2, 3), 0.7));
  const Json j = transform_to_json(t);
  CHECK(j["from"] == "E_AR");
  CHECK(j["q"].size() == 4);
  CHECK(transform_from_json(j, "pose") == t);
  Json bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(transform_from_json(bad, "pose"), ConfigError);
}
