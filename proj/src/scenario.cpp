#include "wornsim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "wornsim/errors.hpp"

namespace wornsim {

std::optional<std::size_t> channel_index(std::string_view name) {
  for (std::size_t i = 0; i < human::kDof; ++i) {
    if (human::kJointNames[i] == name) return i;
  }
  for (std::size_t i = 0; i < kRootChannels.size(); ++i) {
    if (kRootChannels[i] == name) return human::kDof + i;
  }
  return std::nullopt;
}

namespace {

double track_value(const std::vector<Waypoint>& points, double t) {
  if (t < points.front().t) return points.front().value;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Waypoint& a = points[i];
    const Waypoint& b = points[i + 1];
    if (t >= a.t && t < b.t) {
      const double s = (t - a.t) / (b.t - a.t);
      return a.value + s * (b.value - a.value);
    }
  }
  return points.back().value;
}

}  // namespace

Eigen::VectorXd eval_channels(const HumanMotion& motion, double t, double duration) {
  if (!(t >= 0.0 && t <= duration)) {
    throw DomainError("trajectory evaluated at t = " + std::to_string(t) + " outside [0, duration]");
  }
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kChannelCount));
  for (const auto& [channel, value] : motion.initial) {
    values[static_cast<Eigen::Index>(*channel_index(channel))] = value;
  }
  for (const WaypointTrack& track : motion.waypoints) {
    values[static_cast<Eigen::Index>(*channel_index(track.channel))] = track_value(track.points, t);
  }
  for (const Sinusoid& s : motion.sinusoids) {
    values[static_cast<Eigen::Index>(*channel_index(s.channel))] +=
        s.amplitude * std::sin(2.0 * M_PI * s.frequency * t + s.phase);
  }
  return values;
}

BodyState eval_trajectory(const HumanMotion& motion, const BodyModel& body, double t, double duration) {
  const Eigen::VectorXd values = eval_channels(motion, t, duration);
  const auto root = values.tail<4>();
  BodyState state;
  state.q = values.head(static_cast<Eigen::Index>(human::kDof));
  state.root_pose = Transform(human::kPelvis, frames::kWorld,
                              Rigid::translate(root[0], root[1], root[2]) * body.root * Rigid::rot_z(root[3]));
  return state;
}

long Scenario::tick_count() const { return static_cast<long>(std::floor(duration / dt + 1e-9)); }

long Scenario::servo_every() const { return std::lround(servo.control_period / dt); }

namespace {

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

void require_positive(double value, const std::string& path) {
  require(value > 0.0 && std::isfinite(value), path, "must be positive");
}

void require_non_negative(double value, const std::string& path) {
  require(value >= 0.0 && std::isfinite(value), path, "must be non-negative");
}

void require_channel(const std::string& channel, const std::string& path) {
  require(channel_index(channel).has_value(), path, "unknown channel \"" + channel + "\"");
}

void require_attachable(const FrameId& frame, const std::string& path) {
  const auto frames = human::attachable_frames();
  require(std::find(frames.begin(), frames.end(), frame) != frames.end(), path,
          "unknown body frame \"" + frame.name() + "\"");
}

void require_within(const KinematicChain& chain, const JointVector& q, const std::string& path) {
  require(static_cast<std::size_t>(q.size()) == chain.dof(), path,
          "expected " + std::to_string(chain.dof()) + " joint values");
  require(q.allFinite(), path, "must be finite");
  require(chain.within_limits(q), path, "outside joint limits");
}

}  // namespace

void Scenario::validate() const {
  require(version == 1, "version", "unsupported version " + std::to_string(version));
  require_positive(duration, "duration");
  require_positive(dt, "dt");
  try {
    servo.validate();
  } catch (const ConfigError& e) {
    throw e.nested("servo");
  }
  require(dt <= servo.control_period, "dt", "must not exceed servo.control_period");
  const double ratio = servo.control_period / dt;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * ratio, "servo.control_period",
          "must be an integer multiple of dt");

  const std::pair<const char*, double> lengths[] = {{"trunk", body.trunk},
                                                    {"upper_arm", body.upper_arm},
                                                    {"forearm", body.forearm},
                                                    {"neck", body.neck},
                                                    {"shoulder_offset", body.shoulder_offset}};
  for (const auto& [name, value] : lengths) require_positive(value, std::string("body.") + name);

  for (std::size_t i = 0; i < human.initial.size(); ++i) {
    const std::string path = "human.initial." + human.initial[i].first;
    require_channel(human.initial[i].first, path);
    require(std::isfinite(human.initial[i].second), path, "must be finite");
  }
  for (std::size_t i = 0; i < human.sinusoids.size(); ++i) {
    const Sinusoid& s = human.sinusoids[i];
    const std::string path = "human.sinusoids[" + std::to_string(i) + "]";
    require_channel(s.channel, path + ".channel");
    require(std::isfinite(s.amplitude), path + ".amplitude", "must be finite");
    require_non_negative(s.frequency, path + ".frequency");
    require(std::isfinite(s.phase), path + ".phase", "must be finite");
  }
  for (std::size_t i = 0; i < human.waypoints.size(); ++i) {
    const WaypointTrack& track = human.waypoints[i];
    const std::string path = "human.waypoints[" + std::to_string(i) + "]";
    require_channel(track.channel, path + ".channel");
    require(!track.points.empty(), path + ".points", "must not be empty");
    for (std::size_t k = 0; k < track.points.size(); ++k) {
      const std::string point = path + ".points[" + std::to_string(k) + "]";
      require(std::isfinite(track.points[k].t) && std::isfinite(track.points[k].value), point, "must be finite");
      require(k == 0 || track.points[k].t >= track.points[k - 1].t, point, "times must be non-decreasing");
    }
  }

  require_attachable(attachment, "attachment");
  if (const auto* arm = std::get_if<ChainLinkage>(&linkage)) {
    require_within(arm->chain, arm->q, "linkage.chain.q");
    require_positive(arm->max_joint_velocity, "linkage.chain.max_joint_velocity");
  }
  require_positive(aux_caps.linear, "aux.max_linear");
  require_positive(aux_caps.angular, "aux.max_angular");

  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string path = "events[" + std::to_string(i) + "]";
    require(events[i].t >= 0.0 && events[i].t <= duration, path + ".t", "must lie within [0, duration]");
    if (const auto* twist = std::get_if<AuxTwistCommand>(&events[i].command)) {
      require(twist->twist.allFinite(), path + ".twist", "must be finite");
    } else if (const auto* att = std::get_if<AttachCommand>(&events[i].command)) {
      require_attachable(att->frame, path + ".frame");
    }
  }

  require_within(make_manipulator(), robot.initial_q, "robot.initial_q");

  require_non_negative(sensing.sigma_t, "sensing.sigma_t");
  require_non_negative(sensing.sigma_r, "sensing.sigma_r");
  require_non_negative(sensing.drift_rate, "sensing.drift_rate");
  require(sensing.calibration_points == 0 || sensing.calibration_points >= 3, "sensing.calibration_points",
          "must be 0 or at least 3");
}

}  // namespace wornsim
