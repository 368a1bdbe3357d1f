#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wornsim/geom.hpp"
#include "wornsim/kinematics.hpp"
#include "wornsim/models.hpp"
#include "wornsim/servo.hpp"
#include "wornsim/virtual_limb.hpp"

namespace wornsim {

/// A trajectory channel is a human joint name or one of the pelvis offsets
/// root.x, root.y, root.z (meters, world) and root.yaw (radians, about the
/// pelvis z axis).
inline constexpr std::array<std::string_view, 4> kRootChannels = {"root.x", "root.y", "root.z", "root.yaw"};

/// Channel index: joints first (human::kJointNames order), then root channels.
std::optional<std::size_t> channel_index(std::string_view name);
inline constexpr std::size_t kChannelCount = human::kDof + kRootChannels.size();

struct Sinusoid {
  std::string channel;
  double amplitude = 0.0;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
};

struct Waypoint {
  double t = 0.0;
  double value = 0.0;
};

/// Absolute channel values, linear between points, held before the first and
/// after the last. Two points at the same time make a jump.
struct WaypointTrack {
  std::string channel;
  std::vector<Waypoint> points;
};

struct HumanMotion {
  std::vector<std::pair<std::string, double>> initial;  // channel -> value
  std::vector<Sinusoid> sinusoids;
  std::vector<WaypointTrack> waypoints;
};

struct BodyState {
  JointVector q;
  Transform root_pose;  // pelvis -> W
};

/// Channel values at time t: waypoint value (or initial value) plus the sum
/// of the channel's sinusoids. Throws DomainError when t is outside
/// [0, duration].
Eigen::VectorXd eval_channels(const HumanMotion& motion, double t, double duration);

/// Joint vector and pelvis pose at time t.
BodyState eval_trajectory(const HumanMotion& motion, const BodyModel& body, double t, double duration);

struct AuxTwistCommand {
  Vector6d twist = Vector6d::Zero();
};
struct GripperCommand {
  bool closed = false;
};
struct AttachCommand {
  FrameId frame;
  AttachMode mode = AttachMode::kPreserveWorld;
};
struct DetachCommand {};

/// Commands a script or a live client can issue to the virtual limb.
using LimbCommand = std::variant<AuxTwistCommand, GripperCommand, AttachCommand, DetachCommand>;

struct TimedCommand {
  double t = 0.0;
  LimbCommand command;
};

struct RobotSetup {
  Rigid base = Rigid::translate(0.75, 0.0, 0.95) * Rigid::rot_z(M_PI);  // robot_base -> W
  JointVector initial_q = JointVector::Zero(6);
};

enum class SensingBackend { kMocap, kImu };

struct SensingConfig {
  SensingBackend backend = SensingBackend::kMocap;
  double sigma_t = 0.0;       // m, mocap translation noise (and calibration marker noise)
  double sigma_r = 0.0;       // rad, mocap / IMU orientation noise
  double drift_rate = 0.0;    // m/s, headset drift (imu backend)
  std::uint64_t seed = 0;     // mixed with the scenario seed
  int calibration_points = 0; // 0: robot base known exactly
};

struct Scenario {
  int version = 1;
  std::string name;
  double duration = 1.0;  // s
  double dt = 0.01;       // s
  std::uint64_t seed = 0;
  bool display = true;
  BodyModel body;
  HumanMotion human;
  FrameId attachment = human::kTrunk;
  VirtualLinkage linkage = default_linkage();
  TwistCaps aux_caps;
  std::vector<TimedCommand> events;
  RobotSetup robot;
  ServoConfig servo;
  SensingConfig sensing;

  /// Number of ticks after t = 0; the log holds tick_count() + 1 rows.
  long tick_count() const;
  /// Ticks per servo update.
  long servo_every() const;

  /// Throws ConfigError with the dotted path of the first offending field.
  void validate() const;
};

}  // namespace wornsim
