#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "wornsim/scenario.hpp"
#include "wornsim/sensing.hpp"
#include "wornsim/servo.hpp"
#include "wornsim/virtual_limb.hpp"

namespace wornsim {

/// One recorded tick. Poses are expressed in W unless noted.
struct LogRow {
  long tick = 0;
  double t = 0.0;
  bool attached = false;
  std::string attachment;  // attached frame, or the last one when detached
  bool gripper = false;
  ServoFlags flags;        // from the last servo update
  JointVector body_q;      // true human joint vector
  Transform body_pose;     // sensed T_{E_H -> W} of the attachment frame
  Transform linkage;       // T_{E_AR -> E_H}
  Transform virtual_world; // T_{E_AR -> W}
  Transform filtered;      // lagged T_{E_AR -> W}
  JointVector robot_q;
  Transform robot_world;   // T_{E_R -> W}, true robot base
  PoseError error;         // E_R against E_AR
};

struct SimLog {
  std::string name;
  double dt = 0.0;
  bool display = true;
  std::vector<LogRow> rows;
};

/// Fixed-step engine. Each tick: evaluate the body, sense it, update the
/// virtual limb (held twist, due events, queued commands, refresh), run the
/// servo on control ticks, record.
class Simulation {
 public:
  /// Validates the scenario (ConfigError). With `live`, ticks run past the
  /// scenario duration and the body holds its final pose.
  explicit Simulation(Scenario scenario, bool live = false);

  const Scenario& scenario() const noexcept { return scenario_; }
  long tick() const noexcept { return tick_; }  // index of the next tick
  double time() const noexcept { return static_cast<double>(tick_) * scenario_.dt; }
  bool finished() const noexcept { return !live_ && tick_ > scenario_.tick_count(); }

  /// Queue a command for the next tick boundary (arrival order kept).
  void enqueue(LimbCommand command);

  /// Replace the servo parameters from the next tick on. Throws ConfigError
  /// (paths under "servo") and keeps the old ones.
  void set_servo_config(const ServoConfig& cfg);

  /// Run one tick and return its row. Queued commands that fail (e.g. detach
  /// while detached) are dropped and reported by rejected().
  LogRow step();

  struct Rejection {
    std::size_t index;  // position among the commands the step dequeued
    std::string message;
  };
  /// Queued commands rejected by the last step().
  const std::vector<Rejection>& rejected() const noexcept { return rejected_; }

  const VirtualLimbState& limb() const noexcept { return limb_; }
  const ServoState& servo() const noexcept { return servo_; }
  const Transform& believed_base() const noexcept { return believed_base_; }

 private:
  BodyPoses sense(const BodyPoses& truth);
  void apply(const LimbCommand& command, const BodyPoses& sensed);

  Scenario scenario_;
  bool live_;
  KinematicTree human_;
  Manipulator robot_;     // true base
  Manipulator believed_;  // base used by the servo
  Transform believed_base_;
  long tick_ = 0;
  std::uint64_t sensing_seed_;
  std::optional<SlamDrift> drift_;
  std::optional<BodyPoses> previous_truth_;
  VirtualLimbState limb_;
  std::string last_attachment_;
  Vector6d held_twist_ = Vector6d::Zero();
  std::vector<TimedCommand> events_;  // sorted by t, stable
  std::size_t next_event_ = 0;
  std::deque<LimbCommand> queue_;
  std::vector<Rejection> rejected_;
  ServoState servo_;
  ServoFlags flags_;
};

/// Whole scenario from t = 0 to duration: tick_count() + 1 rows.
SimLog run(const Scenario& scenario);

}  // namespace wornsim
