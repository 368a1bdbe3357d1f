#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "wornsim/errors.hpp"
#include "wornsim/scenario.hpp"
#include "wornsim/simulation.hpp"

namespace wornsim::bridge {

/// Malformed wire message; field() is the dotted path of the culprit.
class DecodeError : public Error {
 public:
  DecodeError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct PauseCommand {};
struct ResumeCommand {};

/// Partial servo update: only the fields present are changed.
struct SetConfigCommand {
  std::optional<double> control_period;
  std::optional<double> time_constant;
  std::optional<double> dls_damping;
  std::optional<double> max_joint_velocity;
  std::optional<double> position_gain;
  std::optional<std::array<double, 2>> convergence_tol;

  ServoConfig applied_to(ServoConfig cfg) const;
};

using ClientMessage = std::variant<AuxTwistCommand, GripperCommand, AttachCommand, DetachCommand, PauseCommand,
                                   ResumeCommand, SetConfigCommand>;

struct Snapshot {
  long tick = 0;
  double timestamp = 0.0;  // simulation time, s
  bool paused = false;
  std::string attachment;
  Transform body;              // E_H -> W
  Transform virtual_raw;       // E_AR -> W
  Transform virtual_filtered;  // lagged E_AR -> W
  Transform robot;             // E_R -> W
  JointVector robot_q;
  PoseError error;
  bool attached = false;
  bool gripper = false;
  bool unreachable = false;
  std::uint64_t dropped = 0;  // snapshots this client missed
};

struct Ack {
  long tick = 0;        // tick at which the command took effect
  std::string command;  // client message type
};

struct ErrorReply {
  std::string field;
  std::string message;
};

using ServerMessage = std::variant<Snapshot, Ack, ErrorReply>;

Snapshot make_snapshot(const LogRow& row, bool paused);

const char* message_type(const ClientMessage& message);

std::string encode(const ClientMessage& message);
std::string encode(const ServerMessage& message);
/// Strict decoding: unknown fields, wrong types and missing fields throw
/// DecodeError.
ClientMessage decode_client(std::string_view text);
ServerMessage decode_server(std::string_view text);

}  // namespace wornsim::bridge
