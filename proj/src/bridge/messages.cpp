#include "wornsim/bridge/messages.hpp"

#include "wornsim/json_io.hpp"

namespace wornsim::bridge {

namespace {

Json parse(std::string_view text) {
  Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw DecodeError("message", "not valid JSON");
  if (!doc.is_object()) throw DecodeError("message", "must be a JSON object");
  return doc;
}

// Runs a JsonReader-based decoder and reports schema errors as DecodeError.
template <typename F>
auto strictly(F&& decode) {
  try {
    return decode();
  } catch (const ConfigError& e) {
    throw DecodeError(e.path().empty() ? "message" : e.path(), e.message());
  }
}

Json joints_to_json(const JointVector& q) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < q.size(); ++i) out.push_back(q[i]);
  return out;
}

Json set_config_to_json(const SetConfigCommand& cmd) {
  Json servo = Json::object();
  if (cmd.control_period) servo["control_period"] = *cmd.control_period;
  if (cmd.time_constant) servo["time_constant"] = *cmd.time_constant;
  if (cmd.dls_damping) servo["dls_damping"] = *cmd.dls_damping;
  if (cmd.max_joint_velocity) servo["max_joint_velocity"] = *cmd.max_joint_velocity;
  if (cmd.position_gain) servo["position_gain"] = *cmd.position_gain;
  if (cmd.convergence_tol) servo["convergence_tol"] = {(*cmd.convergence_tol)[0], (*cmd.convergence_tol)[1]};
  return {{"type", "set_config"}, {"servo", servo}};
}

SetConfigCommand set_config_from_json(JsonReader& reader) {
  JsonReader servo = reader.object("servo");
  SetConfigCommand cmd;
  const auto optional = [&servo](const char* key, std::optional<double>& slot) {
    if (servo.has(key)) slot = servo.number(key);
  };
  optional("control_period", cmd.control_period);
  optional("time_constant", cmd.time_constant);
  optional("dls_damping", cmd.dls_damping);
  optional("max_joint_velocity", cmd.max_joint_velocity);
  optional("position_gain", cmd.position_gain);
  if (servo.has("convergence_tol")) {
    const auto tol = servo.numbers("convergence_tol", 2);
    cmd.convergence_tol = std::array<double, 2>{tol[0], tol[1]};
  }
  servo.finish();
  return cmd;
}

Json snapshot_to_json(const Snapshot& s) {
  Json out;
  out["type"] = "snapshot";
  out["tick"] = s.tick;
  out["timestamp"] = s.timestamp;
  out["paused"] = s.paused;
  out["attachment"] = s.attachment;
  out["poses"] = {{"E_H", transform_to_json(s.body)},
                  {"E_AR", transform_to_json(s.virtual_raw)},
                  {"E_AR_filtered", transform_to_json(s.virtual_filtered)},
                  {"E_R", transform_to_json(s.robot)}};
  out["robot_q"] = joints_to_json(s.robot_q);
  out["errors"] = {{"d_trans", s.error.translation}, {"d_rot", s.error.rotation}};
  out["flags"] = {{"attached", s.attached}, {"gripper", s.gripper}, {"unreachable", s.unreachable}};
  out["dropped"] = s.dropped;
  return out;
}

bool read_flag(JsonReader& reader, const char* key) {
  const Json& v = reader.raw(key);
  if (!v.is_boolean()) throw ConfigError(reader.child_path(key), "must be true or false");
  return v.get<bool>();
}

long read_tick(JsonReader& reader) {
  const Json& v = reader.raw("tick");
  if (!v.is_number_integer()) throw ConfigError(reader.child_path("tick"), "must be an integer");
  return v.get<long>();
}

Snapshot snapshot_from_json(JsonReader& reader) {
  Snapshot s;
  s.tick = read_tick(reader);
  s.timestamp = reader.number("timestamp");
  s.paused = read_flag(reader, "paused");
  s.attachment = reader.string("attachment");
  JsonReader poses = reader.object("poses");
  s.body = transform_from_json(poses.raw("E_H"), poses.child_path("E_H"));
  s.virtual_raw = transform_from_json(poses.raw("E_AR"), poses.child_path("E_AR"));
  s.virtual_filtered = transform_from_json(poses.raw("E_AR_filtered"), poses.child_path("E_AR_filtered"));
  s.robot = transform_from_json(poses.raw("E_R"), poses.child_path("E_R"));
  poses.finish();
  const auto q = reader.numbers("robot_q", 0);
  s.robot_q = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
  JsonReader errors = reader.object("errors");
  s.error.translation = errors.number("d_trans");
  s.error.rotation = errors.number("d_rot");
  errors.finish();
  JsonReader flags = reader.object("flags");
  s.attached = read_flag(flags, "attached");
  s.gripper = read_flag(flags, "gripper");
  s.unreachable = read_flag(flags, "unreachable");
  flags.finish();
  const Json& dropped = reader.raw("dropped");
  if (!dropped.is_number_unsigned()) throw ConfigError("dropped", "must be a non-negative integer");
  s.dropped = dropped.get<std::uint64_t>();
  return s;
}

}  // namespace

ServoConfig SetConfigCommand::applied_to(ServoConfig cfg) const {
  if (control_period) cfg.control_period = *control_period;
  if (time_constant) cfg.time_constant = *time_constant;
  if (dls_damping) cfg.dls_damping = *dls_damping;
  if (max_joint_velocity) cfg.max_joint_velocity = *max_joint_velocity;
  if (position_gain) cfg.position_gain = *position_gain;
  if (convergence_tol) {
    cfg.tol_translation = (*convergence_tol)[0];
    cfg.tol_rotation = (*convergence_tol)[1];
  }
  return cfg;
}

Snapshot make_snapshot(const LogRow& row, bool paused) {
  Snapshot s;
  s.tick = row.tick;
  s.timestamp = row.t;
  s.paused = paused;
  s.attachment = row.attachment;
  s.body = row.body_pose;
  s.virtual_raw = row.virtual_world;
  s.virtual_filtered = row.filtered;
  s.robot = row.robot_world;
  s.robot_q = row.robot_q;
  s.error = row.error;
  s.attached = row.attached;
  s.gripper = row.gripper;
  s.unreachable = row.flags.unreachable;
  return s;
}

const char* message_type(const ClientMessage& message) {
  return std::visit(
      [](const auto& m) -> const char* {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PauseCommand>) return "pause";
        else if constexpr (std::is_same_v<T, ResumeCommand>) return "resume";
        else if constexpr (std::is_same_v<T, SetConfigCommand>) return "set_config";
        else return command_type(LimbCommand{m});
      },
      message);
}

std::string encode(const ClientMessage& message) {
  const Json doc = std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PauseCommand>) return {{"type", "pause"}};
        else if constexpr (std::is_same_v<T, ResumeCommand>) return {{"type", "resume"}};
        else if constexpr (std::is_same_v<T, SetConfigCommand>) return set_config_to_json(m);
        else return command_to_json(LimbCommand{m});
      },
      message);
  return doc.dump();
}

std::string encode(const ServerMessage& message) {
  struct Visitor {
    Json operator()(const Snapshot& s) const { return snapshot_to_json(s); }
    Json operator()(const Ack& a) const { return {{"type", "ack"}, {"tick", a.tick}, {"command", a.command}}; }
    Json operator()(const ErrorReply& e) const {
      return {{"type", "error"}, {"field", e.field}, {"message", e.message}};
    }
  };
  return std::visit(Visitor{}, message).dump();
}

ClientMessage decode_client(std::string_view text) {
  const Json doc = parse(text);
  return strictly([&doc]() -> ClientMessage {
    JsonReader reader(doc, "");
    const std::string type = reader.string("type");
    ClientMessage out;
    if (type == "pause") {
      out = PauseCommand{};
    } else if (type == "resume") {
      out = ResumeCommand{};
    } else if (type == "set_config") {
      out = set_config_from_json(reader);
    } else {
      out = std::visit([](auto&& limb) -> ClientMessage { return limb; }, command_from_reader(reader));
    }
    reader.finish();
    return out;
  });
}

ServerMessage decode_server(std::string_view text) {
  const Json doc = parse(text);
  return strictly([&doc]() -> ServerMessage {
    JsonReader reader(doc, "");
    const std::string type = reader.string("type");
    ServerMessage out;
    if (type == "snapshot") {
      out = snapshot_from_json(reader);
    } else if (type == "ack") {
      out = Ack{read_tick(reader), reader.string("command")};
    } else if (type == "error") {
      ErrorReply e;
      e.field = reader.string("field");
      e.message = reader.string("message");
      out = e;
    } else {
      throw ConfigError("type", "unknown message type \"" + type + "\"");
    }
    reader.finish();
    return out;
  });
}

}  // namespace wornsim::bridge
