#include "wornsim/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wornsim/errors.hpp"

namespace wornsim {

JsonReader::JsonReader(const Json& value, std::string path) : value_(value), path_(std::move(path)) {
  if (!value_.is_object()) throw ConfigError(path_, "must be an object");
}

std::string JsonReader::child_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool JsonReader::has(const std::string& key) const { return value_.contains(key); }

const Json& JsonReader::raw(const std::string& key) {
  if (!value_.contains(key)) throw ConfigError(child_path(key), "missing required field");
  seen_.push_back(key);
  return value_.at(key);
}

double JsonReader::number(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_number()) throw ConfigError(child_path(key), "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(child_path(key), "must be finite");
  return d;
}

double JsonReader::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::uint64_t JsonReader::unsigned_integer(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_number_unsigned()) throw ConfigError(child_path(key), "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

int JsonReader::integer(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_number_integer()) throw ConfigError(child_path(key), "must be an integer");
  return v.get<int>();
}

bool JsonReader::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_boolean()) throw ConfigError(child_path(key), "must be true or false");
  return v.get<bool>();
}

std::string JsonReader::string(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_string()) throw ConfigError(child_path(key), "must be a string");
  return v.get<std::string>();
}

std::string JsonReader::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> JsonReader::numbers(const std::string& key, std::size_t size) {
  const Json& v = raw(key);
  const std::string path = child_path(key);
  if (!v.is_array()) throw ConfigError(path, "must be an array of numbers");
  if (size != 0 && v.size() != size) throw ConfigError(path, "must have " + std::to_string(size) + " elements");
  std::vector<double> out;
  for (const Json& item : v) {
    if (!item.is_number()) throw ConfigError(path, "must be an array of numbers");
    out.push_back(item.get<double>());
    if (!std::isfinite(out.back())) throw ConfigError(path, "must be finite");
  }
  return out;
}

JsonReader JsonReader::object(const std::string& key) { return JsonReader(raw(key), child_path(key)); }

void JsonReader::finish() const {
  for (auto it = value_.begin(); it != value_.end(); ++it) {
    if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
      throw ConfigError(child_path(it.key()), "unknown field");
    }
  }
}

// --- transforms -------------------------------------------------------------

Json rigid_to_json(const Rigid& r) {
  Json out;
  out["translation"] = {r.translation.x(), r.translation.y(), r.translation.z()};
  out["rotation"] = {r.rotation.w(), r.rotation.x(), r.rotation.y(), r.rotation.z()};
  return out;
}

Rigid rigid_from_json(const Json& value, const std::string& path) {
  JsonReader reader(value, path);
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  if (reader.has("translation")) {
    const auto v = reader.numbers("translation", 3);
    t = Eigen::Vector3d(v[0], v[1], v[2]);
  }
  if (reader.has("rotation")) {
    const auto v = reader.numbers("rotation", 4);
    q = Eigen::Quaterniond(v[0], v[1], v[2], v[3]);
    if (std::abs(q.norm() - 1.0) > 1e-6) {
      throw ConfigError(reader.child_path("rotation"), "quaternion [w, x, y, z] must have unit norm");
    }
  }
  reader.finish();
  return Rigid(q, t);
}

Json transform_to_json(const Transform& transform) {
  const Rigid& r = transform.motion();
  Json out;
  out["from"] = transform.from().name();
  out["to"] = transform.to().name();
  out["q"] = {r.rotation.w(), r.rotation.x(), r.rotation.y(), r.rotation.z()};
  out["t"] = {r.translation.x(), r.translation.y(), r.translation.z()};
  return out;
}

Transform transform_from_json(const Json& value, const std::string& path) {
  JsonReader reader(value, path);
  const FrameId from{reader.string("from")};
  const FrameId to{reader.string("to")};
  const auto q = reader.numbers("q", 4);
  const auto t = reader.numbers("t", 3);
  reader.finish();
  const Eigen::Quaterniond rotation(q[0], q[1], q[2], q[3]);
  if (std::abs(rotation.norm() - 1.0) > 1e-6) throw ConfigError(path + ".q", "quaternion must have unit norm");
  return Transform(from, to, Rigid(rotation, Eigen::Vector3d(t[0], t[1], t[2])));
}

// --- servo ------------------------------------------------------------------

Json servo_config_to_json(const ServoConfig& cfg) {
  Json out;
  out["control_period"] = cfg.control_period;
  out["time_constant"] = cfg.time_constant;
  out["dls_damping"] = cfg.dls_damping;
  out["max_joint_velocity"] = cfg.max_joint_velocity;
  out["position_gain"] = cfg.position_gain;
  out["convergence_tol"] = {cfg.tol_translation, cfg.tol_rotation};
  return out;
}

ServoConfig servo_config_from_json(const Json& value, const std::string& path, const ServoConfig& base) {
  JsonReader reader(value, path);
  ServoConfig cfg = base;
  cfg.control_period = reader.number("control_period", cfg.control_period);
  cfg.time_constant = reader.number("time_constant", cfg.time_constant);
  cfg.dls_damping = reader.number("dls_damping", cfg.dls_damping);
  cfg.max_joint_velocity = reader.number("max_joint_velocity", cfg.max_joint_velocity);
  cfg.position_gain = reader.number("position_gain", cfg.position_gain);
  if (reader.has("convergence_tol")) {
    const auto tol = reader.numbers("convergence_tol", 2);
    cfg.tol_translation = tol[0];
    cfg.tol_rotation = tol[1];
  }
  reader.finish();
  return cfg;
}

// --- commands ---------------------------------------------------------------

namespace {

const char* mode_name(AttachMode mode) {
  return mode == AttachMode::kPreserveWorld ? "preserve_world" : "preserve_linkage";
}

}  // namespace

const char* command_type(const LimbCommand& command) {
  struct Visitor {
    const char* operator()(const AuxTwistCommand&) const { return "aux_twist"; }
    const char* operator()(const GripperCommand&) const { return "gripper"; }
    const char* operator()(const AttachCommand&) const { return "attach"; }
    const char* operator()(const DetachCommand&) const { return "detach"; }
  };
  return std::visit(Visitor{}, command);
}

Json command_to_json(const LimbCommand& command) {
  Json out;
  out["type"] = command_type(command);
  if (const auto* twist = std::get_if<AuxTwistCommand>(&command)) {
    out["twist"] = Json::array();
    for (int i = 0; i < 6; ++i) out["twist"].push_back(twist->twist[i]);
  } else if (const auto* gripper = std::get_if<GripperCommand>(&command)) {
    out["closed"] = gripper->closed;
  } else if (const auto* attach = std::get_if<AttachCommand>(&command)) {
    out["frame"] = attach->frame.name();
    out["mode"] = mode_name(attach->mode);
  }
  return out;
}

LimbCommand command_from_reader(JsonReader& reader) {
  const std::string type = reader.string("type");
  if (type == "aux_twist") {
    const auto v = reader.numbers("twist", 6);
    AuxTwistCommand cmd;
    for (int i = 0; i < 6; ++i) cmd.twist[i] = v[static_cast<std::size_t>(i)];
    return cmd;
  }
  if (type == "gripper") {
    const Json& closed = reader.raw("closed");
    if (!closed.is_boolean()) throw ConfigError(reader.child_path("closed"), "must be true or false");
    return GripperCommand{closed.get<bool>()};
  }
  if (type == "attach") {
    AttachCommand cmd;
    cmd.frame = FrameId{reader.string("frame")};
    const std::string mode = reader.string("mode", "preserve_world");
    if (mode == "preserve_world") {
      cmd.mode = AttachMode::kPreserveWorld;
    } else if (mode == "preserve_linkage") {
      cmd.mode = AttachMode::kPreserveLinkage;
    } else {
      throw ConfigError(reader.child_path("mode"), "must be preserve_world or preserve_linkage");
    }
    return cmd;
  }
  if (type == "detach") return DetachCommand{};
  throw ConfigError(reader.child_path("type"), "unknown command type \"" + type + "\"");
}

// --- scenario ---------------------------------------------------------------

namespace {

Json chain_linkage_to_json(const ChainLinkage& arm) {
  Json joints = Json::array();
  for (const JointSpec& joint : arm.chain.joints()) {
    Json j;
    j["name"] = joint.name;
    j["type"] = joint.kind == JointKind::kRevolute ? "revolute" : "prismatic";
    j["axis"] = {joint.axis.x(), joint.axis.y(), joint.axis.z()};
    j["limits"] = {joint.limits.min, joint.limits.max};
    j["offset"] = rigid_to_json(joint.offset);
    joints.push_back(j);
  }
  Json out;
  out["joints"] = joints;
  out["tip_offset"] = rigid_to_json(arm.chain.tip_offset());
  out["q"] = Json::array();
  for (Eigen::Index i = 0; i < arm.q.size(); ++i) out["q"].push_back(arm.q[i]);
  out["mount"] = rigid_to_json(arm.mount.motion());
  out["max_joint_velocity"] = arm.max_joint_velocity;
  return out;
}

const FrameId kVirtualBase{"virtual_base"};
const FrameId kVirtualTip{"virtual_tip"};

ChainLinkage chain_linkage_from_json(const Json& value, const std::string& path) {
  JsonReader reader(value, path);
  const Json& joints = reader.raw("joints");
  if (!joints.is_array()) throw ConfigError(reader.child_path("joints"), "must be an array");
  std::vector<JointSpec> specs;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    JsonReader j(joints[i], reader.child_path("joints") + "[" + std::to_string(i) + "]");
    JointSpec spec;
    spec.name = j.string("name");
    const std::string type = j.string("type", "revolute");
    if (type == "revolute") {
      spec.kind = JointKind::kRevolute;
    } else if (type == "prismatic") {
      spec.kind = JointKind::kPrismatic;
    } else {
      throw ConfigError(j.child_path("type"), "must be revolute or prismatic");
    }
    const auto axis = j.numbers("axis", 3);
    spec.axis = Eigen::Vector3d(axis[0], axis[1], axis[2]);
    if (j.has("limits")) {
      const auto lim = j.numbers("limits", 2);
      spec.limits = {lim[0], lim[1]};
    }
    if (j.has("offset")) spec.offset = rigid_from_json(j.raw("offset"), j.child_path("offset"));
    j.finish();
    specs.push_back(spec);
  }
  const Rigid tip = reader.has("tip_offset") ? rigid_from_json(reader.raw("tip_offset"), reader.child_path("tip_offset"))
                                             : Rigid::identity();
  const Rigid mount =
      reader.has("mount") ? rigid_from_json(reader.raw("mount"), reader.child_path("mount")) : Rigid::identity();
  const double max_velocity = reader.number("max_joint_velocity", 2.0);
  const auto q = reader.has("q") ? reader.numbers("q", 0) : std::vector<double>(specs.size(), 0.0);
  reader.finish();
  try {
    KinematicChain chain(kVirtualBase, std::move(specs), kVirtualTip, tip);
    return ChainLinkage{std::move(chain), Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size())),
                        Transform(kVirtualBase, frames::kBody, mount), max_velocity};
  } catch (const InvalidModel& e) {
    throw ConfigError(path, e.what());
  }
}

Json joint_vector_to_json(const JointVector& q) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < q.size(); ++i) out.push_back(q[i]);
  return out;
}

const char* backend_name(SensingBackend backend) { return backend == SensingBackend::kMocap ? "mocap" : "imu"; }

}  // namespace

Json scenario_to_json(const Scenario& s) {
  Json out;
  out["version"] = s.version;
  out["name"] = s.name;
  out["duration"] = s.duration;
  out["dt"] = s.dt;
  out["seed"] = s.seed;
  out["display"] = s.display;

  Json body;
  body["trunk"] = s.body.trunk;
  body["upper_arm"] = s.body.upper_arm;
  body["forearm"] = s.body.forearm;
  body["neck"] = s.body.neck;
  body["shoulder_offset"] = s.body.shoulder_offset;
  body["root"] = rigid_to_json(s.body.root);
  out["body"] = body;

  Json human;
  human["initial"] = Json::object();
  for (const auto& [channel, value] : s.human.initial) human["initial"][channel] = value;
  human["sinusoids"] = Json::array();
  for (const Sinusoid& sine : s.human.sinusoids) {
    human["sinusoids"].push_back(
        {{"channel", sine.channel}, {"amplitude", sine.amplitude}, {"frequency", sine.frequency}, {"phase", sine.phase}});
  }
  human["waypoints"] = Json::array();
  for (const WaypointTrack& track : s.human.waypoints) {
    Json points = Json::array();
    for (const Waypoint& p : track.points) points.push_back({p.t, p.value});
    human["waypoints"].push_back({{"channel", track.channel}, {"points", points}});
  }
  out["human"] = human;

  out["attachment"] = s.attachment.name();
  Json linkage;
  if (const auto* fixed = std::get_if<Transform>(&s.linkage)) {
    linkage["fixed"] = rigid_to_json(fixed->motion());
  } else {
    linkage["chain"] = chain_linkage_to_json(std::get<ChainLinkage>(s.linkage));
  }
  out["linkage"] = linkage;
  out["aux"] = {{"max_linear", s.aux_caps.linear}, {"max_angular", s.aux_caps.angular}};

  out["events"] = Json::array();
  for (const TimedCommand& event : s.events) {
    Json e;
    e["t"] = event.t;
    const Json command = command_to_json(event.command);
    for (const auto& [key, value] : command.items()) e[key] = value;
    out["events"].push_back(e);
  }

  out["robot"] = {{"base", rigid_to_json(s.robot.base)}, {"initial_q", joint_vector_to_json(s.robot.initial_q)}};
  out["servo"] = servo_config_to_json(s.servo);
  out["sensing"] = {{"backend", backend_name(s.sensing.backend)},
                    {"sigma_t", s.sensing.sigma_t},
                    {"sigma_r", s.sensing.sigma_r},
                    {"drift_rate", s.sensing.drift_rate},
                    {"seed", s.sensing.seed},
                    {"calibration_points", s.sensing.calibration_points}};
  return out;
}

Scenario scenario_from_json(const Json& value) {
  JsonReader reader(value, "");
  Scenario s;
  s.version = reader.integer("version", 0);
  if (!reader.has("version")) throw ConfigError("version", "missing required field");
  if (s.version != 1) throw ConfigError("version", "unsupported version " + std::to_string(s.version));
  s.name = reader.string("name", "");
  s.duration = reader.number("duration");
  s.dt = reader.number("dt");
  s.seed = reader.unsigned_integer("seed", 0);
  s.display = reader.boolean("display", true);

  if (reader.has("body")) {
    JsonReader body = reader.object("body");
    s.body.trunk = body.number("trunk", s.body.trunk);
    s.body.upper_arm = body.number("upper_arm", s.body.upper_arm);
    s.body.forearm = body.number("forearm", s.body.forearm);
    s.body.neck = body.number("neck", s.body.neck);
    s.body.shoulder_offset = body.number("shoulder_offset", s.body.shoulder_offset);
    if (body.has("root")) s.body.root = rigid_from_json(body.raw("root"), body.child_path("root"));
    body.finish();
  }

  if (reader.has("human")) {
    JsonReader human = reader.object("human");
    if (human.has("initial")) {
      const Json& initial = human.raw("initial");
      const std::string path = human.child_path("initial");
      if (!initial.is_object()) throw ConfigError(path, "must be an object");
      for (auto it = initial.begin(); it != initial.end(); ++it) {
        if (!it.value().is_number()) throw ConfigError(path + "." + it.key(), "must be a number");
        s.human.initial.emplace_back(it.key(), it.value().get<double>());
      }
    }
    if (human.has("sinusoids")) {
      const Json& list = human.raw("sinusoids");
      if (!list.is_array()) throw ConfigError(human.child_path("sinusoids"), "must be an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        JsonReader item(list[i], human.child_path("sinusoids") + "[" + std::to_string(i) + "]");
        Sinusoid sine;
        sine.channel = item.string("channel");
        sine.amplitude = item.number("amplitude");
        sine.frequency = item.number("frequency");
        sine.phase = item.number("phase", 0.0);
        item.finish();
        s.human.sinusoids.push_back(sine);
      }
    }
    if (human.has("waypoints")) {
      const Json& list = human.raw("waypoints");
      if (!list.is_array()) throw ConfigError(human.child_path("waypoints"), "must be an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = human.child_path("waypoints") + "[" + std::to_string(i) + "]";
        JsonReader item(list[i], path);
        WaypointTrack track;
        track.channel = item.string("channel");
        const Json& points = item.raw("points");
        if (!points.is_array()) throw ConfigError(path + ".points", "must be an array of [t, value] pairs");
        for (std::size_t k = 0; k < points.size(); ++k) {
          const Json& p = points[k];
          if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ConfigError(path + ".points[" + std::to_string(k) + "]", "must be a [t, value] pair");
          }
          track.points.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        item.finish();
        s.human.waypoints.push_back(track);
      }
    }
    human.finish();
  }

  s.attachment = FrameId{reader.string("attachment", s.attachment.name())};

  if (reader.has("linkage")) {
    JsonReader linkage = reader.object("linkage");
    if (linkage.has("fixed") && linkage.has("chain")) {
      throw ConfigError("linkage", "give either fixed or chain, not both");
    }
    if (linkage.has("fixed")) {
      s.linkage = Transform(frames::kVirtualEffector, frames::kBody,
                            rigid_from_json(linkage.raw("fixed"), linkage.child_path("fixed")));
    } else if (linkage.has("chain")) {
      s.linkage = chain_linkage_from_json(linkage.raw("chain"), linkage.child_path("chain"));
    }
    linkage.finish();
  }

  if (reader.has("aux")) {
    JsonReader aux = reader.object("aux");
    s.aux_caps.linear = aux.number("max_linear", s.aux_caps.linear);
    s.aux_caps.angular = aux.number("max_angular", s.aux_caps.angular);
    aux.finish();
  }

  if (reader.has("events")) {
    const Json& list = reader.raw("events");
    if (!list.is_array()) throw ConfigError("events", "must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      JsonReader item(list[i], "events[" + std::to_string(i) + "]");
      TimedCommand event;
      event.t = item.number("t");
      event.command = command_from_reader(item);
      item.finish();
      s.events.push_back(event);
    }
  }

  if (reader.has("robot")) {
    JsonReader robot = reader.object("robot");
    if (robot.has("base")) s.robot.base = rigid_from_json(robot.raw("base"), robot.child_path("base"));
    if (robot.has("initial_q")) {
      const auto q = robot.numbers("initial_q", 0);
      s.robot.initial_q = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
    }
    robot.finish();
  }

  if (reader.has("servo")) s.servo = servo_config_from_json(reader.raw("servo"), "servo");

  if (reader.has("sensing")) {
    JsonReader sensing = reader.object("sensing");
    const std::string backend = sensing.string("backend", "mocap");
    if (backend == "mocap") {
      s.sensing.backend = SensingBackend::kMocap;
    } else if (backend == "imu") {
      s.sensing.backend = SensingBackend::kImu;
    } else {
      throw ConfigError("sensing.backend", "must be mocap or imu");
    }
    s.sensing.sigma_t = sensing.number("sigma_t", s.sensing.sigma_t);
    s.sensing.sigma_r = sensing.number("sigma_r", s.sensing.sigma_r);
    s.sensing.drift_rate = sensing.number("drift_rate", s.sensing.drift_rate);
    s.sensing.seed = sensing.unsigned_integer("seed", s.sensing.seed);
    s.sensing.calibration_points = sensing.integer("calibration_points", s.sensing.calibration_points);
    sensing.finish();
  }

  reader.finish();
  return s;
}

// --- overrides --------------------------------------------------------------

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("", "override \"" + assignment + "\" must look like key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  Json* node = &doc;
  std::size_t pos = 0;
  std::string walked;
  while (pos <= path.size()) {
    const std::size_t dot = path.find('.', pos);
    std::string segment = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    pos = dot == std::string::npos ? path.size() + 1 : dot + 1;

    std::vector<std::size_t> indices;
    const std::size_t bracket = segment.find('[');
    std::string key = segment.substr(0, bracket);
    if (bracket != std::string::npos) {
      std::string rest = segment.substr(bracket);
      while (!rest.empty()) {
        const std::size_t close = rest.find(']');
        if (rest[0] != '[' || close == std::string::npos) throw ConfigError(path, "malformed override path");
        try {
          indices.push_back(std::stoul(rest.substr(1, close - 1)));
        } catch (const std::exception&) {
          throw ConfigError(path, "malformed override path");
        }
        rest = rest.substr(close + 1);
      }
    }
    walked += (walked.empty() ? "" : ".") + key;
    // Channel values under human.initial may be added.
    const bool open_map = walked.rfind("human.initial.", 0) == 0 && indices.empty();
    if (!node->is_object() || (!node->contains(key) && !open_map)) throw ConfigError(path, "unknown field");
    node = &(*node)[key];
    for (const std::size_t index : indices) {
      if (!node->is_array() || index >= node->size()) throw ConfigError(path, "index out of range");
      node = &(*node)[index];
    }
  }

  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  *node = value;
}

Scenario load_scenario_text(const std::string& text, const LoadOptions& options) {
  const Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("", "scenario is not valid JSON");
  Scenario scenario = scenario_from_json(doc);
  if (!options.overrides.empty()) {
    Json full = scenario_to_json(scenario);
    for (const std::string& assignment : options.overrides) apply_override(full, assignment);
    scenario = scenario_from_json(full);
  }
  if (options.seed) scenario.seed = *options.seed;
  scenario.validate();
  return scenario;
}

Scenario load_scenario(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read scenario file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return load_scenario_text(text.str(), options);
}

}  // namespace wornsim
