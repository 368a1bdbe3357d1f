#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "wornsim/scenario.hpp"
#include "wornsim/servo.hpp"

namespace wornsim {

using Json = nlohmann::ordered_json;

/// Strict view over a JSON object: every field read is recorded and
/// finish() rejects the rest. Errors carry the dotted path.
class JsonReader {
 public:
  JsonReader(const Json& value, std::string path);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);  // throws when missing
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, std::size_t size);  // size 0: any length
  JsonReader object(const std::string& key);
  std::string child_path(const std::string& key) const;
  const std::string& path() const noexcept { return path_; }

  void finish() const;

 private:
  const Json& value_;
  std::string path_;
  std::vector<std::string> seen_;
};

/// {"translation": [x, y, z], "rotation": [w, x, y, z]}
Json rigid_to_json(const Rigid& r);
Rigid rigid_from_json(const Json& value, const std::string& path);

/// Log and wire form: {"from": f, "to": t, "q": [w, x, y, z], "t": [x, y, z]}.
Json transform_to_json(const Transform& transform);
Transform transform_from_json(const Json& value, const std::string& path);

Json servo_config_to_json(const ServoConfig& cfg);
/// Fields missing from `value` keep their value in `base`.
ServoConfig servo_config_from_json(const Json& value, const std::string& path, const ServoConfig& base = {});

/// Limb commands share one encoding between scenario events and live
/// clients: {"type": "aux_twist", "twist": [vx, vy, vz, wx, wy, wz]},
/// {"type": "gripper", "closed": b}, {"type": "attach", "frame": f,
/// "mode": "preserve_world" | "preserve_linkage"}, {"type": "detach"}.
Json command_to_json(const LimbCommand& command);
/// Reads the command fields (including "type") from `reader`.
LimbCommand command_from_reader(JsonReader& reader);

const char* command_type(const LimbCommand& command);

Json scenario_to_json(const Scenario& scenario);
/// Strict parse; does not run Scenario::validate.
Scenario scenario_from_json(const Json& value);

/// Apply "a.b[2].c=value" to `doc`. The path must already exist. The value is
/// parsed as JSON when possible, otherwise taken as a string.
void apply_override(Json& doc, const std::string& assignment);

struct LoadOptions {
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

/// Parse, apply overrides and seed, validate. Throws ConfigError.
Scenario load_scenario_text(const std::string& text, const LoadOptions& options = {});
Scenario load_scenario(const std::string& path, const LoadOptions& options = {});

}  // namespace wornsim
