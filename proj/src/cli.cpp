#include "wornsim/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "wornsim/bridge/server.hpp"
#include "wornsim/errors.hpp"
#include "wornsim/json_io.hpp"
#include "wornsim/log_io.hpp"
#include "wornsim/metrics.hpp"

namespace wornsim {

namespace {

struct Options {
  std::string scenario;
  std::string out;
  std::string log;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> seed_options;  // one per subcommand
  bool timestamps = false;
  bool jsonl = false;
  std::string address = "127.0.0.1";
  unsigned short port = 8765;
  double publish_rate = 30.0;
  bool start_paused = false;

  LoadOptions load() const {
    LoadOptions o;
    o.overrides = overrides;
    for (const CLI::Option* option : seed_options) {
      if (option->count() > 0) o.seed = seed;
    }
    return o;
  }
};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json metrics_document(const Metrics& metrics, const std::string& name, std::size_t rows, bool timestamps) {
  Json doc;
  doc["scenario"] = name;
  doc["rows"] = rows;
  const Json values = metrics_to_json(metrics);
  for (const auto& [key, value] : values.items()) doc[key] = value;
  if (timestamps) doc["generated_at"] = utc_now();
  return doc;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path.string());
  body(file);
  file.flush();
  if (!file) throw Error("cannot write " + path.string());
}

int cmd_run(const Options& o, std::ostream& out) {
  const Scenario scenario = load_scenario(o.scenario, o.load());
  const SimLog log = run(scenario);
  const Metrics metrics = compute_metrics(log);
  const std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "log.csv", [&](std::ostream& f) { write_log_csv(f, log); });
  if (o.jsonl) write_file(dir / "log.jsonl", [&](std::ostream& f) { write_log_jsonl(f, log); });
  write_file(dir / "metrics.json", [&](std::ostream& f) {
    f << metrics_document(metrics, scenario.name, log.rows.size(), o.timestamps).dump(2) << '\n';
  });
  out << "wrote " << (dir / "log.csv").string() << " (" << log.rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  SimLog log;
  std::string name;
  if (!o.log.empty()) {
    std::ifstream in(o.log);
    if (!in) throw ConfigError("", "cannot read log file " + o.log);
    log = read_log_csv(in);
    name = std::filesystem::path(o.log).stem().string();
  } else {
    const Scenario scenario = load_scenario(o.scenario, o.load());
    log = run(scenario);
    name = scenario.name;
  }
  const std::string text = metrics_document(compute_metrics(log), name, log.rows.size(), o.timestamps).dump(2);
  if (!o.out.empty()) {
    write_file(o.out, [&](std::ostream& f) { f << text << '\n'; });
  } else {
    out << text << '\n';
  }
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const Scenario scenario = load_scenario(o.scenario, o.load());
  out << "ok: " << (scenario.name.empty() ? o.scenario : scenario.name) << '\n';
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario scenario = load_scenario(o.scenario, o.load());
  bridge::ServerOptions server;
  server.address = o.address;
  server.port = o.port;
  server.publish_rate = o.publish_rate;
  server.start_paused = o.start_paused;
  return bridge::serve(scenario, server, out, err);
}

void scenario_flags(CLI::App* cmd, Options& o, bool required = true) {
  auto* flag = cmd->add_option("--scenario", o.scenario, "Scenario JSON file");
  if (required) flag->required();
  cmd->add_option("--set", o.overrides, "Override a scenario field, KEY=VALUE (repeatable)");
  o.seed_options.push_back(cmd->add_option("--seed", o.seed, "Override the scenario seed"));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Worn virtual-limb teleoperation simulator"};
  app.require_subcommand(1);
  Options o;

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write log.csv and metrics.json");
  scenario_flags(run_cmd, o);
  run_cmd->add_option("--out", o.out, "Output directory")->required();
  run_cmd->add_flag("--timestamps", o.timestamps, "Add a generation time to metrics.json");
  run_cmd->add_flag("--jsonl", o.jsonl, "Also write log.jsonl");

  auto* metrics_cmd = app.add_subcommand("metrics", "Print metrics of a log CSV or of a scenario run");
  auto* log_flag = metrics_cmd->add_option("--log", o.log, "Log CSV written by run");
  scenario_flags(metrics_cmd, o, false);
  metrics_cmd->add_option("--out", o.out, "Write the metrics JSON to this file");
  metrics_cmd->add_flag("--timestamps", o.timestamps, "Add a generation time");
  log_flag->excludes(metrics_cmd->get_option("--scenario"));

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file without running it");
  scenario_flags(validate_cmd, o);

  auto* serve_cmd = app.add_subcommand("serve", "Run the scenario live over WebSocket (/sim)");
  scenario_flags(serve_cmd, o);
  serve_cmd->add_option("--address", o.address, "Listen address");
  serve_cmd->add_option("--port", o.port, "Listen port");
  serve_cmd->add_option("--publish-rate", o.publish_rate, "Snapshots per second");
  serve_cmd->add_flag("--start-paused", o.start_paused, "Wait for a resume message before stepping");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(o, out);
    if (*metrics_cmd) {
      if (o.log.empty() && o.scenario.empty()) throw ConfigError("", "metrics needs --log or --scenario");
      return cmd_metrics(o, out);
    }
    if (*validate_cmd) return cmd_validate(o, out);
    return cmd_serve(o, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace wornsim
