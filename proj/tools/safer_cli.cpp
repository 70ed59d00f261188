// Command-line front end: scenario runs, logic enumeration, table
// regeneration and the HTTP service.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include <fstream>
#include <iostream>

#include "safer/config.hpp"
#include "safer/gateway.hpp"
#include "safer/sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitViolations = 2;

safer::SimConfig load(const std::string& config_path) {
  return safer::load_config(config_path.empty() ? safer::default_config_path()
                                                : std::filesystem::path(config_path));
}

safer::FaultChange parse_fail(const std::string& spec) {
  const auto at = spec.find('@');
  if (at == std::string::npos) throw std::runtime_error("--fail expects NAME@CYCLE, got " + spec);
  auto name = safer::parse_thruster_name(spec.substr(0, at));
  if (!name) throw std::runtime_error("--fail: unknown thruster in " + spec);
  std::size_t used = 0;
  long cycle = -1;
  try {
    cycle = std::stol(spec.substr(at + 1), &used);
  } catch (const std::exception&) {
  }
  if (cycle < 1 || used != spec.size() - at - 1)
    throw std::runtime_error("--fail: cycle must be a positive integer in " + spec);
  return {static_cast<std::uint64_t>(cycle), *name, true};
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  fn(out);
}

int cmd_run(const std::string& config_path, const std::string& scenario_path,
            const std::string& out_path, const std::string& reports_path,
            const std::vector<std::string>& fails) {
  const safer::SimConfig cfg = load(config_path);
  safer::Scenario scenario = safer::load_scenario(scenario_path);
  for (const auto& f : fails) scenario.faults.push_back(parse_fail(f));

  safer::SaferState state = safer::reset(cfg.step);
  const auto reports = safer::run_scenario(state, cfg, scenario);

  emit(out_path, [&](std::ostream& os) { safer::write_trajectory(os, reports, cfg.step); });
  std::string reports_file = reports_path;
  if (reports_file.empty() && !out_path.empty()) reports_file = out_path + ".reports.jsonl";
  if (!reports_file.empty()) {
    emit(reports_file, [&](std::ostream& os) {
      for (const auto& r : reports) os << safer::gateway::to_json(r).dump() << '\n';
    });
  }

  std::size_t violations = 0;
  for (const auto& r : reports) violations += r.violations.size();
  std::cerr << fmt::format("cycles: {}\nviolations: {}\n", reports.size(), violations);
  return violations == 0 ? kExitOk : kExitViolations;
}

int cmd_enumerate(const std::string& config_path, const std::string& mode,
                  const std::string& out_path) {
  const safer::SimConfig cfg = load(config_path);
  const auto result =
      mode == "huge" ? safer::huge_test(cfg.thrusters) : safer::big_test(cfg.thrusters);
  emit(out_path, [&](std::ostream& os) { safer::write_enumeration(os, result); });
  std::cerr << fmt::format("entries: {}\nviolations: {}\n", result.entries.size(),
                           result.violations);
  return result.violations == 0 ? kExitOk : kExitViolations;
}

int cmd_tables(const std::string& out_path) {
  safer::ThrusterData data;
  data.geometry = safer::default_geometry();
  bool ok = true;
  for (auto group : {safer::ThrusterGroup::BF, safer::ThrusterGroup::LRUD}) {
    auto derived = safer::derive_table_from_geometry(data.geometry, group);
    for (const auto& t : derived.unsatisfiable)
      std::cerr << fmt::format("{} row {}: unsatisfiable\n", safer::to_string(group),
                               safer::to_string(t));
    for (const auto& d : derived.divergent)
      std::cerr << fmt::format("{} row {}: diverges from anchor ({{{}}}, {{{}}})\n",
                               safer::to_string(group), safer::to_string(d.anchor.triple),
                               safer::join(d.actual.mandatory, ","),
                               safer::join(d.actual.optional, ","));
    ok = ok && derived.ok();
    data.tables[group] = derived.table;
  }
  emit(out_path, [&](std::ostream& os) { os << safer::format_thruster_data(data); });
  return ok ? kExitOk : kExitViolations;
}

int cmd_serve(const std::string& config_path, const std::string& host, int port) {
  safer::gateway::SessionManager sessions(load(config_path));
  httplib::Server server;
  safer::gateway::install_routes(server, sessions);
  std::cerr << fmt::format("listening on http://{}:{}\n", host, port);
  if (!server.listen(host, port)) {
    std::cerr << fmt::format("cannot listen on {}:{}\n", host, port);
    return kExitBadInput;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAFER backpack simulator"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "INI config (default: $SAFER_CONFIG or data/default.ini)");

  std::string scenario_path, out_path, reports_path, mode = "huge", host = "127.0.0.1";
  std::vector<std::string> fails;
  int port = 8080;

  auto* run = app.add_subcommand("run", "run a scenario and write the trajectory");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_path, "trajectory CSV (default stdout)");
  run->add_option("--reports", reports_path, "cycle reports JSONL (default <out>.reports.jsonl)");
  run->add_option("--fail", fails, "break THRUSTER before 1-based CYCLE, as THRUSTER@CYCLE");

  auto* enumerate = app.add_subcommand("enumerate", "enumerate the selection logic");
  enumerate->add_option("--mode", mode, "big or huge")->check(CLI::IsMember({"big", "huge"}));
  enumerate->add_option("--out", out_path, "result CSV (default stdout)");

  auto* tables = app.add_subcommand("tables", "derive the thruster data file from the default geometry");
  tables->add_option("--out", out_path, "data file (default stdout)");

  auto* serve = app.add_subcommand("serve", "serve the HTTP API");
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "bind address");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, scenario_path, out_path, reports_path, fails);
    if (*enumerate) return cmd_enumerate(config_path, mode, out_path);
    if (*tables) return cmd_tables(out_path);
    if (*serve) return cmd_serve(config_path, host, port);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}
