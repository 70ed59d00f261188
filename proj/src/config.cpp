#include "safer/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <sstream>

#ifndef SAFER_DATA_DIR
#define SAFER_DATA_DIR "data"
#endif

namespace safer {

namespace pt = boost::property_tree;

namespace {

Vec3 parse_vec3(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  Vec3 v;
  std::string extra;
  if (!(in >> v.x >> v.y >> v.z) || (in >> extra))
    throw ConfigError(fmt::format("{}: expected three numbers, got '{}'", key, text));
  return v;
}

template <typename T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  try {
    return tree.get<T>(key, fallback);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError(fmt::format("{}: bad value '{}'", key, tree.get<std::string>(key)));
  }
}

Vec3 get_vec3(const pt::ptree& tree, const std::string& key, Vec3 fallback) {
  auto text = tree.get_optional<std::string>(key);
  return text ? parse_vec3(*text, key) : fallback;
}

}  // namespace

SimConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }

  SimConfig cfg;
  cfg.body.mass = get(tree, "body.mass", cfg.body.mass);
  cfg.body.inertia = get_vec3(tree, "body.inertia", cfg.body.inertia);
  cfg.step = get(tree, "integration.step", cfg.step);
  cfg.substeps = get(tree, "integration.substeps", cfg.substeps);
  cfg.integrator.gimbal_epsilon =
      get(tree, "integration.gimbal_epsilon", cfg.integrator.gimbal_epsilon);
  cfg.integrator.gimbal_band = get(tree, "integration.gimbal_band", cfg.integrator.gimbal_band);
  cfg.integrator.gravity = get_vec3(tree, "integration.gravity", cfg.integrator.gravity);
  cfg.thresholds.eps_roll = get(tree, "aah.eps_roll", cfg.thresholds.eps_roll);
  cfg.thresholds.eps_pitch = get(tree, "aah.eps_pitch", cfg.thresholds.eps_pitch);
  cfg.thresholds.eps_yaw = get(tree, "aah.eps_yaw", cfg.thresholds.eps_yaw);
  cfg.double_click_cycles = get(tree, "aah.double_click_cycles", cfg.double_click_cycles);

  if (auto problem = body_params_problem(cfg.body); !problem.empty())
    throw ConfigError(fmt::format("{}: [body] {}", path.string(), problem));
  if (!(cfg.step > 0.0)) throw ConfigError("integration.step must be positive");
  if (cfg.substeps < 1) throw ConfigError("integration.substeps must be >= 1");
  if (!(cfg.integrator.gimbal_epsilon > 0.0))
    throw ConfigError("integration.gimbal_epsilon must be positive");
  if (!(cfg.thresholds.eps_roll > 0 && cfg.thresholds.eps_pitch > 0 && cfg.thresholds.eps_yaw > 0))
    throw ConfigError("aah thresholds must be positive");
  if (cfg.double_click_cycles < 1) throw ConfigError("aah.double_click_cycles must be >= 1");

  const auto geometry = tree.get_optional<std::string>("data.geometry");
  const auto tables = tree.get_optional<std::string>("data.tables");
  if (!geometry || !tables) throw ConfigError("[data] needs both 'geometry' and 'tables'");
  const auto base = path.parent_path();
  try {
    cfg.thrusters = load_thruster_data(base / *geometry, base / *tables);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

std::filesystem::path default_config_path() {
  if (const char* env = std::getenv("SAFER_CONFIG"); env && *env) return env;
  return std::filesystem::path(SAFER_DATA_DIR) / "default.ini";
}

SimConfig builtin_config() {
  SimConfig cfg;
  cfg.thrusters.geometry = default_geometry();
  for (ThrusterGroup g : {ThrusterGroup::BF, ThrusterGroup::LRUD})
    cfg.thrusters.tables[g] = derive_table_from_geometry(cfg.thrusters.geometry, g).table;
  return cfg;
}

}  // namespace safer
