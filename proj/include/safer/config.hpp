#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "safer/aah.hpp"
#include "safer/dynamics.hpp"
#include "safer/thrusters.hpp"

namespace safer {

struct SimConfig {
  BodyParams body;
  double step = 0.25;  // s per control cycle
  int substeps = 16;
  IntegratorOptions integrator;
  AahThresholds thresholds;
  int double_click_cycles = 2;
  ThrusterData thrusters;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// INI file with sections [body], [integration], [aah] and [data]. Data paths
// are relative to the config file's directory. Missing keys keep defaults;
// the [data] paths are required.
SimConfig load_config(const std::filesystem::path& path);

// $SAFER_CONFIG if set, else the shipped data/default.ini.
std::filesystem::path default_config_path();

// Built-in parameters with geometry and tables derived in memory; used when
// no data files are at hand.
SimConfig builtin_config();

}  // namespace safer
