#pragma once

#include "dlcorr/coarse_grain.hpp"
#include "dlcorr/correspondence.hpp"
#include "dlcorr/lindblad.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlcorr::cli {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSettings {
  std::string name; // tau | kprime | k1 | k2 | inv_temp
  std::vector<double> values;
};

struct EvolveSettings {
  bool lindblad = true;
  bool exact = true;
  std::string initial_type = "fock"; // fock | coherent | thermal
  int initial_n = 1;
  Complex initial_alpha{0.5, 0.0};
  double initial_inv_temp = 1.0;
};

struct Config {
  int schema_version = 1;
  ModelParams model;
  double t_final = 1.0;
  double dt = 1e-3;
  int sample_every = 10;
  int interior_exclude = 2;
  std::string out_dir = "out"; // --out overrides
  MonitorLimits monitor_limits;
  std::optional<SweepSettings> sweep;

  std::string mode = "physical"; // correspond: physical | synthetic
  double synthetic_alpha = 0.8;
  int candidate = -1;

  EvolveSettings evolve;
  json constraints_spec; // raw block for the constraints subcommand
};

Config load_config(const std::string& path);
ModelParams with_sweep_value(const ModelParams& base, const std::string& name, double value);

std::string fmt17(double x);

int cmd_constraints(const Config& cfg, const std::string& out_dir);
int cmd_gamma(const Config& cfg, const std::string& out_dir);
int cmd_correspond(const Config& cfg, const std::string& out_dir);
int cmd_evolve(const Config& cfg, const std::string& out_dir);

} // namespace dlcorr::cli
