// Command-line front end: constraint analysis, dissipation tables,
// correspondence verification and dynamics comparisons, driven by a JSON
// config. Exit codes: 0 success, 2 config error, 3 inconsistent dynamics,
// 4 numerical-validity breach.

#include "cli_support.hpp"

#include "dlcorr/constraints.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <sstream>

namespace {

struct FlagOverrides {
  std::string config_path;
  std::string out_dir;
  int fock_dim = -1;
  double tau = -1.0;
  std::string sweep;
  int interior_exclude = -1;
};

void apply_overrides(dlcorr::cli::Config& cfg, const FlagOverrides& flags) {
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.fock_dim > 0) cfg.model.n_sys = flags.fock_dim;
  if (flags.tau > 0.0) cfg.model.tau = flags.tau;
  if (flags.interior_exclude >= 0) cfg.interior_exclude = flags.interior_exclude;
  if (!flags.sweep.empty()) {
    const auto eq = flags.sweep.find('=');
    if (eq == std::string::npos)
      throw dlcorr::cli::ConfigError("--sweep expects NAME=v1,v2,...");
    dlcorr::cli::SweepSettings sweep;
    sweep.name = flags.sweep.substr(0, eq);
    std::stringstream values(flags.sweep.substr(eq + 1));
    std::string item;
    while (std::getline(values, item, ',')) {
      try {
        sweep.values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw dlcorr::cli::ConfigError("--sweep value '" + item + "' is not a number");
      }
    }
    if (sweep.values.empty()) throw dlcorr::cli::ConfigError("--sweep got no values");
    cfg.sweep = sweep;
  }
  cfg.model.validate();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained-dynamics / open-system correspondence toolkit"};
  app.require_subcommand(1);

  FlagOverrides flags;
  app.add_option("--config", flags.config_path, "JSON experiment config")->required();
  app.add_option("--out", flags.out_dir, "output directory (default: config out_dir or ./out)");
  app.add_option("--fock-dim", flags.fock_dim, "override the system truncation");
  app.add_option("--tau", flags.tau, "override the coarse-graining time");
  app.add_option("--sweep", flags.sweep, "override the sweep axis, NAME=v1,v2,...");
  app.add_option("--interior-exclude", flags.interior_exclude,
                 "levels excluded from interior-block comparisons");

  auto* constraints = app.add_subcommand("constraints", "run the constraint chain");
  auto* gamma = app.add_subcommand("gamma", "tabulate the dissipation matrix");
  auto* correspond = app.add_subcommand("correspond", "verify the correspondence");
  auto* evolve = app.add_subcommand("evolve", "compare Lindblad and exact dynamics");

  CLI11_PARSE(app, argc, argv);

  dlcorr::cli::Config cfg;
  try {
    cfg = dlcorr::cli::load_config(flags.config_path);
    apply_overrides(cfg, flags);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (constraints->parsed()) return dlcorr::cli::cmd_constraints(cfg, cfg.out_dir);
    if (gamma->parsed()) return dlcorr::cli::cmd_gamma(cfg, cfg.out_dir);
    if (correspond->parsed()) return dlcorr::cli::cmd_correspond(cfg, cfg.out_dir);
    if (evolve->parsed()) return dlcorr::cli::cmd_evolve(cfg, cfg.out_dir);
  } catch (const dlcorr::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dlcorr::InconsistentDynamics& e) {
    std::cerr << "inconsistent dynamics: " << e.what() << "\n";
    return 3;
  } catch (const dlcorr::TruncationError& e) {
    std::cerr << "numerical validity breach: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
