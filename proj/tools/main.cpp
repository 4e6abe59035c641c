#include <math.h>

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "clwr/cli.hpp"

namespace {

// leftover tokens are --section.key=value overrides
void apply_overrides(clwr::Config& cfg, const std::vector<std::string>& extras) {
  for (const std::string& tok : extras) {
    if (tok.rfind("--", 0) != 0)
      throw clwr::ConfigError("unexpected argument: " + tok);
    cfg.set_override(tok);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemann solver and finite-volume scheme for constrained traffic flow"};
  app.require_subcommand(1);

  std::string config_path;
  bool enumerate_all = false;
  int jobs = 1;

  CLI::App* riemann = app.add_subcommand("riemann", "solve one constrained Riemann problem");
  riemann->add_option("-c,--config", config_path, "config file")->required();
  riemann->add_flag("--enumerate", enumerate_all, "emit every admissible solution");
  riemann->allow_extras();

  CLI::App* simulate = app.add_subcommand("simulate", "advance the finite-volume scheme");
  simulate->add_option("-c,--config", config_path, "config file")->required();
  simulate->allow_extras();

  CLI::App* compare = app.add_subcommand("compare", "distances between paired solutions");
  compare->add_option("-c,--config", config_path, "config file")->required();
  compare->allow_extras();

  CLI::App* sweep = app.add_subcommand("sweep", "scan the lower constraint level");
  sweep->add_option("-c,--config", config_path, "config file")->required();
  sweep->add_option("-j,--jobs", jobs, "worker pool size")->check(CLI::PositiveNumber);
  sweep->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    clwr::Config cfg = clwr::Config::from_file(config_path);
    if (riemann->parsed()) {
      apply_overrides(cfg, riemann->remaining());
      clwr::cli::cmd_riemann(cfg, enumerate_all);
    } else if (simulate->parsed()) {
      apply_overrides(cfg, simulate->remaining());
      clwr::cli::cmd_simulate(cfg);
    } else if (compare->parsed()) {
      apply_overrides(cfg, compare->remaining());
      clwr::cli::cmd_compare(cfg);
    } else {
      apply_overrides(cfg, sweep->remaining());
      clwr::cli::cmd_sweep(cfg, jobs);
    }
  } catch (const clwr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    // library precondition failures trace back to config values
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
