#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hull_lab/acceptance.hpp"
#include "hull_lab/config.hpp"
#include "hull_lab/parallel.hpp"
#include "hull_lab/runner.hpp"
#include "hull_lab/singularity.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hull-lab: numerical experiments on hull containment, singular sweeps, "
               "Monge-Ampere solves and transport maximum principles"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  double grid_scale = 1.0;
  bool sequential = false;
  app.add_option("--out-dir", out_dir, "directory for report.json and artifacts");
  app.add_option("--grid-scale", grid_scale, "multiplies the configured nx and ny");
  app.add_flag("--sequential", sequential, "single-threaded, bit-reproducible mode");

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config_path, "experiment config file")->required();

  CLI::App* suite = app.add_subcommand("suite", "run the acceptance battery");

  double remark1_lambda = 1.0;
  CLI::App* remark1 = app.add_subcommand("remark1", "run the circle-arc regression case");
  remark1->add_option("--lambda", remark1_lambda, "scale factor for the arc");

  CLI11_PARSE(app, argc, argv);

  // Worker count comes from HULL_LAB_THREADS unless --sequential wins.
  hull_lab::set_sequential(sequential);

  if (run->parsed()) {
    hull_lab::cli::RunOptions opts;
    opts.out_dir = out_dir;
    opts.grid_scale = grid_scale;
    opts.sequential = sequential;
    return hull_lab::cli::run_config_file(config_path, opts);
  }

  if (suite->parsed()) {
    const auto results = hull_lab::acceptance::run_all(std::cout);
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    std::cout << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
    return all ? 0 : 1;
  }

  if (remark1->parsed()) {
    const auto rep = hull_lab::singularity::remark1_case(remark1_lambda);
    std::cout << hull_lab::singularity::to_json(rep).dump(2) << "\n";
    const bool pass =
        rep.injective && std::abs(rep.hull_violation - remark1_lambda) <= 1e-9;
    return pass ? 0 : 1;
  }
  return 3;
}
