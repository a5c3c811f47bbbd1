// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "starfrac/experiments.hpp"

// Exit codes: 0 all thresholds pass, 1 a threshold failed, 2 config or IO error.
int main(int argc, char** argv) {
  CLI::App app{"starfrac: nonlocal diffusion limit toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "path to the experiment config")->required();
  run->add_option("--out", out_dir, "output directory for CSV and summary files");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--threads", threads, "worker thread count (0 = runtime default)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config: " << config_path << "\n";
      return 2;
    }
    nlohmann::json cfg = nlohmann::json::parse(in);
    if (seed_opt->count() > 0) cfg["seed"] = seed;
    if (threads > 0) {
#ifdef _OPENMP
      omp_set_num_threads(threads);
#endif
    }
    const starfrac::ExperimentOutcome outcome = starfrac::run_experiment(cfg, out_dir);
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " "
              << cfg.value("experiment", std::string("?")) << " (summary: " << out_dir
              << "/summary.json)\n";
    return outcome.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
