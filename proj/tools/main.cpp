// tools/main.cpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dive/experiment.hpp"
#include "dive/experiment_io.hpp"

#include "acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dive: blind extraction of a moving source from segmented "
               "multi-dataset mixtures"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int trials = 0;
  std::uint64_t seed = 0;
  int threads = 0;

  CLI::App* run_cmd =
      app.add_subcommand("run", "Run a config-driven Monte-Carlo experiment");
  run_cmd->add_option("--config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  run_cmd->add_option("--trials", trials, "override the trial count");
  run_cmd->add_option("--seed", seed, "override the master seed");
  run_cmd->add_option("--threads", threads,
                      "worker threads (default: DIVE_THREADS or hardware)");

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Run the full acceptance suite; exit 0 iff all checks pass");
  verify_cmd->add_option("--threads", threads,
                         "worker threads (default: DIVE_THREADS or hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      dive::ExperimentSpec spec = dive::load_experiment(config_path);
      if (run_cmd->count("--trials")) {
        if (trials < 1) throw dive::ConfigError("--trials must be >= 1");
        spec.trials = trials;
      }
      if (run_cmd->count("--seed")) spec.base.seed = seed;

      const dive::ExperimentResult res = dive::run_experiment(spec, threads);
      dive::write_outputs(res, out_dir);

      std::printf("%s: %s, %d trial(s)\n", spec.name.c_str(),
                  dive::mode_name(spec.mode), spec.trials);
      for (const auto& v : spec.algorithms)
        for (const auto& s : dive::sweep_stats(res, v.label))
          std::printf("  %-28s sweep=%-8g isr: trimmed=%8.2f median=%8.2f dB"
                      "  converged=%.2f  failures=%d\n",
                      v.label.c_str(), s.sweep_value, s.isr_trimmed_mean_db,
                      s.isr_median_db, s.converged_fraction, s.failures);
      std::printf("results written to %s\n", out_dir.c_str());
      return 0;
    }
    return dive::acceptance::run_all(std::cout, threads) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
