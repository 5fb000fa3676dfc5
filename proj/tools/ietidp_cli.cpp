// Experiment driver: runs (p, r, s) sweeps of the IETI-DP solver and writes
// CSV, markdown and JSON-lines tables.

#include "ietidp/error.hpp"
#include "ietidp/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"IETI-DP experiment driver for multipatch SIPG Poisson problems"};
  std::string config_path, out_dir, geometry_path;
  std::optional<double> delta, rtol;
  std::optional<int> threads, oracle_cap;
  app.add_option("-c,--config", config_path, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("-o,--out", out_dir, "output directory (overrides output.directory)");
  app.add_option("--delta", delta, "penalty parameter");
  app.add_option("--rtol", rtol, "PCG relative tolerance");
  app.add_option("--threads", threads, "threads for per-patch work");
  app.add_option("--emit-geometry", geometry_path, "write patch boundary polylines to this file and exit");
  app.add_option("--oracle-check", oracle_cap, "cross-check cells with at most this many DOFs against a monolithic solve")
      ->expected(0, 1)
      ->default_str("5000");
  CLI11_PARSE(app, argc, argv);

  try {
    ietidp::ExperimentConfig cfg = ietidp::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (delta) cfg.delta = *delta;
    if (rtol) cfg.rtol = *rtol;
    if (threads) cfg.threads = *threads;
    if (app.count("--oracle-check")) cfg.oracle_dof_cap = oracle_cap.value_or(5000);
    if (!(cfg.delta > 0.0) || !(cfg.rtol > 0.0 && cfg.rtol < 1.0) || cfg.threads < 1)
      throw ietidp::ConfigError("invalid --delta, --rtol or --threads override");

    if (!geometry_path.empty()) {
      ietidp::emit_geometry(cfg, geometry_path);
      std::cout << "wrote " << geometry_path << '\n';
      return 0;
    }
    const ietidp::ExperimentResult result = ietidp::run_experiment(cfg);
    ietidp::write_outputs(cfg, result);
    std::cout << result.markdown(cfg);
    if (!result.ok()) {
      std::cerr << "some cells failed or did not converge\n";
      return 2;
    }
    return 0;
  } catch (const ietidp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
