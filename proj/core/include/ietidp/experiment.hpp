#pragma once

// Batch driver behind the command line tool: configuration parsing, sweeps
// over (p, r, s) and table output.

#include "ietidp/multipatch.hpp"
#include "ietidp/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ietidp {

struct DomainSpec {
  enum class Kind { Ring, ThinRing, SquareTGrid } kind = Kind::Ring;
  std::vector<double> widths;       ///< ring layers, sum 1
  std::vector<int> sectors;
  std::vector<double> offsets_deg;
  std::vector<Rect> rects;          ///< square T-grid
};

/// Smoothness entry of a sweep: fixed value, p-1, or every 0..p-1.
struct SmoothnessSpec {
  enum class Kind { Fixed, MaxMinusOne, All } kind = Kind::MaxMinusOne;
  int value = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DomainSpec domain;
  std::vector<int> degrees;
  std::vector<int> refinements;
  std::vector<SmoothnessSpec> smoothness;
  double delta = 4.0;
  double rtol = 1e-8;
  int maxit = 500;
  int threads = 1;
  bool kappa_probe = true;
  std::filesystem::path output_dir = "results";
  /// Monolithic cross-check for cells with at most this many DOFs (0 = off).
  int oracle_dof_cap = 0;
};

/// Parses the JSON configuration (schema "ietidp.experiment/1"). Unknown keys
/// and invalid values raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

MultiPatch build_domain(const DomainSpec& spec);

struct ExperimentRow {
  int p = 0, r = 0, s = 0;
  int dofs = 0;
  int multipliers = 0;
  int coarse = 0;
  int iterations = 0;
  double kappa = 0.0;
  double kappa_solve = 0.0;
  bool converged = false;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  /// Relative l2 difference to the monolithic solve, if checked.
  std::optional<double> oracle_error;
  std::string error;  ///< non-empty if the cell failed
  std::string record; ///< JSON record of the cell
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  bool ok() const;
  std::string csv() const;
  /// Aligned markdown: flat table followed by an "it (kappa)" pivot.
  std::string markdown(const ExperimentConfig& config) const;
  std::string jsonl() const;
};

/// Cells are run in (p, s, r) lexicographic order of the sweep lists.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes <name>.csv, <name>.md and <name>.jsonl into config.output_dir.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result);

/// Writes the boundary polylines of the configured domain.
void emit_geometry(const ExperimentConfig& config, const std::filesystem::path& path);

}  // namespace ietidp
