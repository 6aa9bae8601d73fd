#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mars/metrics.hpp"
#include "mars/stepper.hpp"

namespace mars {

// One benchmark run description, mirroring the parameter tables: field,
// sphere, grid size(s), interface-scale rule, Courant number, regularity
// and cascade parameters, and the RNG seed. Loaded from a flat key=value
// file with command-line overrides.
struct RunConfig {
  std::string field = "vortical_shear";
  double period = 3.0;  // T
  Vec3 center{0.5, 0.75, 0.25};
  double radius = 0.15;
  std::string mesh_path;  // when set, replaces the generated sphere
  std::vector<double> grid_sizes{1.0 / 32};  // h
  std::string hl_rule = "0.5h";              // "0.5h", "6h^1.5", or a number
  double courant = 0.5;
  double r_tiny = 0.1;
  double theta = kPi / 10.0;
  int mu = 4;
  int nu = 10;
  int eta = 3;
  double armijo_c = 1e-4;
  double backtrack_rho = 0.8;
  // Initial marker spacing as a factor of h_L; 0.5 reproduces the 0.25h
  // spacing of the h_L = 0.5h setup and keeps the population of inserted
  // markers proportionate across interface-scale rules.
  double marker_spacing = 0.5;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::vector<double> snapshot_times;  // defaults to {0, T}
};

RunConfig default_vortical_config();
RunConfig default_deformation_config();

// Flat key=value file; '#' starts a comment. Unknown keys are an error.
RunConfig load_config(const std::string& path);
void apply_config_line(RunConfig& config, const std::string& key,
                       const std::string& value);

VelocityField make_field(const RunConfig& config);
double resolve_hl(const std::string& rule, double h);

struct GridRunResult {
  double h = 0.0;
  double h_max = 0.0;
  double dt = 0.0;
  int steps_taken = 0;
  std::vector<StepReport> steps;
  std::optional<ErrorRecord> error;  // set when the exact result is a sphere
  CostLedger ledger;
  std::string out_dir;
};

struct BenchmarkResult {
  std::vector<GridRunResult> grids;
  std::vector<std::optional<double>> e1_orders;  // between consecutive grids
};

// Runs every grid size in the config, writing per-step and error CSVs, OBJ
// snapshots, and (for several grids) a convergence table. Deterministic for
// a fixed config and seed. Partial CSV rows are flushed if a run aborts.
BenchmarkResult run_benchmark(const RunConfig& config);

// In-process single-grid run without artifacts; used by tests.
GridRunResult run_single_grid(const RunConfig& config, double h,
                              const std::string& out_dir = "");

std::string format_g17(double value);

}  // namespace mars
