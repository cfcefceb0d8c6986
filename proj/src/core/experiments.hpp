#pragma once

#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/optimize.hpp"

namespace eigenobs {

struct SweepRecord {
  double eps = 0.0;
  double lambda0 = 0.0;
  double lambda_eps = 0.0;
  double lambda_shift = 0.0;  // lambda_eps - lambda0
  double cap = 0.0;
  double shift_over_cap = 0.0;
  double cap_over_eps = 0.0;
  double shift_over_eps = 0.0;
  double fb_sqrt_lambda = 0.0;  // median |grad phi_eps| on the free boundary
  double fb_iqr = 0.0;
  double fb_min = 0.0;
  double fb_max = 0.0;
  double h1_diff_omega = 0.0;  // seminorm^2 of phi_eps - phi0 over live cells
  double h1_diff_full = 0.0;   // over all cells
  double l2_diff_omega = 0.0;
  double l2_diff_full = 0.0;
  double l2_over_cap = 0.0;
  double dist_argmin = 0.0;  // directed Hausdorff: obstacle -> argmin set
  double mass_frac = 0.0;    // obstacle mass within delta of the argmin set
  double bdry_int_phi0_over_eps = 0.0;  // experimental column
  double cap_lower_bound = 0.0;
  double obstacle_area = 0.0;
  double width = 0.0;
  double anchor_s = -1.0;
  int cell_count = 0;
};

struct SlopeEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms misfit of the least-squares line
  double richardson = 0.0;  // secant through the two smallest abscissae
  std::string method;
};

// Least-squares line through the smallest half of the abscissae (at least
// two); at least three points required overall.
SlopeEstimate estimate_slope(const std::vector<std::pair<double, double>>& pts);

struct CheckOutcome {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<std::string> row_errors;  // per-eps failures, sweep continues
  std::vector<CheckOutcome> check_outcomes;
  double lambda0 = 0.0;
  double boundary_length = 0.0;
  double delta = 0.0;
  BoundaryGradientProfile profile;  // of phi0 on the sweep mesh
  PointSet argmin_set;
  std::vector<double> argmin_params;  // arc parameters of the argmin samples
  bool argmin_whole_boundary = false;
  SlopeEstimate shift_slope;  // only when >= 3 records
  int mesh_vertices = 0;
  int mesh_triangles = 0;
};

// Full sweep: per eps optimize, solve, capacity, free-boundary estimate,
// difference norms and concentration metrics. When outdir is nonempty the
// rows stream into outdir/sweep.csv as they complete.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& outdir);

struct ConcentrationReport {
  std::vector<double> dist_argmin;
  std::vector<double> mass_frac;
  bool dist_decreasing = false;
  double final_mass_frac = 0.0;
};
ConcentrationReport concentration_report(const std::vector<SweepRecord>& records);

std::vector<CheckOutcome> evaluate_checks(const ExperimentConfig& cfg,
                                          const SweepResult& sweep);

struct SolveOutcome {
  double lambda0 = 0.0;
  double residual = 0.0;
  int mesh_vertices = 0;
  int mesh_triangles = 0;
  BoundaryGradientProfile profile;
};
SolveOutcome run_solve(const ExperimentConfig& cfg, const std::string& outdir);

struct CapacityOutcome {
  double eps = 0.0;
  double cap = 0.0;
  double lambda0 = 0.0;
  double lambda_eps = 0.0;
  double stability = 0.0;
  double lower_bound = 0.0;
  double obstacle_volume = 0.0;
};
CapacityOutcome run_capacity(const ExperimentConfig& cfg,
                             const std::string& outdir);

struct OptimizeOutcome {
  double eps = 0.0;
  double lambda0 = 0.0;
  OptimizationResult result;
};
OptimizeOutcome run_optimize(const ExperimentConfig& cfg,
                             const std::string& outdir);

struct ValidateEntry {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double error = 0.0;  // relative, or the raw ratio for the order check
  bool pass = false;
};
struct ValidateOutcome {
  std::vector<ValidateEntry> entries;
  bool pass = false;
};
// Analytic oracle suite: disk and square eigenvalues at the configured h,
// plus the error-reduction ratio under one mesh halving on the square.
ValidateOutcome run_validate(const ExperimentConfig& cfg,
                             const std::string& outdir);

// shared helpers
std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& r);
void write_text_file(const std::string& path, const std::string& content);
void ensure_outdir(const std::string& outdir);

}  // namespace eigenobs
