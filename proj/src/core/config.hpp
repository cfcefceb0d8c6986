#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/geometry.hpp"
#include "core/optimize.hpp"

namespace eigenobs {

// Key-value config file with [section] headers and '#' comments.
class ConfigFile {
 public:
  static ConfigFile load(const std::string& path);
  static ConfigFile parse(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& section,
                             const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  double require_double(const std::string& section,
                        const std::string& key) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<double> require_double_list(const std::string& section,
                                          const std::string& key) const;
  int line_of(const std::string& section, const std::string& key) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries_;  // "section.key"
};

struct CheckParams {
  // absent checks are skipped; presence is keyed off the config
  std::optional<double> slope_rtol;
  std::optional<double> cap_rtol;
  bool cap_monotone = false;
  std::optional<double> stability_lo;
  std::optional<double> stability_hi;
  bool l2_over_cap_decreasing = false;
  std::optional<double> fb_rtol;
  bool fb_iqr_decreasing = false;
  std::optional<double> anchor_arc_frac;
  std::optional<double> mass_frac_min;
  bool hausdorff_decreasing = false;
  double trend_slack = 0.0;  // relative slack for the monotone-trend checks
};

struct ExperimentConfig {
  Domain domain = Domain::disk(1.0);
  std::string domain_kind = "disk";

  double mesh_h = 0.05;
  int refine = 0;

  std::vector<double> epsilons;        // strictly decreasing, positive
  std::string optimizer = "parametric";  // parametric | greedy

  BumpProfile profile = BumpProfile::cos2();
  bool width_fixed = false;
  double width = 0.0;        // fixed bump width r (when width_fixed)
  double width_scale = 2.5;  // else r = clamp(scale * sqrt(eps), min, max)
  double width_min = 0.0;
  double width_max = 1e30;
  int anchor_grid = 16;

  double eigen_tol = 1e-9;
  double search_tol = 1e-7;
  double bracket_frac = 1e-4;
  GreedyParams greedy;

  double delta = 0.0;  // <= 0 means 4 * width at the smallest eps
  double argmin_flat_frac = 0.10;
  double argmin_band_frac = 0.05;
  int hausdorff_samples = 512;

  // single-obstacle commands
  double anchor_s = 0.0;
  double single_eps = 0.0;

  // validate command
  double validate_h = 0.02;
  double validate_rtol = 0.005;
  double ratio_lo = 3.2;
  double ratio_hi = 4.8;

  std::string outdir = "out";
  CheckParams checks;

  double bump_width_for(double eps) const;

  // needs_sweep: require a well-formed epsilon list
  static ExperimentConfig from(const ConfigFile& cfg, bool needs_sweep);
};

}  // namespace eigenobs
