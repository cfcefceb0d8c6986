#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/experiments.hpp"

using namespace eigenobs;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kDiskSweepCfg = R"(
[domain]
kind = disk
radius = 1.0

[mesh]
h = 0.035

[sweep]
epsilons = 0.006, 0.004, 0.0025
optimizer = parametric

[obstacle]
profile = cos2
width_scale = 2.6
anchor_grid = 4

[solver]
eigen_tol = 1e-9
search_eigen_tol = 1e-7
bracket_frac = 1e-2

[output]
dir = out_test
)";

}  // namespace

TEST_CASE("config parsing, defaults, and diagnostics") {
  const ConfigFile raw = ConfigFile::parse(kDiskSweepCfg);
  const ExperimentConfig cfg = ExperimentConfig::from(raw, true);
  CHECK(cfg.domain_kind == "disk");
  CHECK(cfg.mesh_h == doctest::Approx(0.035));
  CHECK(cfg.epsilons.size() == 3);
  CHECK(cfg.optimizer == "parametric");
  CHECK(cfg.anchor_grid == 4);
  CHECK(cfg.outdir == "out_test");
  CHECK(cfg.bump_width_for(0.0025) ==
        doctest::Approx(2.6 * std::sqrt(0.0025)));

  // a missing epsilon list names the field
  try {
    ExperimentConfig::from(ConfigFile::parse("[domain]\nkind = disk\n"), true);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("sweep.epsilons") != std::string::npos);
  }

  // non-decreasing epsilon lists are rejected
  CHECK_THROWS_AS(
      ExperimentConfig::from(
          ConfigFile::parse(
              "[domain]\nkind = disk\n[sweep]\nepsilons = 0.001 0.002\n"),
          true),
      ConfigError);

  // malformed lines carry the line number
  try {
    ConfigFile::parse("[domain]\nkind disk\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("slope estimation on synthetic data") {
  {
    std::vector<std::pair<double, double>> pts;
    for (double e : {0.004, 0.002, 0.001, 0.0005})
      pts.emplace_back(e, 1.84 * e);
    const auto est = estimate_slope(pts);
    CHECK(est.slope == doctest::Approx(1.84).epsilon(1e-12));
    CHECK(est.residual == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(est.richardson == doctest::Approx(1.84).epsilon(1e-12));
  }
  {
    // quadratic contamination stays within two percent on the small half
    std::vector<std::pair<double, double>> pts;
    for (double e : {0.004, 0.003, 0.002, 0.001, 0.0005})
      pts.emplace_back(e, 1.84 * e + 5.0 * e * e);
    const auto est = estimate_slope(pts);
    CHECK(std::abs(est.slope - 1.84) <= 0.02 * 1.84);
  }
  {
    std::vector<std::pair<double, double>> pts = {
        {0.004, 1.0}, {0.002, 1.0}, {0.001, 1.0}};
    CHECK(estimate_slope(pts).slope == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(estimate_slope({{0.1, 1.0}, {0.2, 2.0}}), Error);
}

TEST_CASE("validate command runs the oracle suite") {
  const ExperimentConfig cfg = ExperimentConfig::from(
      ConfigFile::parse("[domain]\nkind = disk\n[validate]\nh = 0.05\n"),
      false);
  const auto outcome = run_validate(cfg, "");
  REQUIRE(outcome.entries.size() == 3);
  for (const auto& e : outcome.entries) {
    INFO(e.name, " value ", e.value, " expected ", e.expected);
    CHECK(e.pass);
  }
  CHECK(outcome.pass);
}

TEST_CASE("sweep driver: records, trends, files, determinism") {
  const std::string dir = "out_sweep_test";
  std::filesystem::remove_all(dir);
  const ConfigFile raw = ConfigFile::parse(kDiskSweepCfg);
  ExperimentConfig cfg = ExperimentConfig::from(raw, true);
  const SweepResult res = run_sweep(cfg, dir);

  REQUIRE(res.records.size() == 3);
  CHECK(res.row_errors.empty());
  // eigenvalues decrease toward lambda0 as eps shrinks
  CHECK(res.records[0].lambda_eps >= res.records[1].lambda_eps);
  CHECK(res.records[1].lambda_eps >= res.records[2].lambda_eps);
  for (const auto& r : res.records) {
    CHECK(r.lambda_eps >= res.lambda0);
    CHECK(r.cap > 0.0);
    CHECK(r.h1_diff_full > 0.0);
    CHECK(r.h1_diff_omega > 0.0);
    CHECK(r.h1_diff_full >= r.h1_diff_omega);
    CHECK(r.mass_frac >= 0.0);
    CHECK(r.mass_frac <= 1.0 + 1e-12);
    // derived columns recompute from the primitives
    CHECK(r.shift_over_cap == doctest::Approx(r.lambda_shift / r.cap)
                                  .epsilon(1e-12));
    CHECK(r.cap_over_eps == doctest::Approx(r.cap / r.eps).epsilon(1e-12));
    // capacity dominates the covered-cell bound
    CHECK(r.cap_over_eps >= r.cap_lower_bound - 1e-12);
  }
  // the disk profile is flat, so the argmin set is the whole boundary
  CHECK(res.argmin_whole_boundary);
  CHECK(res.records.back().dist_argmin < 0.2);
  CHECK(res.records.back().mass_frac == doctest::Approx(1.0).epsilon(1e-9));

  REQUIRE(std::filesystem::exists(dir + "/sweep.csv"));
  REQUIRE(std::filesystem::exists(dir + "/profile.csv"));
  REQUIRE(std::filesystem::exists(dir + "/summary.json"));
  REQUIRE(std::filesystem::exists(dir + "/trace_000.csv"));
  REQUIRE(std::filesystem::exists(dir + "/obstacle_000.json"));

  const std::string csv = slurp(dir + "/sweep.csv");
  CHECK(csv.rfind("eps,", 0) == 0);
  // one header plus one row per eps
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  // reruns are byte-identical
  const std::string dir2 = "out_sweep_test2";
  std::filesystem::remove_all(dir2);
  run_sweep(cfg, dir2);
  CHECK(slurp(dir2 + "/sweep.csv") == csv);
  CHECK(slurp(dir2 + "/summary.json") == slurp(dir + "/summary.json"));
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("concentration report tracks trends") {
  std::vector<SweepRecord> recs(3);
  recs[0].dist_argmin = 0.3;
  recs[1].dist_argmin = 0.2;
  recs[2].dist_argmin = 0.1;
  recs[0].mass_frac = 0.5;
  recs[1].mass_frac = 0.8;
  recs[2].mass_frac = 0.95;
  const auto rep = concentration_report(recs);
  CHECK(rep.dist_decreasing);
  CHECK(rep.final_mass_frac == doctest::Approx(0.95));
  CHECK_THROWS_AS(concentration_report({}), Error);
}

TEST_CASE("checks evaluate against the oracle targets") {
  const std::string cfg_text = std::string(kDiskSweepCfg) +
                               "[check]\n"
                               "slope_rtol = 0.5\n"
                               "cap_rtol = 0.5\n"
                               "stability_lo = 0.5\n"
                               "stability_hi = 1.5\n";
  ExperimentConfig cfg =
      ExperimentConfig::from(ConfigFile::parse(cfg_text), true);
  const SweepResult res = run_sweep(cfg, "");
  REQUIRE(res.check_outcomes.size() == 3);
  for (const auto& c : res.check_outcomes) {
    INFO(c.name, " = ", c.value, " (", c.detail, ")");
    CHECK(c.pass);
  }
}

TEST_CASE("solve and capacity commands write their artifacts") {
  const std::string dir = "out_cmd_test";
  std::filesystem::remove_all(dir);
  const char* text = R"(
[domain]
kind = disk
radius = 1.0
[mesh]
h = 0.05
[obstacle]
eps = 0.004
anchor_s = 0.0
width = 0.2
)";
  const ExperimentConfig cfg =
      ExperimentConfig::from(ConfigFile::parse(text), false);
  const auto solved = run_solve(cfg, dir);
  CHECK(solved.lambda0 > 0.0);
  CHECK(std::filesystem::exists(dir + "/profile.csv"));
  CHECK(std::filesystem::exists(dir + "/summary.json"));

  const auto capd = run_capacity(cfg, dir);
  CHECK(capd.cap > 0.0);
  CHECK(capd.lambda_eps > capd.lambda0);
  CHECK(capd.stability > 0.0);
  CHECK(std::filesystem::exists(dir + "/obstacle.json"));
  std::filesystem::remove_all(dir);
}
