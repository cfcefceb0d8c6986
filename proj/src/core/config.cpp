#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eigenobs {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(lineno, "", "unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError(lineno, "", "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "", "expected 'key = value', got '" + line + "'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "", "empty key");
    cfg.entries_[section + "." + key] = {value, lineno};
  }
  return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return entries_.count(lower(section) + "." + lower(key)) > 0;
}

int ConfigFile::line_of(const std::string& section,
                        const std::string& key) const {
  const auto it = entries_.find(lower(section) + "." + lower(key));
  return it == entries_.end() ? 0 : it->second.line;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  const auto it = entries_.find(lower(section) + "." + lower(key));
  return it == entries_.end() ? fallback : it->second.value;
}

std::string ConfigFile::require_string(const std::string& section,
                                       const std::string& key) const {
  const auto it = entries_.find(lower(section) + "." + lower(key));
  if (it == entries_.end())
    throw ConfigError(0, section + "." + key, "missing required field");
  return it->second.value;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return require_double(section, key);
}

double ConfigFile::require_double(const std::string& section,
                                  const std::string& key) const {
  const std::string raw = require_string(section, key);
  try {
    size_t used = 0;
    const double v = std::stod(raw, &used);
    if (trim(raw.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (...) {
  }
  throw ConfigError(line_of(section, key), section + "." + key,
                    "expected a number, got '" + raw + "'");
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
  if (!has(section, key)) return fallback;
  const double v = require_double(section, key);
  if (v != std::floor(v))
    throw ConfigError(line_of(section, key), section + "." + key,
                      "expected an integer");
  return static_cast<int>(v);
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = lower(require_string(section, key));
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(line_of(section, key), section + "." + key,
                    "expected a boolean");
}

std::vector<double> ConfigFile::require_double_list(
    const std::string& section, const std::string& key) const {
  std::string raw = require_string(section, key);
  std::replace(raw.begin(), raw.end(), ',', ' ');
  std::istringstream in(raw);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size() && std::isfinite(v)) {
        out.push_back(v);
        continue;
      }
    } catch (...) {
    }
    throw ConfigError(line_of(section, key), section + "." + key,
                      "expected numbers, got '" + tok + "'");
  }
  if (out.empty())
    throw ConfigError(line_of(section, key), section + "." + key,
                      "empty list");
  return out;
}

double ExperimentConfig::bump_width_for(double eps) const {
  if (width_fixed) return width;
  const double r = width_scale * std::sqrt(eps);
  return std::clamp(r, width_min, width_max);
}

ExperimentConfig ExperimentConfig::from(const ConfigFile& cfg,
                                        bool needs_sweep) {
  ExperimentConfig out;

  out.domain_kind = cfg.get_string("domain", "kind", "");
  if (out.domain_kind.empty())
    throw ConfigError(0, "domain.kind", "missing required field");
  if (out.domain_kind == "disk") {
    out.domain = Domain::disk(cfg.get_double("domain", "radius", 1.0));
  } else if (out.domain_kind == "ellipse") {
    out.domain = Domain::ellipse(cfg.require_double("domain", "a"),
                                 cfg.require_double("domain", "b"));
  } else if (out.domain_kind == "square") {
    out.domain = Domain::square(cfg.get_double("domain", "side", 1.0));
  } else {
    throw ConfigError(cfg.line_of("domain", "kind"), "domain.kind",
                      "unknown domain kind '" + out.domain_kind + "'");
  }

  out.mesh_h = cfg.get_double("mesh", "h", 0.05);
  if (!(out.mesh_h > 0.0) || !(out.mesh_h < out.domain.inradius()))
    throw ConfigError(cfg.line_of("mesh", "h"), "mesh.h",
                      "mesh size must lie in (0, inradius)");
  out.refine = cfg.get_int("mesh", "refine", 0);
  if (out.refine < 0)
    throw ConfigError(cfg.line_of("mesh", "refine"), "mesh.refine",
                      "refinement count must be nonnegative");

  if (needs_sweep || cfg.has("sweep", "epsilons")) {
    if (!cfg.has("sweep", "epsilons"))
      throw ConfigError(0, "sweep.epsilons", "missing required field");
    out.epsilons = cfg.require_double_list("sweep", "epsilons");
    for (size_t i = 0; i < out.epsilons.size(); ++i) {
      if (!(out.epsilons[i] > 0.0))
        throw ConfigError(cfg.line_of("sweep", "epsilons"), "sweep.epsilons",
                          "entries must be positive");
      if (i > 0 && !(out.epsilons[i] < out.epsilons[i - 1]))
        throw ConfigError(cfg.line_of("sweep", "epsilons"), "sweep.epsilons",
                          "entries must be strictly decreasing");
    }
  }

  out.optimizer = cfg.get_string("sweep", "optimizer", "parametric");
  if (out.optimizer != "parametric" && out.optimizer != "greedy")
    throw ConfigError(cfg.line_of("sweep", "optimizer"), "sweep.optimizer",
                      "expected 'parametric' or 'greedy'");

  const std::string profile = cfg.get_string("obstacle", "profile", "cos2");
  try {
    out.profile = BumpProfile::by_name(profile);
  } catch (const Error&) {
    throw ConfigError(cfg.line_of("obstacle", "profile"), "obstacle.profile",
                      "unknown profile '" + profile + "'");
  }
  out.width_fixed = cfg.has("obstacle", "width");
  out.width = cfg.get_double("obstacle", "width", 0.0);
  out.width_scale = cfg.get_double("obstacle", "width_scale", 2.5);
  out.width_min = cfg.get_double("obstacle", "width_min", 0.0);
  out.width_max = cfg.get_double("obstacle", "width_max", 1e30);
  out.anchor_grid = cfg.get_int("obstacle", "anchor_grid", 16);

  out.eigen_tol = cfg.get_double("solver", "eigen_tol", 1e-9);
  out.search_tol = cfg.get_double("solver", "search_eigen_tol", 1e-7);
  out.bracket_frac = cfg.get_double("solver", "bracket_frac", 1e-4);
  out.greedy.exchange_rounds = cfg.get_int("greedy", "exchange_rounds", 20);
  out.greedy.resolve_every = cfg.get_int("greedy", "resolve_every", 10);
  out.greedy.search_tol = cfg.get_double("greedy", "search_tol", 1e-6);
  out.greedy.final_tol = out.eigen_tol;

  out.delta = cfg.get_double("report", "delta", 0.0);
  out.argmin_flat_frac = cfg.get_double("report", "argmin_flat_frac", 0.10);
  out.argmin_band_frac = cfg.get_double("report", "argmin_band_frac", 0.05);
  out.hausdorff_samples = cfg.get_int("report", "hausdorff_samples", 512);

  out.anchor_s = cfg.get_double("obstacle", "anchor_s", 0.0);
  out.single_eps = cfg.get_double("obstacle", "eps", 0.0);

  out.validate_h = cfg.get_double("validate", "h", 0.02);
  out.validate_rtol = cfg.get_double("validate", "rtol", 0.005);
  out.ratio_lo = cfg.get_double("validate", "ratio_lo", 3.2);
  out.ratio_hi = cfg.get_double("validate", "ratio_hi", 4.8);

  out.outdir = cfg.get_string("output", "dir", "out");

  auto opt = [&](const char* key) -> std::optional<double> {
    if (!cfg.has("check", key)) return std::nullopt;
    return cfg.require_double("check", key);
  };
  out.checks.slope_rtol = opt("slope_rtol");
  out.checks.cap_rtol = opt("cap_rtol");
  out.checks.cap_monotone = cfg.get_bool("check", "cap_monotone", false);
  out.checks.stability_lo = opt("stability_lo");
  out.checks.stability_hi = opt("stability_hi");
  out.checks.l2_over_cap_decreasing =
      cfg.get_bool("check", "l2_over_cap_decreasing", false);
  out.checks.fb_rtol = opt("fb_rtol");
  out.checks.fb_iqr_decreasing =
      cfg.get_bool("check", "fb_iqr_decreasing", false);
  out.checks.anchor_arc_frac = opt("anchor_arc_frac");
  out.checks.mass_frac_min = opt("mass_frac_min");
  out.checks.hausdorff_decreasing =
      cfg.get_bool("check", "hausdorff_decreasing", false);
  out.checks.trend_slack = cfg.get_double("check", "trend_slack", 0.0);

  return out;
}

}  // namespace eigenobs
