#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace magsplit::harness {

using nlohmann::json;

double ExperimentConfig::effective_h_ref() const {
  if (h_ref > 0) return h_ref;
  if (h_values.empty()) return 0;
  return *std::min_element(h_values.begin(), h_values.end()) / 20;
}

std::vector<SchemeId> ExperimentConfig::scheme_ids() const {
  std::vector<SchemeId> ids;
  for (const auto& s : schemes) ids.push_back(parse_scheme_id(s));
  return ids;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (problem != "example1" && problem != "example2" && problem != "custom")
    fail("problem must be example1, example2 or custom");
  if (!(b > a)) fail("domain must satisfy a < b");
  if (n_points < 4 || n_points % 2 != 0) fail("n_points must be even and >= 4");
  if (!(epsilon > 0 && epsilon <= 1)) fail("epsilon must lie in (0, 1]");
  if (!(T >= 0) || !std::isfinite(T)) fail("T must be finite and >= 0");
  static const std::set<std::string> potentials = {"double_well_1", "double_well_2", "harmonic", "zero"};
  static const std::set<std::string> pulses = {"e1", "e2", "zero", "sine", "constant"};
  if (!potentials.count(potential)) fail("unknown potential '" + potential + "'");
  if (!pulses.count(pulse)) fail("unknown pulse '" + pulse + "'");
  if (initial_state != "gaussian" && initial_state != "random") fail("initial_state must be gaussian or random");
  if (!(delta > 0)) fail("delta must be positive");
  if (schemes.empty()) fail("schemes must not be empty");
  try {
    (void)scheme_ids();
    (void)reference_id();
    (void)check_id();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  for (double h : h_values)
    if (!(h > 0) || !std::isfinite(h)) fail("every h must be positive");
  if (quad_knots < 1 || quad_knots > 32) fail("quad_knots must lie in [1, 32]");
  if (lanczos_iters < 1) fail("lanczos_iters must be >= 1");
  if (!(lanczos_tol > 0) || !(reference_lanczos_tol > 0)) fail("Lanczos tolerances must be positive");
  if (!(cross_tol > 0)) fail("cross_tol must be positive");
  if (!h_values.empty() && h_ref > 0) {
    const double hmin = *std::min_element(h_values.begin(), h_values.end());
    if (h_ref > hmin / 20 * (1 + 1e-12)) fail("h_ref must not exceed min(h) / 20");
  }
  if (h_ref < 0) fail("h_ref must be >= 0");
  if (workers < 0) fail("workers must be >= 0");
}

std::vector<double> geometric_sweep(double h_max, double h_min, int count) {
  if (count < 2 || !(h_max > h_min) || !(h_min > 0))
    throw ConfigError("h_sweep needs h_max > h_min > 0 and count >= 2");
  std::vector<double> hs(count);
  const double ratio = std::pow(h_min / h_max, 1.0 / (count - 1));
  for (int i = 0; i < count; ++i) hs[i] = h_max * std::pow(ratio, i);
  hs.front() = h_max;
  hs.back() = h_min;
  return hs;
}

ExperimentConfig preset(const std::string& problem) {
  ExperimentConfig c;
  c.problem = problem;
  if (problem == "custom") return c;
  if (problem == "example1") {
    // at h = 1/40 the inner MZ4 exponent reaches ~36 near the domain edge
    c.lanczos_iters = 32;
    return c;
  }
  if (problem == "example2") {
    c.a = -5;
    c.b = 5;
    c.n_points = 1024;
    c.epsilon = 1e-2;
    c.T = 0.5;
    c.potential = "double_well_2";
    c.pulse = "e2";
    c.delta = 1e-2;
    c.quad_knots = 11;
    c.h_values = geometric_sweep(1.0 / 400, 1.0 / 3200, 4);
    return c;
  }
  throw ConfigError("problem must be example1, example2 or custom");
}

void apply_full(ExperimentConfig& cfg) {
  if (cfg.problem == "example1") {
    cfg.n_points = 150;
    cfg.T = 4;
  } else if (cfg.problem == "example2") {
    cfg.n_points = 2000;
    cfg.T = 2.5;
  }
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "problem", "domain", "n_points", "epsilon", "T", "potential", "harmonic_omega2", "pulse",
      "pulse_amplitude", "pulse_omega", "initial_state", "x0", "delta", "seed", "schemes", "scheme", "h",
      "h_sweep", "quad_knots", "lanczos_iters", "lanczos_tol", "lanczos_fixed", "keep_h3_term",
      "fuse_boundary", "align_breakpoints", "reference_scheme", "check_scheme", "h_ref",
      "reference_lanczos_tol", "cross_tol", "output", "timing", "workers", "slope_floor"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

  std::string problem = "example1";
  take(j, "problem", problem);
  ExperimentConfig c = preset(problem);
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
      throw ConfigError("domain must be [a, b]");
    c.a = d[0].get<double>();
    c.b = d[1].get<double>();
  }
  take(j, "n_points", c.n_points);
  take(j, "epsilon", c.epsilon);
  take(j, "T", c.T);
  take(j, "potential", c.potential);
  take(j, "harmonic_omega2", c.harmonic_omega2);
  take(j, "pulse", c.pulse);
  take(j, "pulse_amplitude", c.pulse_amplitude);
  take(j, "pulse_omega", c.pulse_omega);
  take(j, "initial_state", c.initial_state);
  take(j, "x0", c.x0);
  take(j, "delta", c.delta);
  take(j, "seed", c.seed);
  if (j.contains("scheme") && j.contains("schemes")) throw ConfigError("give either scheme or schemes");
  if (j.contains("scheme")) {
    std::string s;
    take(j, "scheme", s);
    c.schemes = {s};
  }
  take(j, "schemes", c.schemes);
  if (j.contains("h") && j.contains("h_sweep")) throw ConfigError("give either h or h_sweep");
  if (j.contains("h")) {
    if (j.at("h").is_number())
      c.h_values = {j.at("h").get<double>()};
    else
      take(j, "h", c.h_values);
  }
  if (j.contains("h_sweep")) {
    const auto& s = j.at("h_sweep");
    double hmax = 0, hmin = 0;
    int count = 0;
    take(s, "h_max", hmax);
    take(s, "h_min", hmin);
    take(s, "count", count);
    c.h_values = geometric_sweep(hmax, hmin, count);
  }
  take(j, "quad_knots", c.quad_knots);
  take(j, "lanczos_iters", c.lanczos_iters);
  take(j, "lanczos_tol", c.lanczos_tol);
  take(j, "lanczos_fixed", c.lanczos_fixed);
  take(j, "keep_h3_term", c.keep_h3_term);
  take(j, "fuse_boundary", c.fuse_boundary);
  take(j, "align_breakpoints", c.align_breakpoints);
  take(j, "reference_scheme", c.reference_scheme);
  take(j, "check_scheme", c.check_scheme);
  take(j, "h_ref", c.h_ref);
  take(j, "reference_lanczos_tol", c.reference_lanczos_tol);
  take(j, "cross_tol", c.cross_tol);
  take(j, "output", c.output);
  take(j, "timing", c.timing);
  take(j, "workers", c.workers);
  take(j, "slope_floor", c.slope_floor);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

json to_json(const ExperimentConfig& c) {
  return json{{"problem", c.problem},
              {"domain", {c.a, c.b}},
              {"n_points", c.n_points},
              {"epsilon", c.epsilon},
              {"T", c.T},
              {"potential", c.potential},
              {"harmonic_omega2", c.harmonic_omega2},
              {"pulse", c.pulse},
              {"pulse_amplitude", c.pulse_amplitude},
              {"pulse_omega", c.pulse_omega},
              {"initial_state", c.initial_state},
              {"x0", c.x0},
              {"delta", c.delta},
              {"seed", c.seed},
              {"schemes", c.schemes},
              {"h", c.h_values},
              {"quad_knots", c.quad_knots},
              {"lanczos_iters", c.lanczos_iters},
              {"lanczos_tol", c.lanczos_tol},
              {"lanczos_fixed", c.lanczos_fixed},
              {"keep_h3_term", c.keep_h3_term},
              {"fuse_boundary", c.fuse_boundary},
              {"align_breakpoints", c.align_breakpoints},
              {"reference_scheme", c.reference_scheme},
              {"check_scheme", c.check_scheme},
              {"h_ref", c.effective_h_ref()},
              {"reference_lanczos_tol", c.reference_lanczos_tol},
              {"cross_tol", c.cross_tol},
              {"output", c.output},
              {"timing", c.timing},
              {"workers", c.workers},
              {"slope_floor", c.slope_floor}};
}

}  // namespace magsplit::harness
