#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "magsplit/schemes.hpp"

namespace magsplit::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string problem = "example1";  // example1 | example2 | custom
  double a = -10;
  double b = 10;
  int n_points = 96;
  double epsilon = 1;
  double T = 1;

  std::string potential = "double_well_1";  // double_well_1 | double_well_2 | harmonic | zero
  double harmonic_omega2 = 1;
  std::string pulse = "e1";  // e1 | e2 | zero | sine | constant
  double pulse_amplitude = 1;
  double pulse_omega = 1;

  std::string initial_state = "gaussian";  // gaussian | random
  double x0 = -2.5;
  double delta = 0.2;
  std::uint64_t seed = 0;

  std::vector<std::string> schemes = {"MZ2", "MZ4", "MaStBM", "MaStBMc", "MaStCC", "MaCC"};
  std::vector<double> h_values = {1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320, 1.0 / 640};

  int quad_knots = 3;
  int lanczos_iters = 12;
  double lanczos_tol = 1e-12;
  bool lanczos_fixed = false;
  bool keep_h3_term = true;
  bool fuse_boundary = false;
  bool align_breakpoints = false;

  std::string reference_scheme = "MaCC";
  std::string check_scheme = "MZ4";
  double h_ref = 0;  // 0: min(h) / 20
  double reference_lanczos_tol = 1e-14;
  double cross_tol = 1e-10;

  std::string output;  // CSV path; the JSON mirror goes next to it
  bool timing = true;  // false writes 0 seconds so output is reproducible bit for bit
  int workers = 0;     // 0: hardware concurrency
  double slope_floor = 1e-11;

  double effective_h_ref() const;
  SchemeId reference_id() const { return parse_scheme_id(reference_scheme); }
  SchemeId check_id() const { return parse_scheme_id(check_scheme); }
  std::vector<SchemeId> scheme_ids() const;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Preset for example1 / example2 at desk scale.
ExperimentConfig preset(const std::string& problem);

/// Switches a preset problem to its full-size grid and final time.
void apply_full(ExperimentConfig& cfg);

/// Geometric sequence from h_max down to h_min, both included.
std::vector<double> geometric_sweep(double h_max, double h_min, int count);

/// Preset named by "problem", then every other key overrides it.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace magsplit::harness
