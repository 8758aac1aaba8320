#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "observables.hpp"

namespace magsplit::harness {

class CrossValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when Lanczos misses its tolerance inside a propagation run.
class KrylovFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using State = WaveFunction<double>;

struct RunRecord {
  std::string scheme;
  double h = 0;
  double error = 0;  // L2 distance to the reference; 0 when none was given
  double seconds = 0;
  std::uint64_t transforms = 0;
  double norm_drift = 0;  // max |‖u‖ - ‖u0‖| over samples taken every 100 steps
  std::uint64_t steps = 0;
  std::uint64_t krylov_matvecs = 0;
  std::vector<EnergySample> energy_trace;
};

struct PropagationResult {
  State state;
  RunRecord record;
};

struct PropagateOptions {
  bool record_energy = false;
  std::uint64_t energy_every = 100;
  /// Overrides the config's Lanczos tolerance when positive.
  double lanczos_tol = 0;
  bool fail_on_krylov = true;
};

Problem<double> build_problem(const ExperimentConfig& cfg);
StaticPotential<double> build_static_potential(const ExperimentConfig& cfg);
LaserPulse<double> build_pulse(const ExperimentConfig& cfg);
GridPtr<double> build_grid(const ExperimentConfig& cfg);

/// Gaussian packet (delta pi)^(-1/4) exp(-(x-x0)^2 / (2 delta)), or a seeded
/// band-limited random state, renormalised to unit discrete L2 norm.
/// `boundary_tail` receives max |u0| over the two end nodes before renormalising.
State build_initial_state(const ExperimentConfig& cfg, GridPtr<double> grid, double* boundary_tail = nullptr);
State build_initial_state(const ExperimentConfig& cfg);

SchemeSpec<double> make_scheme_spec(const ExperimentConfig& cfg, SchemeId id);

/// ceil(T/h) steps, the last one shortened to land on T.
std::uint64_t step_count(double T, double h);

PropagationResult propagate(const ExperimentConfig& cfg, const Problem<double>& problem, const State& u0, SchemeId id,
                            double h, const PropagateOptions& options = {});
PropagationResult propagate(const ExperimentConfig& cfg, SchemeId id, double h, const PropagateOptions& options = {});

struct Reference {
  State state;
  double h_ref = 0;
  double cross_error = 0;
  RunRecord reference_run;
  RunRecord check_run;
};

/// Reference scheme at h_ref, cross-checked against the check scheme.
/// Throws CrossValidationError when they disagree by more than cross_tol.
Reference make_reference(const ExperimentConfig& cfg, const Problem<double>& problem, const State& u0);
Reference make_reference(const ExperimentConfig& cfg);

struct SlopeFit {
  double slope = 0;  // NaN when fewer than two usable points
  std::size_t points = 0;
  bool monotone = true;  // at most one inversion over the fitted tail
};

/// Least squares slope of log(error) vs log(h) over the smallest ceil(2m/3)
/// of the m points whose error exceeds `floor`.
SlopeFit fit_slope(const std::vector<double>& hs, const std::vector<double>& errors, double floor = 1e-11);

struct SweepResult {
  Reference reference;
  std::vector<RunRecord> rows;  // scheme-major, h in config order
  std::map<std::string, SlopeFit> slopes;
};

using ProgressFn = std::function<void(const RunRecord&)>;

SweepResult sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {});

}  // namespace magsplit::harness
