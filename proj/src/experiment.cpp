#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace magsplit::harness {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

GridPtr<double> build_grid(const ExperimentConfig& cfg) {
  return std::make_shared<const Grid1D<double>>(cfg.a, cfg.b, cfg.n_points);
}

StaticPotential<double> build_static_potential(const ExperimentConfig& cfg) {
  if (cfg.potential == "double_well_1") return double_well_1<double>();
  if (cfg.potential == "double_well_2") return double_well_2<double>();
  if (cfg.potential == "harmonic") return harmonic_potential<double>(cfg.harmonic_omega2);
  if (cfg.potential == "zero") return zero_potential<double>();
  throw ConfigError("unknown potential '" + cfg.potential + "'");
}

LaserPulse<double> build_pulse(const ExperimentConfig& cfg) {
  if (cfg.pulse == "e1") return lobe_pulse<double>();
  if (cfg.pulse == "e2") return chirped_pulse<double>();
  if (cfg.pulse == "zero") return zero_pulse<double>();
  if (cfg.pulse == "sine") return sine_pulse<double>(cfg.pulse_amplitude, cfg.pulse_omega);
  if (cfg.pulse == "constant") return constant_pulse<double>(cfg.pulse_amplitude);
  throw ConfigError("unknown pulse '" + cfg.pulse + "'");
}

Problem<double> build_problem(const ExperimentConfig& cfg) {
  return Problem<double>::laser(build_grid(cfg), build_static_potential(cfg), build_pulse(cfg));
}

State build_initial_state(const ExperimentConfig& cfg, GridPtr<double> grid, double* boundary_tail) {
  const Index n = grid->size();
  ComplexVector<double> u(n);
  if (cfg.initial_state == "random") {
    // smooth random state: Gaussian-weighted random Fourier coefficients
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexVector<double> coeffs = ComplexVector<double>::Zero(n);
    const Index band = std::max<Index>(1, n / 8);
    for (Index m = 0; m < n; ++m) {
      const Index mode = m < n / 2 ? m : n - m;
      if (mode > band || m == n / 2) continue;
      const double w = std::exp(-4.0 * double(mode * mode) / double(band * band));
      const double re = normal(rng);
      const double im = normal(rng);
      coeffs[m] = w * std::complex<double>(re, im);
    }
    SpectralWorkspace<double> ws(grid);
    ws.inverse(coeffs, u);
  } else {
    const double scale = std::pow(cfg.delta * std::numbers::pi, -0.25);
    for (Index j = 0; j < n; ++j) {
      const double d = grid->nodes()[j] - cfg.x0;
      u[j] = scale * std::exp(-d * d / (2 * cfg.delta));
    }
  }
  if (boundary_tail) *boundary_tail = std::max(std::abs(u[0]), std::abs(u[n - 1]));
  const double norm = l2_norm(*grid, u);
  if (!(norm > 0)) throw ConfigError("initial state vanishes on the grid");
  u /= norm;
  return State(std::move(grid), std::move(u));
}

State build_initial_state(const ExperimentConfig& cfg) { return build_initial_state(cfg, build_grid(cfg)); }

SchemeSpec<double> make_scheme_spec(const ExperimentConfig& cfg, SchemeId id) {
  SchemeSpec<double> spec;
  spec.id = id;
  spec.epsilon = cfg.epsilon;
  spec.quad = gauss_legendre<double>(cfg.quad_knots);
  spec.krylov.max_iters = cfg.lanczos_iters;
  spec.krylov.tol = cfg.lanczos_tol;
  spec.krylov.fixed_iterations = cfg.lanczos_fixed;
  spec.fuse_boundary = cfg.fuse_boundary;
  spec.keep_h3_term = cfg.keep_h3_term;
  return spec;
}

std::uint64_t step_count(double T, double h) {
  if (!(h > 0)) throw std::invalid_argument("step_count: h must be positive");
  if (T <= 0) return 0;
  return static_cast<std::uint64_t>(std::ceil(T / h - 1e-10));
}

PropagationResult propagate(const ExperimentConfig& cfg, const Problem<double>& problem, const State& u0, SchemeId id,
                            double h, const PropagateOptions& options) {
  SchemeSpec<double> spec = make_scheme_spec(cfg, id);
  if (options.lanczos_tol > 0) spec.krylov.tol = options.lanczos_tol;
  Propagator<double> prop(problem, spec);
  ComplexVector<double> u = u0.values();
  const double norm0 = u0.norm();
  const Grid1D<double>& grid = *problem.grid;

  RunRecord rec;
  rec.scheme = std::string(to_string(id));
  rec.h = h;
  rec.steps = step_count(cfg.T, h);

  std::vector<double> breaks;
  if (cfg.align_breakpoints && problem.potential.breakpoints && cfg.T > 0)
    breaks = problem.potential.breakpoints(0, cfg.T);

  auto sample_energy = [&](double t) {
    prop.finish(u);
    const State s(problem.grid, u);
    const Observables o = observables(prop.workspace(), s, problem.potential, t, cfg.epsilon);
    rec.energy_trace.push_back({t, o.norm, o.energy});
  };
  auto drift = [&] { rec.norm_drift = std::max(rec.norm_drift, std::abs(l2_norm(grid, u) - norm0)); };
  auto take_step = [&](double t0, double len) {
    prop.step(u, t0, len);
    if (spec.id == SchemeId::MZ4 && options.fail_on_krylov && prop.krylov_failures() > 0)
      throw KrylovFailure("Lanczos did not reach tol " + sci(spec.krylov.tol) + " within " +
                          std::to_string(spec.krylov.max_iters) + " iterations at t = " + sci(t0));
  };

  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t transforms_before = prop.transforms();
  if (options.record_energy) sample_energy(0);
  double t = 0;
  std::size_t next_break = 0;
  for (std::uint64_t k = 0; k < rec.steps; ++k) {
    const double t1 = k + 1 == rec.steps ? cfg.T : std::min(cfg.T, double(k + 1) * h);
    double a = t;
    while (next_break < breaks.size() && breaks[next_break] <= a) ++next_break;
    while (next_break < breaks.size() && breaks[next_break] < t1) {
      take_step(a, breaks[next_break] - a);
      a = breaks[next_break++];
    }
    take_step(a, t1 - a);
    t = t1;
    if ((k + 1) % 100 == 0) drift();
    if (options.record_energy && (k + 1) % options.energy_every == 0) sample_energy(t);
  }
  prop.finish(u);
  drift();
  if (options.record_energy && rec.steps % options.energy_every != 0) sample_energy(t);
  rec.transforms = prop.transforms() - transforms_before;
  if (cfg.timing) rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rec.krylov_matvecs = prop.krylov_matvecs();
  return {State(problem.grid, std::move(u)), std::move(rec)};
}

PropagationResult propagate(const ExperimentConfig& cfg, SchemeId id, double h, const PropagateOptions& options) {
  const Problem<double> problem = build_problem(cfg);
  const State u0 = build_initial_state(cfg, problem.grid);
  return propagate(cfg, problem, u0, id, h, options);
}

Reference make_reference(const ExperimentConfig& cfg, const Problem<double>& problem, const State& u0) {
  const double h_ref = cfg.effective_h_ref();
  Reference ref{u0, h_ref, 0, {}, {}};
  if (cfg.T <= 0) return ref;
  if (!(h_ref > 0)) throw ConfigError("reference needs h_ref or at least one h value");
  PropagateOptions opts;
  opts.lanczos_tol = cfg.reference_lanczos_tol;
  opts.fail_on_krylov = false;
  PropagationResult main = propagate(cfg, problem, u0, cfg.reference_id(), h_ref, opts);
  PropagationResult check = propagate(cfg, problem, u0, cfg.check_id(), h_ref, opts);
  ref.cross_error = l2_distance(main.state, check.state);
  ref.state = std::move(main.state);
  ref.reference_run = std::move(main.record);
  ref.check_run = std::move(check.record);
  if (!(ref.cross_error <= cfg.cross_tol))
    throw CrossValidationError(cfg.reference_scheme + " and " + cfg.check_scheme + " references at h_ref = " +
                               sci(h_ref) + " differ by " + sci(ref.cross_error) + " (limit " + sci(cfg.cross_tol) +
                               ")");
  return ref;
}

Reference make_reference(const ExperimentConfig& cfg) {
  const Problem<double> problem = build_problem(cfg);
  return make_reference(cfg, problem, build_initial_state(cfg, problem.grid));
}

SlopeFit fit_slope(const std::vector<double>& hs, const std::vector<double>& errors, double floor) {
  if (hs.size() != errors.size()) throw std::invalid_argument("fit_slope: length mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (errors[i] > floor && hs[i] > 0) pts.emplace_back(hs[i], errors[i]);
  std::sort(pts.begin(), pts.end());
  const std::size_t keep = (2 * pts.size() + 2) / 3;
  pts.resize(keep);
  SlopeFit fit;
  fit.points = pts.size();
  if (pts.size() < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double mx = 0, my = 0;
  for (auto [h, e] : pts) {
    mx += std::log(h);
    my += std::log(e);
  }
  mx /= double(pts.size());
  my /= double(pts.size());
  double sxy = 0, sxx = 0;
  for (auto [h, e] : pts) {
    sxy += (std::log(h) - mx) * (std::log(e) - my);
    sxx += (std::log(h) - mx) * (std::log(h) - mx);
  }
  fit.slope = sxy / sxx;
  int inversions = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].second < pts[i - 1].second) ++inversions;
  fit.monotone = inversions <= 1;
  return fit;
}

SweepResult sweep(const ExperimentConfig& cfg, const ProgressFn& progress) {
  if (cfg.h_values.size() < 3) throw ConfigError("sweep needs at least 3 h values");
  const Problem<double> problem = build_problem(cfg);
  double tail = 0;
  const State u0 = build_initial_state(cfg, problem.grid, &tail);
  SweepResult result{make_reference(cfg, problem, u0), {}, {}};

  struct Job {
    SchemeId id;
    double h;
  };
  std::vector<Job> jobs;
  for (SchemeId id : cfg.scheme_ids())
    for (double h : cfg.h_values) jobs.push_back({id, h});
  result.rows.resize(jobs.size());

  unsigned workers = cfg.workers > 0 ? unsigned(cfg.workers) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, unsigned(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        PropagationResult run = propagate(cfg, problem, u0, jobs[i].id, jobs[i].h);
        run.record.error = l2_distance(run.state, result.reference.state);
        result.rows[i] = std::move(run.record);
        if (progress) {
          std::lock_guard<std::mutex> lock(report_mutex);
          progress(result.rows[i]);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(report_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  for (SchemeId id : cfg.scheme_ids()) {
    std::vector<double> hs, errs;
    for (const auto& row : result.rows)
      if (row.scheme == to_string(id)) {
        hs.push_back(row.h);
        errs.push_back(row.error);
      }
    result.slopes[std::string(to_string(id))] = fit_slope(hs, errs, cfg.slope_floor);
  }
  return result;
}

}  // namespace magsplit::harness
