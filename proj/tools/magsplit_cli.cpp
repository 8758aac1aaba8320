// magsplit_cli: propagate, sweep and verify for the 1-D spectral TDSE schemes.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiment.hpp"
#include "report.hpp"
#include "verify.hpp"

namespace mh = magsplit::harness;

namespace {

constexpr int kConfigError = 2;
constexpr int kCrossValidationError = 3;

mh::ExperimentConfig load(const std::string& path, bool full) {
  mh::ExperimentConfig cfg = mh::load_config(path);
  if (full) mh::apply_full(cfg);
  cfg.validate();
  return cfg;
}

void warn_tail(const mh::ExperimentConfig& cfg) {
  double tail = 0;
  (void)mh::build_initial_state(cfg, mh::build_grid(cfg), &tail);
  if (tail > 1e-12)
    std::fprintf(stderr, "warning: initial state is %.2e at the domain boundary (wavepacket support not covered)\n",
                 tail);
}

int run_propagate(const std::string& config, const std::string& scheme, double h, bool full, const std::string& out,
                  bool energy) {
  mh::ExperimentConfig cfg = load(config, full);
  warn_tail(cfg);
  const magsplit::SchemeId id = magsplit::parse_scheme_id(scheme.empty() ? cfg.schemes.front() : scheme);
  if (h <= 0) {
    if (cfg.h_values.empty()) throw mh::ConfigError("no step size: pass --h or set h in the config");
    h = cfg.h_values.back();
  }
  const auto problem = mh::build_problem(cfg);
  const auto u0 = mh::build_initial_state(cfg, problem.grid);
  mh::PropagateOptions opts;
  opts.record_energy = energy;
  auto run = mh::propagate(cfg, problem, u0, id, h, opts);
  const auto ref = mh::make_reference(cfg, problem, u0);
  run.record.error = magsplit::l2_distance(run.state, ref.state);
  std::vector<mh::RunRecord> rows{run.record};
  const std::string path = out.empty() ? cfg.output : out;
  if (path.empty()) {
    mh::write_csv(std::cout, rows);
  } else {
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot write '" + path + "'");
    mh::write_csv(csv, rows);
    std::ofstream js(mh::json_mirror_path(path));
    js << nlohmann::json{{"config", mh::to_json(cfg)},
                         {"reference", {{"h_ref", ref.h_ref}, {"cross_error", ref.cross_error}}},
                         {"run", mh::record_json(run.record)}}
              .dump(2)
       << '\n';
    std::printf("%s: h=%g error=%.3e transforms=%llu -> %s\n", run.record.scheme.c_str(), h, run.record.error,
                static_cast<unsigned long long>(run.record.transforms), path.c_str());
  }
  return 0;
}

int run_sweep(const std::string& config, bool full, const std::string& out) {
  mh::ExperimentConfig cfg = load(config, full);
  if (!out.empty()) cfg.output = out;
  warn_tail(cfg);
  const auto result = mh::sweep(cfg, [](const mh::RunRecord& r) {
    std::fprintf(stderr, "  %-8s h=%-12.6g error=%.3e\n", r.scheme.c_str(), r.h, r.error);
  });
  std::fprintf(stderr, "reference %s vs %s at h_ref=%g: %.3e\n", cfg.reference_scheme.c_str(),
               cfg.check_scheme.c_str(), result.reference.h_ref, result.reference.cross_error);
  if (cfg.output.empty()) {
    mh::write_csv(std::cout, result.rows);
  } else {
    mh::write_sweep_outputs(cfg.output, cfg, result);
    std::printf("wrote %s and %s\n", cfg.output.c_str(), mh::json_mirror_path(cfg.output).c_str());
  }
  for (const auto& [scheme, fit] : result.slopes)
    std::fprintf(stderr, "slope %-8s %.3f (%zu points)\n", scheme.c_str(), fit.slope, fit.points);
  return 0;
}

int run_verify() {
  const auto checks = mh::run_verification(std::cout);
  std::cout << "commutator sizes (spectral norm on |kappa| <= 1/eps)\n";
  std::printf("%8s %14s %14s %14s %12s\n", "eps", "|[Y,X]|", "|[[Y,X],X]|", "|[[Y,X],Y]|", "eps*|[[Y,X],X]|");
  for (const auto& row : mh::commutator_size_table({1.0, 0.1, 0.02}))
    std::printf("%8.3g %14.4e %14.4e %14.4e %12.4e\n", row.epsilon, row.first, row.second, row.mixed,
                row.epsilon * row.second);
  int failed = 0;
  for (const auto& c : checks) failed += c.passed ? 0 : 1;
  std::cout << (failed == 0 ? "all checks passed\n" : std::to_string(failed) + " check(s) failed\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral split-step propagators for the 1-D Schroedinger equation with laser potentials"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);

  std::string config, scheme, out;
  double h = 0;
  bool full = false, energy = false;

  auto* prop = app.add_subcommand("propagate", "propagate one scheme to T and report its error against the reference");
  prop->add_option("--config", config, "flat JSON experiment config")->required()->check(CLI::ExistingFile);
  prop->add_option("--scheme", scheme, "MZ2, MZ4, MaStBM, MaStBMc, MaStCC or MaCC");
  prop->add_option("--h", h, "time step (default: smallest h in the config)");
  prop->add_flag("--full", full, "full-size grid and final time for example1/example2");
  prop->add_option("--out", out, "CSV output path (JSON mirror written alongside)");
  prop->add_flag("--energy", energy, "record an energy trace every 100 steps in the JSON mirror");

  auto* sw = app.add_subcommand("sweep", "h sweep for every configured scheme with fitted order slopes");
  sw->add_option("--config", config, "flat JSON experiment config")->required()->check(CLI::ExistingFile);
  sw->add_flag("--full", full, "full-size grid and final time for example1/example2");
  sw->add_option("--out", out, "CSV output path (overrides the config)");

  app.add_subcommand("verify", "operator identities, oracle checks and commutator-size diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (prop->parsed()) return run_propagate(config, scheme, h, full, out, energy);
    if (sw->parsed()) return run_sweep(config, full, out);
    return run_verify();
  } catch (const mh::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const mh::CrossValidationError& e) {
    std::fprintf(stderr, "reference rejected: %s\n", e.what());
    return kCrossValidationError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
