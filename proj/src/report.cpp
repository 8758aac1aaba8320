#include "report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace magsplit::harness {

namespace {

// shortest text that reads back to the same double
std::string num(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows)
    out << r.scheme << ',' << num(r.h) << ',' << num(r.error) << ',' << num(r.seconds) << ',' << r.transforms << ','
        << num(r.norm_drift) << '\n';
}

nlohmann::json record_json(const RunRecord& r) {
  nlohmann::json j{{"scheme", r.scheme},         {"h", r.h},
                   {"error", r.error},           {"seconds", r.seconds},
                   {"transforms", r.transforms}, {"norm_drift", r.norm_drift},
                   {"steps", r.steps},           {"krylov_matvecs", r.krylov_matvecs}};
  if (!r.energy_trace.empty()) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& s : r.energy_trace) trace.push_back({{"t", s.t}, {"norm", s.norm}, {"energy", s.energy}});
    j["energy_trace"] = std::move(trace);
  }
  return j;
}

nlohmann::json sweep_json(const ExperimentConfig& cfg, const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) rows.push_back(record_json(r));
  nlohmann::json slopes = nlohmann::json::object();
  for (const auto& [scheme, fit] : result.slopes)
    slopes[scheme] = {{"slope", number_or_null(fit.slope)}, {"points", fit.points}, {"monotone", fit.monotone}};
  return {{"config", to_json(cfg)},
          {"reference",
           {{"scheme", cfg.reference_scheme},
            {"check_scheme", cfg.check_scheme},
            {"h_ref", result.reference.h_ref},
            {"cross_error", result.reference.cross_error}}},
          {"rows", std::move(rows)},
          {"slopes", std::move(slopes)}};
}

std::string json_mirror_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

void write_sweep_outputs(const std::string& csv_path, const ExperimentConfig& cfg, const SweepResult& result) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write '" + csv_path + "'");
  write_csv(csv, result.rows);
  std::ofstream js(json_mirror_path(csv_path));
  if (!js) throw std::runtime_error("cannot write '" + json_mirror_path(csv_path) + "'");
  js << sweep_json(cfg, result).dump(2) << '\n';
}

}  // namespace magsplit::harness
