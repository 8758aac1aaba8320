#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace magsplit::harness {

inline constexpr const char* kCsvHeader = "scheme,h,error,seconds,transforms,norm_drift";

void write_csv(std::ostream& out, const std::vector<RunRecord>& rows);
nlohmann::json record_json(const RunRecord& row);
nlohmann::json sweep_json(const ExperimentConfig& cfg, const SweepResult& result);

/// CSV to `csv_path` and the JSON mirror to the same stem with .json.
void write_sweep_outputs(const std::string& csv_path, const ExperimentConfig& cfg, const SweepResult& result);
std::string json_mirror_path(const std::string& csv_path);

}  // namespace magsplit::harness
