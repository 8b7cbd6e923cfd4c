#pragma once

#include <string>

#include <json.hpp>

#include "hexmpo/config.hpp"

namespace hexmpo {

struct RunOutcome {
  nlohmann::json record;
  int failures = 0;
  std::string record_path;
};

/// Executes the config sweep with a bounded worker pool, writes the JSON
/// result record (plus CSV tables) under config.out_dir, and returns the
/// outcome. Per-point engine errors are recorded and the sweep continues.
RunOutcome run_experiment(const ExperimentConfig& config);

}  // namespace hexmpo
