#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexmpo/circuit.hpp"
#include "hexmpo/pauli.hpp"

namespace hexmpo {

/// Angle strings accept radians ("0.7") or multiples of pi ("0.25pi",
/// "-0.5pi"); numbers are radians.
double parse_angle(const nlohmann::json& j);
std::string format_angle(double radians);

/// Sweep description for every engine; stored canonically in radians.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string engine = "heisenberg";  // heisenberg|mps|bptns|exact|clifford
  std::string experiment = "evolve";  // evolve|echo|double_slit|extrapolate
  std::string geometry = "eagle127";
  double theta_j = -1.5707963267948966;
  std::vector<double> theta_h;
  std::string variant = "standard";
  std::optional<std::pair<int, int>> flux_bond;
  std::string observable = "Z:62";
  std::vector<int> depths;
  std::vector<int> chi;
  bool lightcone = true;
  int min_sweeps = 2;
  int max_sweeps = 10;
  int bp_iters = 15;
  std::vector<int> otoc_depths;
  double echo_theta = 0.0;  // forward angle for echo-type runs
  uint64_t seed = 0;
  int workers = 1;
  std::string out_dir = ".";

  void validate() const;  // throws std::invalid_argument with a field path
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  std::string hash() const;
};

/// Observable descriptors: "Z:62" / "X:5" / "Y:7" for single-site Paulis,
/// "stab:SITE:DEPTH" for the pi/2 Clifford stabilizer string.
PauliString parse_observable(const std::string& text, const Lattice& lat);

struct Preset {
  std::string name;
  std::string description;
  std::string runtime_class;  // seconds | minutes | hours
  ExperimentConfig config;
};

std::vector<Preset> presets();

}  // namespace hexmpo
