#include "hexmpo/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "hexmpo/clifford.hpp"

namespace hexmpo {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double parse_angle(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
      std::string head = s.substr(0, s.size() - 2);
      if (head.empty() || head == "+") return kPi;
      if (head == "-") return -kPi;
      return std::stod(head) * kPi;
    }
    return std::stod(s);
  }
  throw std::invalid_argument("angle must be a number or '<x>pi' string");
}

std::string format_angle(double radians) {
  double q = radians / kPi;
  double qr = std::round(q * 16) / 16;
  if (std::abs(q - qr) < 1e-12 && qr != 0.0)
    return fmt::format("{}pi", qr);
  return fmt::format("{}", radians);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(fmt::format("config.{}: {}", field, why));
  };
  static const std::vector<std::string> engines{"heisenberg", "mps", "bptns",
                                                "exact", "clifford"};
  if (std::find(engines.begin(), engines.end(), engine) == engines.end())
    fail("engine", fmt::format("unknown engine '{}'", engine));
  static const std::vector<std::string> experiments{"evolve", "echo",
                                                    "double_slit", "extrapolate"};
  if (std::find(experiments.begin(), experiments.end(), experiment) ==
      experiments.end())
    fail("experiment", fmt::format("unknown experiment '{}'", experiment));
  if (theta_h.empty()) fail("theta_h", "sweep grid is empty");
  for (double t : theta_h)
    if (!std::isfinite(t)) fail("theta_h", "non-finite angle");
  if (!std::isfinite(theta_j)) fail("theta_j", "non-finite angle");
  if (engine != "exact" && engine != "clifford") {
    if (chi.empty()) fail("chi", "list is empty");
    for (int c : chi)
      if (c < 1) fail("chi", "bond dimensions must be positive");
  }
  if (depths.empty()) fail("depths", "list is empty");
  for (int d : depths)
    if (d < 0) fail("depths", "negative depth");
  variant_from_string(variant);  // throws on junk
  if (workers < 1) fail("workers", "must be >= 1");
  build_geometry(geometry);  // throws on junk
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["engine"] = engine;
  j["experiment"] = experiment;
  j["geometry"] = geometry;
  j["theta_j"] = theta_j;
  j["theta_h"] = theta_h;
  j["variant"] = variant;
  if (flux_bond) j["flux_bond"] = {flux_bond->first, flux_bond->second};
  j["observable"] = observable;
  j["depths"] = depths;
  j["chi"] = chi;
  j["lightcone"] = lightcone;
  j["min_sweeps"] = min_sweeps;
  j["max_sweeps"] = max_sweeps;
  j["bp_iters"] = bp_iters;
  if (!otoc_depths.empty()) j["otoc_depths"] = otoc_depths;
  j["echo_theta"] = echo_theta;
  j["seed"] = seed;
  j["workers"] = workers;
  j["out_dir"] = out_dir;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  c.engine = j.value("engine", c.engine);
  c.experiment = j.value("experiment", c.experiment);
  c.geometry = j.value("geometry", c.geometry);
  if (j.contains("theta_j")) c.theta_j = parse_angle(j["theta_j"]);
  if (j.contains("theta_h")) {
    c.theta_h.clear();
    if (j["theta_h"].is_array())
      for (const auto& t : j["theta_h"]) c.theta_h.push_back(parse_angle(t));
    else
      c.theta_h.push_back(parse_angle(j["theta_h"]));
  }
  c.variant = j.value("variant", c.variant);
  if (j.contains("flux_bond"))
    c.flux_bond = {j["flux_bond"].at(0).get<int>(), j["flux_bond"].at(1).get<int>()};
  c.observable = j.value("observable", c.observable);
  if (j.contains("depths")) c.depths = j["depths"].get<std::vector<int>>();
  if (j.contains("chi")) c.chi = j["chi"].get<std::vector<int>>();
  c.lightcone = j.value("lightcone", c.lightcone);
  c.min_sweeps = j.value("min_sweeps", c.min_sweeps);
  c.max_sweeps = j.value("max_sweeps", c.max_sweeps);
  c.bp_iters = j.value("bp_iters", c.bp_iters);
  if (j.contains("otoc_depths"))
    c.otoc_depths = j["otoc_depths"].get<std::vector<int>>();
  if (j.contains("echo_theta")) c.echo_theta = parse_angle(j["echo_theta"]);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  c.out_dir = j.value("out_dir", c.out_dir);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("cannot open config '{}'", path));
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

std::string ExperimentConfig::hash() const {
  // FNV-1a over the canonical dump
  std::string s = to_json().dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

PauliString parse_observable(const std::string& text, const Lattice& lat) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument(fmt::format("bad observable '{}'", text));
  std::string head = text.substr(0, colon);
  if (head == "Z" || head == "X" || head == "Y") {
    int site = std::stoi(text.substr(colon + 1));
    if (site < 0 || site >= lat.site_count)
      throw std::invalid_argument("observable site out of range");
    PauliLetter l = head == "Z"   ? PauliLetter::Z
                    : head == "X" ? PauliLetter::X
                                  : PauliLetter::Y;
    return PauliString::single(lat.site_count, site, l);
  }
  if (head == "stab") {
    auto second = text.find(':', colon + 1);
    if (second == std::string::npos)
      throw std::invalid_argument("stab observable needs stab:SITE:DEPTH");
    int site = std::stoi(text.substr(colon + 1, second - colon - 1));
    int depth = std::stoi(text.substr(second + 1));
    return stabilizer(lat, site, depth);
  }
  throw std::invalid_argument(fmt::format("bad observable '{}'", text));
}

std::vector<Preset> presets() {
  std::vector<Preset> out;
  auto add = [&](const std::string& name, const std::string& desc,
                 const std::string& rt, ExperimentConfig c) {
    c.name = name;
    out.push_back({name, desc, rt, std::move(c)});
  };
  const double pi = kPi;

  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.observable = "stab:13:5";
    c.theta_h = {0.0, pi / 16, pi / 8, 3 * pi / 16, pi / 4, 5 * pi / 16,
                 3 * pi / 8, 7 * pi / 16, pi / 2};
    c.depths = {5};
    c.chi = {64};
    add("fig3a-weight10-deskscale",
        "weight-10 stabilizer vs theta_h at depth 5 (desk-scale chi)", "minutes", c);
  }
  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.observable = "stab:58:5";
    c.theta_h = {0.0, pi / 8, pi / 4, 3 * pi / 8, pi / 2};
    c.depths = {5};
    c.chi = {64};
    add("fig3b-weight17-deskscale",
        "weight-17 stabilizer vs theta_h at depth 5 (desk-scale chi)", "minutes", c);
  }
  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.experiment = "evolve";
    c.observable = "stab:58:5";
    c.variant = "extra_final_rx";
    c.theta_h = {0.0, pi / 8, pi / 4, 3 * pi / 8, pi / 2};
    c.depths = {5};
    c.chi = {64};
    add("fig3c-weight17-modified-deskscale",
        "modified weight-17: trailing RX layer, equals the depth-6 stabilizer",
        "minutes", c);
  }
  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.observable = "Z:62";
    c.theta_h = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, pi / 2};
    c.depths = {0, 1, 2, 3, 4, 5, 6};
    c.chi = {128};
    add("z62-depth-sweep-deskscale", "Z_62 magnetization per depth and theta_h",
        "minutes", c);
  }
  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.observable = "Z:62";
    c.theta_h = {0.7};
    c.depths = {0, 1, 2, 3, 4, 5, 6, 7};
    c.chi = {256};
    c.min_sweeps = 1;
    add("oee-growth-deskscale",
        "operator entanglement growth at theta_h=0.7 (run per variant: "
        "standard, theta_j=-0.25pi, non_commuting)",
        "hours", c);
  }
  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.observable = "Z:62";
    c.theta_h = {0.7};
    c.depths = {0, 1, 2, 3, 4, 5, 6, 7};
    c.chi = {256};
    c.otoc_depths = {7};
    c.min_sweeps = 1;
    add("fig3c-otoc-deskscale", "OTOC profile C(7, x) at theta_h=0.7", "hours", c);
  }
  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.observable = "Z:62";
    c.theta_h = {0.7};
    c.variant = "non_commuting";
    c.depths = {0, 1, 2, 3, 4};
    c.chi = {256};
    c.otoc_depths = {4};
    c.min_sweeps = 1;
    add("fig6-otoc-noncommuting-deskscale",
        "OTOC profile C(4, x) for the non-commuting variant", "hours", c);
  }
  {
    ExperimentConfig c;
    c.engine = "bptns";
    c.experiment = "echo";
    c.geometry = "twohex21";
    c.theta_h = {0.7, 1.1, 1.3, 1.45, pi / 2};
    c.depths = {1, 2, 3, 4, 5, 6, 7, 10};
    c.chi = {128};
    add("fig4-stabilizer-echo",
        "BP-TNS stabilizer echo on the two-hexagon geometry", "minutes", c);
  }
  {
    ExperimentConfig c;
    c.engine = "bptns";
    c.experiment = "double_slit";
    c.geometry = "twohex21";
    c.theta_h = {pi / 2};
    c.depths = {12};
    c.chi = {128};
    c.bp_iters = 15;
    add("fig5-double-slit",
        "double-slit interference: BP-TNS vs exact, flux 0 and pi", "minutes", c);
  }
  {
    ExperimentConfig c;
    c.engine = "mps";
    c.experiment = "extrapolate";
    c.geometry = "twohex21";
    c.observable = "Z:8";
    c.theta_h = {0.7};
    c.depths = {6};
    c.chi = {8, 12, 16, 24, 32};
    add("appendix-extrapolation-demo",
        "fidelity-based extrapolation of MPS magnetization", "minutes", c);
  }
  {
    ExperimentConfig c;
    c.engine = "heisenberg";
    c.experiment = "echo";
    c.geometry = "twohex21";
    c.observable = "Z:8";
    c.theta_h = {pi / 2};
    c.echo_theta = 0.7;
    c.depths = {1, 2, 3};
    c.chi = {256};
    add("echo-observable-deskscale",
        "single-site Loschmidt echo Z_i(D | theta, theta')", "seconds", c);
  }
  return out;
}

}  // namespace hexmpo
