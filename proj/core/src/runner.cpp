#include "hexmpo/runner.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#include <fmt/format.h>

#include "hexmpo/bptns.hpp"
#include "hexmpo/clifford.hpp"
#include "hexmpo/dense.hpp"
#include "hexmpo/heisenberg.hpp"
#include "hexmpo/io.hpp"
#include "hexmpo/schrodinger.hpp"
#include "hexmpo/version.hpp"

namespace hexmpo {

namespace {

struct Point {
  double theta_h = 0.0;
  int chi = 0;
};

CircuitSpec make_spec(const ExperimentConfig& cfg,
                      std::shared_ptr<const Lattice> lat, double theta_h) {
  CircuitSpec spec;
  spec.theta_j = cfg.theta_j;
  spec.theta_h = theta_h;
  spec.variant = variant_from_string(cfg.variant);
  if (cfg.flux_bond) spec.flux_bond = Edge{cfg.flux_bond->first, cfg.flux_bond->second};
  spec.lattice = std::move(lat);
  return spec;
}

nlohmann::json run_heisenberg_point(const ExperimentConfig& cfg,
                                    std::shared_ptr<const Lattice> lat,
                                    const Point& pt) {
  const auto& l = *lat;
  nlohmann::json out;
  out["theta_h"] = pt.theta_h;
  out["chi"] = pt.chi;
  if (cfg.experiment == "echo") {
    nlohmann::json vals;
    int site = std::stoi(cfg.observable.substr(cfg.observable.find(':') + 1));
    for (int d : cfg.depths)
      vals[fmt::format("{}", d)] =
          echo_observable(l, cfg.echo_theta, pt.theta_h, d, site, pt.chi);
    out["echo_values"] = vals;
    return out;
  }
  auto obs = parse_observable(cfg.observable, l);
  auto spec = make_spec(cfg, lat, pt.theta_h);
  int dmax = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  HeisenbergOptions opt;
  opt.lightcone_reduction = cfg.lightcone;
  opt.compress.min_sweeps = cfg.min_sweeps;
  opt.compress.max_sweeps = cfg.max_sweeps;
  opt.otoc_depths = cfg.otoc_depths;
  auto run = evolve_operator(obs, spec, dmax, pt.chi, opt);
  nlohmann::json vals, oee, fid, cone;
  for (int d : cfg.depths) {
    auto key = fmt::format("{}", d);
    vals[key] = run.stats[d].expectation;
    oee[key] = run.stats[d].oee;
    fid[key] = run.stats[d].f_cumulative;
    cone[key] = run.stats[d].cone_size;
  }
  out["values"] = vals;
  out["oee"] = oee;
  out["fidelity"] = fid;
  out["cone_size"] = cone;
  out["final_max_chi"] = run.op.max_bond();
  out["fidelity_steps"] = run.fidelity.entries.size();
  for (const auto& [d, profile] : run.otoc_profiles) {
    out["otoc"][fmt::format("{}", d)] = profile;
  }
  return out;
}

nlohmann::json run_mps_point(const ExperimentConfig& cfg,
                             std::shared_ptr<const Lattice> lat,
                             const Point& pt) {
  const auto& l = *lat;
  nlohmann::json out;
  out["theta_h"] = pt.theta_h;
  out["chi"] = pt.chi;
  int site = std::stoi(cfg.observable.substr(cfg.observable.find(':') + 1));
  if (cfg.experiment == "echo") {
    nlohmann::json vals;
    for (int d : cfg.depths) {
      SchrodingerOptions opt;
      opt.compress.min_sweeps = cfg.min_sweeps;
      opt.compress.max_sweeps = cfg.max_sweeps;
      auto fb = forward_backward(l, pt.theta_h, d, pt.chi, opt);
      vals[fmt::format("{}", d)] = mps_expect_z(fb.state, l, site);
    }
    out["echo_values"] = vals;
    return out;
  }
  auto spec = make_spec(cfg, lat, pt.theta_h);
  SchrodingerOptions opt;
  opt.compress.min_sweeps = cfg.min_sweeps;
  opt.compress.max_sweeps = cfg.max_sweeps;
  nlohmann::json vals, fid;
  int max_chi_seen = 1;
  for (int d : cfg.depths) {
    auto run = evolve_state(spec, d, pt.chi, opt);
    auto key = fmt::format("{}", d);
    vals[key] = mps_expect_z(run.state, l, site);
    fid[key] = run.fidelity.cumulative;
    max_chi_seen = std::max(max_chi_seen, run.state.max_bond());
  }
  out["values"] = vals;
  out["fidelity"] = fid;
  out["final_max_chi"] = max_chi_seen;
  return out;
}

nlohmann::json run_exact_point(const ExperimentConfig& cfg,
                               std::shared_ptr<const Lattice> lat,
                               const Point& pt) {
  const auto& l = *lat;
  nlohmann::json out;
  out["theta_h"] = pt.theta_h;
  if (cfg.experiment == "double_slit") {
    std::vector<int> sites;
    for (int s = 0; s < l.site_count; ++s) sites.push_back(s);
    int dmax = *std::max_element(cfg.depths.begin(), cfg.depths.end());
    for (bool flux : {false, true}) {
      auto table = double_slit_table(l, l.labels.at("source"), sites, dmax, flux);
      out[flux ? "flux_pi" : "flux_0"] = table;
    }
    return out;
  }
  auto spec = make_spec(cfg, lat, pt.theta_h);
  int dmax = *std::max_element(cfg.depths.begin(), cfg.depths.end());
  auto order = snake_order(l);
  auto layers = layer_bonds(l, order);
  spec.depth = dmax;
  spec.check();
  auto prog = build_round(spec, layers);
  StateVector psi = StateVector::all_up(l.site_count);
  nlohmann::json mags;
  auto snap = [&](int d) {
    if (std::find(cfg.depths.begin(), cfg.depths.end(), d) == cfg.depths.end())
      return;
    std::vector<double> row;
    for (int s = 0; s < l.site_count; ++s) row.push_back(psi.expect_z(s));
    mags[fmt::format("{}", d)] = row;
  };
  snap(0);
  for (int d = 1; d <= dmax; ++d) {
    psi.apply_round(prog);
    if (d == dmax)
      if (auto extra = trailing_rx(spec)) psi.apply_item(*extra, false);
    snap(d);
  }
  out["magnetizations"] = mags;
  return out;
}

nlohmann::json run_bptns_point(const ExperimentConfig& cfg,
                               std::shared_ptr<const Lattice> lat,
                               const Point& pt) {
  const auto& l = *lat;
  nlohmann::json out;
  out["theta_h"] = pt.theta_h;
  out["chi"] = pt.chi;
  if (cfg.experiment == "double_slit") {
    std::vector<int> sites;
    for (int s = 0; s < l.site_count; ++s) sites.push_back(s);
    int dmax = *std::max_element(cfg.depths.begin(), cfg.depths.end());
    for (bool flux : {false, true}) {
      auto table =
          double_slit_experiment(l, sites, dmax, flux, pt.chi, cfg.bp_iters);
      out[flux ? "flux_pi" : "flux_0"] = table;
    }
    return out;
  }
  // stabilizer echo
  auto table = stabilizer_echo_experiment(l, {pt.theta_h}, cfg.depths, pt.chi);
  nlohmann::json vals;
  for (const auto& p : table) vals[fmt::format("{}", p.depth)] = p.value;
  out["echo_values"] = vals;
  return out;
}

nlohmann::json run_clifford_point(const ExperimentConfig& cfg,
                                  std::shared_ptr<const Lattice> lat,
                                  const Point& pt) {
  const auto& l = *lat;
  nlohmann::json out;
  out["theta_h"] = pt.theta_h;
  auto colon = cfg.observable.find(':');
  int site = std::stoi(cfg.observable.substr(colon + 1));
  nlohmann::json strings;
  for (int d : cfg.depths) {
    auto s = stabilizer(l, site, d);
    strings[fmt::format("{}", d)] = s.str();
  }
  out["stabilizers"] = strings;
  auto spec = make_spec(cfg, lat, pt.theta_h);
  auto growth = support_growth(l, site, *std::max_element(cfg.depths.begin(),
                                                          cfg.depths.end()),
                               spec);
  out["support_growth"] = growth;
  return out;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto lat = std::make_shared<Lattice>(build_geometry(config.geometry));

  std::vector<Point> points;
  std::vector<int> chis = config.chi.empty() ? std::vector<int>{1} : config.chi;
  for (double th : config.theta_h)
    for (int c : chis) points.push_back({th, c});

  std::vector<nlohmann::json> results(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<size_t> cursor{0};
  auto t0 = std::chrono::steady_clock::now();

  auto work = [&] {
    while (true) {
      size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      try {
        const auto& pt = points[i];
        if (config.engine == "heisenberg") {
          results[i] = run_heisenberg_point(config, lat, pt);
        } else if (config.engine == "mps") {
          results[i] = run_mps_point(config, lat, pt);
        } else if (config.engine == "exact") {
          results[i] = run_exact_point(config, lat, pt);
        } else if (config.engine == "bptns") {
          results[i] = run_bptns_point(config, lat, pt);
        } else {
          results[i] = run_clifford_point(config, lat, pt);
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  int nworkers = std::max(1, std::min<int>(config.workers, int(points.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < nworkers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  RunOutcome outcome;
  nlohmann::json rec;
  rec["config"] = config.to_json();
  rec["config_hash"] = config.hash();
  rec["engine_version"] = kVersion;
  rec["points"] = nlohmann::json::array();
  auto fails = nlohmann::json::array();
  for (size_t i = 0; i < points.size(); ++i) {
    if (!errors[i].empty()) {
      fails.push_back({{"theta_h", points[i].theta_h},
                       {"chi", points[i].chi},
                       {"error", errors[i]}});
      ++outcome.failures;
    } else {
      rec["points"].push_back(results[i]);
    }
  }
  rec["failures"] = fails;
  rec["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(config.out_dir);
  outcome.record_path =
      fmt::format("{}/{}.json", config.out_dir, config.name);
  write_text_file(outcome.record_path, rec.dump(2) + "\n");
  outcome.record = std::move(rec);
  return outcome;
}

}  // namespace hexmpo
