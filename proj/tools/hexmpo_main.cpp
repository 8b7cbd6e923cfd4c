#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hexmpo/bptns.hpp"
#include "hexmpo/clifford.hpp"
#include "hexmpo/dense.hpp"
#include "hexmpo/heisenberg.hpp"
#include "hexmpo/io.hpp"
#include "hexmpo/runner.hpp"
#include "hexmpo/schrodinger.hpp"
#include "hexmpo/version.hpp"

using namespace hexmpo;

namespace {

std::string data_dir() {
  const char* env = std::getenv("HEXMPO_DATA_DIR");
  return env ? env : ".";
}

int finish_run(const ExperimentConfig& cfg) {
  auto outcome = run_experiment(cfg);
  std::cout << fmt::format("wrote {} ({} points, {} failures)\n",
                           outcome.record_path,
                           outcome.record["points"].size(), outcome.failures);
  return outcome.failures == 0 ? 0 : 2;
}

double angle_arg(const std::string& s) {
  return parse_angle(nlohmann::json(s));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heavy-hex kicked-Ising tensor-network simulators"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- run ----
  std::string run_config, run_preset, run_out;
  int run_workers = 0;
  auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
  run_cmd->add_option("--config", run_config, "config JSON path");
  run_cmd->add_option("--preset", run_preset, "preset name (see `presets`)");
  run_cmd->add_option("--workers", run_workers, "worker pool size");
  run_cmd->add_option("--out", run_out, "output directory");

  // ---- presets ----
  std::string emit_name;
  auto* presets_cmd = app.add_subcommand("presets", "list experiment presets");
  presets_cmd->add_option("--emit", emit_name, "write the named preset config JSON");

  // ---- clifford ----
  auto* clifford_cmd = app.add_subcommand("clifford", "exact Pauli-string tools");
  auto* stab_cmd = clifford_cmd->add_subcommand("stabilizer", "depth-D stabilizer string");
  int stab_site = 62, stab_depth = 5;
  std::string stab_geometry = "eagle127", stab_out;
  stab_cmd->add_option("--site", stab_site)->required();
  stab_cmd->add_option("--depth", stab_depth)->required();
  stab_cmd->add_option("--geometry", stab_geometry);
  stab_cmd->add_option("--out", stab_out, "support-size CSV path");

  // ---- exact ----
  auto* exact_cmd = app.add_subcommand("exact", "dense statevector oracle");
  std::string exact_config;
  auto* exact_run = exact_cmd->add_subcommand("run", "full magnetization table");
  exact_run->add_option("--config", exact_config)->required();
  auto* exact_ds = exact_cmd->add_subcommand("double-slit", "interference table");
  std::string ds_flux = "0", ds_out;
  int ds_depth = 12;
  exact_ds->add_option("--flux", ds_flux, "0 or pi");
  exact_ds->add_option("--depth", ds_depth);
  exact_ds->add_option("--out", ds_out, "CSV path");

  // ---- heisenberg ----
  auto* heis_cmd = app.add_subcommand("heisenberg", "operator MPO evolution");
  auto* heis_run = heis_cmd->add_subcommand("run", "evolve an observable");
  std::string heis_config, heis_obs, heis_out, heis_geometry;
  int heis_depth = -1, heis_chi = 0;
  heis_run->add_option("--config", heis_config);
  heis_run->add_option("--observable", heis_obs);
  heis_run->add_option("--depth", heis_depth);
  heis_run->add_option("--chi", heis_chi);
  heis_run->add_option("--geometry", heis_geometry);
  heis_run->add_option("--out", heis_out);

  // ---- mps ----
  auto* mps_cmd = app.add_subcommand("mps", "pure-state MPS evolution");
  auto* mps_run = mps_cmd->add_subcommand("run", "evolve and measure");
  std::string mps_config;
  mps_run->add_option("--config", mps_config)->required();
  auto* mps_echo = mps_cmd->add_subcommand("echo", "forward-backward echo");
  std::string echo_theta = "0.7", echo_geometry = "twohex21";
  int echo_depth = 3, echo_chi = 128, echo_site = -1;
  mps_echo->add_option("--theta", echo_theta)->required();
  mps_echo->add_option("--depth", echo_depth)->required();
  mps_echo->add_option("--chi", echo_chi);
  mps_echo->add_option("--geometry", echo_geometry);
  mps_echo->add_option("--site", echo_site, "measured site (default: detector)");

  // ---- bptns ----
  auto* bp_cmd = app.add_subcommand("bptns", "belief-propagation TNS");
  auto* bp_echo = bp_cmd->add_subcommand("echo", "stabilizer echo table");
  std::string bp_theta = "1.45", bp_geometry = "twohex21", bp_out;
  int bp_chi = 128, bp_dmax = 10, bp_iters = 15;
  bp_echo->add_option("--theta", bp_theta);
  bp_echo->add_option("--chi", bp_chi);
  bp_echo->add_option("--depth", bp_dmax);
  bp_echo->add_option("--geometry", bp_geometry);
  bp_echo->add_option("--out", bp_out);
  auto* bp_ds = bp_cmd->add_subcommand("double-slit", "interference table");
  std::string bpds_flux = "0", bpds_out;
  int bpds_chi = 128, bpds_iters = 15, bpds_depth = 12;
  bp_ds->add_option("--flux", bpds_flux, "0 or pi");
  bp_ds->add_option("--chi", bpds_chi);
  bp_ds->add_option("--iters", bpds_iters);
  bp_ds->add_option("--depth", bpds_depth);
  bp_ds->add_option("--out", bpds_out);
  (void)bp_iters;

  // ---- extrapolate ----
  auto* ext_cmd = app.add_subcommand("extrapolate", "fidelity extrapolation");
  std::string ext_in;
  int ext_depth = -1;
  bool ext_force = false;
  ext_cmd->add_option("--in", ext_in, "mps run record JSON")->required();
  ext_cmd->add_option("--depth", ext_depth, "depth key (default: largest)");
  ext_cmd->add_flag("--force", ext_force, "extrapolate despite non-monotonic values");

  // ---- geometry ----
  auto* geo_cmd = app.add_subcommand("geometry", "emit a geometry JSON file");
  std::string geo_name = "eagle127", geo_out = "geometry.json";
  geo_cmd->add_option("--geometry", geo_name);
  geo_cmd->add_option("--out", geo_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      ExperimentConfig cfg;
      if (!run_preset.empty()) {
        bool found = false;
        for (const auto& p : presets())
          if (p.name == run_preset) {
            cfg = p.config;
            found = true;
          }
        if (!found) {
          std::cerr << fmt::format("unknown preset '{}'\n", run_preset);
          return 1;
        }
      } else if (!run_config.empty()) {
        cfg = ExperimentConfig::from_file(run_config);
      } else {
        std::cerr << "run: need --config or --preset\n";
        return 1;
      }
      if (run_workers > 0) cfg.workers = run_workers;
      cfg.out_dir = !run_out.empty() ? run_out : data_dir();
      return finish_run(cfg);
    }

    if (*presets_cmd) {
      if (!emit_name.empty()) {
        for (const auto& p : presets())
          if (p.name == emit_name) {
            std::cout << p.config.to_json().dump(2) << "\n";
            return 0;
          }
        std::cerr << fmt::format("unknown preset '{}'\n", emit_name);
        return 1;
      }
      for (const auto& p : presets())
        std::cout << fmt::format("{:36s} [{}] {}\n", p.name, p.runtime_class,
                                 p.description);
      return 0;
    }

    if (*stab_cmd) {
      auto lat = build_geometry(stab_geometry);
      auto s = stabilizer(lat, stab_site, stab_depth);
      std::cout << s.str() << "\n";
      CircuitSpec spec;
      spec.theta_j = -3.14159265358979323846 / 2;
      spec.theta_h = 3.14159265358979323846 / 2;
      spec.lattice = std::make_shared<Lattice>(lat);
      auto growth = support_growth(lat, stab_site, stab_depth, spec);
      if (!stab_out.empty()) {
        std::vector<std::vector<double>> rows;
        for (size_t d = 0; d < growth.size(); ++d)
          rows.push_back({double(d), double(growth[d])});
        write_csv(stab_out, {"depth", "support"}, rows);
        std::cout << fmt::format("wrote {}\n", stab_out);
      } else {
        std::cout << "support per depth:";
        for (int g : growth) std::cout << " " << g;
        std::cout << "\n";
      }
      return 0;
    }

    if (*exact_run) {
      auto cfg = ExperimentConfig::from_file(exact_config);
      cfg.engine = "exact";
      cfg.out_dir = data_dir();
      return finish_run(cfg);
    }
    if (*exact_ds) {
      auto lat = build_two_hexagon_21();
      std::vector<int> sites;
      for (int s = 0; s < 12; ++s) sites.push_back(s);
      auto table = double_slit_table(lat, lat.labels.at("source"), sites,
                                     ds_depth, ds_flux == "pi");
      std::vector<std::vector<double>> rows;
      for (size_t d = 0; d < table.size(); ++d) {
        std::vector<double> r{double(d)};
        r.insert(r.end(), table[d].begin(), table[d].end());
        rows.push_back(r);
      }
      std::vector<std::string> header{"depth"};
      for (int s : sites) header.push_back(fmt::format("x{}", s));
      std::string path = ds_out.empty()
                             ? fmt::format("{}/double_slit_exact_flux{}.csv",
                                           data_dir(), ds_flux)
                             : ds_out;
      write_csv(path, header, rows);
      std::cout << fmt::format("wrote {}\n", path);
      return 0;
    }

    if (*heis_run) {
      ExperimentConfig cfg;
      if (!heis_config.empty()) cfg = ExperimentConfig::from_file(heis_config);
      cfg.engine = "heisenberg";
      if (!heis_obs.empty()) cfg.observable = heis_obs;
      if (!heis_geometry.empty()) cfg.geometry = heis_geometry;
      if (heis_chi > 0) cfg.chi = {heis_chi};
      if (heis_depth >= 0) {
        cfg.depths.clear();
        for (int d = 0; d <= heis_depth; ++d) cfg.depths.push_back(d);
      }
      if (cfg.theta_h.empty()) cfg.theta_h = {0.7};
      if (!heis_out.empty()) {
        auto slash = heis_out.find_last_of('/');
        if (slash != std::string::npos) {
          cfg.out_dir = heis_out.substr(0, slash);
          cfg.name = heis_out.substr(slash + 1);
        } else {
          cfg.name = heis_out;
        }
        if (cfg.name.size() > 5 && cfg.name.substr(cfg.name.size() - 5) == ".json")
          cfg.name = cfg.name.substr(0, cfg.name.size() - 5);
      } else {
        cfg.out_dir = data_dir();
      }
      return finish_run(cfg);
    }

    if (*mps_run) {
      auto cfg = ExperimentConfig::from_file(mps_config);
      cfg.engine = "mps";
      cfg.out_dir = data_dir();
      return finish_run(cfg);
    }
    if (*mps_echo) {
      auto lat = build_geometry(echo_geometry);
      int site = echo_site >= 0 ? echo_site
                                : (lat.labels.count("detector")
                                       ? lat.labels.at("detector")
                                       : 0);
      auto fb = forward_backward(lat, angle_arg(echo_theta), echo_depth, echo_chi);
      double val = mps_expect_z(fb.state, lat, site);
      std::cout << fmt::format(
          "echo theta={} depth={} chi={} site={}: <Z> = {:.12f} (F = {:.6g})\n",
          echo_theta, echo_depth, echo_chi, site, val, fb.fidelity.cumulative);
      return 0;
    }

    if (*bp_echo) {
      auto lat = build_geometry(bp_geometry);
      std::vector<int> depths;
      for (int d = 1; d <= bp_dmax; ++d) depths.push_back(d);
      auto table =
          stabilizer_echo_experiment(lat, {angle_arg(bp_theta)}, depths, bp_chi);
      std::vector<std::vector<double>> rows;
      for (const auto& p : table)
        rows.push_back({p.theta, double(p.depth), p.value});
      std::string path = bp_out.empty()
                             ? fmt::format("{}/bptns_echo.csv", data_dir())
                             : bp_out;
      write_csv(path, {"theta", "depth", "value"}, rows);
      std::cout << fmt::format("wrote {}\n", path);
      return 0;
    }
    if (*bp_ds) {
      auto lat = build_geometry("twohex21");
      std::vector<int> sites;
      for (int s = 0; s < 12; ++s) sites.push_back(s);
      auto table = double_slit_experiment(lat, sites, bpds_depth,
                                          bpds_flux == "pi", bpds_chi, bpds_iters);
      std::vector<std::vector<double>> rows;
      for (size_t d = 0; d < table.size(); ++d) {
        std::vector<double> r{double(d)};
        r.insert(r.end(), table[d].begin(), table[d].end());
        rows.push_back(r);
      }
      std::vector<std::string> header{"depth"};
      for (int s : sites) header.push_back(fmt::format("x{}", s));
      std::string path = bpds_out.empty()
                             ? fmt::format("{}/double_slit_bptns_flux{}.csv",
                                           data_dir(), bpds_flux)
                             : bpds_out;
      write_csv(path, header, rows);
      std::cout << fmt::format("wrote {}\n", path);
      return 0;
    }

    if (*ext_cmd) {
      auto rec = nlohmann::json::parse(read_text_file(ext_in));
      std::map<double, std::vector<FidelityPoint>> groups;
      for (const auto& p : rec.at("points")) {
        double th = p.at("theta_h").get<double>();
        int chi = p.at("chi").get<int>();
        const auto& vals = p.at("values");
        const auto& fids = p.at("fidelity");
        std::string key;
        if (ext_depth >= 0) {
          key = fmt::format("{}", ext_depth);
        } else {
          int best = -1;
          for (auto it = vals.begin(); it != vals.end(); ++it)
            best = std::max(best, std::stoi(it.key()));
          key = fmt::format("{}", best);
        }
        if (!vals.contains(key)) continue;
        groups[th].push_back(
            {fids.at(key).get<double>(), vals.at(key).get<double>(), chi});
      }
      nlohmann::json out;
      for (auto& [th, pts] : groups) {
        auto fit = extrapolate_fidelity(pts, ext_force);
        nlohmann::json f;
        f["a"] = fit.a;
        f["b"] = fit.b;
        f["residual"] = fit.residual;
        f["nonmonotonic_warning"] = fit.nonmonotonic_warning;
        if (fit.extrapolated) f["extrapolated"] = *fit.extrapolated;
        out[fmt::format("{}", th)] = f;
        std::cout << fmt::format(
            "theta_h={:.6g}: a={:.6g} b={:.6g}{}{}\n", th, fit.a, fit.b,
            fit.nonmonotonic_warning ? " [non-monotonic]" : "",
            fit.extrapolated ? fmt::format(" -> F=1 value {:.6g}", *fit.extrapolated)
                             : " (not extrapolated)");
      }
      write_text_file(fmt::format("{}/extrapolation.json", data_dir()),
                      out.dump(2) + "\n");
      return 0;
    }

    if (*geo_cmd) {
      auto lat = build_geometry(geo_name);
      save_geometry_file(lat, geo_out);
      std::cout << fmt::format("wrote {}\n", geo_out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
