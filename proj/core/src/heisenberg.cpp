#include "hexmpo/heisenberg.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "hexmpo/io.hpp"
#include "hexmpo/schrodinger.hpp"

namespace hexmpo {

namespace {

Vec up_weight4() {
  Vec w = Vec::Zero(4);
  w[0] = 1.0;  // <0| O |0> component of the (ket,bra) fused index
  return w;
}

// Bonds of `layer` touching the active site set.
GateLayer restrict_layer(const GateLayer& layer, const std::vector<double>& angles,
                         const std::vector<char>& active,
                         std::vector<double>* angles_out) {
  GateLayer out;
  for (size_t i = 0; i < layer.bonds.size(); ++i) {
    const auto& [a, b] = layer.bonds[i];
    if (active[a] || active[b]) {
      out.bonds.push_back(layer.bonds[i]);
      out.spans.push_back(layer.spans[i]);
      angles_out->push_back(angles[i]);
    }
  }
  return out;
}

void grow_by_edges(std::vector<char>& active, const std::vector<Edge>& edges) {
  std::vector<int> add;
  for (const auto& [a, b] : edges) {
    if (active[a] && !active[b]) add.push_back(b);
    if (active[b] && !active[a]) add.push_back(a);
  }
  for (int s : add) active[s] = 1;
}

void grow_by_graph(std::vector<char>& active, const Lattice& lat) {
  grow_by_edges(active, lat.edges);
}

}  // namespace

double expect_up(const HeisenbergRun& run, int depth) {
  if (depth < 0 || depth >= int(run.stats.size()))
    throw std::invalid_argument(
        fmt::format("expect_up: no stats recorded at depth {}", depth));
  return run.stats[depth].expectation;
}

double otoc(const HeisenbergRun& run, int depth, int site) {
  auto it = run.otoc_profiles.find(depth);
  if (it == run.otoc_profiles.end())
    throw std::invalid_argument(
        fmt::format("otoc: no profile recorded at depth {}", depth));
  return it->second.at(site);
}

std::vector<double> otoc_profile(const TensorTrain& op, const SnakeOrder& order) {
  static const Mat zdoubled = [] {
    Mat z(2, 2);
    z << 1, 0, 0, -1;
    return doubled_gate(z, ConjDirection::Heisenberg);
  }();
  const int n = op.size();
  const double denom = std::abs(overlap(op, op));
  std::vector<double> out(n, 1.0);
  for (int site = 0; site < n; ++site) {
    int pos = order.position[site];
    cx num = overlap_with_site_op(op, op, pos, zdoubled);
    out[site] = num.real() / denom;
  }
  return out;
}

HeisenbergRun evolve_operator(const PauliString& p, const CircuitSpec& spec_in,
                              int depth, int chi_max,
                              const HeisenbergOptions& opt_in) {
  CircuitSpec spec = spec_in;
  spec.depth = depth;
  spec.check();
  if (chi_max < 1) throw std::invalid_argument("evolve_operator: chi_max < 1");
  const auto& lat = *spec.lattice;
  if (p.size() != lat.site_count)
    throw std::invalid_argument("evolve_operator: string/lattice size mismatch");

  auto order = snake_order(lat);
  auto layers = layer_bonds(lat, order);
  auto prog = build_round(spec, layers);

  HeisenbergOptions opt = opt_in;
  opt.compress.chi_max = chi_max;

  HeisenbergRun run;
  run.initial = p;
  run.spec = spec;
  run.chi_max = chi_max;
  run.op = TensorTrain::from_pauli(p);
  run.stored_norm = 1.0;

  std::vector<char> active(lat.site_count, 0);
  if (opt.lightcone_reduction) {
    for (int s : p.support()) active[s] = 1;
  } else {
    std::fill(active.begin(), active.end(), 1);
  }

  std::vector<Vec> upw(lat.site_count, up_weight4());
  auto record_stats = [&](int d, double wall) {
    HeisenbergDepthStats st;
    st.depth = d;
    st.expectation = contract_with_product(run.op, upw).real();
    st.oee = opt.record_oee ? max_oee(run.op) : 0.0;
    st.f_cumulative = run.fidelity.cumulative;
    st.max_chi = run.op.max_bond();
    st.cone_size = int(std::count(active.begin(), active.end(), 1));
    st.wall_seconds = wall;
    run.stats.push_back(st);
    if (std::find(opt.otoc_depths.begin(), opt.otoc_depths.end(), d) !=
        opt.otoc_depths.end())
      run.otoc_profiles[d] = otoc_profile(run.op, order);
    if (!opt.checkpoint_dir.empty()) {
      auto path = fmt::format("{}/op_depth{:03d}.ttc", opt.checkpoint_dir, d);
      save_tensor_train(run.op, path);
      run.checkpoint_files.push_back(path);
    }
  };

  // The trailing RX of the modified circuit conjugates the observable first.
  if (auto extra = trailing_rx(spec)) {
    auto cl = compile_rx_layer(extra->angle, true, lat.site_count, order,
                               ConjDirection::Schroedinger, extra->site_signs,
                               opt.lightcone_reduction ? &active : nullptr);
    run.op = apply_layer(run.op, cl);
    run.op.canonical_center = 0;  // product of unitaries on a product train
  }

  record_stats(0, 0.0);

  // Conjugation replays the round items in reversed application order.
  for (int d = 1; d <= depth; ++d) {
    auto t0 = std::chrono::steady_clock::now();
    if (opt.lightcone_reduction && spec.variant != Variant::NonCommuting)
      grow_by_graph(active, lat);

    int pending_color = -1;
    auto color_of_layer = [&](const GateLayer& gl) {
      if (gl.bonds.empty()) return -1;
      for (int g = 0; g < 3; ++g)
        for (const auto& e : lat.color_groups[g])
          if (e == gl.bonds.front()) return g;
      return -1;
    };

    for (auto it = prog.items.rbegin(); it != prog.items.rend(); ++it) {
      if (it->kind == RoundItem::Kind::RX) {
        pending_color = -1;
        auto cl = compile_rx_layer(it->angle, true, lat.site_count, order,
                                   ConjDirection::Heisenberg, it->site_signs,
                                   opt.lightcone_reduction ? &active : nullptr);
        auto center = run.op.canonical_center;
        run.op = apply_layer(run.op, cl);
        run.op.canonical_center = center;  // chi=1 unitary layer keeps form
        continue;
      }
      GateLayer gl = it->layer;
      std::vector<double> angles = it->bond_angles;
      if (opt.lightcone_reduction) {
        if (spec.variant == Variant::NonCommuting) {
          int c = color_of_layer(it->layer);
          if (c >= 0 && c != pending_color) {
            grow_by_edges(active, lat.color_groups[c]);
            pending_color = c;
          }
        }
        std::vector<double> filtered;
        gl = restrict_layer(it->layer, it->bond_angles, active, &filtered);
        angles = std::move(filtered);
        if (gl.bonds.empty()) continue;
      }
      auto cl = compile_zz_layer(gl, spec.theta_j, true, lat.site_count, order,
                                 ConjDirection::Heisenberg, &angles);
      auto [next, rep] = apply_and_compress(run.op, cl, run.stored_norm,
                                            opt.compress);
      run.op = std::move(next);
      run.stored_norm = rep.norm_out;
      run.fidelity.record(rep.epsilon, rep.f, rep.max_chi, rep.split_degenerate);
    }
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    record_stats(d, wall);
  }
  return run;
}

ModifiedRunResult modified_weight17(const Lattice& lat, int seed_site,
                                    double theta_h, int chi_max,
                                    const HeisenbergOptions& opt) {
  auto s5 = stabilizer(lat, seed_site, 5);
  CircuitSpec spec;
  spec.theta_j = -3.14159265358979323846 / 2;
  spec.theta_h = theta_h;
  spec.variant = Variant::ExtraFinalRx;
  spec.lattice = std::make_shared<Lattice>(lat);
  ModifiedRunResult out;
  out.run = evolve_operator(s5, spec, 5, chi_max, opt);
  out.value = expect_up(out.run, 5);
  out.fidelity = out.run.fidelity.cumulative;
  return out;
}

double heisenberg_stabilizer_echo(const Lattice& lat, int site, double theta_h,
                                  int depth, int chi_max,
                                  const HeisenbergOptions& opt) {
  auto sd = stabilizer(lat, site, depth);
  CircuitSpec spec;
  spec.theta_j = -3.14159265358979323846 / 2;
  spec.theta_h = theta_h;
  spec.lattice = std::make_shared<Lattice>(lat);
  auto run = evolve_operator(sd, spec, depth, chi_max, opt);
  return expect_up(run, depth);
}

double echo_observable(const Lattice& lat, double theta, double theta_prime,
                       int depth, int site, int chi_max) {
  SchrodingerOptions sopt;
  sopt.compress.chi_max = chi_max;
  auto fb = forward_backward_general(lat, theta_prime, theta, depth, chi_max, sopt);
  return mps_expect_z(fb.state, lat, site);
}

}  // namespace hexmpo
