#include "hexmpo/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <fmt/format.h>

namespace hexmpo {

namespace {

std::vector<int> graph_distances(const Lattice& lat, int from) {
  std::vector<int> dist(lat.site_count, -1);
  auto adj = lat.adjacency();
  std::deque<int> q{from};
  dist[from] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
  }
  return dist;
}

struct MpsStepper {
  const Lattice& lat;
  SnakeOrder order;
  SchrodingerRun* run;
  CompressOptions copts;
  double stored_norm = 1.0;

  void apply_rx(const RoundItem& item, bool dagger,
                const std::vector<char>* active) {
    auto cl = compile_rx_layer(dagger ? -item.angle : item.angle, false,
                               lat.site_count, order, ConjDirection::Heisenberg,
                               item.site_signs, active);
    auto center = run->state.canonical_center;
    run->state = apply_layer(run->state, cl);
    run->state.canonical_center = center;  // single-site unitaries keep form
  }

  void apply_zz(const GateLayer& layer, const std::vector<double>& angles,
                bool dagger) {
    if (layer.bonds.empty()) return;
    std::vector<double> th = angles;
    if (dagger)
      for (auto& t : th) t = -t;
    auto cl = compile_zz_layer(layer, 0.0, false, lat.site_count, order,
                               ConjDirection::Heisenberg, &th);
    auto [next, rep] = apply_and_compress(run->state, cl, stored_norm, copts);
    run->state = std::move(next);
    // Renormalize: the state is physical, the lost weight is logged.
    run->norm_factors.push_back(rep.norm_out);
    if (rep.norm_out > 0 && run->state.canonical_center) {
      auto& c = run->state.sites[*run->state.canonical_center];
      const cx scale(1.0 / rep.norm_out, 0.0);
      for (auto& z : c.v) z *= scale;
    }
    stored_norm = 1.0;
    run->fidelity.record(rep.epsilon, rep.f, rep.max_chi, rep.split_degenerate);
  }
};

void run_rounds(SchrodingerRun& run, const CircuitSpec& spec, int depth,
                int chi_max, const SchrodingerOptions& opt, bool dagger) {
  const auto& lat = *spec.lattice;
  auto order = snake_order(lat);
  auto layers = layer_bonds(lat, order);
  auto prog = build_round(spec, layers);

  MpsStepper step{lat, order, &run, opt.compress, 1.0};
  step.copts.chi_max = chi_max;

  std::vector<int> dist;
  if (opt.lightcone_target >= 0) dist = graph_distances(lat, opt.lightcone_target);

  for (int d = 1; d <= depth; ++d) {
    // Gates at round d influence the target only within distance depth-d+1.
    std::vector<char> active;
    const std::vector<char>* active_ptr = nullptr;
    if (opt.lightcone_target >= 0) {
      int reach = depth - d + 1;
      active.resize(lat.site_count, 0);
      for (int s = 0; s < lat.site_count; ++s) active[s] = dist[s] <= reach;
      active_ptr = &active;
    }
    auto items = prog.items;
    if (dagger) std::reverse(items.begin(), items.end());
    for (const auto& item : items) {
      if (item.kind == RoundItem::Kind::RX) {
        step.apply_rx(item, dagger, active_ptr);
      } else {
        GateLayer gl = item.layer;
        std::vector<double> angles = item.bond_angles;
        if (active_ptr) {
          GateLayer filtered;
          std::vector<double> fa;
          for (size_t i = 0; i < gl.bonds.size(); ++i) {
            const auto& [a, b] = gl.bonds[i];
            if (active[a] || active[b]) {
              filtered.bonds.push_back(gl.bonds[i]);
              filtered.spans.push_back(gl.spans[i]);
              fa.push_back(angles[i]);
            }
          }
          gl = std::move(filtered);
          angles = std::move(fa);
        }
        step.apply_zz(gl, angles, dagger);
      }
    }
  }
  if (!dagger) {
    if (auto extra = trailing_rx(spec)) step.apply_rx(*extra, false, nullptr);
  }
}

}  // namespace

SchrodingerRun evolve_state(const CircuitSpec& spec_in, int depth, int chi_max,
                            const SchrodingerOptions& opt) {
  CircuitSpec spec = spec_in;
  spec.depth = depth;
  spec.check();
  if (chi_max < 1) throw std::invalid_argument("evolve_state: chi_max < 1");
  SchrodingerRun run;
  run.state = TensorTrain::all_up(spec.lattice->site_count);
  run_rounds(run, spec, depth, chi_max, opt, false);
  return run;
}

SchrodingerRun forward_backward_general(const Lattice& lat, double theta_fwd,
                                        double theta_bwd, int depth,
                                        int chi_max,
                                        const SchrodingerOptions& opt) {
  CircuitSpec fwd;
  fwd.theta_j = -3.14159265358979323846 / 2;
  fwd.theta_h = theta_fwd;
  fwd.depth = depth;
  fwd.lattice = std::make_shared<Lattice>(lat);
  SchrodingerRun run;
  run.state = TensorTrain::all_up(lat.site_count);
  run_rounds(run, fwd, depth, chi_max, opt, false);
  CircuitSpec bwd = fwd;
  bwd.theta_h = theta_bwd;
  run_rounds(run, bwd, depth, chi_max, opt, true);
  return run;
}

SchrodingerRun forward_backward(const Lattice& lat, double theta, int depth,
                                int chi_max, const SchrodingerOptions& opt) {
  return forward_backward_general(lat, theta, 3.14159265358979323846 / 2, depth,
                                  chi_max, opt);
}

double mps_expect_z(const TensorTrain& state, const Lattice& lat, int site) {
  static const Mat z = (Mat(2, 2) << 1, 0, 0, -1).finished();
  auto order = snake_order(lat);
  double denom = std::abs(overlap(state, state));
  return overlap_with_site_op(state, state, order.position[site], z).real() /
         denom;
}

double mps_expect_x(const TensorTrain& state, const Lattice& lat, int site) {
  static const Mat x = (Mat(2, 2) << 0, 1, 1, 0).finished();
  auto order = snake_order(lat);
  double denom = std::abs(overlap(state, state));
  return overlap_with_site_op(state, state, order.position[site], x).real() /
         denom;
}

ExtrapolationFit extrapolate_fidelity(const std::vector<FidelityPoint>& points,
                                      bool force) {
  if (points.size() < 3)
    throw std::invalid_argument("extrapolate: need at least 3 points");
  for (const auto& p : points)
    if (!(p.fidelity > 0.0) || p.fidelity > 1.0 + 1e-12)
      throw std::invalid_argument("extrapolate: fidelity outside (0, 1]");
  auto pts = points;
  std::sort(pts.begin(), pts.end(),
            [](const FidelityPoint& a, const FidelityPoint& b) { return a.chi < b.chi; });
  std::vector<FidelityPoint> used(pts.end() - 3, pts.end());

  ExtrapolationFit fit;
  fit.points_used = used;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : used) {
    double x = std::log(p.fidelity);
    sx += x;
    sy += p.value;
    sxx += x * x;
    sxy += x * p.value;
  }
  const int n = 3;
  double var = sxx - sx * sx / n;
  if (var > 1e-30) {
    fit.a = (sxy - sx * sy / n) / var;
    fit.b = (sy - fit.a * sx) / n;
  } else {
    fit.a = 0.0;
    fit.b = sy / n;
  }
  double r2 = 0.0;
  for (const auto& p : used) {
    double e = p.value - (fit.a * std::log(p.fidelity) + fit.b);
    r2 += e * e;
  }
  fit.residual = std::sqrt(r2);

  const bool inc = used[0].value <= used[1].value && used[1].value <= used[2].value;
  const bool dec = used[0].value >= used[1].value && used[1].value >= used[2].value;
  fit.nonmonotonic_warning = !(inc || dec);
  if (!fit.nonmonotonic_warning || force) fit.extrapolated = fit.b;
  return fit;
}

}  // namespace hexmpo
