#pragma once

#include <map>
#include <memory>
#include <vector>

#include "hexmpo/circuit.hpp"
#include "hexmpo/pauli.hpp"

namespace hexmpo {

/// Tensor-network state on the lattice graph: one tensor per site with a
/// physical leg (dim 2) plus one virtual leg per incident edge, and a
/// non-negative diagonal weight vector Lambda per edge (descending, unit
/// 2-norm).
struct GraphTNS {
  std::shared_ptr<const Lattice> lat;
  // site tensor flat storage, index p + 2*(l1 + d1*(l2 + d2*l3)); legs are
  // the incident edges sorted by edge index.
  std::vector<std::vector<cx>> site;
  std::vector<std::vector<int>> site_edges;  // per site: incident edge ids
  std::vector<std::vector<double>> lambda;   // per edge
  double log_norm = 0.0;

  int n() const { return lat->site_count; }
  int edge_count() const { return int(lat->edges.size()); }
  int edge_dim(int e) const { return int(lambda[e].size()); }
  int leg_of(int site_id, int edge_id) const;

  static GraphTNS product(std::shared_ptr<const Lattice> lat,
                          const std::vector<Vec>& site_vectors);
  static GraphTNS all_up(std::shared_ptr<const Lattice> lat);
  static GraphTNS all_plus_x(std::shared_ptr<const Lattice> lat);
};

/// Belief-propagation environments: one PSD, trace-normalized matrix per
/// directed edge (u -> v keyed as {u, v}).
struct MessageSet {
  std::map<std::pair<int, int>, Mat> m;
  std::vector<double> residuals;  // per iteration
  bool converged = false;
};

struct BpOptions {
  int iterations = 15;
  double tol = 1e-12;
  double damping = 0.0;
};

/// Simple-update gate application on one bond: absorb environment weights,
/// apply, split, truncate to chi_max.
void apply_gate_simple_update(GraphTNS& tns, const Edge& bond, const Mat& gate,
                              int chi_max);

/// One full circuit round (or its inverse) by simple update.
void apply_round_simple_update(GraphTNS& tns, const RoundProgram& prog,
                               int chi_max, bool inverse = false);

/// Message-passing fixed point followed by a Vidal-style regauge; messages
/// of the regauged network are returned.
MessageSet bp_messages(const GraphTNS& tns, const BpOptions& opt = {});
std::pair<GraphTNS, MessageSet> bp_regauge(GraphTNS tns, int iters = 15);

/// Expectation of a Pauli supported on one site or one edge, with BP
/// messages as environments.
double local_expectation(const GraphTNS& tns, const MessageSet& msgs,
                         const PauliString& p);

enum class EchoMode { TruncateBoth, TruncateForwardOnly };

struct EchoPoint {
  double theta = 0.0;
  int depth = 0;
  double value = 0.0;
};

/// Forward theta / backward pi/2 stabilizer echo measured at the lattice's
/// "detector" site.
std::vector<EchoPoint> stabilizer_echo_experiment(
    const Lattice& lat, const std::vector<double>& theta_grid,
    const std::vector<int>& depths, int chi_max,
    EchoMode mode = EchoMode::TruncateBoth);

/// Per-depth, per-site X magnetization for the kicked-Ising double slit
/// (V = U(-pi/4, pi/2) on the x-polarized state with a Z flip at the
/// source); rows are depths 0..depth, columns the requested sites.
std::vector<std::vector<double>> double_slit_experiment(
    const Lattice& lat, const std::vector<int>& sites, int depth, bool flux_pi,
    int chi_max, int bp_iters = 15);

}  // namespace hexmpo
