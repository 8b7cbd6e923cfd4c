#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hexmpo/circuit.hpp"
#include "hexmpo/clifford.hpp"
#include "hexmpo/fidelity.hpp"
#include "hexmpo/tensor_train.hpp"

namespace hexmpo {

struct HeisenbergOptions {
  bool lightcone_reduction = true;
  CompressOptions compress;          // chi_max is set by the caller
  std::vector<int> otoc_depths;      // depths at which to record C(D, x)
  std::string checkpoint_dir;        // empty: keep no per-depth trains
  bool record_oee = true;
};

struct HeisenbergDepthStats {
  int depth = 0;
  double expectation = 0.0;
  double oee = 0.0;
  double f_cumulative = 1.0;
  int max_chi = 1;
  int cone_size = 1;
  double wall_seconds = 0.0;
};

/// One Heisenberg-picture evolution O(D) = (U^dag)^D O U^D with two-site
/// compression interleaved between the compiled doubled layers.
struct HeisenbergRun {
  PauliString initial;
  CircuitSpec spec;
  int chi_max = 1;
  TensorTrain op;            // final evolved operator train (phys_dim 4)
  double stored_norm = 1.0;  // Frobenius norm of the stored tensors
  FidelityLog fidelity;
  std::vector<HeisenbergDepthStats> stats;             // index = depth
  std::map<int, std::vector<double>> otoc_profiles;    // depth -> C per site
  std::vector<std::string> checkpoint_files;
};

HeisenbergRun evolve_operator(const PauliString& p, const CircuitSpec& spec,
                              int depth, int chi_max,
                              const HeisenbergOptions& opt = {});

/// <up|O(depth)|up> from the recorded per-depth stats.
double expect_up(const HeisenbergRun& run, int depth);

/// OTOC C(depth, x) = <Z_x O Z_x O> / <O|O>, exactly 1 outside the
/// operator's support.
double otoc(const HeisenbergRun& run, int depth, int site);

/// OTOC profile over all sites for the final operator train.
std::vector<double> otoc_profile(const TensorTrain& op, const SnakeOrder& order);

/// Weight-17 observable of the modified circuit: the depth-5 stabilizer of
/// site `seed` conjugated once more by the trailing RX layer, then evolved
/// 5 rounds. Equivalent to the depth-6 stabilizer measured at depth 6.
struct ModifiedRunResult {
  double value = 0.0;
  double fidelity = 1.0;
  HeisenbergRun run;
};
ModifiedRunResult modified_weight17(const Lattice& lat, int seed_site,
                                    double theta_h, int chi_max,
                                    const HeisenbergOptions& opt = {});

/// Stabilizer echo via operator evolution: evolve the depth-`depth`
/// pi/2-stabilizer of `site` through `depth` rounds at angle theta_h.
double heisenberg_stabilizer_echo(const Lattice& lat, int site, double theta_h,
                                  int depth, int chi_max,
                                  const HeisenbergOptions& opt = {});

/// Loschmidt-type echo observable Z_i(D | theta, theta'): measure Z_i on
/// [U^dag(theta)]^D U(theta')^D |up^N>, computed state-side on MPS.
double echo_observable(const Lattice& lat, double theta, double theta_prime,
                       int depth, int site, int chi_max);

}  // namespace hexmpo
