#pragma once

#include <optional>
#include <vector>

#include "hexmpo/circuit.hpp"
#include "hexmpo/fidelity.hpp"
#include "hexmpo/tensor_train.hpp"

namespace hexmpo {

struct SchrodingerOptions {
  CompressOptions compress;
  /// Restrict gates to the backward lightcone of this site (-1 = off).
  int lightcone_target = -1;
};

struct SchrodingerRun {
  TensorTrain state;  // unit-normalized (phys_dim 2)
  FidelityLog fidelity;
  std::vector<double> norm_factors;  // pre-renormalization norms per step
};

/// |psi(D)> = U^D |up^N> with per-layer two-site compression.
SchrodingerRun evolve_state(const CircuitSpec& spec, int depth, int chi_max,
                            const SchrodingerOptions& opt = {});

/// [U^dag(theta_bwd)]^D U(theta_fwd)^D |up^N>.
SchrodingerRun forward_backward_general(const Lattice& lat, double theta_fwd,
                                        double theta_bwd, int depth,
                                        int chi_max,
                                        const SchrodingerOptions& opt = {});

/// The paper's extended evolution: forward at theta, backward at pi/2.
SchrodingerRun forward_backward(const Lattice& lat, double theta, int depth,
                                int chi_max, const SchrodingerOptions& opt = {});

double mps_expect_z(const TensorTrain& state, const Lattice& lat, int site);
double mps_expect_x(const TensorTrain& state, const Lattice& lat, int site);

struct FidelityPoint {
  double fidelity = 1.0;
  double value = 0.0;
  int chi = 0;
};

/// Linear fit value = a*log(F) + b over the three largest-chi points; the
/// value extrapolated to F -> 1 is b. When the three values are
/// non-monotonic in chi the fit is flagged and, unless `force`, no
/// extrapolated value is reported.
struct ExtrapolationFit {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;
  bool nonmonotonic_warning = false;
  std::optional<double> extrapolated;
  std::vector<FidelityPoint> points_used;
};

ExtrapolationFit extrapolate_fidelity(const std::vector<FidelityPoint>& points,
                                      bool force = false);

}  // namespace hexmpo
