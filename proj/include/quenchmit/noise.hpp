#ifndef QUENCHMIT_NOISE_HPP
#define QUENCHMIT_NOISE_HPP

#include "quenchmit/errors.hpp"

namespace quenchmit {

// Synthetic noise channels applied during circuit simulation.
//   p2          two-qubit depolarizing after every CNOT, on the CNOT's pair
//   p1          single-qubit depolarizing after every non-CNOT gate
//   readoutFlip independent classical bit flip per qubit on the final
//               Z-basis distribution
//   globalEps   whole-circuit depolarizing rho -> (1-eps) rho + eps I/d,
//               applied once; 0 disables it
struct NoiseModel {
  double p2 = 0.0;
  double p1 = 0.0;
  double readoutFlip = 0.0;
  double globalEps = 0.0;

  bool has_gate_noise() const { return p2 > 0.0 || p1 > 0.0; }
  bool is_trivial() const {
    return !has_gate_noise() && readoutFlip == 0.0 && globalEps == 0.0;
  }
  void validate() const {
    auto in01 = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in01(p2) || !in01(p1) || !in01(readoutFlip) || !in01(globalEps))
      throw config_error("NoiseModel: probabilities must lie in [0,1]");
  }
};

// Depolarizing survival after `exponent` compositions: 1-(1-eps)^exponent.
// The harness uses this for per-step global-noise composition, where the
// exponent is noiseLevel * nSteps.
double composed_global_eps(double eps, int exponent);

}  // namespace quenchmit

#endif
