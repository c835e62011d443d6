#ifndef QUENCHMIT_MODEL_HPP
#define QUENCHMIT_MODEL_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "quenchmit/errors.hpp"
#include "quenchmit/observable.hpp"

namespace quenchmit {

// Ising chain couplings: H = -J [ sum_{i=1}^{L-1} Z_i Z_{i+1}
//                                 + hX sum_i X_i + hZ sum_i Z_i ].
// Open boundary; times are reported in units of 1/J.
struct ModelParams {
  double J = 1.0;
  double hX = 0.0;
  double hZ = 0.0;
  int L = 1;

  void validate() const;
};

// Z-basis product state. spins[s-1] is site s; 0 = up, 1 = down.
struct ProductState {
  std::vector<int> spins;

  ProductState() = default;
  explicit ProductState(std::vector<int> s);

  static ProductState all_up(int L);
  // Single domain wall: sites 1..i up, sites i+1..L down.
  static ProductState kink(int L, int i);
  // Two domain walls enclosing n flipped spins at sites i+1..i+n.
  static ProductState meson(int L, int i, int n);

  int L() const { return static_cast<int>(spins.size()); }
  std::size_t basis_index() const;
  std::string bitstring() const;
};

// Trotter discretization: nSteps steps of length dt, total time dt*nSteps.
struct TimeGrid {
  double dt = 0.1;
  int nSteps = 0;

  void validate() const;
  // Step times dt, 2dt, ..., nSteps*dt.
  std::vector<double> times() const;
};

inline constexpr int kDenseMaxL = 14;     // statevector / dense Hamiltonian cap
inline constexpr int kDensityMaxL = 10;   // density-matrix cap

// Dense Hamiltonian of ModelParams. Real symmetric (all terms are real
// matrices in the Z basis), dimension 2^L. Throws capacity_error for L > 14.
Eigen::MatrixXd build_hamiltonian(const ModelParams& params);

// <psi(t)|O|psi(t)> with |psi(t)> = e^{-iHt}|initial> by spectral
// decomposition, one series per requested observable.
std::vector<ObservableSeries> exact_evolve(const ModelParams& params,
                                           const ProductState& initial,
                                           const std::vector<double>& times,
                                           const std::vector<Observable>& observables);

// Z-basis probability vector of e^{-iHt}|initial>.
std::vector<double> exact_probabilities(const ModelParams& params,
                                        const ProductState& initial, double t);

}  // namespace quenchmit

#endif
