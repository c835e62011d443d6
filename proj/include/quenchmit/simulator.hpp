#ifndef QUENCHMIT_SIMULATOR_HPP
#define QUENCHMIT_SIMULATOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "quenchmit/circuit.hpp"
#include "quenchmit/model.hpp"
#include "quenchmit/noise.hpp"
#include "quenchmit/observable.hpp"

namespace quenchmit {

// Z-basis measurement record.
struct CountsTable {
  std::map<std::string, std::int64_t> counts;
  std::int64_t shots = 0;
  std::uint64_t seed = 0;

  std::string to_csv() const;  // bitstring,count rows, sorted by bitstring
};

// Noiseless statevector evolution; returns |amplitude|^2 per bitstring.
std::vector<double> run_exact(const Circuit& circuit, const ProductState& initial);

// Noisy evolution. With per-gate channels off this is the statevector path
// plus the classical global/readout channels; with p1/p2 > 0 the state is a
// density matrix (nQubits <= 10) with a depolarizing channel after each gate.
std::vector<double> run_noisy(const Circuit& circuit, const ProductState& initial,
                              const NoiseModel& noise);

// Same evolution, returning the distribution after each requested prefix of
// the gate list (boundaries in ops-index space, strictly increasing; a
// boundary equal to ops.size() is the full circuit). Used to snapshot every
// Trotter step of a deep circuit in one pass.
std::vector<std::vector<double>> run_noisy_snapshots(const Circuit& circuit,
                                                     const ProductState& initial,
                                                     const NoiseModel& noise,
                                                     const std::vector<std::size_t>& boundaries);

// Full density matrix after the noisy evolution; test and audit hook.
Eigen::MatrixXcd run_noisy_density(const Circuit& circuit, const ProductState& initial,
                                   const NoiseModel& noise);

// Classical channels on a Z-basis distribution. Both are used internally by
// run_noisy and directly by the harness's per-step global-noise composition.
void apply_global_eps(std::vector<double>& probs, double eps);
void apply_readout_flips(std::vector<double>& probs, double flipProbability);

// Multinomial sample of a normalized distribution; deterministic per seed.
CountsTable sample_counts(const std::vector<double>& distribution, std::int64_t shots,
                          std::uint64_t seed);

// Estimators over counts. Sites are 1-based; bit 0 = spin-up.
double estimate_magnetization(const CountsTable& counts, int site);
double estimate_zz(const CountsTable& counts, int i, int j);
double estimate_kink_density(const CountsTable& counts, int site, bool postselectTwoKink = false);
// Connected correlation assembled from separately mitigated terms.
double connected_correlation(double zz, double mi, double mj);

// Estimator dispatch used by the harness: sampled when shots > 0, exact
// expectation over the distribution when shots == 0.
double estimate_observable(const Observable& obs, const CountsTable& counts);

}  // namespace quenchmit

#endif
