#ifndef QUENCHMIT_TRAINING_HPP
#define QUENCHMIT_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "quenchmit/circuit.hpp"
#include "quenchmit/noise.hpp"
#include "quenchmit/observable.hpp"

namespace quenchmit {

// How near-Clifford training circuits are derived from a circuit of interest.
// method 1 picks the substituted gates probabilistically over the whole
// circuit; method 2 substitutes every non-Clifford gate beyond a depth
// threshold so the surviving ones occupy the earliest layers.
struct SubstitutionPolicy {
  double sigma = 0.5;
  double fractionReplaced = 0.5;
  int nonCliffordCap = 50;
  int method = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainingRecord {
  int circuitId = 0;
  std::vector<double> noisyValues;  // aligned with TrainingSet::noiseLevels
  double exactValue = 0.0;
};

struct TrainingSet {
  std::vector<TrainingRecord> records;
  std::vector<int> noiseLevels;
  std::string observableId;
  std::string id;  // referenced by serialized fits
};

// Phase-invariant Frobenius distance between RZ(theta) and S^n,
// d = sqrt(4 - 2|tr(RZ(theta)^dag S^n)|).
double gate_distance(double theta, int n);

// Normalized selection probability per non-Clifford gate, in ops order:
// p(theta_i) proportional to sum_n exp(-d(theta_i,n)^2 / sigma^2).
std::vector<double> selection_weights(const Circuit& circuit, double sigma);

// Sample the Clifford power n in 0..3 with p(n) proportional to
// exp(-d(theta,n)^2 / sigma^2).
int replacement_choice(double theta, double sigma, std::mt19937_64& rng);

// One near-Clifford circuit; the surviving non-Clifford count is exactly
// min(floor(N * (1 - fractionReplaced)), nonCliffordCap) for an input with
// N non-Clifford gates. Deterministic in (circuit, policy, seed).
Circuit make_training_circuit(const Circuit& circuit, const SubstitutionPolicy& policy,
                              std::uint64_t seed);
// Same, seeded by policy.seed.
Circuit make_training_circuit(const Circuit& circuit, const SubstitutionPolicy& policy);

// Evaluates one folded training circuit at the given noise level and returns
// the measured expectation value.
using TrainingEvaluator =
    std::function<double(const Circuit& foldedCircuit, int noiseLevel, std::uint64_t shotSeed)>;

// Standard evaluator: gate noise runs on the density backend; a global
// depolarizing eps composes per step as 1-(1-eps)^(level*nSteps); shots = 0
// returns exact expectations over the final distribution.
TrainingEvaluator make_noise_evaluator(const NoiseModel& noise, const ProductState& initial,
                                       const Observable& obs, std::int64_t shots);

// count circuits, each evaluated noiselessly (exactValue) and at every fold
// level through the evaluator. Circuit i uses child seeds of policy.seed.
TrainingSet make_training_set(const Circuit& interestCircuit, const SubstitutionPolicy& policy,
                              int count, const std::vector<int>& noiseLevels,
                              const TrainingEvaluator& noisyEvaluator, const Observable& obs,
                              const ProductState& initial);

// Mean Euclidean distance of level-1 training points from the interest point:
// (1/m) sum_i sqrt((x_i - interestNoisy)^2 + (y_i - interestExact)^2).
double dispersion(const TrainingSet& set, double interestNoisy, double interestExact);

// Columnar form: circuitId, level, noisyValue, exactValue, observableId.
std::string training_set_to_csv(const TrainingSet& set);

}  // namespace quenchmit

#endif
