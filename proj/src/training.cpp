#include "quenchmit/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "quenchmit/io.hpp"
#include "quenchmit/seeds.hpp"
#include "quenchmit/simulator.hpp"

namespace quenchmit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double squared_distance(double theta, int n) {
  // |tr(RZ(theta)^dag S^n)| = 2|cos(theta/2 - n pi/4)|
  const double overlap = 2.0 * std::abs(std::cos(0.5 * theta - 0.25 * kPi * n));
  return std::max(0.0, 4.0 - 2.0 * overlap);
}

std::vector<std::size_t> non_clifford_indices(const Circuit& circuit) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < circuit.ops.size(); ++i)
    if (!circuit.ops[i].is_clifford()) idx.push_back(i);
  return idx;
}

// Depth of each op under the same per-qubit chain rule as circuit_stats.
std::vector<int> op_depths(const Circuit& circuit) {
  std::vector<int> qubitDepth(static_cast<std::size_t>(circuit.nQubits) + 1, 0);
  std::vector<int> depths(circuit.ops.size(), 0);
  for (std::size_t i = 0; i < circuit.ops.size(); ++i) {
    const Gate& g = circuit.ops[i];
    int d;
    if (g.kind == GateKind::CNOT) {
      d = std::max(qubitDepth[static_cast<std::size_t>(g.q0)],
                   qubitDepth[static_cast<std::size_t>(g.q1)]) +
          1;
      qubitDepth[static_cast<std::size_t>(g.q0)] = d;
      qubitDepth[static_cast<std::size_t>(g.q1)] = d;
    } else {
      d = qubitDepth[static_cast<std::size_t>(g.q0)] + 1;
      qubitDepth[static_cast<std::size_t>(g.q0)] = d;
    }
    depths[i] = d;
  }
  return depths;
}

// Weighted sampling without replacement: repeatedly draw from the CDF of the
// still-available weights.
std::vector<std::size_t> sample_without_replacement(const std::vector<std::size_t>& pool,
                                                    std::vector<double> weights,
                                                    std::size_t nDraws, std::mt19937_64& rng) {
  std::vector<std::size_t> chosen;
  std::vector<char> taken(pool.size(), 0);
  chosen.reserve(nDraws);
  for (std::size_t draw = 0; draw < nDraws; ++draw) {
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!taken[i]) total += weights[i];
    if (total <= 0.0) throw numeric_error("training: selection weights vanished");
    const double u = uniform01(rng) * total;
    double run = 0.0;
    std::size_t pick = pool.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      pick = i;  // falls through to the last untaken index on rounding edges
      run += weights[i];
      if (u < run) break;
    }
    taken[pick] = 1;
    chosen.push_back(pool[pick]);
  }
  return chosen;
}

}  // namespace

void SubstitutionPolicy::validate() const {
  if (sigma <= 0.0) throw config_error("SubstitutionPolicy: sigma must be > 0");
  if (fractionReplaced <= 0.0 || fractionReplaced > 1.0)
    throw config_error("SubstitutionPolicy: fractionReplaced must lie in (0,1]");
  if (nonCliffordCap < 0) throw config_error("SubstitutionPolicy: cap must be >= 0");
  if (method != 1 && method != 2)
    throw config_error("SubstitutionPolicy: method must be 1 or 2");
}

double gate_distance(double theta, int n) {
  if (n < 0 || n > 3) throw config_error("gate_distance: n must lie in 0..3");
  return std::sqrt(squared_distance(theta, n));
}

std::vector<double> selection_weights(const Circuit& circuit, double sigma) {
  if (sigma <= 0.0) throw config_error("selection_weights: sigma must be > 0");
  const auto idx = non_clifford_indices(circuit);
  if (idx.empty())
    throw numeric_error("selection_weights: circuit has no non-Clifford gates");
  std::vector<double> weights(idx.size());
  double total = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double theta = circuit.ops[idx[i]].angle;
    double w = 0.0;
    for (int n = 0; n < 4; ++n) w += std::exp(-squared_distance(theta, n) / (sigma * sigma));
    weights[i] = w;
    total += w;
  }
  for (double& w : weights) w /= total;
  return weights;
}

int replacement_choice(double theta, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) throw config_error("replacement_choice: sigma must be > 0");
  double p[4];
  double total = 0.0;
  for (int n = 0; n < 4; ++n) {
    p[n] = std::exp(-squared_distance(theta, n) / (sigma * sigma));
    total += p[n];
  }
  const double u = uniform01(rng) * total;
  double run = 0.0;
  for (int n = 0; n < 4; ++n) {
    run += p[n];
    if (u < run) return n;
  }
  return 3;
}

Circuit make_training_circuit(const Circuit& circuit, const SubstitutionPolicy& policy,
                              std::uint64_t seed) {
  policy.validate();
  circuit.validate();
  const auto idx = non_clifford_indices(circuit);
  const std::size_t n = idx.size();
  if (n == 0) return circuit;

  const auto target = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor(static_cast<double>(n) *
                                          (1.0 - policy.fractionReplaced))),
      static_cast<std::size_t>(policy.nonCliffordCap));
  const std::size_t nReplace = n - target;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> replaced;
  if (policy.method == 1) {
    const auto weights = selection_weights(circuit, policy.sigma);
    replaced = sample_without_replacement(idx, weights, nReplace, rng);
  } else {
    // Keep the `target` earliest non-Clifford gates by depth (ties by gate
    // order); substitute everything deeper.
    const auto depths = op_depths(circuit);
    std::vector<std::size_t> order(idx);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return depths[a] < depths[b];
    });
    replaced.assign(order.begin() + static_cast<std::ptrdiff_t>(target), order.end());
  }
  std::sort(replaced.begin(), replaced.end());

  Circuit out = circuit;
  for (std::size_t opIndex : replaced) {
    const Gate& g = out.ops[opIndex];
    const int power = replacement_choice(g.angle, policy.sigma, rng);
    out.ops[opIndex] = Gate::rz(0.5 * kPi * power, g.q0);
  }
  return out;
}

Circuit make_training_circuit(const Circuit& circuit, const SubstitutionPolicy& policy) {
  return make_training_circuit(circuit, policy, policy.seed);
}

TrainingEvaluator make_noise_evaluator(const NoiseModel& noise, const ProductState& initial,
                                       const Observable& obs, std::int64_t shots) {
  noise.validate();
  return [noise, initial, obs, shots](const Circuit& folded, int level,
                                      std::uint64_t shotSeed) {
    NoiseModel local = noise;
    if (noise.globalEps > 0.0) {
      const int steps = std::max(folded.meta.nSteps, 1);
      local.globalEps = composed_global_eps(noise.globalEps, level * steps);
    }
    const auto probs = run_noisy(folded, initial, local);
    if (shots <= 0) return expectation_from_probs(obs, probs, initial.L());
    const auto counts = sample_counts(probs, shots, shotSeed);
    return estimate_observable(obs, counts);
  };
}

TrainingSet make_training_set(const Circuit& interestCircuit, const SubstitutionPolicy& policy,
                              int count, const std::vector<int>& noiseLevels,
                              const TrainingEvaluator& noisyEvaluator, const Observable& obs,
                              const ProductState& initial) {
  policy.validate();
  if (count < 1) throw config_error("make_training_set: count must be >= 1");
  if (noiseLevels.empty()) throw config_error("make_training_set: no noise levels");
  if (!noisyEvaluator) throw config_error("make_training_set: missing evaluator");

  TrainingSet set;
  set.noiseLevels = noiseLevels;
  set.observableId = obs.id();
  set.records.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    const std::uint64_t circuitSeed =
        child_seed(policy.seed, seed_role::kTrainingCircuit, {static_cast<std::uint64_t>(c)});
    const Circuit trainingCircuit = make_training_circuit(interestCircuit, policy, circuitSeed);

    TrainingRecord record;
    record.circuitId = c;
    record.exactValue =
        expectation_from_probs(obs, run_exact(trainingCircuit, initial), initial.L());
    record.noisyValues.reserve(noiseLevels.size());
    for (std::size_t li = 0; li < noiseLevels.size(); ++li) {
      const Circuit folded = fold_identity(trainingCircuit, noiseLevels[li]);
      const std::uint64_t shotSeed =
          child_seed(policy.seed, seed_role::kTrainingShots,
                     {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(li)});
      record.noisyValues.push_back(noisyEvaluator(folded, noiseLevels[li], shotSeed));
    }
    set.records.push_back(std::move(record));
  }
  return set;
}

double dispersion(const TrainingSet& set, double interestNoisy, double interestExact) {
  if (set.records.empty()) throw numeric_error("dispersion: empty training set");
  std::size_t levelIndex = 0;
  const auto it = std::find(set.noiseLevels.begin(), set.noiseLevels.end(), 1);
  if (it != set.noiseLevels.end())
    levelIndex = static_cast<std::size_t>(it - set.noiseLevels.begin());
  double acc = 0.0;
  for (const TrainingRecord& r : set.records) {
    if (levelIndex >= r.noisyValues.size())
      throw config_error("dispersion: record missing the base noise level");
    const double dx = r.noisyValues[levelIndex] - interestNoisy;
    const double dy = r.exactValue - interestExact;
    acc += std::sqrt(dx * dx + dy * dy);
  }
  return acc / static_cast<double>(set.records.size());
}

std::string training_set_to_csv(const TrainingSet& set) {
  std::ostringstream os;
  os << "circuitId,level,noisyValue,exactValue,observableId\n";
  for (const TrainingRecord& r : set.records) {
    for (std::size_t li = 0; li < set.noiseLevels.size(); ++li) {
      if (li >= r.noisyValues.size())
        throw config_error("training_set_to_csv: record missing a noise level");
      os << r.circuitId << ',' << set.noiseLevels[li] << ',' << format_double(r.noisyValues[li])
         << ',' << format_double(r.exactValue) << ',' << set.observableId << '\n';
    }
  }
  return os.str();
}

}  // namespace quenchmit
