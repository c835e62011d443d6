#ifndef QUENCHMIT_MITIGATION_HPP
#define QUENCHMIT_MITIGATION_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quenchmit/training.hpp"

namespace quenchmit {

// Linear ansatz mitigated = a1 * noisy + a2, trained at the base noise level.
struct CdrFit {
  double a1 = 1.0;
  double a2 = 0.0;
};

// Variable-noise ansatz mitigated = a . noisyPerLevel + b.
struct VnCdrFit {
  std::vector<double> a;
  double b = 0.0;
  bool degenerate = false;  // true when the design was singular and the
                            // minimum-norm solution was taken
};

// Poor man's CDR: global depolarizing model with per-step eps1 and
// two-step eps2, alpha = ln(1-eps2) / (2 ln(1-eps1)).
struct PmCdrModel {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double alpha = 1.0;
  double traceTerm = 0.0;
};

// Ordinary least squares of exact on base-level noisy values.
CdrFit fit_cdr(const TrainingSet& set);

// a1 * noisy + a2; clampPhysical restricts the result to [-1, 1].
double apply_cdr(const CdrFit& fit, double noisy, bool clampPhysical = false);

// Least squares over all noise levels plus a constant column. A singular
// design falls back to the minimum-norm solution and sets `degenerate`.
VnCdrFit fit_vncdr(const TrainingSet& set);

double apply_vncdr(const VnCdrFit& fit, const std::vector<double>& noisyPerLevel,
                   bool clampPhysical = false);

// Least-squares line in the noise level, evaluated at level 0.
double zne(const std::vector<double>& values, const std::vector<int>& levels);

// Closed-form one-parameter fit of noisy = (1-eps) exact + eps * traceTerm
// over the base-level records: eps = sum (y-x)(y-c) / sum (y-c)^2.
double fit_epsilon(const TrainingSet& set, double traceTerm);

// alpha from (1-eps2) = (1-eps1)^(2 alpha); eps1 = eps2 gives 1/2.
double fit_alpha(double eps1, double eps2);

// (noisy - epsN * traceTerm) / (1 - epsN) with epsN = 1-(1-eps1)^(alpha*nSteps).
double apply_pmcdr(const PmCdrModel& model, double noisy, int nSteps);

// Maps a training subset to a mitigated value for the circuit of interest.
using SubsetMitigator = std::function<double(const TrainingSet& subset)>;

// Median over `subsets` mitigated values, each fitted on `subsetSize` records
// drawn without replacement. Subsets whose fit degenerates are skipped; if
// every subset fails the last error is rethrown.
double bootstrap_fit(const TrainingSet& set, const SubsetMitigator& mitigator, int subsets,
                     int subsetSize, std::uint64_t seed);

// Audit form of a fit: {"method", "parameters", "trainingSetId", "seed"}.
std::string fit_to_json(const std::string& method, const std::vector<double>& parameters,
                        const std::string& trainingSetId, std::uint64_t seed);

}  // namespace quenchmit

#endif
