#include "quenchmit/mitigation.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "quenchmit/seeds.hpp"

namespace quenchmit {

namespace {

constexpr double kSingularScale = 1e-12;

std::size_t base_level_index(const TrainingSet& set) {
  const auto it = std::find(set.noiseLevels.begin(), set.noiseLevels.end(), 1);
  if (it != set.noiseLevels.end())
    return static_cast<std::size_t>(it - set.noiseLevels.begin());
  return 0;
}

void check_record_widths(const TrainingSet& set) {
  for (const TrainingRecord& r : set.records)
    if (r.noisyValues.size() != set.noiseLevels.size())
      throw config_error("mitigation: record level count does not match the set");
}

double clamp_unit(double v) { return std::min(1.0, std::max(-1.0, v)); }

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  if (m % 2 == 1) return values[m / 2];
  return 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

}  // namespace

CdrFit fit_cdr(const TrainingSet& set) {
  check_record_widths(set);
  const std::size_t m = set.records.size();
  if (m < 2) throw numeric_error("fit_cdr: need at least 2 records");
  const std::size_t li = base_level_index(set);
  double sx = 0.0, sy = 0.0;
  for (const TrainingRecord& r : set.records) {
    sx += r.noisyValues[li];
    sy += r.exactValue;
  }
  const double xbar = sx / static_cast<double>(m);
  const double ybar = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, scale = 0.0;
  for (const TrainingRecord& r : set.records) {
    const double dx = r.noisyValues[li] - xbar;
    sxx += dx * dx;
    sxy += dx * (r.exactValue - ybar);
    scale += r.noisyValues[li] * r.noisyValues[li];
  }
  if (sxx <= kSingularScale * std::max(1.0, scale))
    throw numeric_error("fit_cdr: singular fit, noisy values are all equal");
  CdrFit fit;
  fit.a1 = sxy / sxx;
  fit.a2 = ybar - fit.a1 * xbar;
  return fit;
}

double apply_cdr(const CdrFit& fit, double noisy, bool clampPhysical) {
  const double v = fit.a1 * noisy + fit.a2;
  return clampPhysical ? clamp_unit(v) : v;
}

VnCdrFit fit_vncdr(const TrainingSet& set) {
  check_record_widths(set);
  const std::size_t m = set.records.size();
  const std::size_t nLevels = set.noiseLevels.size();
  if (m < 2) throw numeric_error("fit_vncdr: need at least 2 records");

  Eigen::MatrixXd design(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(nLevels + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < nLevels; ++c)
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          set.records[r].noisyValues[c];
    design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(nLevels)) = 1.0;
    y(static_cast<Eigen::Index>(r)) = set.records[r].exactValue;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  const Eigen::VectorXd beta = svd.solve(y);

  VnCdrFit fit;
  fit.a.resize(nLevels);
  for (std::size_t c = 0; c < nLevels; ++c) fit.a[c] = beta(static_cast<Eigen::Index>(c));
  fit.b = beta(static_cast<Eigen::Index>(nLevels));
  fit.degenerate = svd.rank() < design.cols();
  return fit;
}

double apply_vncdr(const VnCdrFit& fit, const std::vector<double>& noisyPerLevel,
                   bool clampPhysical) {
  if (noisyPerLevel.size() != fit.a.size())
    throw config_error("apply_vncdr: level count does not match the fit");
  double v = fit.b;
  for (std::size_t i = 0; i < fit.a.size(); ++i) v += fit.a[i] * noisyPerLevel[i];
  return clampPhysical ? clamp_unit(v) : v;
}

double zne(const std::vector<double>& values, const std::vector<int>& levels) {
  if (values.size() != levels.size())
    throw config_error("zne: values and levels differ in length");
  const std::size_t m = values.size();
  if (m < 2) throw numeric_error("zne: need at least 2 noise levels");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += levels[i];
    sy += values[i];
  }
  const double xbar = sx / static_cast<double>(m);
  const double ybar = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = levels[i] - xbar;
    sxx += dx * dx;
    sxy += dx * (values[i] - ybar);
  }
  if (sxx <= 0.0) throw numeric_error("zne: noise levels are all equal");
  const double slope = sxy / sxx;
  return ybar - slope * xbar;
}

double fit_epsilon(const TrainingSet& set, double traceTerm) {
  check_record_widths(set);
  if (set.records.empty()) throw numeric_error("fit_epsilon: empty training set");
  const std::size_t li = base_level_index(set);
  double num = 0.0, den = 0.0;
  for (const TrainingRecord& r : set.records) {
    const double y = r.exactValue;
    const double x = r.noisyValues[li];
    num += (y - x) * (y - traceTerm);
    den += (y - traceTerm) * (y - traceTerm);
  }
  if (den <= kSingularScale)
    throw numeric_error("fit_epsilon: degenerate, exact values all equal the trace term");
  return num / den;
}

double fit_alpha(double eps1, double eps2) {
  if (eps1 <= 0.0 || eps1 >= 1.0)
    throw numeric_error("fit_alpha: eps1 must lie in (0,1); eps1 = 0 leaves alpha undefined");
  if (eps2 <= 0.0 || eps2 >= 1.0)
    throw numeric_error("fit_alpha: eps2 must lie in (0,1)");
  return std::log(1.0 - eps2) / (2.0 * std::log(1.0 - eps1));
}

double apply_pmcdr(const PmCdrModel& model, double noisy, int nSteps) {
  if (nSteps < 0) throw config_error("apply_pmcdr: nSteps must be >= 0");
  const double survival = std::pow(1.0 - model.eps1, model.alpha * nSteps);
  if (survival < 1e-12)
    throw numeric_error("apply_pmcdr: amplification overflow, 1 - epsN below 1e-12");
  const double epsN = 1.0 - survival;
  return (noisy - epsN * model.traceTerm) / survival;
}

double bootstrap_fit(const TrainingSet& set, const SubsetMitigator& mitigator, int subsets,
                     int subsetSize, std::uint64_t seed) {
  if (!mitigator) throw config_error("bootstrap_fit: missing mitigator");
  if (subsets < 1) throw config_error("bootstrap_fit: subsets must be >= 1");
  if (subsetSize < 1) throw config_error("bootstrap_fit: subset size must be >= 1");
  const std::size_t m = set.records.size();
  if (m < static_cast<std::size_t>(subsetSize))
    throw config_error("bootstrap_fit: training set smaller than the subset size");

  std::vector<double> mitigated;
  mitigated.reserve(static_cast<std::size_t>(subsets));
  std::exception_ptr lastError;
  std::vector<std::size_t> indices(m);
  for (int s = 0; s < subsets; ++s) {
    std::mt19937_64 rng(
        child_seed(seed, seed_role::kBootstrap, {static_cast<std::uint64_t>(s)}));
    for (std::size_t i = 0; i < m; ++i) indices[i] = i;
    // Partial Fisher-Yates: the first subsetSize entries are the draw.
    for (int k = 0; k < subsetSize; ++k) {
      const auto remaining = m - static_cast<std::size_t>(k);
      const auto offset =
          static_cast<std::size_t>(uniform01(rng) * static_cast<double>(remaining));
      std::swap(indices[static_cast<std::size_t>(k)],
                indices[static_cast<std::size_t>(k) + std::min(offset, remaining - 1)]);
    }
    TrainingSet subset;
    subset.noiseLevels = set.noiseLevels;
    subset.observableId = set.observableId;
    subset.id = set.id;
    for (int k = 0; k < subsetSize; ++k)
      subset.records.push_back(set.records[indices[static_cast<std::size_t>(k)]]);
    try {
      mitigated.push_back(mitigator(subset));
    } catch (const numeric_error&) {
      lastError = std::current_exception();
    }
  }
  if (mitigated.empty()) {
    if (lastError) std::rethrow_exception(lastError);
    throw numeric_error("bootstrap_fit: every subset fit failed");
  }
  return median_of(std::move(mitigated));
}

std::string fit_to_json(const std::string& method, const std::vector<double>& parameters,
                        const std::string& trainingSetId, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["parameters"] = parameters;
  j["trainingSetId"] = trainingSetId;
  j["seed"] = seed;
  return j.dump(2);
}

}  // namespace quenchmit
