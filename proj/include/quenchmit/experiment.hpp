#ifndef QUENCHMIT_EXPERIMENT_HPP
#define QUENCHMIT_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "quenchmit/config.hpp"

namespace quenchmit {

// One mitigation method's time series over the repeat ensemble.
struct MethodSeries {
  std::string method;
  std::vector<double> median;                    // per time point
  std::vector<double> q25;
  std::vector<double> q75;
  std::vector<std::vector<double>> repeatValues;  // [time][repeat]
  bool failed = false;
  std::string failureReason;
};

struct ObservableReport {
  std::string observableId;
  std::vector<double> times;
  std::vector<double> exact;         // continuous-time evolution
  std::vector<double> trotterExact;  // noiseless step circuit, the error reference
  std::vector<MethodSeries> methods;
  std::vector<double> errorByMethod;  // aligned with methods; NaN when failed
};

struct RunReport {
  ExperimentConfig config;
  std::vector<ObservableReport> observables;
};

// The full pipeline: per step count, fold per level, simulate, sample shots
// per repeat, build training sets, fit and apply every configured method.
// Deterministic in (config, masterSeed).
RunReport run_experiment(const ExperimentConfig& config);

// Mean over time of |series - reference| / |mean(reference)|.
double mean_absolute_error(const std::vector<double>& series,
                           const std::vector<double>& reference);

// Writes series_<observableId>.csv per observable, errors.csv, and
// manifest.json into outDir; returns the written paths. Byte-stable.
std::vector<std::string> emit(const RunReport& report, const std::string& outDir);

}  // namespace quenchmit

#endif
