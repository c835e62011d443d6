#include "quenchmit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "quenchmit/analysis.hpp"
#include "quenchmit/io.hpp"
#include "quenchmit/mitigation.hpp"
#include "quenchmit/seeds.hpp"
#include "quenchmit/simulator.hpp"
#include "quenchmit/version.hpp"

namespace quenchmit {

namespace {

constexpr int kBootstrapSubsets = 200;
constexpr int kBootstrapSize = 5;
constexpr std::uint64_t kMethodTagCdr = 1;
constexpr std::uint64_t kMethodTagVnCdr = 2;

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  const double pos = q * static_cast<double>(m - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  const std::size_t hi = std::min(lo + 1, m - 1);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

bool has_method(const ExperimentConfig& config, const std::string& name) {
  return std::find(config.methods.begin(), config.methods.end(), name) !=
         config.methods.end();
}

// Per-step Z-basis distributions of the folded interest circuit at one noise
// level, with the global channel composed per step and readout applied.
std::vector<std::vector<double>> level_distributions(const ExperimentConfig& config,
                                                     const Circuit& full, int level) {
  const int nSteps = config.grid.nSteps;
  Circuit folded = fold_identity(full, level);
  if (folded.ops.size() % static_cast<std::size_t>(nSteps) != 0)
    throw numeric_error("run_experiment: step boundary bookkeeping failed");
  const std::size_t opsPerStep = folded.ops.size() / static_cast<std::size_t>(nSteps);
  std::vector<std::size_t> boundaries(static_cast<std::size_t>(nSteps));
  for (int n = 1; n <= nSteps; ++n)
    boundaries[static_cast<std::size_t>(n - 1)] = opsPerStep * static_cast<std::size_t>(n);

  NoiseModel gateOnly = config.noise;
  gateOnly.globalEps = 0.0;
  gateOnly.readoutFlip = 0.0;
  auto snapshots = run_noisy_snapshots(folded, config.initial, gateOnly, boundaries);
  for (int n = 1; n <= nSteps; ++n) {
    auto& probs = snapshots[static_cast<std::size_t>(n - 1)];
    if (config.noise.globalEps > 0.0)
      apply_global_eps(probs, composed_global_eps(config.noise.globalEps, level * n));
    apply_readout_flips(probs, config.noise.readoutFlip);
  }
  return snapshots;
}

struct StepContext {
  std::string what;
  int step = 0;

  numeric_error wrap(const std::exception& e) const {
    return numeric_error(what + " (step " + std::to_string(step) + "): " + e.what());
  }
};

}  // namespace

double mean_absolute_error(const std::vector<double>& series,
                           const std::vector<double>& reference) {
  if (series.size() != reference.size() || series.empty())
    throw config_error("mean_absolute_error: series and reference must align");
  double refMean = 0.0;
  for (double r : reference) refMean += r;
  refMean /= static_cast<double>(reference.size());
  if (std::abs(refMean) < 1e-300)
    throw numeric_error("mean_absolute_error: reference mean is zero, metric undefined");
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) acc += std::abs(series[i] - reference[i]);
  return acc / static_cast<double>(series.size()) / std::abs(refMean);
}

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.grid.nSteps < 1)
    throw config_error("run_experiment: grid.nSteps must be >= 1");
  const bool needsTraining = has_method(config, "cdr") || has_method(config, "vncdr");
  if (needsTraining && config.trainingCount < kBootstrapSize)
    throw config_error("run_experiment: cdr/vncdr need trainingCount >= " +
                       std::to_string(kBootstrapSize));

  const int L = config.model.L;
  const int nSteps = config.grid.nSteps;
  const int nRepeats = config.repeats;
  const std::size_t nLevels = config.levels.size();
  const auto times = config.grid.times();
  const Circuit full = trotter_circuit(config.model, config.grid);

  // Noisy distributions per (level, step), then shared counts per repeat.
  std::vector<std::vector<std::vector<double>>> probs(nLevels);
  for (std::size_t li = 0; li < nLevels; ++li)
    probs[li] = level_distributions(config, full, config.levels[li]);

  // countsValue[obs][li][step][repeat]
  const std::size_t nObs = config.observables.size();
  std::vector<std::vector<std::vector<std::vector<double>>>> measured(
      nObs, std::vector<std::vector<std::vector<double>>>(
                nLevels, std::vector<std::vector<double>>(
                             static_cast<std::size_t>(nSteps),
                             std::vector<double>(static_cast<std::size_t>(nRepeats), 0.0))));
  for (std::size_t li = 0; li < nLevels; ++li) {
    for (int n = 1; n <= nSteps; ++n) {
      const auto& dist = probs[li][static_cast<std::size_t>(n - 1)];
      for (int r = 0; r < nRepeats; ++r) {
        if (config.shots > 0) {
          const std::uint64_t seed = child_seed(
              config.masterSeed, seed_role::kRepeat,
              {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(li),
               static_cast<std::uint64_t>(r)});
          const CountsTable counts = sample_counts(dist, config.shots, seed);
          for (std::size_t oi = 0; oi < nObs; ++oi)
            measured[oi][li][static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(r)] =
                estimate_observable(config.observables[oi], counts);
        } else {
          for (std::size_t oi = 0; oi < nObs; ++oi)
            measured[oi][li][static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(r)] =
                expectation_from_probs(config.observables[oi], dist, L);
        }
      }
    }
  }

  // Noiseless step-circuit reference via statevector snapshots.
  std::vector<std::size_t> plainBoundaries(static_cast<std::size_t>(nSteps));
  const std::size_t plainOpsPerStep = full.ops.size() / static_cast<std::size_t>(nSteps);
  for (int n = 1; n <= nSteps; ++n)
    plainBoundaries[static_cast<std::size_t>(n - 1)] =
        plainOpsPerStep * static_cast<std::size_t>(n);
  const auto trotterSnapshots =
      run_noisy_snapshots(full, config.initial, NoiseModel{}, plainBoundaries);

  const auto exactSeries =
      exact_evolve(config.model, config.initial, times, config.observables);

  RunReport report;
  report.config = config;
  report.observables.resize(nObs);

  for (std::size_t oi = 0; oi < nObs; ++oi) {
    const Observable& obs = config.observables[oi];
    ObservableReport& obsReport = report.observables[oi];
    obsReport.observableId = obs.id();
    obsReport.times = times;
    obsReport.exact = exactSeries[oi].values;
    obsReport.trotterExact.resize(static_cast<std::size_t>(nSteps));
    for (int n = 1; n <= nSteps; ++n)
      obsReport.trotterExact[static_cast<std::size_t>(n - 1)] = expectation_from_probs(
          obs, trotterSnapshots[static_cast<std::size_t>(n - 1)], L);

    // Training sets per step, shared by cdr and vncdr.
    std::vector<TrainingSet> stepSets;
    if (needsTraining) {
      stepSets.resize(static_cast<std::size_t>(nSteps));
      for (int n = 1; n <= nSteps; ++n) {
        SubstitutionPolicy policy = config.policy;
        policy.seed = child_seed(config.masterSeed, seed_role::kTrainingCircuit,
                                 {static_cast<std::uint64_t>(n)});
        const Circuit interest = trotter_circuit(config.model, {config.grid.dt, n});
        const auto evaluator =
            make_noise_evaluator(config.noise, config.initial, obs, config.shots);
        try {
          stepSets[static_cast<std::size_t>(n - 1)] =
              make_training_set(interest, policy, config.trainingCount, config.levels,
                                evaluator, obs, config.initial);
          stepSets[static_cast<std::size_t>(n - 1)].id =
              obs.id() + "_steps" + std::to_string(n);
        } catch (const std::exception& e) {
          throw StepContext{"training set", n}.wrap(e);
        }
      }
    }

    // pmCDR parameters from one- and two-step training sets at the base level.
    PmCdrModel pmModel;
    bool pmReady = false;
    std::string pmFailure;
    if (has_method(config, "pmcdr")) {
      try {
        const std::vector<int> baseLevel = {1};
        TrainingSet epsSets[2];
        for (int n = 1; n <= 2; ++n) {
          SubstitutionPolicy policy = config.policy;
          policy.seed = child_seed(config.masterSeed, seed_role::kTrainingCircuit,
                                   {static_cast<std::uint64_t>(n)});
          const Circuit interest = trotter_circuit(config.model, {config.grid.dt, n});
          const auto evaluator =
              make_noise_evaluator(config.noise, config.initial, obs, config.shots);
          epsSets[n - 1] = make_training_set(interest, policy, config.trainingCount,
                                             baseLevel, evaluator, obs, config.initial);
        }
        pmModel.traceTerm = obs.trace_term();
        pmModel.eps1 = fit_epsilon(epsSets[0], pmModel.traceTerm);
        pmModel.eps2 = fit_epsilon(epsSets[1], pmModel.traceTerm);
        pmModel.alpha = fit_alpha(pmModel.eps1, pmModel.eps2);
        pmReady = true;
      } catch (const std::exception& e) {
        pmFailure = std::string("pmcdr model fit failed: ") + e.what();
      }
    }

    const std::size_t baseIndex = 0;  // levels are validated to start at 1

    for (const std::string& method : config.methods) {
      MethodSeries series;
      series.method = method;
      series.repeatValues.assign(static_cast<std::size_t>(nSteps),
                                 std::vector<double>(static_cast<std::size_t>(nRepeats),
                                                     std::numeric_limits<double>::quiet_NaN()));
      std::string failure;

      for (int n = 1; n <= nSteps && failure.empty(); ++n) {
        const auto si = static_cast<std::size_t>(n - 1);
        for (int r = 0; r < nRepeats && failure.empty(); ++r) {
          const auto ri = static_cast<std::size_t>(r);
          const double rawValue = measured[oi][baseIndex][si][ri];
          try {
            if (method == "raw") {
              series.repeatValues[si][ri] = rawValue;
            } else if (method == "zne") {
              std::vector<double> perLevel(nLevels);
              for (std::size_t li = 0; li < nLevels; ++li)
                perLevel[li] = measured[oi][li][si][ri];
              series.repeatValues[si][ri] = zne(perLevel, config.levels);
            } else if (method == "cdr") {
              const std::uint64_t seed = child_seed(
                  config.masterSeed, seed_role::kBootstrap,
                  {static_cast<std::uint64_t>(oi), kMethodTagCdr,
                   static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)});
              series.repeatValues[si][ri] = bootstrap_fit(
                  stepSets[si],
                  [rawValue](const TrainingSet& subset) {
                    return apply_cdr(fit_cdr(subset), rawValue);
                  },
                  kBootstrapSubsets, kBootstrapSize, seed);
            } else if (method == "vncdr") {
              std::vector<double> perLevel(nLevels);
              for (std::size_t li = 0; li < nLevels; ++li)
                perLevel[li] = measured[oi][li][si][ri];
              const std::uint64_t seed = child_seed(
                  config.masterSeed, seed_role::kBootstrap,
                  {static_cast<std::uint64_t>(oi), kMethodTagVnCdr,
                   static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)});
              series.repeatValues[si][ri] = bootstrap_fit(
                  stepSets[si],
                  [&perLevel](const TrainingSet& subset) {
                    return apply_vncdr(fit_vncdr(subset), perLevel);
                  },
                  kBootstrapSubsets, kBootstrapSize, seed);
            } else {  // pmcdr
              if (!pmReady) {
                failure = pmFailure;
                break;
              }
              series.repeatValues[si][ri] = apply_pmcdr(pmModel, rawValue, n);
            }
          } catch (const std::exception& e) {
            failure = std::string(method) + " (step " + std::to_string(n) + ", repeat " +
                      std::to_string(r) + "): " + e.what();
          }
        }
      }

      series.median.assign(static_cast<std::size_t>(nSteps),
                           std::numeric_limits<double>::quiet_NaN());
      series.q25 = series.median;
      series.q75 = series.median;
      if (failure.empty()) {
        for (int n = 1; n <= nSteps; ++n) {
          const auto si = static_cast<std::size_t>(n - 1);
          std::vector<double> sorted = series.repeatValues[si];
          std::sort(sorted.begin(), sorted.end());
          series.median[si] = quantile_sorted(sorted, 0.5);
          series.q25[si] = quantile_sorted(sorted, 0.25);
          series.q75[si] = quantile_sorted(sorted, 0.75);
        }
      } else {
        series.failed = true;
        series.failureReason = failure;
      }
      obsReport.methods.push_back(std::move(series));
    }

    obsReport.errorByMethod.resize(obsReport.methods.size(),
                                   std::numeric_limits<double>::quiet_NaN());
    for (std::size_t mi = 0; mi < obsReport.methods.size(); ++mi) {
      if (obsReport.methods[mi].failed) continue;
      obsReport.errorByMethod[mi] =
          mean_absolute_error(obsReport.methods[mi].median, obsReport.trotterExact);
    }
  }
  return report;
}

std::vector<std::string> emit(const RunReport& report, const std::string& outDir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) throw io_error("emit: cannot create output directory '" + outDir + "'");

  std::vector<std::string> written;
  const int nRepeats = report.config.repeats;

  for (const ObservableReport& obsReport : report.observables) {
    std::ostringstream os;
    os << "t,method,median,q25,q75";
    for (int r = 1; r <= nRepeats; ++r) os << ",r" << r;
    os << '\n';

    auto reference_row = [&](std::size_t ti, const char* name, double value) {
      os << format_double(obsReport.times[ti]) << ',' << name << ',' << format_double(value)
         << ',' << format_double(value) << ',' << format_double(value);
      for (int r = 0; r < nRepeats; ++r) os << ',' << format_double(value);
      os << '\n';
    };

    for (std::size_t ti = 0; ti < obsReport.times.size(); ++ti) {
      reference_row(ti, "exact", obsReport.exact[ti]);
      reference_row(ti, "trotterExact", obsReport.trotterExact[ti]);
      for (const MethodSeries& series : obsReport.methods) {
        os << format_double(obsReport.times[ti]) << ',' << series.method << ','
           << format_double(series.median[ti]) << ',' << format_double(series.q25[ti]) << ','
           << format_double(series.q75[ti]);
        for (int r = 0; r < nRepeats; ++r)
          os << ',' << format_double(series.repeatValues[ti][static_cast<std::size_t>(r)]);
        os << '\n';
      }
    }
    const std::string path =
        (fs::path(outDir) / ("series_" + obsReport.observableId + ".csv")).string();
    write_text_file(path, os.str());
    written.push_back(path);
  }

  if (!report.observables.empty()) {
    std::ostringstream os;
    os << "observableId,method,meanAbsError\n";
    for (const ObservableReport& obsReport : report.observables)
      for (std::size_t mi = 0; mi < obsReport.methods.size(); ++mi)
        os << obsReport.observableId << ',' << obsReport.methods[mi].method << ','
           << format_double(obsReport.errorByMethod[mi]) << '\n';
    const std::string path = (fs::path(outDir) / "errors.csv").string();
    write_text_file(path, os.str());
    written.push_back(path);
  }

  {
    nlohmann::ordered_json manifest;
    manifest["project"] = "quenchmit";
    manifest["version"] = kVersion;
    std::ostringstream hash;
    hash << std::hex << fnv1a(config_canonical_text(report.config));
    manifest["configHash"] = hash.str();
    manifest["masterSeed"] = report.config.masterSeed;
    manifest["levels"] = report.config.levels;
    manifest["shots"] = report.config.shots;
    manifest["repeats"] = report.config.repeats;
    manifest["methods"] = report.config.methods;
    std::vector<std::string> obsIds;
    for (const Observable& obs : report.config.observables) obsIds.push_back(obs.id());
    manifest["observables"] = obsIds;
    std::vector<std::string> fileNames;
    for (const std::string& path : written)
      fileNames.push_back(fs::path(path).filename().string());
    manifest["files"] = fileNames;
    nlohmann::ordered_json failures = nlohmann::ordered_json::object();
    for (const ObservableReport& obsReport : report.observables)
      for (const MethodSeries& series : obsReport.methods)
        if (series.failed)
          failures[obsReport.observableId + "." + series.method] = series.failureReason;
    manifest["failedMethods"] = failures;
    const std::string path = (fs::path(outDir) / "manifest.json").string();
    write_text_file(path, manifest.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace quenchmit
