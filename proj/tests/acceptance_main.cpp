// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "quenchmit/analysis.hpp"
#include "quenchmit/circuit.hpp"
#include "quenchmit/config.hpp"
#include "quenchmit/experiment.hpp"
#include "quenchmit/io.hpp"
#include "quenchmit/mitigation.hpp"
#include "quenchmit/model.hpp"
#include "quenchmit/noise.hpp"
#include "quenchmit/observable.hpp"
#include "quenchmit/seeds.hpp"
#include "quenchmit/simulator.hpp"
#include "quenchmit/training.hpp"

namespace {

using quenchmit::Circuit;
using quenchmit::ExperimentConfig;
using quenchmit::ModelParams;
using quenchmit::NoiseModel;
using quenchmit::Observable;
using quenchmit::ProductState;
using quenchmit::SubstitutionPolicy;
using quenchmit::TimeGrid;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Per-step noiseless series of the step circuit for one observable.
std::vector<double> trotter_series(const ModelParams& params, const TimeGrid& grid,
                                   const ProductState& initial, const Observable& obs) {
  const Circuit full = quenchmit::trotter_circuit(params, grid);
  const std::size_t opsPerStep = full.ops.size() / static_cast<std::size_t>(grid.nSteps);
  std::vector<std::size_t> boundaries(static_cast<std::size_t>(grid.nSteps));
  for (int n = 1; n <= grid.nSteps; ++n)
    boundaries[static_cast<std::size_t>(n - 1)] = opsPerStep * static_cast<std::size_t>(n);
  const auto snaps = quenchmit::run_noisy_snapshots(full, initial, NoiseModel{}, boundaries);
  std::vector<double> values(snaps.size());
  for (std::size_t i = 0; i < snaps.size(); ++i)
    values[i] = quenchmit::expectation_from_probs(obs, snaps[i], params.L);
  return values;
}

Outcome circuit_shape_identities() {
  const ModelParams params{1.0, 0.5, 0.9, 9};
  const auto deep = quenchmit::circuit_stats(quenchmit::trotter_circuit(params, {0.25, 16}));
  const auto mid = quenchmit::circuit_stats(quenchmit::trotter_circuit(params, {0.5, 10}));
  const auto step = quenchmit::circuit_stats(quenchmit::trotter_step(params, 0.25));
  const ModelParams noHz{1.0, 0.5, 0.0, 9};
  const auto stepNoHz = quenchmit::circuit_stats(quenchmit::trotter_step(noHz, 0.25));

  Outcome o;
  o.pass = deep.depth == 176 && deep.cnotCount == 256 && mid.depth == 110 &&
           mid.cnotCount == 160 && step.nonCliffordCount == 26 &&
           step.nonCliffordCount - stepNoHz.nonCliffordCount == 9;
  o.detail = "16 steps: depth " + std::to_string(deep.depth) + ", cnots " +
             std::to_string(deep.cnotCount) + "; 10 steps: depth " + std::to_string(mid.depth) +
             ", cnots " + std::to_string(mid.cnotCount) + "; per-step non-Clifford " +
             std::to_string(step.nonCliffordCount) + " -> " +
             std::to_string(stepNoHz.nonCliffordCount) + " at hZ=0";
  return o;
}

Outcome trotter_convergence() {
  const ModelParams params{1.0, 0.5, 0.9, 9};
  const ProductState initial = ProductState::all_up(9);
  const Observable obs = Observable::magnetization(5);

  auto max_error = [&](double dt, int nSteps) {
    const TimeGrid grid{dt, nSteps};
    const auto trotter = trotter_series(params, grid, initial, obs);
    const auto exact = quenchmit::exact_evolve(params, initial, grid.times(), {obs});
    double worst = 0.0;
    for (std::size_t i = 0; i < trotter.size(); ++i)
      worst = std::max(worst, std::abs(trotter[i] - exact[0].values[i]));
    return worst;
  };

  const double coarse = max_error(0.05, 100);
  const double fine = max_error(0.025, 200);
  const double ratio = coarse / fine;

  Outcome o;
  o.pass = coarse <= 0.05 && ratio >= 1.5 && ratio <= 2.5;
  o.detail = "max error " + fmt(coarse) + " at dt=0.05, " + fmt(fine) +
             " at dt=0.025, ratio " + fmt(ratio) + " (want <=0.05 and ratio in [1.5,2.5])";
  return o;
}

ExperimentConfig depolarizing_config(std::int64_t shots, int repeats) {
  ExperimentConfig cfg;
  cfg.model = {1.0, 0.5, 0.9, 9};
  cfg.initial = ProductState::all_up(9);
  cfg.grid = {0.5, 10};
  cfg.noise = {0.0, 0.0, 0.0, 0.2};
  cfg.levels = {1, 3};
  cfg.shots = shots;
  cfg.repeats = repeats;
  cfg.methods = {"raw", "cdr", "vncdr", "pmcdr"};
  cfg.trainingCount = 50;
  cfg.observables = {Observable::magnetization(5)};
  cfg.masterSeed = 2026;
  return cfg;
}

Outcome depolarizing_exactness() {
  // Exact mode: every data-driven method inverts the global channel outright.
  const auto exactReport = quenchmit::run_experiment(depolarizing_config(0, 2));
  const auto& exactObs = exactReport.observables[0];
  double worstExact = 0.0;
  for (std::size_t mi = 1; mi < exactObs.methods.size(); ++mi)
    for (std::size_t ti = 0; ti < exactObs.trotterExact.size(); ++ti)
      worstExact = std::max(worstExact, std::abs(exactObs.methods[mi].median[ti] -
                                                 exactObs.trotterExact[ti]));

  // Shot mode: deviations stay within 4x the binomial error amplified by the
  // inverse survival of the composed channel at the base level.
  const std::int64_t shots = 8192;
  const auto shotReport = quenchmit::run_experiment(depolarizing_config(shots, 6));
  const auto& shotObs = shotReport.observables[0];
  double worstRatio = 0.0;
  for (std::size_t mi = 1; mi < shotObs.methods.size(); ++mi) {
    for (std::size_t ti = 0; ti < shotObs.trotterExact.size(); ++ti) {
      const int n = static_cast<int>(ti) + 1;
      const double survival = std::pow(1.0 - 0.2, n);
      const double noisy = survival * shotObs.trotterExact[ti];
      const double shotSe =
          std::sqrt(std::max(0.0, 1.0 - noisy * noisy) / static_cast<double>(shots));
      const double propagated = shotSe / survival;
      const double deviation = std::abs(shotObs.methods[mi].median[ti] - shotObs.trotterExact[ti]);
      worstRatio = std::max(worstRatio, deviation / propagated);
    }
  }

  Outcome o;
  o.pass = worstExact <= 1e-10 && worstRatio <= 4.0;
  o.detail = "exact-mode worst |dev| " + fmt(worstExact) + " (want <=1e-10); shot-mode worst dev/se " +
             fmt(worstRatio) + " (want <=4)";
  return o;
}

Outcome pmcdr_consistency() {
  const double eps = 0.2;
  const ModelParams params{1.0, 0.5, 0.9, 9};
  const ProductState initial = ProductState::all_up(9);
  const Observable obs = Observable::magnetization(5);
  const NoiseModel noise{0.0, 0.0, 0.0, eps};
  const double dt = 0.5;
  const std::uint64_t masterSeed = 7;

  const auto evaluator = quenchmit::make_noise_evaluator(noise, initial, obs, 0);
  quenchmit::TrainingSet sets[2];
  for (int n = 1; n <= 2; ++n) {
    SubstitutionPolicy policy;
    policy.seed = quenchmit::child_seed(masterSeed, quenchmit::seed_role::kTrainingCircuit,
                                        {static_cast<std::uint64_t>(n)});
    const Circuit interest = quenchmit::trotter_circuit(params, {dt, n});
    sets[n - 1] = quenchmit::make_training_set(interest, policy, 10, {1}, evaluator, obs, initial);
  }

  quenchmit::PmCdrModel model;
  model.traceTerm = obs.trace_term();
  model.eps1 = quenchmit::fit_epsilon(sets[0], model.traceTerm);
  model.eps2 = quenchmit::fit_epsilon(sets[1], model.traceTerm);
  model.alpha = quenchmit::fit_alpha(model.eps1, model.eps2);

  double worst = 0.0;
  for (int n = 1; n <= 16; ++n) {
    const Circuit circuit = quenchmit::trotter_circuit(params, {dt, n});
    const double exact = quenchmit::expectation_from_probs(
        obs, quenchmit::run_exact(circuit, initial), params.L);
    const double noisy = evaluator(circuit, 1, 0);
    worst = std::max(worst, std::abs(quenchmit::apply_pmcdr(model, noisy, n) - exact));
  }

  Outcome o;
  o.pass = std::abs(model.alpha - 1.0) <= 1e-6 && worst <= 1e-10;
  o.detail = "alpha " + fmt(model.alpha) + " (want 1 within 1e-6); worst |dev| over 16 step counts " +
             fmt(worst) + " (want <=1e-10)";
  return o;
}

Outcome mitigation_ordering() {
  struct StateCase {
    ProductState initial;
    Observable obs;
  };
  const std::vector<StateCase> cases = {
      {ProductState::all_up(9), Observable::magnetization(5)},
      {ProductState::meson(9, 4, 1), Observable::magnetization(4)},
      {ProductState::meson(9, 4, 2), Observable::magnetization(4)},
  };

  int ordered = 0;
  std::string perSeed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    double mean[4] = {0.0, 0.0, 0.0, 0.0};  // raw, zne, cdr, vncdr
    for (const StateCase& c : cases) {
      ExperimentConfig cfg;
      cfg.model = {1.0, 0.5, 0.9, 9};
      cfg.initial = c.initial;
      cfg.grid = {0.5, 10};
      cfg.noise = {0.01, 0.0, 0.02, 0.0};
      cfg.levels = {1, 3};
      cfg.shots = 8192;
      cfg.repeats = 6;
      cfg.methods = {"raw", "zne", "cdr", "vncdr"};
      cfg.trainingCount = 50;
      cfg.observables = {c.obs};
      cfg.masterSeed = seed;
      const auto report = quenchmit::run_experiment(cfg);
      for (int mi = 0; mi < 4; ++mi)
        mean[mi] += report.observables[0].errorByMethod[static_cast<std::size_t>(mi)] / 3.0;
    }
    const bool ok = mean[2] <= mean[1] && mean[3] <= mean[1] && mean[1] <= mean[0];
    ordered += ok ? 1 : 0;
    std::cerr << "  ordering seed " << seed << ": raw " << fmt(mean[0]) << ", zne "
              << fmt(mean[1]) << ", cdr " << fmt(mean[2]) << ", vncdr " << fmt(mean[3])
              << (ok ? "" : "  [out of order]") << '\n';
    perSeed += ok ? 'y' : 'n';
  }

  Outcome o;
  o.pass = ordered >= 9;
  o.detail = std::to_string(ordered) + "/10 seeds ordered cdr<=zne<=raw and vncdr<=zne<=raw [" +
             perSeed + "] (want >=9)";
  return o;
}

Outcome meson_frequency_closure() {
  const ProductState initial = ProductState::meson(9, 4, 1);
  const Observable obs = Observable::magnetization(4);
  const double tMax = 3.0;
  const double dt = 0.1;
  std::vector<double> times;
  for (int i = 1; i * dt <= tMax + 1e-12; ++i) times.push_back(i * dt);

  bool pass = true;
  std::string detail;
  for (double hZ : {0.5, 0.65, 0.75, 0.9}) {
    const ModelParams params{1.0, 0.5, hZ, 9};
    const auto series = quenchmit::exact_evolve(params, initial, times, {obs});
    const auto fit = quenchmit::fit_damped_cosine(series[0], tMax);
    const auto freqs = quenchmit::meson_frequencies(quenchmit::two_kink_spectrum(params, 0.0));
    const double omega1 = freqs[1];
    const double rel = std::abs(fit.a3 - omega1) / omega1;
    pass = pass && fit.converged && rel <= 0.10;
    if (!detail.empty()) detail += ", ";
    detail += "hZ=" + fmt(hZ) + ": a3 " + fmt(fit.a3) + " vs omega1 " + fmt(omega1) + " (" +
              fmt(100.0 * rel) + "%)";
  }

  Outcome o;
  o.pass = pass;
  o.detail = detail;
  return o;
}

Outcome two_kink_oracle() {
  struct Case {
    ModelParams params;
    double k;
  };
  const std::vector<Case> cases = {
      {{1.0, 0.5, 0.9, 9}, 0.0},
      {{1.0, 0.5, 0.5, 9}, 1.2},
      {{1.3, 1.1, 0.3, 9}, std::numbers::pi},
  };

  double worstDense = 0.0;
  for (const Case& c : cases) {
    const auto spectrum = quenchmit::two_kink_spectrum(c.params, c.k);
    const int m = c.params.L - 1;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m, m);
    const double hop = 2.0 * c.params.J * c.params.hX * std::cos(0.5 * c.k);
    for (int n = 1; n <= m; ++n) {
      dense(n - 1, n - 1) = 2.0 * c.params.J * c.params.hZ * n;
      if (n < m) {
        dense(n - 1, n) = hop;
        dense(n, n - 1) = hop;
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
    for (int i = 0; i < m; ++i)
      worstDense = std::max(worstDense,
                            std::abs(spectrum.energies[static_cast<std::size_t>(i)] -
                                     solver.eigenvalues()[i]));
  }

  const ModelParams frozen{1.0, 0.0, 0.7, 9};
  const auto ladder = quenchmit::two_kink_spectrum(frozen, 0.3);
  bool exactLadder = true;
  for (int n = 1; n <= 8; ++n)
    exactLadder = exactLadder &&
                  ladder.energies[static_cast<std::size_t>(n - 1)] == 2.0 * 1.0 * 0.7 * n;

  Outcome o;
  o.pass = worstDense <= 1e-10 && exactLadder;
  o.detail = "worst |tridiagonal - dense| " + fmt(worstDense) +
             " (want <=1e-10); hX=0 ladder exact: " + (exactLadder ? "yes" : "no");
  return o;
}

Outcome dispersion_trend() {
  const ModelParams params{1.0, 0.5, 0.9, 9};
  const TimeGrid grid{0.5, 8};
  const ProductState initial = ProductState::all_up(9);
  const Observable obs = Observable::magnetization(5);
  const NoiseModel noise{0.01, 0.0, 0.02, 0.0};

  const Circuit interest = quenchmit::trotter_circuit(params, grid);
  const auto evaluator = quenchmit::make_noise_evaluator(noise, initial, obs, 0);
  const double interestNoisy = evaluator(interest, 1, 0);
  const double interestExact = quenchmit::expectation_from_probs(
      obs, quenchmit::run_exact(interest, initial), params.L);

  double mean1 = 0.0;
  double mean2 = 0.0;
  const int nSeeds = 10;
  for (int seed = 1; seed <= nSeeds; ++seed) {
    for (int method : {1, 2}) {
      SubstitutionPolicy policy;
      policy.method = method;
      policy.seed = static_cast<std::uint64_t>(seed);
      const auto set =
          quenchmit::make_training_set(interest, policy, 50, {1}, evaluator, obs, initial);
      const double d = quenchmit::dispersion(set, interestNoisy, interestExact);
      (method == 1 ? mean1 : mean2) += d / nSeeds;
    }
    std::cerr << "  dispersion seed " << seed << " done\n";
  }

  Outcome o;
  o.pass = mean2 <= mean1;
  o.detail = "mean dispersion over " + std::to_string(nSeeds) + " seeds: method 1 " + fmt(mean1) +
             ", method 2 " + fmt(mean2) + " (want method 2 <= method 1)";
  return o;
}

Outcome determinism() {
  namespace fs = std::filesystem;
  ExperimentConfig cfg;
  cfg.model = {1.0, 0.5, 0.9, 5};
  cfg.initial = ProductState::meson(5, 2, 1);
  cfg.grid = {0.5, 4};
  cfg.noise = {0.01, 0.002, 0.02, 0.05};
  cfg.levels = {1, 3};
  cfg.shots = 2048;
  cfg.repeats = 3;
  cfg.methods = {"raw", "zne", "cdr", "vncdr", "pmcdr"};
  cfg.trainingCount = 8;
  cfg.observables = {Observable::magnetization(3), Observable::zz(2, 4)};
  cfg.masterSeed = 424242;

  const fs::path base = fs::temp_directory_path() / "quenchmit_acceptance_determinism";
  const fs::path dirA = base / "a";
  const fs::path dirB = base / "b";
  fs::remove_all(base);

  const auto filesA = quenchmit::emit(quenchmit::run_experiment(cfg), dirA.string());
  const auto filesB = quenchmit::emit(quenchmit::run_experiment(cfg), dirB.string());

  bool identical = filesA.size() == filesB.size();
  std::string mismatch;
  for (std::size_t i = 0; identical && i < filesA.size(); ++i) {
    if (fs::path(filesA[i]).filename() != fs::path(filesB[i]).filename()) {
      identical = false;
      mismatch = "file list differs";
      break;
    }
    if (quenchmit::read_text_file(filesA[i]) != quenchmit::read_text_file(filesB[i])) {
      identical = false;
      mismatch = fs::path(filesA[i]).filename().string() + " differs";
    }
  }
  fs::remove_all(base);

  Outcome o;
  o.pass = identical;
  o.detail = identical ? std::to_string(filesA.size()) + " files byte-identical across reruns"
                       : mismatch;
  return o;
}

int gFailures = 0;
std::vector<int> gSelected;  // empty = run everything

void run_criterion(int index, const std::string& name, Outcome (*fn)(), double limitSeconds) {
  if (!gSelected.empty() &&
      std::find(gSelected.begin(), gSelected.end(), index) == gSelected.end())
    return;
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  Outcome outcome;
  try {
    outcome = fn();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double seconds = std::chrono::duration<double>(clock::now() - start).count();
  bool pass = outcome.pass;
  std::string detail = outcome.detail;
  if (limitSeconds > 0.0 && seconds > limitSeconds) {
    pass = false;
    detail += "; runtime " + fmt(seconds) + "s exceeds " + fmt(limitSeconds) + "s";
  }
  if (!pass) ++gFailures;
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << index << " — " << name << ": "
            << detail << " [" << fmt(seconds) << "s]" << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) gSelected.push_back(std::atoi(argv[i]));
  run_criterion(1, "circuit shape identities", circuit_shape_identities, 1.0);
  run_criterion(2, "trotter convergence", trotter_convergence, 60.0);
  run_criterion(3, "depolarizing exactness", depolarizing_exactness, 300.0);
  run_criterion(4, "pmcdr model consistency", pmcdr_consistency, 0.0);
  run_criterion(5, "mitigation ordering", mitigation_ordering, 1800.0);
  run_criterion(6, "meson frequency closure", meson_frequency_closure, 60.0);
  run_criterion(7, "two-kink spectrum oracle", two_kink_oracle, 0.0);
  run_criterion(8, "training-set dispersion trend", dispersion_trend, 900.0);
  run_criterion(9, "determinism", determinism, 0.0);

  if (gFailures == 0) {
    if (gSelected.empty()) std::cout << "all 9 criteria passed" << std::endl;
    return 0;
  }
  std::cout << gFailures << " of 9 criteria failed" << std::endl;
  return 1;
}
