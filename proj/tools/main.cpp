#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quenchmit/analysis.hpp"
#include "quenchmit/circuit.hpp"
#include "quenchmit/experiment.hpp"
#include "quenchmit/io.hpp"
#include "quenchmit/version.hpp"

namespace {

struct RunOptions {
  std::string configPath;
  std::string outDir = "out";
};

struct SpectrumOptions {
  int L = 9;
  double J = 1.0;
  double hX = 0.0;
  double hZ = 0.0;
  double hzTo = 0.0;
  int hzCount = 1;
  double k = 0.0;
  double omega0 = 0.0;
  std::string outPath;
};

struct FitOptions {
  std::string inputPath;
  double tMax = 3.0;
  int tColumn = 0;
  int yColumn = 1;
};

struct StatsOptions {
  std::string circuitPath;
  int L = 0;
  double J = 1.0;
  double hX = 0.0;
  double hZ = 0.0;
  double dt = 0.1;
  int nSteps = 1;
  int level = 1;
};

int do_run(const RunOptions& opt) {
  quenchmit::ExperimentConfig config = quenchmit::load_config(opt.configPath);
  std::string outDir = opt.outDir;
  if (const char* env = std::getenv("QUENCHMIT_OUTDIR"); env != nullptr && *env != '\0')
    outDir = env;
  const quenchmit::RunReport report = quenchmit::run_experiment(config);
  const auto files = quenchmit::emit(report, outDir);
  for (const auto& path : files) std::cout << path << '\n';
  for (const auto& obsReport : report.observables)
    for (std::size_t mi = 0; mi < obsReport.methods.size(); ++mi) {
      std::cout << obsReport.observableId << ' ' << obsReport.methods[mi].method << " error ";
      if (obsReport.methods[mi].failed)
        std::cout << "failed: " << obsReport.methods[mi].failureReason << '\n';
      else
        std::cout << quenchmit::format_double(obsReport.errorByMethod[mi]) << '\n';
    }
  return 0;
}

int do_spectrum(const SpectrumOptions& opt) {
  std::vector<double> hzValues;
  if (opt.hzCount < 1) throw quenchmit::config_error("spectrum: --hz-count must be >= 1");
  if (opt.hzCount == 1) {
    hzValues.push_back(opt.hZ);
  } else {
    const double step = (opt.hzTo - opt.hZ) / static_cast<double>(opt.hzCount - 1);
    for (int i = 0; i < opt.hzCount; ++i)
      hzValues.push_back(opt.hZ + step * static_cast<double>(i));
  }

  std::string csv;
  for (std::size_t i = 0; i < hzValues.size(); ++i) {
    quenchmit::ModelParams params{opt.J, opt.hX, hzValues[i], opt.L};
    const auto spectrum = quenchmit::two_kink_spectrum(params, opt.k);
    const std::string chunk = quenchmit::spectrum_to_csv(spectrum, opt.omega0);
    if (i == 0) {
      csv = chunk;
    } else {
      csv += chunk.substr(chunk.find('\n') + 1);  // drop the repeated header
    }
  }
  if (opt.outPath.empty())
    std::cout << csv;
  else
    quenchmit::write_text_file(opt.outPath, csv);
  return 0;
}

int do_fit(const FitOptions& opt) {
  const std::string text = quenchmit::read_text_file(opt.inputPath);
  quenchmit::ObservableSeries series;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream fs(line);
    while (std::getline(fs, field, ',')) fields.push_back(field);
    const auto maxColumn = static_cast<std::size_t>(std::max(opt.tColumn, opt.yColumn));
    if (fields.size() <= maxColumn) continue;
    try {
      std::size_t usedT = 0, usedY = 0;
      const double t = std::stod(fields[static_cast<std::size_t>(opt.tColumn)], &usedT);
      const double y = std::stod(fields[static_cast<std::size_t>(opt.yColumn)], &usedY);
      if (usedT != fields[static_cast<std::size_t>(opt.tColumn)].size() ||
          usedY != fields[static_cast<std::size_t>(opt.yColumn)].size())
        continue;  // header or labeled row
      series.times.push_back(t);
      series.values.push_back(y);
    } catch (const std::exception&) {
      continue;  // header row
    }
  }
  const quenchmit::CosineFit fit = quenchmit::fit_damped_cosine(series, opt.tMax);
  nlohmann::ordered_json j;
  j["a1"] = fit.a1;
  j["a2"] = fit.a2;
  j["a3"] = fit.a3;
  j["a4"] = fit.a4;
  j["a5"] = fit.a5;
  j["residual"] = fit.residual;
  j["tMax"] = fit.tMax;
  j["converged"] = fit.converged;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int do_stats(const StatsOptions& opt) {
  quenchmit::Circuit circuit;
  if (!opt.circuitPath.empty()) {
    circuit = quenchmit::circuit_from_text(quenchmit::read_text_file(opt.circuitPath));
  } else {
    if (opt.L < 2)
      throw quenchmit::config_error("stats: give --circuit or a model via --L >= 2");
    quenchmit::ModelParams params{opt.J, opt.hX, opt.hZ, opt.L};
    circuit = quenchmit::trotter_circuit(params, {opt.dt, opt.nSteps});
  }
  if (opt.level != 1) circuit = quenchmit::fold_identity(circuit, opt.level);
  const quenchmit::CircuitStats stats = quenchmit::circuit_stats(circuit);
  nlohmann::ordered_json j;
  j["nQubits"] = circuit.nQubits;
  j["gateCount"] = circuit.ops.size();
  j["depth"] = stats.depth;
  j["cnotCount"] = stats.cnotCount;
  j["nonCliffordCount"] = stats.nonCliffordCount;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trotterized Ising quench simulation with data-driven error mitigation"};
  app.set_version_flag("--version", std::string(quenchmit::kVersion));
  app.require_subcommand(1);

  RunOptions runOpt;
  CLI::App* runCmd = app.add_subcommand("run", "run an experiment config end to end");
  runCmd->add_option("-c,--config", runOpt.configPath, "experiment config file")->required();
  runCmd->add_option("-o,--out", runOpt.outDir,
                     "output directory (QUENCHMIT_OUTDIR overrides)");

  SpectrumOptions specOpt;
  CLI::App* specCmd = app.add_subcommand("spectrum", "two-kink spectrum and meson table");
  specCmd->add_option("--L", specOpt.L, "chain length");
  specCmd->add_option("--J", specOpt.J, "coupling");
  specCmd->add_option("--hx", specOpt.hX, "transverse field");
  specCmd->add_option("--hz", specOpt.hZ, "longitudinal field (sweep start)");
  specCmd->add_option("--hz-to", specOpt.hzTo, "sweep end");
  specCmd->add_option("--hz-count", specOpt.hzCount, "sweep point count");
  specCmd->add_option("--k", specOpt.k, "momentum");
  specCmd->add_option("--omega0", specOpt.omega0, "externally measured omega0");
  specCmd->add_option("-o,--out", specOpt.outPath, "CSV output path (stdout when absent)");

  FitOptions fitOpt;
  CLI::App* fitCmd = app.add_subcommand("fit", "damped-cosine frequency fit on a CSV");
  fitCmd->add_option("-i,--input", fitOpt.inputPath, "CSV with time and value columns")
      ->required();
  fitCmd->add_option("--tmax", fitOpt.tMax, "fit window upper edge");
  fitCmd->add_option("--tcol", fitOpt.tColumn, "time column index");
  fitCmd->add_option("--ycol", fitOpt.yColumn, "value column index");

  StatsOptions statsOpt;
  CLI::App* statsCmd = app.add_subcommand("stats", "circuit statistics");
  statsCmd->add_option("--circuit", statsOpt.circuitPath, "circuit text file");
  statsCmd->add_option("--L", statsOpt.L, "chain length");
  statsCmd->add_option("--J", statsOpt.J, "coupling");
  statsCmd->add_option("--hx", statsOpt.hX, "transverse field");
  statsCmd->add_option("--hz", statsOpt.hZ, "longitudinal field");
  statsCmd->add_option("--dt", statsOpt.dt, "step length");
  statsCmd->add_option("--steps", statsOpt.nSteps, "step count");
  statsCmd->add_option("--level", statsOpt.level, "fold level");

  try {
    app.parse(argc, argv);
    if (*runCmd) return do_run(runOpt);
    if (*specCmd) return do_spectrum(specOpt);
    if (*fitCmd) return do_fit(fitOpt);
    if (*statsCmd) return do_stats(statsOpt);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const quenchmit::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const quenchmit::capacity_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
