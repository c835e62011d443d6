#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "quenchmit/analysis.hpp"
#include "quenchmit/circuit.hpp"
#include "quenchmit/config.hpp"
#include "quenchmit/experiment.hpp"
#include "quenchmit/mitigation.hpp"
#include "quenchmit/model.hpp"
#include "quenchmit/noise.hpp"
#include "quenchmit/observable.hpp"
#include "quenchmit/simulator.hpp"
#include "quenchmit/training.hpp"
#include "quenchmit/version.hpp"

namespace py = pybind11;
using namespace quenchmit;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trotterized Ising quench simulation with data-driven error mitigation";
  m.attr("__version__") = kVersion;

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<capacity_error>(m, "CapacityError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<io_error>(m, "IoError", PyExc_OSError);

  // --- model -----------------------------------------------------------------
  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double J, double hX, double hZ, int L) {
             return ModelParams{J, hX, hZ, L};
           }),
           py::arg("J") = 1.0, py::arg("hX") = 0.0, py::arg("hZ") = 0.0, py::arg("L") = 1)
      .def_readwrite("J", &ModelParams::J)
      .def_readwrite("hX", &ModelParams::hX)
      .def_readwrite("hZ", &ModelParams::hZ)
      .def_readwrite("L", &ModelParams::L)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(J=" + std::to_string(p.J) + ", hX=" + std::to_string(p.hX) +
               ", hZ=" + std::to_string(p.hZ) + ", L=" + std::to_string(p.L) + ")";
      });

  py::class_<ProductState>(m, "ProductState")
      .def(py::init<std::vector<int>>(), py::arg("spins"))
      .def_static("all_up", &ProductState::all_up, py::arg("L"))
      .def_static("kink", &ProductState::kink, py::arg("L"), py::arg("i"))
      .def_static("meson", &ProductState::meson, py::arg("L"), py::arg("i"), py::arg("n"))
      .def_property_readonly("spins", [](const ProductState& s) { return s.spins; })
      .def_property_readonly("L", &ProductState::L)
      .def("basis_index", &ProductState::basis_index)
      .def("bitstring", &ProductState::bitstring)
      .def("__repr__",
           [](const ProductState& s) { return "ProductState('" + s.bitstring() + "')"; });

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init([](double dt, int nSteps) {
             return TimeGrid{dt, nSteps};
           }),
           py::arg("dt"), py::arg("nSteps"))
      .def_readwrite("dt", &TimeGrid::dt)
      .def_readwrite("nSteps", &TimeGrid::nSteps)
      .def("times", &TimeGrid::times);

  py::class_<Observable>(m, "Observable")
      .def_static("magnetization", &Observable::magnetization, py::arg("site"))
      .def_static("zz", &Observable::zz, py::arg("i"), py::arg("j"))
      .def_static("kink_density", &Observable::kink_density, py::arg("site"),
                  py::arg("postselect_two_kink") = false)
      .def("id", &Observable::id)
      .def("trace_term", &Observable::trace_term)
      .def("__repr__", [](const Observable& o) { return "Observable('" + o.id() + "')"; });
  m.def("observable_from_id", &observable_from_id, py::arg("id"));

  py::class_<ObservableSeries>(m, "ObservableSeries")
      .def(py::init([](std::vector<double> times, std::vector<double> values,
                       const std::string& observableId) {
             ObservableSeries s;
             s.times = std::move(times);
             s.values = std::move(values);
             s.observableId = observableId;
             return s;
           }),
           py::arg("times"), py::arg("values"), py::arg("observable_id") = "")
      .def_readwrite("times", &ObservableSeries::times)
      .def_readwrite("values", &ObservableSeries::values)
      .def_readwrite("observable_id", &ObservableSeries::observableId)
      .def_readwrite("provenance", &ObservableSeries::provenance);

  m.def("build_hamiltonian", &build_hamiltonian, py::arg("params"));
  m.def("exact_evolve", &exact_evolve, py::arg("params"), py::arg("initial"), py::arg("times"),
        py::arg("observables"));
  m.def("exact_probabilities", &exact_probabilities, py::arg("params"), py::arg("initial"),
        py::arg("t"));
  m.def("expectation_from_probs", &expectation_from_probs, py::arg("observable"),
        py::arg("probs"), py::arg("L"));

  // --- circuits ----------------------------------------------------------------
  py::class_<CircuitStats>(m, "CircuitStats")
      .def_readonly("depth", &CircuitStats::depth)
      .def_readonly("cnot_count", &CircuitStats::cnotCount)
      .def_readonly("non_clifford_count", &CircuitStats::nonCliffordCount);

  py::class_<Circuit>(m, "Circuit")
      .def_property_readonly("n_qubits", [](const Circuit& c) { return c.nQubits; })
      .def_property_readonly("n_gates", [](const Circuit& c) { return c.ops.size(); })
      .def_property_readonly("dt", [](const Circuit& c) { return c.meta.dt; })
      .def_property_readonly("n_steps", [](const Circuit& c) { return c.meta.nSteps; })
      .def_property_readonly("noise_level", [](const Circuit& c) { return c.meta.noiseLevel; })
      .def("to_text", &circuit_to_text)
      .def("__repr__", [](const Circuit& c) {
        return "Circuit(n_qubits=" + std::to_string(c.nQubits) +
               ", n_gates=" + std::to_string(c.ops.size()) + ")";
      });

  m.def("trotter_step", &trotter_step, py::arg("params"), py::arg("dt"));
  m.def("trotter_circuit", &trotter_circuit, py::arg("params"), py::arg("grid"));
  m.def("fold_identity", &fold_identity, py::arg("circuit"), py::arg("level"));
  m.def("circuit_stats", &circuit_stats, py::arg("circuit"));
  m.def("circuit_from_text", &circuit_from_text, py::arg("text"));

  // --- noise and simulation ------------------------------------------------------
  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init([](double p2, double p1, double readoutFlip, double globalEps) {
             NoiseModel n{p2, p1, readoutFlip, globalEps};
             n.validate();
             return n;
           }),
           py::arg("p2") = 0.0, py::arg("p1") = 0.0, py::arg("readout_flip") = 0.0,
           py::arg("global_eps") = 0.0)
      .def_readwrite("p2", &NoiseModel::p2)
      .def_readwrite("p1", &NoiseModel::p1)
      .def_readwrite("readout_flip", &NoiseModel::readoutFlip)
      .def_readwrite("global_eps", &NoiseModel::globalEps)
      .def("is_trivial", &NoiseModel::is_trivial);
  m.def("composed_global_eps", &composed_global_eps, py::arg("eps"), py::arg("exponent"));

  py::class_<CountsTable>(m, "CountsTable")
      .def_property_readonly("counts", [](const CountsTable& t) { return t.counts; })
      .def_readonly("shots", &CountsTable::shots)
      .def_readonly("seed", &CountsTable::seed)
      .def("to_csv", &CountsTable::to_csv);

  m.def("run_exact", &run_exact, py::arg("circuit"), py::arg("initial"));
  m.def("run_noisy", &run_noisy, py::arg("circuit"), py::arg("initial"), py::arg("noise"));
  m.def("run_noisy_density", &run_noisy_density, py::arg("circuit"), py::arg("initial"),
        py::arg("noise"));
  m.def("sample_counts", &sample_counts, py::arg("distribution"), py::arg("shots"),
        py::arg("seed"));
  m.def("estimate_magnetization", &estimate_magnetization, py::arg("counts"), py::arg("site"));
  m.def("estimate_zz", &estimate_zz, py::arg("counts"), py::arg("i"), py::arg("j"));
  m.def("estimate_kink_density", &estimate_kink_density, py::arg("counts"), py::arg("site"),
        py::arg("postselect_two_kink") = false);
  m.def("estimate_observable", &estimate_observable, py::arg("observable"), py::arg("counts"));
  m.def("connected_correlation", &connected_correlation, py::arg("zz"), py::arg("mi"),
        py::arg("mj"));

  // --- training -------------------------------------------------------------------
  py::class_<SubstitutionPolicy>(m, "SubstitutionPolicy")
      .def(py::init([](double sigma, double fractionReplaced, int nonCliffordCap, int method,
                       std::uint64_t seed) {
             SubstitutionPolicy p{sigma, fractionReplaced, nonCliffordCap, method, seed};
             p.validate();
             return p;
           }),
           py::arg("sigma") = 0.5, py::arg("fraction_replaced") = 0.5,
           py::arg("non_clifford_cap") = 50, py::arg("method") = 1, py::arg("seed") = 0)
      .def_readwrite("sigma", &SubstitutionPolicy::sigma)
      .def_readwrite("fraction_replaced", &SubstitutionPolicy::fractionReplaced)
      .def_readwrite("non_clifford_cap", &SubstitutionPolicy::nonCliffordCap)
      .def_readwrite("method", &SubstitutionPolicy::method)
      .def_readwrite("seed", &SubstitutionPolicy::seed);

  py::class_<TrainingRecord>(m, "TrainingRecord")
      .def_readonly("circuit_id", &TrainingRecord::circuitId)
      .def_readonly("noisy_values", &TrainingRecord::noisyValues)
      .def_readonly("exact_value", &TrainingRecord::exactValue);

  py::class_<TrainingSet>(m, "TrainingSet")
      .def_readonly("records", &TrainingSet::records)
      .def_readonly("noise_levels", &TrainingSet::noiseLevels)
      .def_readonly("observable_id", &TrainingSet::observableId)
      .def_readonly("id", &TrainingSet::id)
      .def("to_csv", [](const TrainingSet& s) { return training_set_to_csv(s); });

  m.def("gate_distance", &gate_distance, py::arg("theta"), py::arg("n"));
  m.def("make_training_circuit",
        py::overload_cast<const Circuit&, const SubstitutionPolicy&>(&make_training_circuit),
        py::arg("circuit"), py::arg("policy"));
  m.def("make_noise_evaluator", &make_noise_evaluator, py::arg("noise"), py::arg("initial"),
        py::arg("observable"), py::arg("shots"));
  m.def("make_training_set", &make_training_set, py::arg("interest_circuit"), py::arg("policy"),
        py::arg("count"), py::arg("noise_levels"), py::arg("evaluator"), py::arg("observable"),
        py::arg("initial"));
  m.def("dispersion", &dispersion, py::arg("set"), py::arg("interest_noisy"),
        py::arg("interest_exact"));

  // --- mitigation --------------------------------------------------------------------
  py::class_<CdrFit>(m, "CdrFit")
      .def_readonly("a1", &CdrFit::a1)
      .def_readonly("a2", &CdrFit::a2);
  py::class_<VnCdrFit>(m, "VnCdrFit")
      .def_readonly("a", &VnCdrFit::a)
      .def_readonly("b", &VnCdrFit::b)
      .def_readonly("degenerate", &VnCdrFit::degenerate);
  py::class_<PmCdrModel>(m, "PmCdrModel")
      .def_readonly("eps1", &PmCdrModel::eps1)
      .def_readonly("eps2", &PmCdrModel::eps2)
      .def_readonly("alpha", &PmCdrModel::alpha)
      .def_readonly("trace_term", &PmCdrModel::traceTerm);

  m.def("fit_cdr", &fit_cdr, py::arg("set"));
  m.def("apply_cdr", &apply_cdr, py::arg("fit"), py::arg("noisy"),
        py::arg("clamp_physical") = false);
  m.def("fit_vncdr", &fit_vncdr, py::arg("set"));
  m.def("apply_vncdr", &apply_vncdr, py::arg("fit"), py::arg("noisy_per_level"),
        py::arg("clamp_physical") = false);
  m.def("zne", &zne, py::arg("values"), py::arg("levels"));
  m.def("fit_epsilon", &fit_epsilon, py::arg("set"), py::arg("trace_term"));
  m.def("fit_alpha", &fit_alpha, py::arg("eps1"), py::arg("eps2"));
  m.def(
      "apply_pmcdr",
      [](double eps1, double alpha, double traceTerm, double noisy, int nSteps) {
        PmCdrModel model;
        model.eps1 = eps1;
        model.alpha = alpha;
        model.traceTerm = traceTerm;
        return apply_pmcdr(model, noisy, nSteps);
      },
      py::arg("eps1"), py::arg("alpha"), py::arg("trace_term"), py::arg("noisy"),
      py::arg("n_steps"));

  // --- analysis -------------------------------------------------------------------------
  py::class_<TwoKinkSpectrum>(m, "TwoKinkSpectrum")
      .def_readonly("k", &TwoKinkSpectrum::k)
      .def_readonly("energies", &TwoKinkSpectrum::energies)
      .def_readonly("params", &TwoKinkSpectrum::params);
  py::class_<CosineFit>(m, "CosineFit")
      .def_readonly("a1", &CosineFit::a1)
      .def_readonly("a2", &CosineFit::a2)
      .def_readonly("a3", &CosineFit::a3)
      .def_readonly("a4", &CosineFit::a4)
      .def_readonly("a5", &CosineFit::a5)
      .def_readonly("residual", &CosineFit::residual)
      .def_readonly("t_max", &CosineFit::tMax)
      .def_readonly("converged", &CosineFit::converged);

  m.def("two_kink_spectrum", &two_kink_spectrum, py::arg("params"), py::arg("k") = 0.0);
  m.def("meson_frequencies", &meson_frequencies, py::arg("spectrum"));
  m.def("meson_masses", &meson_masses, py::arg("frequencies"), py::arg("omega0"));
  m.def("fit_damped_cosine", &fit_damped_cosine, py::arg("series"), py::arg("t_max"));
  m.def("spectrum_to_csv", &spectrum_to_csv, py::arg("spectrum"), py::arg("omega0"));

  // --- experiment harness -----------------------------------------------------------------
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("model", &ExperimentConfig::model)
      .def_readwrite("initial", &ExperimentConfig::initial)
      .def_readwrite("grid", &ExperimentConfig::grid)
      .def_readwrite("noise", &ExperimentConfig::noise)
      .def_readwrite("levels", &ExperimentConfig::levels)
      .def_readwrite("shots", &ExperimentConfig::shots)
      .def_readwrite("repeats", &ExperimentConfig::repeats)
      .def_readwrite("methods", &ExperimentConfig::methods)
      .def_readwrite("policy", &ExperimentConfig::policy)
      .def_readwrite("training_count", &ExperimentConfig::trainingCount)
      .def_readwrite("observables", &ExperimentConfig::observables)
      .def_readwrite("master_seed", &ExperimentConfig::masterSeed)
      .def("validate", &ExperimentConfig::validate);

  py::class_<MethodSeries>(m, "MethodSeries")
      .def_readonly("method", &MethodSeries::method)
      .def_readonly("median", &MethodSeries::median)
      .def_readonly("q25", &MethodSeries::q25)
      .def_readonly("q75", &MethodSeries::q75)
      .def_readonly("repeat_values", &MethodSeries::repeatValues)
      .def_readonly("failed", &MethodSeries::failed)
      .def_readonly("failure_reason", &MethodSeries::failureReason);

  py::class_<ObservableReport>(m, "ObservableReport")
      .def_readonly("observable_id", &ObservableReport::observableId)
      .def_readonly("times", &ObservableReport::times)
      .def_readonly("exact", &ObservableReport::exact)
      .def_readonly("trotter_exact", &ObservableReport::trotterExact)
      .def_readonly("methods", &ObservableReport::methods)
      .def_readonly("error_by_method", &ObservableReport::errorByMethod);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("config", &RunReport::config)
      .def_readonly("observables", &RunReport::observables);

  m.def("parse_config", &parse_config, py::arg("ini_text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("config_canonical_text", &config_canonical_text, py::arg("config"));
  m.def("run_experiment", &run_experiment, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("mean_absolute_error", &mean_absolute_error, py::arg("series"), py::arg("reference"));
  m.def("emit", &emit, py::arg("report"), py::arg("out_dir"));
}
