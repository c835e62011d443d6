"""Trotterized Ising quench simulation with data-driven error mitigation.

Thin Python facade over the C++ core: build circuits, simulate them under
synthetic noise, construct near-Clifford training sets, and apply ZNE / CDR /
vnCDR / pmCDR mitigation, with exact-diagonalization and two-kink spectral
references for validation.
"""

from ._core import (  # noqa: F401
    CapacityError,
    CdrFit,
    Circuit,
    CircuitStats,
    ConfigError,
    CosineFit,
    CountsTable,
    ExperimentConfig,
    IoError,
    MethodSeries,
    ModelParams,
    NoiseModel,
    NumericError,
    Observable,
    ObservableReport,
    ObservableSeries,
    PmCdrModel,
    ProductState,
    RunReport,
    SubstitutionPolicy,
    TimeGrid,
    TrainingRecord,
    TrainingSet,
    TwoKinkSpectrum,
    VnCdrFit,
    __version__,
    apply_cdr,
    apply_pmcdr,
    apply_vncdr,
    build_hamiltonian,
    circuit_from_text,
    circuit_stats,
    composed_global_eps,
    config_canonical_text,
    connected_correlation,
    dispersion,
    emit,
    estimate_kink_density,
    estimate_magnetization,
    estimate_observable,
    estimate_zz,
    exact_evolve,
    exact_probabilities,
    expectation_from_probs,
    fit_alpha,
    fit_cdr,
    fit_damped_cosine,
    fit_epsilon,
    fit_vncdr,
    fold_identity,
    gate_distance,
    load_config,
    make_noise_evaluator,
    make_training_circuit,
    make_training_set,
    mean_absolute_error,
    meson_frequencies,
    meson_masses,
    observable_from_id,
    parse_config,
    run_exact,
    run_experiment,
    run_noisy,
    run_noisy_density,
    sample_counts,
    spectrum_to_csv,
    trotter_circuit,
    trotter_step,
    two_kink_spectrum,
    zne,
)
