import math

import pytest

import quenchmit as qm


def test_version_and_module_surface():
    assert qm.__version__ == "0.1.0"
    assert callable(qm.run_experiment)


def test_circuit_shape():
    params = qm.ModelParams(J=1.0, hX=0.5, hZ=0.9, L=9)
    stats = qm.circuit_stats(qm.trotter_circuit(params, qm.TimeGrid(0.25, 16)))
    assert (stats.depth, stats.cnot_count, stats.non_clifford_count) == (176, 256, 416)

    step = qm.circuit_stats(qm.trotter_step(params, 0.25))
    assert step.non_clifford_count == 26

    folded = qm.fold_identity(qm.trotter_step(params, 0.25), 3)
    assert qm.circuit_stats(folded).cnot_count == 48


def test_circuit_text_roundtrip():
    params = qm.ModelParams(J=1.0, hX=0.5, hZ=0.9, L=4)
    circuit = qm.trotter_circuit(params, qm.TimeGrid(0.2, 2))
    again = qm.circuit_from_text(circuit.to_text())
    assert again.to_text() == circuit.to_text()
    assert again.n_qubits == 4


def test_trotter_converges_to_exact_evolution():
    params = qm.ModelParams(J=1.0, hX=0.5, hZ=0.9, L=5)
    initial = qm.ProductState.meson(5, 2, 1)
    obs = qm.Observable.magnetization(3)

    circuit = qm.trotter_circuit(params, qm.TimeGrid(0.01, 100))
    probs = qm.run_exact(circuit, initial)
    trotter = qm.expectation_from_probs(obs, probs, 5)

    exact = qm.exact_evolve(params, initial, [1.0], [obs])[0].values[0]
    assert abs(trotter - exact) < 5e-3


def test_global_depolarizing_shrinks_and_cdr_undoes_it():
    params = qm.ModelParams(J=1.0, hX=0.5, hZ=0.9, L=4)
    initial = qm.ProductState.all_up(4)
    obs = qm.Observable.magnetization(2)
    grid = qm.TimeGrid(0.3, 3)
    eps = 0.2

    circuit = qm.trotter_circuit(params, grid)
    exact = qm.expectation_from_probs(obs, qm.run_exact(circuit, initial), 4)

    noise = qm.NoiseModel(global_eps=eps)
    evaluator = qm.make_noise_evaluator(noise, initial, obs, 0)
    survival = (1.0 - eps) ** grid.nSteps
    assert evaluator(circuit, 1, 0) == pytest.approx(survival * exact, abs=1e-12)

    policy = qm.SubstitutionPolicy(seed=5)
    training = qm.make_training_set(circuit, policy, 8, [1], evaluator, obs, initial)
    fit = qm.fit_cdr(training)
    assert fit.a1 == pytest.approx(1.0 / survival, abs=1e-9)
    mitigated = qm.apply_cdr(fit, evaluator(circuit, 1, 0))
    assert mitigated == pytest.approx(exact, abs=1e-9)


def test_two_kink_spectrum_ladder_and_frequencies():
    params = qm.ModelParams(J=1.0, hX=0.0, hZ=0.7, L=6)
    spectrum = qm.two_kink_spectrum(params)
    assert spectrum.energies == pytest.approx([1.4 * n for n in range(1, 6)], abs=1e-12)
    freqs = qm.meson_frequencies(spectrum)
    assert freqs == pytest.approx([1.4] * 4, abs=1e-12)
    masses = qm.meson_masses(freqs, 2.0)
    assert masses[0] == 2.0


def test_fit_damped_cosine_recovers_frequency():
    times = [0.1 * i for i in range(1, 61)]
    values = [
        1.2 * math.exp(-0.1 * t) * math.cos(2.0 * t) + 0.05 * t + 0.3 for t in times
    ]
    series = qm.ObservableSeries(times, values)
    fit = qm.fit_damped_cosine(series, 6.0)
    assert fit.converged
    assert fit.a3 == pytest.approx(2.0, abs=1e-5)


def test_sample_counts_deterministic():
    dist = [0.25, 0.25, 0.25, 0.25]
    a = qm.sample_counts(dist, 1000, 42)
    b = qm.sample_counts(dist, 1000, 42)
    assert a.counts == b.counts
    assert sum(a.counts.values()) == 1000
    assert qm.estimate_magnetization(a, 1) == pytest.approx(
        sum((1 if bits[0] == "0" else -1) * c for bits, c in a.counts.items()) / 1000
    )


def test_run_experiment_and_emit(tmp_path):
    ini = """
[model]
L = 3
hX = 0.5
hZ = 0.9

[grid]
dt = 0.2
nSteps = 2

[experiment]
shots = 0
repeats = 2
methods = raw, zne
levels = 1, 3
masterSeed = 9

[observables]
list = mz_2
"""
    config = qm.parse_config(ini)
    report = qm.run_experiment(config)
    obs = report.observables[0]
    assert obs.observable_id == "mz_2"
    # noiseless raw equals the step-circuit reference
    raw = obs.methods[0]
    assert raw.median == pytest.approx(obs.trotter_exact, abs=1e-12)
    assert obs.error_by_method[0] == pytest.approx(0.0, abs=1e-12)

    files = qm.emit(report, str(tmp_path))
    names = sorted(f.rsplit("/", 1)[-1] for f in files)
    assert names == ["errors.csv", "manifest.json", "series_mz_2.csv"]


def test_error_types():
    with pytest.raises(ValueError):
        qm.parse_config("[model]\nL = 3\nbogus = 1\n")
    with pytest.raises(ArithmeticError):
        qm.zne([0.5], [1])
    with pytest.raises(ValueError):
        qm.ProductState.meson(5, 4, 3)
    with pytest.raises(ValueError):
        qm.build_hamiltonian(qm.ModelParams(L=15))
