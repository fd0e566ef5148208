import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wvasim.errors import InsufficientDataError
from wvasim.interferometer import ModePair, dark_port_state, displacement_signal, propagate
from wvasim.noise import (AllanComparison, BiasModel, ThermalDriftModel, allan_comparison,
                          allan_curve, allan_deviation, biased_estimate, biased_readout,
                          drift_rate_std, misread, random_walk_bias, simulate_bias_offset,
                          simulate_drift_experiment, thermal_drift)
from wvasim.waveguide import REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH


@pytest.fixture(scope="module")
def full_pair():
    return ModePair.solve(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH, "full")


@pytest.fixture(scope="module")
def default_runs(full_pair):
    return simulate_drift_experiment(BiasModel(), trajectories=5, modes=full_pair)


def test_biased_estimate_examples():
    assert biased_estimate(0.0, 0.01, 0.05, "mzi") == pytest.approx(0.01)
    assert biased_estimate(0.0, 0.01, 0.05, "wva") == pytest.approx(0.001)
    assert biased_estimate(0.3, 0.0, 0.05, "wva") == 0.3
    with pytest.raises(ValueError):
        biased_estimate(0.0, 0.01, 0.05, "sagnac")


@given(st.floats(-0.02, 0.02).filter(lambda b: abs(b) > 1e-6), st.floats(0.02, 0.2))
def test_bias_suppression(b, kappa):
    mzi = biased_readout(0.0, b, kappa, "mzi")
    wva = biased_readout(0.0, b, kappa, "wva")
    assert (wva / mzi) == pytest.approx(2 * kappa, rel=0.05)
    assert biased_estimate(0.0, b, kappa, "wva") / biased_estimate(0.0, b, kappa, "mzi") == pytest.approx(2 * kappa)


def test_exact_response_departs_from_linear_law():
    phis = np.linspace(0, 0.1, 11)
    for arch in ("mzi", "wva"):
        dev = np.abs(biased_readout(phis, 0.01, 0.05, arch) - biased_estimate(phis, 0.01, 0.05, arch))
        assert dev[0] < 1e-3 * 0.01
        assert np.all(np.diff(dev[:4]) > 0)
        assert np.max(dev) > 1e-6


def test_misread():
    assert misread(0.5, 0.0) == 0.5
    assert misread(0.5, 0.02) == pytest.approx(0.51)
    assert misread(0.5, -0.02) == pytest.approx(0.49)
    assert misread(1.0, 0.3) == 1.0 and misread(0.0, -0.3) == 0.0


def test_sampled_bias_offset():
    phis = np.linspace(0, 0.05, 6)
    mzi, wva = simulate_bias_offset(phis, 0.01, 0.05, photons=1e11, seed=3)
    assert np.allclose(mzi, biased_readout(phis, 0.01, 0.05, "mzi"), atol=2e-5)
    assert np.allclose(wva, biased_readout(phis, 0.01, 0.05, "wva"), atol=2e-5)


def test_random_walk_zero_sigma():
    assert np.array_equal(random_walk_bias(BiasModel(sigma_walk=0.0, steps=50)), np.zeros(50))


def test_random_walk_determinism():
    a = random_walk_bias(BiasModel(seed=99))
    b = random_walk_bias(BiasModel(seed=99))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, random_walk_bias(BiasModel(seed=100)))


def test_random_walk_variance():
    model = BiasModel(sigma_walk=1e-5, dt=0.5, steps=64)
    walks = np.array([random_walk_bias(model, seed=s) for s in range(10_000)])
    k = np.arange(1, model.steps + 1)
    expected = k * (model.sigma_walk * model.dt) ** 2
    assert np.allclose(walks.var(axis=0)[[9, 31, 63]], expected[[9, 31, 63]], rtol=0.05)


def test_bias_model_validation():
    for kwargs in ({"dt": 0.0}, {"steps": 0}, {"sigma_walk": -1.0}):
        with pytest.raises(ValueError):
            BiasModel(**kwargs)


def test_drift_defaults(default_runs):
    run = default_runs[0]
    assert run.photons_per_step == pytest.approx(1e11, rel=0.01)
    assert len(run.times) == len(run.bias) == len(run.phase_estimate_mzi) == len(run.phase_estimate_wva) == 1000
    assert list(run.columns()) == ["t_s", "bias", "phi_est_mzi_rad", "phi_est_wva_rad"]
    mzi = drift_rate_std(default_runs, "mzi")
    wva = drift_rate_std(default_runs, "wva")
    assert 0.5 <= mzi / 5.7e-4 <= 2
    assert 0.5 <= wva / 5.7e-5 <= 2
    assert drift_rate_std(default_runs, "mzi", degrees=False) == pytest.approx(np.radians(mzi))


def test_drift_shares_bias_between_readouts(default_runs):
    # MZI estimate tracks the bias; the WVA estimate tracks it scaled down
    run = default_runs[0]
    mean_bias = np.cumsum(run.bias) / np.arange(1, 1001)
    assert np.corrcoef(run.phase_estimate_mzi, mean_bias)[0, 1] > 0.99
    assert np.corrcoef(run.phase_estimate_wva, mean_bias)[0, 1] > 0.9


def test_mode_ratio_variant_suppresses_by_2kappa():
    runs = simulate_drift_experiment(BiasModel(seed=4), trajectories=3, wva_readout="mode-ratio")
    ratio = drift_rate_std(runs, "wva") / drift_rate_std(runs, "mzi")
    assert ratio == pytest.approx(0.1, rel=1e-9)


def test_null_drift_is_unbiased(full_pair):
    model = BiasModel(sigma_walk=0.0, steps=400, seed=11)
    runs = simulate_drift_experiment(model, trajectories=8, modes=full_pair)
    photons = runs[0].photons_per_step
    for attr, per_step_sd in (("phase_estimate_mzi", 1 / np.sqrt(photons)),
                              ("phase_estimate_wva", 0.05 / np.sqrt(0.05**2 * photons) / full_pair.gain)):
        finals = np.array([getattr(r, attr)[-1] for r in runs])
        se = per_step_sd / np.sqrt(model.steps * len(runs))
        assert abs(finals.mean()) < 3 * se


def test_drift_determinism(full_pair):
    model = BiasModel(steps=100, seed=7)
    a = simulate_drift_experiment(model, trajectories=3, modes=full_pair)
    b = simulate_drift_experiment(model, trajectories=3, modes=full_pair)
    for u, v in zip(a, b):
        for f in ("bias", "phase_estimate_mzi", "phase_estimate_wva", "signal_mzi", "signal_wva"):
            assert np.array_equal(getattr(u, f), getattr(v, f))
    # trajectory k is seeded with seed + k, independent of the trajectory count
    single = simulate_drift_experiment(BiasModel(steps=100, seed=9), trajectories=1, modes=full_pair)
    assert np.array_equal(single[0].bias, a[2].bias)


def test_drift_rejects_bad_inputs():
    with pytest.raises(ValueError):
        simulate_drift_experiment(BiasModel(steps=5), power=1e-30)
    with pytest.raises(ValueError):
        simulate_drift_experiment(BiasModel(steps=5), wva_readout="intensity")


def test_small_counts_use_binomial():
    runs = simulate_drift_experiment(BiasModel(steps=50, seed=1), power=1e-12, gate_time=1e-3,
                                     wva_readout="mode-ratio")
    photons = runs[0].photons_per_step
    assert photons < 1e5
    diffs = np.diff(np.concatenate([[0], runs[0].signal_mzi]))
    counts = (diffs + photons) / 2
    assert np.allclose(counts, np.round(counts))


@given(st.integers(5, 400), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.data())
def test_allan_linear_ramp(n, slope, offset, data):
    m = data.draw(st.integers(1, (n - 1) // 2))
    x = slope * np.arange(n) + offset
    _, sigma = allan_deviation(x, 1.0, m)
    assert sigma <= 1e-9 * max(1.0, np.max(np.abs(x)))


def test_allan_constant_and_errors():
    assert allan_deviation(np.full(50, 3.0), 1.0, 4)[1] == 0
    tau, _ = allan_deviation(np.arange(10.0), 0.5, 4)
    assert tau == 2.0
    with pytest.raises(InsufficientDataError):
        allan_deviation(np.arange(8.0), 1.0, 4)
    with pytest.raises(InsufficientDataError):
        allan_deviation(np.arange(8.0), 1.0, 0)


def test_allan_matches_direct_definition():
    rng = np.random.default_rng(0)
    x = np.cumsum(rng.standard_normal(200))
    m, dt = 3, 0.25
    direct = sum((x[i + 2 * m] - 2 * x[i + m] + x[i]) ** 2 for i in range(len(x) - 2 * m))
    expected = np.sqrt(direct / (2 * (m * dt) ** 2 * (len(x) - 2 * m)))
    assert allan_deviation(x, dt, m)[1] == pytest.approx(expected, rel=1e-12)


def test_allan_white_noise_slope():
    rng = np.random.default_rng(1)
    x = np.cumsum(rng.standard_normal(200_000))
    tau, sigma = allan_curve(x, 1.0, 2 ** np.arange(0, 11))
    slope = np.polyfit(np.log(tau), np.log(sigma), 1)[0]
    assert slope == pytest.approx(-0.5, rel=0.10)


def test_allan_curve_default_grid():
    tau, _ = allan_curve(np.cumsum(np.ones(1000)), 1.0)
    assert tau[0] == 1 and tau[-1] == 128


def test_allan_comparison(default_runs):
    comp = allan_comparison(default_runs)
    assert isinstance(comp, AllanComparison)
    assert list(comp.columns()) == ["tau_s", "sigma_mzi", "sigma_wva", "ratio"]
    assert 2e-3 <= comp.mean_ratio <= 3e-2
    assert np.all(comp.ratio < 0.05)


def test_thermal_drift_values():
    res = thermal_drift(ThermalDriftModel(), 1.0)
    assert res.dphi_dT == pytest.approx(1e-3, rel=0.05)
    assert res.dphi_dT == pytest.approx(9.7e-4, rel=0.01)
    assert res.fractional_frequency_per_degree == pytest.approx(3.9e-8, rel=0.10)
    assert res.dphi01_dT == pytest.approx(5e-4, rel=0.10)
    assert res.displacement_signal_factor == pytest.approx(np.cos(res.mode_mismatch_phi01))


def test_thermal_drift_from_quoted_slope():
    model = ThermalDriftModel(dn0_dT=2.39e-5, dn1_dT=2.39e-5)
    res = thermal_drift(model, 3.0)
    assert res.dphi_dT == pytest.approx(2 * np.pi * 10e-6 / 1550e-9 * 2.39e-5)
    assert res.mode_mismatch_phi01 == 0 and res.displacement_signal_factor == 1.0


@given(st.floats(-20, 20), st.floats(0, 1e-4))
def test_thermal_linearity(dT, dL):
    base = ThermalDriftModel(delta_L=1e-5, dn0_dT=2.39e-5, dn1_dT=1.19e-5)
    one = thermal_drift(base, 1.0)
    res = thermal_drift(base, dT)
    assert res.delta_phi == pytest.approx(dT * one.delta_phi, rel=1e-12, abs=1e-300)
    scaled = thermal_drift(ThermalDriftModel(delta_L=dL, dn0_dT=2.39e-5, dn1_dT=1.19e-5), 1.0)
    assert scaled.delta_phi == pytest.approx(dL / 1e-5 * one.delta_phi, rel=1e-12, abs=1e-300)


def test_thermal_validation():
    with pytest.raises(ValueError):
        ThermalDriftModel(delta_L=-1e-6)


def test_displacement_scales_with_mode_phase():
    pair = ModePair.solve(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH, "core")
    S0, _ = displacement_signal(dark_port_state(propagate(0.002, 0.05)), pair)
    for phi01 in (0.1, 0.5, 1.0):
        S, _ = displacement_signal(dark_port_state(propagate(0.002, 0.05, phi01)), pair)
        assert S / S0 == pytest.approx(np.cos(phi01), rel=1e-3)
