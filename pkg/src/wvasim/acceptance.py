"""
Acceptance suite: thirteen end-to-end checks of the reference scenario.

Each check returns a :class:`CriterionResult`; :func:`run_acceptance` runs a
selection and is shared by the ``acceptance`` subcommand and the test suite.
"""
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import grating as gr
from . import interferometer as itf
from . import metrology as met
from . import noise
from .waveguide import (C_LIGHT, REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH, ThermoOpticModel,
                        WaveguideGeometry, mode_product_integral, native_group_velocity,
                        solve_te_modes, thermo_optic_slope)

OMEGA_REF = 2 * np.pi * C_LIGHT / REFERENCE_WAVELENGTH


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    checks: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        detail = "; ".join(f"{k}={_fmt(v)}" for k, v in self.checks.items())
        return f"[{status}] {self.number:2d} {self.name} ({self.seconds:.2f} s): {detail}"


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "ok" if v else "FAILED"
    if isinstance(v, (float, np.floating)):
        return f"{v:.5g}"
    return str(v)


REGISTRY = {}


def criterion(number, name):
    def register(fn):
        REGISTRY[number] = (name, fn)
        return fn
    return register


def within(value, target, rel):
    return abs(value / target - 1) <= rel


@lru_cache(maxsize=None)
def _double():
    spec = gr.double_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    mid = 0.5 * (spec.bragg_omega(0) + spec.bragg_omega(1))
    return spec, mid


@lru_cache(maxsize=None)
def _double_dispersion():
    spec, mid = _double()
    phi, dphi = gr.grating_phase_dispersion(spec, mid)
    return phi, dphi


@criterion(1, "mode solver")
def _modes():
    t0 = time.perf_counter()
    modes = solve_te_modes(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    vg = native_group_velocity(REFERENCE_GEOMETRY, OMEGA_REF)
    elapsed = time.perf_counter() - t0
    return {
        "mode_count": len(modes),
        "n_eff_TE0": modes[0].n_eff,
        "vg_over_c": vg / C_LIGHT,
        "two_modes": len(modes) == 2,
        "n_eff_in_tol": abs(modes[0].n_eff - 1.82) <= 0.01,
        "vg_in_tol": within(vg / C_LIGHT, 0.5, 0.05),
        "runtime_under_1s": elapsed < 1.0,
    }


@criterion(2, "thermo-optic slopes")
def _thermo():
    t0 = time.perf_counter()
    model = ThermoOpticModel()
    s0 = thermo_optic_slope(REFERENCE_GEOMETRY, model, REFERENCE_WAVELENGTH, 0)
    s1 = thermo_optic_slope(REFERENCE_GEOMETRY, model, REFERENCE_WAVELENGTH, 1)
    elapsed = time.perf_counter() - t0
    return {
        "dn0_dT": s0, "dn1_dT": s1,
        "dn0_in_tol": within(s0, 2.39e-5, 0.02),
        "dn1_in_tol": within(s1, 1.19e-5, 0.05),
        "runtime_under_5s": elapsed < 5.0,
    }


@criterion(3, "single grating")
def _single():
    t0 = time.perf_counter()
    spec = gr.single_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    kappa, vg = spec.coupling(), spec.group_velocity
    delta = np.linspace(-10, 10, 4001) * kappa
    omega = spec.bragg_omega() + delta * vg
    resp = gr.grating_spectrum(spec, omega)
    elapsed = time.perf_counter() - t0

    centre = 2000
    T0 = abs(1 / gr.fundamental_matrix(spec, spec.bragg_omega())[0, 0]) ** 2
    edge = [int(np.argmin(np.abs(delta - s * 5 * kappa))) for s in (-1, 1)]
    _, V_inf = gr.infinite_grating_response(spec, omega[edge])
    conv = np.max(np.abs(resp.group_velocity[edge] / V_inf - 1))
    return {
        "T_centre": T0,
        "T_centre_closed_form": abs(T0 - 1 / np.cosh(4.0) ** 2) <= 1e-4,
        "Vg_over_vg_centre": resp.vg_ratio[centre],
        "hartman": resp.vg_ratio[centre] > 1 and resp.transmission[centre] < 0.01,
        "Vg_deviation_at_5kappa": conv,
        "converges_at_5kappa": conv <= 0.02,
        "runtime_under_10s": elapsed < 10.0,
    }


@criterion(4, "double grating")
def _double_grating():
    t0 = time.perf_counter()
    spec, mid = _double()
    dw = 2e-4 * spec.group_velocity / spec.length
    omega = mid + np.arange(-200, 201) * dw
    resp = gr.grating_spectrum(spec, omega, method="thin-layer")
    elapsed = time.perf_counter() - t0
    T, ratio = resp.transmission[200], resp.vg_ratio[200]
    return {
        "T_mid": T, "Vg_over_vg_mid": ratio,
        "T_at_least_0.98": T >= 0.98,
        "Vg_ratio_in_tol": abs(ratio - 0.68) <= 0.03,
        "runtime_under_60s": elapsed < 60.0,
    }


@criterion(5, "method cross-validation")
def _cross():
    t0 = time.perf_counter()
    spec = gr.single_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    omega = spec.bragg_omega() + np.linspace(-10, 10, 201) * spec.coupling() * spec.group_velocity
    F_fund = gr.fundamental_matrix(spec, omega)
    F_thin = gr.thin_layer_matrix(spec, omega)
    elapsed = time.perf_counter() - t0
    worst_diff, worst_unit = 0.0, 0.0
    for F in (F_fund, F_thin):
        t = 1 / F[:, 0, 0]
        r = F[:, 1, 0] / F[:, 0, 0]
        worst_unit = max(worst_unit, np.max(np.abs(np.abs(r) ** 2 + np.abs(t) ** 2 - 1)))
    worst_diff = np.max(np.abs(np.abs(1 / F_fund[:, 0, 0]) ** 2 - np.abs(1 / F_thin[:, 0, 0]) ** 2))
    return {
        "max_transmission_difference": worst_diff,
        "agree_within_2e-2": worst_diff <= 2e-2,
        "max_unitarity_error": worst_unit,
        "unitary_within_1e-6": worst_unit <= 1e-6,
        "seconds": elapsed,
    }


def closed_form_output(phi, kappa):
    a = np.sqrt(1 - kappa**2)
    s, c = np.sin(phi / 2), np.cos(phi / 2)
    return 1j * np.array([a * s, kappa * c, a * c, -kappa * s])


def global_phase_distance(u, v):
    """``min_theta |u - e^{i theta} v|``."""
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(u - phase * v)))


@criterion(6, "interferometer algebra")
def _algebra():
    worst = 0.0
    for phi in np.linspace(-3.0, 3.0, 20):
        for kappa in np.linspace(0.01, 0.99, 20):
            out = itf.propagate(phi, kappa).amplitudes
            worst = max(worst, global_phase_distance(out, closed_form_output(phi, kappa)))
    worst_p = 0.0
    for phi in np.linspace(0.0, 0.02, 20):
        for kappa in np.linspace(0.02, 0.1, 20):
            p = itf.postselection_probability(itf.propagate(phi, kappa))
            worst_p = max(worst_p, abs(p / (kappa**2 + phi**2 / 4) - 1))
    return {
        "max_closed_form_error": worst,
        "matches_within_1e-12": worst <= 1e-12,
        "max_dark_probability_rel_error": worst_p,
        "dark_probability_within_1pct": worst_p < 0.01,
    }


@criterion(7, "sensitivity")
def _sensitivity():
    _, dphi = _double_dispersion()
    spec, mid = _double()
    mzi = met.sensitivity(dphi, mid, "mzi")
    wva = met.sensitivity(dphi, mid, "wva", kappa=0.05)
    return {
        "omega_dphi_domega": mzi, "wva_slope": wva,
        "mzi_in_tol": within(mzi, 2.5e4, 0.10),
        "wva_in_tol": within(wva, 2.5e5, 0.10),
    }


@criterion(8, "precision bounds")
def _precision():
    _, dphi = _double_dispersion()
    out = {}
    for label, scenario in (("quoted", met.PrecisionScenario()),
                            ("simulated", met.PrecisionScenario(dphi_domega=dphi))):
        mzi = met.crb_frequency(scenario, "mzi")
        wva = met.crb_frequency(scenario, "wva")
        out[f"{label}_mzi"] = mzi
        out[f"{label}_wva"] = wva
        out[f"{label}_mzi_in_tol"] = within(mzi, 390, 0.10)
        out[f"{label}_wva_in_tol"] = within(wva, 19, 0.10)
    return out


@criterion(9, "optimality")
def _optimality():
    dphi = 2.06e-11
    worst_pair, worst_four = 0.0, 0.0
    for phi0 in np.geomspace(1e-4, 1e-2, 7):
        for kappa in np.linspace(0.02, 0.2, 7):
            family = lambda w, k=kappa, p=phi0: itf.propagate(p + dphi * (w - OMEGA_REF), k)
            full = met.qfi(family, OMEGA_REF)
            pair = met.fisher_two_outcome(phi0**2 / 4, kappa**2, phi0 / 2 * dphi, 0.0)
            four = met.mode_resolved_fisher(phi0, kappa, dphi)
            worst_pair = max(worst_pair, abs(pair / full - 1))
            worst_four = max(worst_four, abs(four / full - 1))
    modes = itf.ModePair.solve(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH, window="core")
    ratio = met.displacement_fisher(modes, dphi) / dphi**2
    kappa = 0.05
    dark = met.qfi(lambda w: itf.propagate(1e-4 + dphi * (w - OMEGA_REF), kappa), OMEGA_REF,
                   restriction="dark_port")
    dark_rel = abs(dark / ((1 - kappa**2) * dphi**2) - 1)
    return {
        "mode_ratio_vs_qfi": worst_pair,
        "mode_ratio_equals_qfi": worst_pair <= 1e-6,
        "mode_resolved_vs_qfi": worst_four,
        "mode_resolved_equals_qfi": worst_four <= 1e-6,
        "displacement_ratio": ratio,
        "displacement_ratio_in_tol": abs(ratio - 0.6) <= 0.05,
        "dark_port_qfi_rel_error": dark_rel,
        "dark_port_qfi_within_0.1pct": dark_rel <= 1e-3,
    }


@criterion(10, "bias offset suppression")
def _bias():
    worst = worst_mc = 0.0
    for i, b in enumerate((0.002, 0.01, 0.02)):
        for j, kappa in enumerate((0.02, 0.05, 0.1)):
            mzi = noise.biased_readout(0.0, b, kappa, "mzi")
            wva = noise.biased_readout(0.0, b, kappa, "wva")
            worst = max(worst, abs((wva / mzi) / (2 * kappa) - 1))
            # shot-noise counts: 20 repeats of 1e11 photons at the true phase 0
            mc_mzi, mc_wva = noise.simulate_bias_offset(np.zeros(20), b, kappa, 1e11, seed=10 * i + j)
            worst_mc = max(worst_mc, abs((mc_wva.mean() / mc_mzi.mean()) / (2 * kappa) - 1))
    return {"max_relative_deviation": worst, "ratio_is_2kappa": worst <= 0.05,
            "max_sampled_deviation": worst_mc, "sampled_ratio_is_2kappa": worst_mc <= 0.05}


@criterion(11, "drift experiment")
def _drift():
    t0 = time.perf_counter()
    model = noise.BiasModel()
    runs = noise.simulate_drift_experiment(model, trajectories=5)
    mzi = noise.drift_rate_std(runs, "mzi")
    wva = noise.drift_rate_std(runs, "wva")
    allan = noise.allan_comparison(runs).mean_ratio
    elapsed = time.perf_counter() - t0
    return {
        "photons_per_step": runs[0].photons_per_step,
        "mzi_deg_per_s": mzi, "wva_deg_per_s": wva, "allan_ratio": allan,
        "mzi_within_factor_2": 0.5 <= mzi / 5.7e-4 <= 2,
        "wva_within_factor_2": 0.5 <= wva / 5.7e-5 <= 2,
        "allan_ratio_in_band": 2e-3 <= allan <= 3e-2,
        "runtime_under_120s": elapsed < 120.0,
    }


@criterion(12, "thermal drift")
def _thermal():
    res = noise.thermal_drift(noise.ThermalDriftModel(), 1.0)
    return {
        "dphi_dT": res.dphi_dT,
        "frac_freq_per_degree": res.fractional_frequency_per_degree,
        "dphi01_dT": res.dphi01_dT,
        "dphi_dT_in_tol": within(res.dphi_dT, 1e-3, 0.05),
        "frac_freq_in_tol": within(res.fractional_frequency_per_degree, 3.9e-8, 0.10),
        "dphi01_dT_in_tol": within(res.dphi01_dT, 5e-4, 0.10),
    }


@criterion(13, "property suites")
def _properties(cases=100, seed=20240613):
    rng = np.random.default_rng(seed)
    failures = {"orthogonality": 0, "determinant": 0, "allan_ramp": 0, "determinism": 0}
    for _ in range(cases):
        n2 = rng.uniform(1.3, 1.6)
        geo = WaveguideGeometry(rng.uniform(0.2e-6, 1.0e-6), n2 + rng.uniform(0.2, 0.8), n2)
        modes = solve_te_modes(geo, REFERENCE_WAVELENGTH)
        if len(modes) >= 2:
            ov = mode_product_integral(modes[0], modes[1], geo, -np.inf, np.inf)
            failures["orthogonality"] += abs(ov) >= 1e-8

    spec = gr.single_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    omega = spec.bragg_omega() + rng.uniform(-20, 20, cases) * spec.coupling() * spec.group_velocity
    det = np.linalg.det(gr.fundamental_matrix(spec, omega))
    failures["determinant"] = int(np.sum(np.abs(det - 1) > 1e-9))

    for _ in range(cases):
        n = int(rng.integers(5, 400))
        x = rng.uniform(-1e3, 1e3) * np.arange(n) + rng.uniform(-1e3, 1e3)
        m = int(rng.integers(1, (n - 1) // 2 + 1))
        _, sigma = noise.allan_deviation(x, 1.0, m)
        scale = max(1.0, float(np.max(np.abs(x))))
        failures["allan_ramp"] += sigma > 1e-9 * scale

    pair = itf.ModePair.solve(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH, window="full")
    for _ in range(cases):
        model = noise.BiasModel(steps=20, seed=int(rng.integers(0, 2**62)))
        a = noise.simulate_drift_experiment(model, trajectories=2, modes=pair)
        b = noise.simulate_drift_experiment(model, trajectories=2, modes=pair)
        same = all(np.array_equal(getattr(u, f), getattr(v, f)) for u, v in zip(a, b)
                   for f in ("bias", "phase_estimate_mzi", "phase_estimate_wva"))
        failures["determinism"] += not same

    out = {f"{k}_failures": v for k, v in failures.items()}
    out.update({f"{k}_all_pass": v == 0 for k, v in failures.items()})
    return out


def run_criterion(number):
    name, fn = REGISTRY[number]
    t0 = time.perf_counter()
    checks = fn()
    elapsed = time.perf_counter() - t0
    passed = all(bool(v) for v in checks.values() if isinstance(v, (bool, np.bool_)))
    return CriterionResult(number, name, passed, checks, elapsed)


def run_acceptance(numbers=None, stream=None):
    """Run the selected criteria (all by default), printing one line each to ``stream``."""
    results = []
    for number in sorted(numbers or REGISTRY):
        result = run_criterion(number)
        if stream is not None:
            print(result.line(), file=stream, flush=True)
        results.append(result)
    return results
