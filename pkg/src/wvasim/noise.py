"""
Bias offset, bias instability and thermal drift for the MZI and WVA readouts.

A bias ``b`` is a fraction of detections credited to the wrong outcome.  The
MZI is read at its quadrature point, where the port difference is linear in
the phase, so ``b`` shifts its phase estimate by ``~b``.  The WVA readout
divides the same misread fraction by its amplification, so the phase offset
shrinks to ``~2 kappa b`` (mode ratio) or ``kappa b / g`` (split detector with
gain ``g``).
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError
from .interferometer import ModePair, dark_port_state, mode_ratio_signal, propagate
from .metrology import photon_rate
from .waveguide import C_LIGHT, REFERENCE_GEOMETRY, ThermoOpticModel, thermo_optic_slope

# 2 mW at 1550 nm delivers ~1e11 photons in this window
DEFAULT_GATE_TIME = 6.4e-6  # s
GAUSSIAN_COUNT_THRESHOLD = 1e5


@dataclass(frozen=True)
class BiasModel:
    """Random-walk bias: ``b_k = b0 + sum_{i<=k} B_i`` with ``B_i ~ N(0, sigma_walk dt)``."""

    b0: float = 0.0
    sigma_walk: float = 1e-5
    dt: float = 1.0
    steps: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.sigma_walk < 0:
            raise ValueError("sigma_walk must be nonnegative")


def misread(p, b):
    """Probability of the '+' outcome after a fraction ``|b|`` of detections is misassigned.

    ``b > 0`` moves '-' detections to '+', ``b < 0`` the reverse.
    """
    p = np.asarray(p, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.where(b >= 0, p + b * (1 - p), p * (1 + b))


def _check_architecture(architecture):
    if architecture not in ("mzi", "wva"):
        raise ValueError(f"architecture must be 'mzi' or 'wva', got {architecture!r}")


def biased_estimate(phi, b, kappa, architecture):
    """Linear-response phase estimate under a constant bias."""
    _check_architecture(architecture)
    if architecture == "mzi":
        return phi + b
    return phi + 2 * kappa * b


def biased_readout(phi, b, kappa, architecture):
    """Phase inferred from the exact biased signal with the linear calibration.

    MZI: quadrature signal ``sin(phi)`` with misread ports, estimator
    ``phi_est = S``.  WVA: exact mode ratio plus ``b``, estimator
    ``phi_est = 2 kappa S``.  Both reduce to :func:`biased_estimate` for small
    ``phi`` and drift from it as ``phi`` grows.
    """
    _check_architecture(architecture)
    phi = np.asarray(phi, dtype=float)
    if architecture == "mzi":
        return 2 * misread((1 + np.sin(phi)) / 2, b) - 1
    return 2 * kappa * (np.sqrt(1 - kappa**2) * np.tan(phi / 2) / kappa + b)


def _sample_counts(rng, n, p):
    """Binomial counts, Gaussian-approximated once ``n`` is large."""
    n = np.broadcast_to(np.asarray(n, dtype=float), np.shape(p)).copy()
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    z = rng.standard_normal(p.shape)
    big = n >= GAUSSIAN_COUNT_THRESHOLD
    out = np.empty(p.shape)
    out[big] = np.round(n[big] * p[big] + np.sqrt(n[big] * p[big] * (1 - p[big])) * z[big])
    small = ~big
    if np.any(small):
        out[small] = rng.binomial(np.round(n[small]).astype(np.int64), p[small])
    return np.clip(out, 0, n)


def simulate_bias_offset(phis, b, kappa, photons=1e11, seed=0):
    """Shot-noise-limited biased phase estimates at each true phase in ``phis``.

    Returns ``(phi_est_mzi, phi_est_wva)`` using the same estimators as
    :func:`biased_readout`, with detector counts sampled.
    """
    rng = np.random.default_rng(seed)
    phis = np.asarray(phis, dtype=float)
    n_plus = _sample_counts(rng, photons, misread((1 + np.sin(phis)) / 2, b))
    mzi = 2 * n_plus / photons - 1
    dark_prob = np.array([np.sum(np.abs(dark_port_state(propagate(p, kappa))) ** 2) for p in phis])
    n_dark = _sample_counts(rng, photons, dark_prob)
    s_true = np.sqrt(1 - kappa**2) * np.tan(phis / 2) / kappa
    s_meas = s_true + b + rng.standard_normal(phis.shape) / (2 * np.sqrt(np.maximum(n_dark, 1)))
    return mzi, 2 * kappa * s_meas


def random_walk_bias(model, seed=None, rng=None):
    """Bias at the end of each of ``model.steps`` steps."""
    if rng is None:
        rng = np.random.default_rng(model.seed if seed is None else seed)
    steps = rng.normal(0.0, model.sigma_walk * model.dt, model.steps)
    return model.b0 + np.cumsum(steps)


@dataclass
class DriftTrajectory:
    """One simulated run at true phase zero.

    ``signal_*`` are cumulative detector signals in detected-photon units
    (port-count difference for the MZI, right-minus-left counts for the split
    detector, i.e. positions in units of the mean half-plane position).
    ``offset_*`` are the noise-free phase offsets implied by the bias.
    """

    times: np.ndarray
    bias: np.ndarray
    phase_estimate_mzi: np.ndarray
    phase_estimate_wva: np.ndarray
    photons_per_step: float
    signal_mzi: np.ndarray = field(repr=False)
    signal_wva: np.ndarray = field(repr=False)
    offset_mzi: np.ndarray = field(repr=False)
    offset_wva: np.ndarray = field(repr=False)
    dt: float = 1.0

    def columns(self):
        return {"t_s": self.times, "bias": self.bias, "phi_est_mzi_rad": self.phase_estimate_mzi,
                "phi_est_wva_rad": self.phase_estimate_wva}


def simulate_drift_experiment(model, power=2e-3, wavelength=1550e-9, kappa=0.05, trajectories=5,
                              gate_time=DEFAULT_GATE_TIME, wva_readout="displacement", modes=None,
                              geometry=REFERENCE_GEOMETRY, phi=0.0):
    """Monte Carlo of the MZI and WVA readouts under a random-walk bias.

    Trajectory ``k`` is seeded with ``model.seed + k``; the MZI and WVA share
    its bias series.  Every step detects ``photon_rate(power) * gate_time``
    input photons.  The split detector integrates each half-plane of the dark
    port.
    """
    if wva_readout not in ("displacement", "mode-ratio"):
        raise ValueError(f"unknown WVA readout {wva_readout!r}")
    photons = float(photon_rate(power, wavelength) * gate_time)
    if not photons >= 1:
        raise ValueError("zero photons per step")
    if wva_readout == "displacement" and modes is None:
        modes = ModePair.solve(geometry, wavelength, window="full")

    dark = dark_port_state(propagate(phi, kappa))
    if wva_readout == "displacement":
        I_left, I_right = modes.half_intensities(dark)
        p_dark = I_left + I_right
        p_right = I_right / p_dark
        gain = modes.gain
        wva_offset = lambda b: kappa * (2 * misread(p_right, b) - 1) / gain - phi
    else:
        p_dark = float(np.sum(np.abs(dark) ** 2))
        s_true = mode_ratio_signal(dark)
        wva_offset = lambda b: 2 * kappa * (s_true + b) - phi
    p_plus = (1 + np.sin(phi)) / 2
    mzi_offset = lambda b: 2 * misread(p_plus, b) - 1 - phi

    out = []
    for k in range(trajectories):
        rng = np.random.default_rng(model.seed + k)
        bias = random_walk_bias(model, rng=rng)
        n_plus = _sample_counts(rng, photons, misread(p_plus, bias))
        diff_mzi = 2 * n_plus - photons
        est_mzi = diff_mzi / photons

        n_dark = np.maximum(_sample_counts(rng, photons, np.full(model.steps, p_dark)), 1)
        if wva_readout == "displacement":
            n_right = _sample_counts(rng, n_dark, misread(p_right, bias))
            diff_wva = 2 * n_right - n_dark
            est_wva = kappa * (diff_wva / n_dark) / gain
        else:
            s_meas = s_true + bias + rng.standard_normal(model.steps) / (2 * np.sqrt(n_dark))
            diff_wva = n_dark * s_meas
            est_wva = 2 * kappa * s_meas

        count = np.arange(1, model.steps + 1)
        with_start = np.concatenate([[model.b0], bias])
        out.append(DriftTrajectory(
            times=count * model.dt,
            bias=bias,
            phase_estimate_mzi=np.cumsum(est_mzi) / count,
            phase_estimate_wva=np.cumsum(est_wva) / count,
            photons_per_step=photons,
            signal_mzi=np.cumsum(diff_mzi),
            signal_wva=np.cumsum(diff_wva),
            offset_mzi=mzi_offset(with_start),
            offset_wva=wva_offset(with_start),
            dt=model.dt,
        ))
    return out


def drift_rate_std(trajectories, architecture, degrees=True):
    """Standard deviation of the bias-driven phase-offset drift rate (deg/s or rad/s)."""
    _check_architecture(architecture)
    rates = np.concatenate([np.diff(getattr(tr, f"offset_{architecture}")) / tr.dt
                            for tr in trajectories])
    std = np.std(rates, ddof=1)
    return np.degrees(std) if degrees else std


def allan_deviation(samples, dt, m):
    """Allan deviation of a cumulative series ``x`` at ``tau = m dt``.

    ``sigma^2 = sum_i (x_{i+2m} - 2 x_{i+m} + x_i)^2 / (2 tau^2 (N - 2m))``.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if m < 1 or n < 2 * m + 1:
        raise InsufficientDataError(f"need at least {2 * m + 1} samples for m={m}, got {n}")
    tau = m * dt
    second = x[2 * m:] - 2 * x[m:n - m] + x[:n - 2 * m]
    return tau, np.sqrt(np.sum(second**2) / (2 * tau**2 * (n - 2 * m)))


def allan_curve(samples, dt, ms=None):
    """Allan deviation over bin sizes ``m`` (default: powers of two up to ``N/4``)."""
    n = len(samples)
    if ms is None:
        ms = 2 ** np.arange(int(np.log2(max(n // 4, 1))) + 1)
    taus, sigmas = zip(*(allan_deviation(samples, dt, int(m)) for m in ms))
    return np.array(taus), np.array(sigmas)


@dataclass
class AllanComparison:
    tau: np.ndarray
    sigma_mzi: np.ndarray
    sigma_wva: np.ndarray

    @property
    def ratio(self):
        return self.sigma_wva / self.sigma_mzi

    @property
    def mean_ratio(self):
        return float(np.mean(self.ratio))

    def columns(self):
        return {"tau_s": self.tau, "sigma_mzi": self.sigma_mzi, "sigma_wva": self.sigma_wva,
                "ratio": self.ratio}


def allan_comparison(trajectories, ms=None):
    """Allan deviations of the trajectory-averaged cumulative signals."""
    dt = trajectories[0].dt
    mzi = np.mean([tr.signal_mzi for tr in trajectories], axis=0)
    wva = np.mean([tr.signal_wva for tr in trajectories], axis=0)
    tau, s_mzi = allan_curve(mzi, dt, ms)
    _, s_wva = allan_curve(wva, dt, ms)
    return AllanComparison(tau, s_mzi, s_wva)


@dataclass(frozen=True)
class ThermalDriftModel:
    """Arm-length mismatch and thermo-optic data for temperature drift.

    ``dn0_dT`` / ``dn1_dT`` (effective-index slopes of TE0/TE1) are solved
    from ``geometry`` and ``thermo`` when left as ``None``.
    """

    delta_L: float = 10e-6
    wavelength: float = 1550e-9
    dphi_domega: float = 2.06e-11
    thermo: ThermoOpticModel = ThermoOpticModel()
    geometry: object = REFERENCE_GEOMETRY
    dn0_dT: float = None
    dn1_dT: float = None

    def __post_init__(self):
        if self.delta_L < 0:
            raise ValueError("delta_L must be nonnegative")

    def slopes(self):
        dn0 = self.dn0_dT
        dn1 = self.dn1_dT
        if dn0 is None:
            dn0 = thermo_optic_slope(self.geometry, self.thermo, self.wavelength, 0)
        if dn1 is None:
            dn1 = thermo_optic_slope(self.geometry, self.thermo, self.wavelength, 1)
        return dn0, dn1


@dataclass(frozen=True)
class ThermalDriftResult:
    delta_phi: float
    delta_omega_over_omega: float
    mode_mismatch_phi01: float
    displacement_signal_factor: float
    dphi_dT: float
    dphi01_dT: float
    fractional_frequency_per_degree: float


def thermal_drift(model, delta_T):
    """Arm-phase, frequency-error and TE0/TE1 phase drift for a temperature change."""
    dn0, dn1 = model.slopes()
    k = 2 * np.pi * model.delta_L / model.wavelength
    dphi_dT = k * dn0
    dphi01_dT = k * (dn0 - dn1)
    omega = 2 * np.pi * C_LIGHT / model.wavelength
    per_degree = dphi_dT / (omega * model.dphi_domega)
    phi01 = dphi01_dT * delta_T
    return ThermalDriftResult(
        delta_phi=dphi_dT * delta_T,
        delta_omega_over_omega=per_degree * delta_T,
        mode_mismatch_phi01=phi01,
        displacement_signal_factor=float(np.cos(phi01)),
        dphi_dT=dphi_dT,
        dphi01_dT=dphi01_dT,
        fractional_frequency_per_degree=per_degree,
    )
