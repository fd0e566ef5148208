"""
Joint path/mode state of the weak-value interferometer.

Basis order is ``(upper TE0, upper TE1, lower TE0, lower TE1)``.  Light is
injected as TE0 in the upper arm, split by a 50/50 coupler, given a relative
arm phase ``phi``, weakly converted into TE1 with opposite signs in the two
arms, and recombined.  The upper output is the dark port: at ``phi = 0`` it
holds only the converted TE1 light, with probability ``kappa**2``.
"""
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import UndefinedSignalError
from .grating import grating_phase_dispersion
from .waveguide import evaluate_mode, finite_limits, solve_te_modes

UPPER_TE0, UPPER_TE1, LOWER_TE0, LOWER_TE1 = range(4)

_BEAM_SPLITTER = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)


class WeakValueRegimeWarning(UserWarning):
    """Operating point outside ``phi << kappa << 1``."""


@dataclass(frozen=True)
class JointState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (4,):
            raise ValueError("a joint state has exactly four amplitudes")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm2(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def upper(self):
        return self.amplitudes[:2]

    @property
    def lower(self):
        return self.amplitudes[2:]


PRESELECTED = JointState(np.array([1, 0, 0, 0], dtype=complex))


def coupler():
    """Ideal 50/50 directional coupler acting identically on both modes."""
    return np.kron(_BEAM_SPLITTER, np.eye(2))


def arm_phase(phi):
    return np.kron(np.diag([np.exp(0.5j * phi), np.exp(-0.5j * phi)]), np.eye(2))


def mode_converter(kappa):
    """``TE0 -> sqrt(1-k^2) TE0 +/- i k TE1``, ``+`` in the upper arm.

    Completed to a unitary with ``TE1 -> +/- i k TE0 + sqrt(1-k^2) TE1``.
    """
    a = np.sqrt(1 - kappa**2)
    upper = np.array([[a, 1j * kappa], [1j * kappa, a]])
    lower = np.array([[a, -1j * kappa], [-1j * kappa, a]])
    U = np.zeros((4, 4), dtype=complex)
    U[:2, :2] = upper
    U[2:, 2:] = lower
    return U


def mode_phase(phi01):
    """Extra phase ``phi01`` on TE0 relative to TE1 in both arms."""
    return np.kron(np.eye(2), np.diag([np.exp(1j * phi01), 1.0]))


def propagate(phi, kappa, phi01=0.0, state=PRESELECTED):
    """Send ``state`` through the full interferometer and return the output state."""
    if not abs(phi) < np.pi:
        raise ValueError(f"arm phase must satisfy |phi| < pi, got {phi}")
    if not 0 < kappa < 1:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    U = coupler() @ mode_phase(phi01) @ mode_converter(kappa) @ arm_phase(phi) @ coupler()
    return JointState(U @ state.amplitudes)


def dark_port_state(state):
    """Unnormalized ``(TE0, TE1)`` amplitudes of the dark (upper) output port."""
    return state.upper.copy()


def bright_port_state(state):
    return state.lower.copy()


def port_intensities(state):
    """``(dark, bright)`` output intensities relative to the input."""
    return float(np.sum(np.abs(state.upper) ** 2)), float(np.sum(np.abs(state.lower) ** 2))


def postselection_probability(state):
    return port_intensities(state)[0]


def exact_mode_ratio(phi, kappa):
    return np.sqrt(1 - kappa**2) * np.tan(np.asarray(phi) / 2) / kappa


def mode_ratio_signal(dark):
    """Signed TE0/TE1 amplitude ratio of the dark port, ``~ phi / (2 kappa)``.

    The magnitude is insensitive to a relative phase between the modes; the
    sign follows ``Re(a0 conj(a1))``.
    """
    a0, a1 = dark
    if abs(a1) < 1e-15:
        raise UndefinedSignalError("TE1 amplitude vanishes; mode ratio undefined")
    sign = 1.0 if (a0 * np.conj(a1)).real >= 0 else -1.0
    return sign * abs(a0 / a1)


@dataclass(frozen=True)
class ReadoutConfig:
    kappa: float = 0.05
    method: str = "mode-ratio"

    def __post_init__(self):
        if not 0 < self.kappa < 1:
            raise ValueError(f"kappa must lie in (0, 1), got {self.kappa}")
        if self.method not in ("mode-ratio", "displacement"):
            raise ValueError(f"unknown readout method {self.method!r}")

    def check_regime(self, phi, margin=0.3):
        phi_max = float(np.max(np.abs(phi)))
        if self.kappa > margin or phi_max > margin * self.kappa:
            warnings.warn(f"weak-value regime violated: |phi|={phi_max:.3g}, kappa={self.kappa:.3g}",
                          WeakValueRegimeWarning, stacklevel=3)


class ModePair:
    """TE0/TE1 pair of one geometry with the split-detector integrals cached.

    ``window`` is ``"core"`` (detector halves ``[-d, 0]`` and ``[0, d]``) or
    ``"full"`` (the two half-lines, as collected by a Y-branch).
    """

    def __init__(self, mode0, mode1, geometry, window="core"):
        if window not in ("core", "full"):
            raise ValueError(f"window must be 'core' or 'full', got {window!r}")
        self.mode0, self.mode1, self.geometry, self.window = mode0, mode1, geometry, window
        d = geometry.half_width
        lo, hi = (-d, d) if window == "core" else finite_limits(-np.inf, np.inf, geometry,
                                                                 min(mode0.gamma, mode1.gamma))
        f0 = lambda x: float(evaluate_mode(mode0, geometry, x))
        f1 = lambda x: float(evaluate_mode(mode1, geometry, x))

        def integral(fn, a, b):
            breaks = [p for p in (-d, d) if a < p < b]
            edges = [a, *breaks, b]
            return sum(quad(fn, x0, x1, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
                       for x0, x1 in zip(edges[:-1], edges[1:]))

        halves = [(lo, 0.0), (0.0, hi)]
        self.p0 = [integral(lambda x: f0(x) ** 2, *h) for h in halves]
        self.p1 = [integral(lambda x: f1(x) ** 2, *h) for h in halves]
        self.j = [integral(lambda x: f0(x) * f1(x), *h) for h in halves]
        self.x01 = integral(lambda x: x * f0(x) * f1(x), lo, hi)
        self.x00 = integral(lambda x: x * f0(x) ** 2, lo, hi)
        self.x11 = integral(lambda x: x * f1(x) ** 2, lo, hi)

    @classmethod
    def solve(cls, geometry, wavelength, window="core"):
        modes = solve_te_modes(geometry, wavelength)
        if len(modes) < 2:
            raise ValueError("displacement readout needs a waveguide guiding TE0 and TE1")
        return cls(modes[0], modes[1], geometry, window)

    @property
    def alpha(self):
        """Split-detector overlap ``J_left - J_right``."""
        return self.j[0] - self.j[1]

    @property
    def te1_window_power(self):
        return sum(self.p1)

    @property
    def gain(self):
        """Slope ``dS / d(phi/kappa)`` of the displacement signal at ``phi = 0``."""
        return (self.j[1] - self.j[0]) / self.te1_window_power

    def half_intensities(self, dark):
        a0, a1 = dark
        cross = 2 * (a0 * np.conj(a1)).real
        w0, w1 = abs(a0) ** 2, abs(a1) ** 2
        return tuple(w0 * self.p0[k] + w1 * self.p1[k] + cross * self.j[k] for k in (0, 1))


@dataclass
class DarkPortProfile:
    x_grid: np.ndarray
    intensity: np.ndarray
    I_left: float
    I_right: float
    mean_x: float

    def columns(self):
        return {"x_m": self.x_grid, "intensity_per_m": self.intensity}


def dark_port_intensity(dark, modes, x):
    a0, a1 = dark
    field = a0 * evaluate_mode(modes.mode0, modes.geometry, x) + a1 * evaluate_mode(modes.mode1, modes.geometry, x)
    return np.abs(field) ** 2


def displacement_signal(dark, modes, x_grid=None):
    """Split-detector signal ``(I_R - I_L) / (I_R + I_L)`` and the dark-port profile.

    ``modes`` is a :class:`ModePair`; its window sets the detector halves.
    """
    I_left, I_right = modes.half_intensities(dark)
    total = I_left + I_right
    if not total > 0:
        raise UndefinedSignalError("dark port is empty; displacement signal undefined")
    a0, a1 = dark
    first_moment = (abs(a0) ** 2 * modes.x00 + abs(a1) ** 2 * modes.x11
                    + 2 * (a0 * np.conj(a1)).real * modes.x01)
    if x_grid is None:
        d = modes.geometry.half_width
        x_grid = np.linspace(-4 * d, 4 * d, 801)
    x_grid = np.asarray(x_grid, dtype=float)
    profile = DarkPortProfile(x_grid, dark_port_intensity(dark, modes, x_grid), I_left, I_right,
                              first_moment / total)
    return (I_right - I_left) / total, profile


@dataclass
class ReadoutResult:
    omega: np.ndarray
    phi: np.ndarray
    signal: np.ndarray
    postselection_probability: np.ndarray

    def columns(self):
        return {"omega_rad_s": self.omega, "phi_rad": self.phi, "signal": self.signal,
                "postselect_prob": self.postselection_probability}


def readout(phi, config, modes=None, phi01=0.0):
    """Signal and post-selection probability for a given arm phase."""
    dark = dark_port_state(propagate(phi, config.kappa, phi01))
    p = float(np.sum(np.abs(dark) ** 2))
    if config.method == "mode-ratio":
        return mode_ratio_signal(dark), p
    if modes is None:
        raise ValueError("displacement readout needs a ModePair")
    return displacement_signal(dark, modes)[0], p


def simulate_frequency_readout(omega, grating, config, geometry=None, modes=None):
    """Grating phase -> interferometer -> readout, element-wise over ``omega``."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    phi, _ = grating_phase_dispersion(grating, omega)
    phi = np.atleast_1d(phi)
    config.check_regime(phi)
    if config.method == "displacement" and modes is None:
        if geometry is None:
            raise ValueError("displacement readout needs the waveguide geometry or a ModePair")
        modes = ModePair.solve(geometry, grating.reference_wavelength)
    out = np.array([readout(p, config, modes) for p in phi])
    return ReadoutResult(omega, phi, out[:, 0], out[:, 1])
