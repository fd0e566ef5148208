"""
Fisher information and Cramer-Rao bounds for frequency estimation.

All Fisher quantities are per input photon and in units of s^2 (information
about ``omega``).  Bounds are reported as ``delta omega`` in rad/s per
sqrt(Hz): with ``N`` photons per second, ``delta omega = 1 / sqrt(N F)``.
"""
import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConvergenceError, DivergentInformationError
from .interferometer import JointState
from .waveguide import C_LIGHT

PLANCK = 6.62607015e-34  # J s


def photon_rate(power, wavelength):
    """Photons per second carried by ``power`` watts at ``wavelength``."""
    if not np.all(np.asarray(power) > 0):
        raise ValueError("optical power must be positive")
    return power * wavelength / (PLANCK * C_LIGHT)


def fisher_two_outcome(P0, P1, dP0, dP1):
    """``sum_k P_k (d ln P_k)^2`` for two outcomes (need not sum to one).

    An outcome with ``P = 0`` and ``dP = 0`` contributes nothing; ``P = 0``
    with ``dP != 0`` raises :class:`DivergentInformationError`.
    """
    total = 0.0
    for P, dP in ((P0, dP0), (P1, dP1)):
        P = np.asarray(P, dtype=float)
        dP = np.asarray(dP, dtype=float)
        if np.any(P < 0):
            raise ValueError("probabilities must be nonnegative")
        empty = P == 0
        if np.any(empty & (dP != 0)):
            raise DivergentInformationError("zero-probability outcome with nonzero derivative")
        with np.errstate(divide="ignore", invalid="ignore"):
            total = total + np.where(empty, 0.0, dP**2 / np.where(empty, 1.0, P))
    return total if np.ndim(total) else float(total)


def fisher_outcomes(P, dP):
    """Classical Fisher information of an arbitrary set of outcomes."""
    P = np.asarray(P, dtype=float)
    dP = np.asarray(dP, dtype=float)
    empty = P == 0
    if np.any(empty & (dP != 0)):
        raise DivergentInformationError("zero-probability outcome with nonzero derivative")
    return float(np.sum(dP[~empty] ** 2 / P[~empty]))


def _amplitudes(state, restriction):
    amps = state.amplitudes if isinstance(state, JointState) else np.asarray(state, dtype=complex)
    if restriction == "full":
        return amps
    if restriction == "dark_port":
        return amps[:2]
    raise ValueError(f"restriction must be 'full' or 'dark_port', got {restriction!r}")


def qfi(state_family, omega, restriction="full", rel_step=1e-7):
    """Quantum Fisher information about ``omega`` of a pure-state family.

    ``state_family(omega)`` returns a :class:`JointState` (or 4 amplitudes).
    For ``"dark_port"`` the upper-port pair is renormalized, its QFI taken, and
    the result weighted by the post-selection probability, so both
    restrictions are per input photon.
    """
    h = rel_step * omega
    psi = _amplitudes(state_family(omega), restriction)
    plus = _amplitudes(state_family(omega + h), restriction)
    minus = _amplitudes(state_family(omega - h), restriction)
    p = np.vdot(psi, psi).real
    if not p > 0:
        raise ConvergenceError("state has zero norm on the requested restriction")
    norm = lambda v: v / np.sqrt(np.vdot(v, v).real)
    dpsi = (norm(plus) - norm(minus)) / (2 * h)
    psi_n = norm(psi)
    value = 4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi_n, dpsi)) ** 2)
    if not np.isfinite(value):
        raise ConvergenceError("QFI derivative stencil produced a non-finite value")
    return p * value


def displacement_fisher(modes, dphi_domega, kappa=None):
    """Split-detector Fisher information at ``phi -> 0`` for a :class:`ModePair`.

    ``(dphi/domega)^2 * 4 (int_0^d E0 E1)^2 / int |E1|^2`` over the detector
    window.  Passing ``kappa`` includes the ``1 - kappa^2`` weight of the TE0
    amplitude, which makes the result exact rather than leading order.
    """
    weight = 1.0 if kappa is None else 1 - kappa**2
    return weight * dphi_domega**2 * 4 * modes.j[1] ** 2 / modes.te1_window_power


def mode_resolved_fisher(phi, kappa, dphi_domega):
    """Fisher information of TE0/TE1 counting on both output ports (exact)."""
    s, c = np.sin(phi / 2), np.cos(phi / 2)
    a2 = 1 - kappa**2
    # dP^2/P per outcome with the vanishing factor cancelled, so phi = 0 keeps its limit;
    # P = (a2 s^2, k^2 c^2, a2 c^2, k^2 s^2), dP = (a2, -k^2, -a2, k^2) * s c
    terms = [a2 * c * c, kappa**2 * s * s, a2 * s * s, kappa**2 * c * c]
    return dphi_domega**2 * float(np.sum(terms))


def sensitivity(dphi_domega, omega, architecture="wva", kappa=None):
    """Signal change per fractional frequency change, ``omega dphi/domega dS/dphi``."""
    if not dphi_domega > 0:
        raise ValueError("dispersion must be positive")
    if architecture == "mzi":
        gain = 1.0
    elif architecture == "wva":
        if kappa is None:
            raise ValueError("WVA sensitivity needs kappa")
        gain = 1 / (2 * kappa)
    else:
        raise ValueError(f"architecture must be 'mzi' or 'wva', got {architecture!r}")
    return omega * dphi_domega * gain


@dataclass(frozen=True)
class PrecisionScenario:
    detected_power: float = 2e-3
    wavelength: float = 1550e-9
    kappa: float = 0.05
    dphi_domega: float = 2.06e-11
    input_power: float = None
    integration_bandwidth: float = 1.0

    def __post_init__(self):
        if not self.detected_power > 0:
            raise ValueError("detected power must be positive")
        if not self.dphi_domega > 0:
            raise ValueError("dispersion must be positive")
        if self.input_power is None:
            object.__setattr__(self, "input_power", self.detected_power / self.kappa**2)
        if self.input_power < self.detected_power:
            raise ValueError("input power cannot be below detected power")


@dataclass(frozen=True)
class PrecisionReport:
    architecture: str
    fisher_per_photon: float
    qfi_per_photon: float
    crb_delta_omega: float
    photon_rate: float
    scenario: PrecisionScenario

    def to_dict(self):
        d = asdict(self)
        d["scenario"] = asdict(self.scenario)
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def crb_frequency(scenario, architecture):
    """Cramer-Rao bound on ``delta omega`` (rad/s per sqrt(Hz)).

    The MZI sees ``detected_power``; the WVA device is fed ``input_power``
    (``detected_power / kappa**2`` by default) while the dark port still
    delivers ``detected_power`` to the detector.  Both readouts extract
    ``(dphi/domega)^2`` per input photon.
    """
    power = {"mzi": scenario.detected_power, "wva": scenario.input_power}.get(architecture)
    if power is None:
        raise ValueError(f"architecture must be 'mzi' or 'wva', got {architecture!r}")
    # photons collected in a measurement of bandwidth B: rate / B
    photons = photon_rate(power, scenario.wavelength) / scenario.integration_bandwidth
    return 1 / (np.sqrt(photons) * scenario.dphi_domega)


def precision_report(scenario, architecture):
    power = scenario.detected_power if architecture == "mzi" else scenario.input_power
    fisher = scenario.dphi_domega**2
    return PrecisionReport(architecture, fisher, fisher, crb_frequency(scenario, architecture),
                           photon_rate(power, scenario.wavelength), scenario)
