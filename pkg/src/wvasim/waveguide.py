"""
Guided TE modes of a symmetric planar (slab) waveguide.

The core occupies ``|x| <= d`` with index ``n1``; both claddings have index
``n2 < n1``.  Mode ``m`` has a cosine (even ``m``) or sine (odd ``m``) core
profile and exponential tails, with its transverse wavenumber ``K`` fixed by

    gamma d = K d tan(K d - m pi / 2),    K^2 + gamma^2 = k0^2 (n1^2 - n2^2).

Fields are normalized to unit L2 norm over the whole line, so ``|E(x)|^2``
integrates to one and can be read as a photon position density.
"""
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import ConvergenceError, CutoffError, NotGuidingError

C_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class WaveguideGeometry:
    """Symmetric slab: half-width ``d`` (m), core index ``n1``, cladding index ``n2``."""

    half_width: float
    n_core: float
    n_clad: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if not self.n_clad > 0:
            raise ValueError(f"cladding index must be positive, got {self.n_clad}")
        if not self.n_core > self.n_clad:
            raise NotGuidingError(
                f"not guiding: core index {self.n_core} must exceed cladding index {self.n_clad}")

    @property
    def numerical_aperture(self):
        return np.sqrt(self.n_core**2 - self.n_clad**2)

    def v_number(self, wavelength):
        """Normalized frequency ``k0 d sqrt(n1^2 - n2^2)``."""
        return 2 * np.pi / wavelength * self.half_width * self.numerical_aperture

    def mode_count(self, wavelength):
        """Number of TE modes with ``V > m pi / 2``.

        A mode exactly at cutoff (``V == m pi/2``) has zero decay constant and
        is not counted.
        """
        return int(np.ceil(self.v_number(wavelength) / (np.pi / 2)))

    def at_temperature(self, model, temperature):
        """Geometry with indices shifted linearly by the thermo-optic model."""
        dT = temperature - model.reference_temperature
        return replace(self, n_core=self.n_core + model.dn1_dT * dT,
                       n_clad=self.n_clad + model.dn2_dT * dT)


REFERENCE_GEOMETRY = WaveguideGeometry(half_width=0.3e-6, n_core=1.98, n_clad=1.45)
REFERENCE_WAVELENGTH = 1550e-9


@dataclass(frozen=True)
class TEModeSolution:
    mode_index: int
    k0: float
    beta: float
    K: float
    gamma: float
    A: float
    B_plus: float
    B_minus: float

    @property
    def wavelength(self):
        return 2 * np.pi / self.k0

    @property
    def n_eff(self):
        return self.beta / self.k0

    @property
    def is_even(self):
        return self.mode_index % 2 == 0


@dataclass(frozen=True)
class ThermoOpticModel:
    """Linear thermo-optic coefficients (1/degC) for core and cladding.

    Defaults are Si3N4 core on SiO2 cladding, referenced to 25 degC.
    """

    dn1_dT: float = 2.45e-5
    dn2_dT: float = 9.5e-6
    reference_temperature: float = 25.0

    def __post_init__(self):
        if not (np.isfinite(self.dn1_dT) and np.isfinite(self.dn2_dT)):
            raise ValueError("thermo-optic coefficients must be finite")


def _residual(u, v, m):
    return np.sqrt(max(v * v - u * u, 0.0)) - u * np.tan(u - m * np.pi / 2)


def _solve_branch(geometry, wavelength, m, rtol):
    v = geometry.v_number(wavelength)
    lo = m * np.pi / 2
    hi = min((m + 1) * np.pi / 2, v)
    # open bracket: nudge endpoints off the tangent pole / cutoff
    eps = 1e-13 * max(1.0, hi)
    u = brentq(_residual, lo + eps, hi - eps, args=(v, m), xtol=1e-15, rtol=4 * np.finfo(float).eps,
               maxiter=200)
    d = geometry.half_width
    k0 = 2 * np.pi / wavelength
    K = u / d
    gamma = np.sqrt(max(v * v - u * u, 0.0)) / d
    beta = np.sqrt((geometry.n_core * k0) ** 2 - K * K)
    residual = gamma * d - K * d * np.tan(K * d - m * np.pi / 2)
    if abs(residual) > rtol * max(1.0, v):
        raise ConvergenceError(f"TE{m} transcendental equation did not converge", residual)

    if m % 2 == 0:
        edge = np.cos(K * d)
        core_norm = d + np.sin(2 * K * d) / (2 * K)
    else:
        edge = np.sin(K * d)
        core_norm = d - np.sin(2 * K * d) / (2 * K)
    # exponential tails integrate analytically: 2 * edge^2 / (2 gamma)
    A = 1.0 / np.sqrt(core_norm + edge**2 / gamma)
    b_plus = A * edge
    b_minus = b_plus if m % 2 == 0 else -b_plus
    return TEModeSolution(m, k0, beta, K, gamma, A, b_plus, b_minus)


def solve_te_modes(geometry, wavelength, rtol=1e-10):
    """Solve every guided TE mode of ``geometry`` at ``wavelength`` (m).

    Returns a list ordered by mode index.  Each branch of the transcendental
    equation is bracketed on ``K d in (m pi/2, min((m+1) pi/2, V))`` and
    solved with Brent's method.
    """
    if not wavelength > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return [_solve_branch(geometry, wavelength, m, rtol)
            for m in range(geometry.mode_count(wavelength))]


def solve_te_mode(geometry, wavelength, mode_index=0):
    """Solve a single TE mode, raising :class:`CutoffError` if it is not guided."""
    if mode_index >= geometry.mode_count(wavelength):
        raise CutoffError(f"TE{mode_index} is not guided at wavelength {wavelength:.6e} m")
    return _solve_branch(geometry, wavelength, mode_index, 1e-10)


def evaluate_mode(mode, geometry, x):
    """Real transverse field of ``mode`` at positions ``x`` (m), in m^-1/2."""
    x = np.asarray(x, dtype=float)
    d = geometry.half_width
    if mode.is_even:
        core = mode.A * np.cos(mode.K * x)
    else:
        core = mode.A * np.sin(mode.K * x)
    with np.errstate(over="ignore"):
        right = mode.B_plus * np.exp(-mode.gamma * (x - d))
        left = mode.B_minus * np.exp(mode.gamma * (x + d))
    return np.where(x > d, right, np.where(x < -d, left, core))


def propagation_constant(geometry, omega, mode_index=0):
    """Propagation constant ``beta(omega)`` (rad/m) of one TE mode."""
    return solve_te_mode(geometry, 2 * np.pi * C_LIGHT / omega, mode_index).beta


def group_velocity(beta_of_omega, omega, rel_step=1e-6):
    """``(d beta / d omega)^-1`` from a central difference of ``beta_of_omega``."""
    h = rel_step * omega
    return 2 * h / (beta_of_omega(omega + h) - beta_of_omega(omega - h))


def native_group_velocity(geometry, omega, rel_step=1e-6, mode_index=0):
    """Group velocity of the bare waveguide (m/s) at angular frequency ``omega``.

    Raises :class:`CutoffError` if the difference stencil leaves the guided
    range of the mode.
    """
    h = rel_step * omega
    for w in (omega - h, omega + h):
        if mode_index >= geometry.mode_count(2 * np.pi * C_LIGHT / w):
            raise CutoffError(
                f"TE{mode_index} crosses cutoff inside the group-velocity stencil at omega={omega:.6e}")
    vg = group_velocity(lambda w: propagation_constant(geometry, w, mode_index), omega, rel_step)
    return vg


def _integrate(f, a, b):
    val, _ = quad(f, a, b, epsabs=1e-10, epsrel=1e-12, limit=200)
    return val


def finite_limits(a, b, geometry, gamma):
    """Replace infinite limits by ``d + 60 / gamma``, where the tails are below 1e-26."""
    reach = geometry.half_width + 60.0 / gamma
    return max(a, -reach), min(b, reach)


def mode_product_integral(mode_a, mode_b, geometry, a, b):
    """Integral of ``E_a(x) E_b(x)`` over ``[a, b]`` (may be infinite)."""
    d = geometry.half_width
    a, b = finite_limits(a, b, geometry, min(mode_a.gamma, mode_b.gamma))
    pieces = [p for p in (-d, 0.0, d) if a < p < b]
    edges = [a, *pieces, b]
    f = lambda x: float(evaluate_mode(mode_a, geometry, x) * evaluate_mode(mode_b, geometry, x))
    return sum(_integrate(f, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))


def mode_overlap_alpha(mode0, mode1, geometry):
    """Split-detector overlap ``int_{-d}^0 E0 E1 - int_0^d E0 E1``.

    Antisymmetric in the two half-cores; for an even/odd pair the two halves
    are equal and opposite.
    """
    d = geometry.half_width
    left = mode_product_integral(mode0, mode1, geometry, -d, 0.0)
    right = mode_product_integral(mode0, mode1, geometry, 0.0, d)
    return left - right


def core_power(mode, geometry):
    """Fraction of the mode's power inside ``|x| <= d``."""
    d = geometry.half_width
    return mode_product_integral(mode, mode, geometry, -d, d)


def thermo_optic_slope(geometry, model, wavelength, mode_index=0, temperature_range=(0.0, 50.0),
                       points=11):
    """Least-squares slope of ``n_eff(T)`` (1/degC) over a temperature sweep."""
    temps = np.linspace(*temperature_range, points)
    n_eff = []
    for T in temps:
        geo = geometry.at_temperature(model, T)
        if mode_index >= geo.mode_count(wavelength):
            raise CutoffError(f"TE{mode_index} is cut off at T={T:.3g} degC")
        n_eff.append(solve_te_mode(geo, wavelength, mode_index).n_eff)
    slope, _ = np.polyfit(temps, n_eff, 1)
    return slope
