import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wvasim.errors import BandGapError, GridTooCoarseError, ResolutionError
from wvasim.grating import (GratingComponent, GratingSpec, dispersion_from_group_velocity,
                            double_grating, fundamental_matrix, grating_phase_dispersion,
                            grating_spectrum, infinite_grating_response, single_grating,
                            thin_layer_matrix)
from wvasim.waveguide import C_LIGHT, REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH

OMEGA_REF = 2 * np.pi * C_LIGHT / REFERENCE_WAVELENGTH


@pytest.fixture(scope="module")
def reference_grating():
    return single_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)


@pytest.fixture(scope="module")
def short_grating():
    # same kappa_g L, 1 mm long: cheap for thin-layer checks
    return single_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH, length=1e-3)


def detuned(spec, units):
    """Frequencies at ``delta = units * kappa_g``."""
    return spec.bragg_omega() + np.asarray(units) * spec.coupling() * spec.group_velocity


def transmission(F):
    return np.abs(1 / F[..., 0, 0]) ** 2


def test_coupling_and_centre(reference_grating):
    spec = reference_grating
    assert spec.coupling() * spec.length == pytest.approx(4.0, rel=1e-12)
    lam_b = 2 * spec.n_bar * spec.components[0].period
    assert spec.coupling() == pytest.approx(np.pi * spec.components[0].index_amplitude / lam_b)
    assert spec.detuning(spec.bragg_omega()) == pytest.approx(0, abs=1e-6)
    # n_a = 3e-4 reproduces kappa_g L ~ 4 over 6.58 mm
    assert spec.components[0].index_amplitude == pytest.approx(3e-4, rel=0.01)


def test_infinite_grating_limits(reference_grating):
    spec = reference_grating
    kappa = spec.coupling()
    bare = GratingSpec(spec.n_bar, [GratingComponent(spec.components[0].period, 0.0)], spec.length,
                       spec.group_velocity)
    omega = detuned(spec, [-3.0, 0.7, 5.0])
    q, vg = infinite_grating_response(bare, omega)
    assert np.allclose(q, bare.detuning(omega))
    assert np.allclose(vg, bare.group_velocity)

    q, vg = infinite_grating_response(spec, spec.bragg_omega() + kappa * spec.group_velocity)
    assert abs(q) == pytest.approx(0, abs=1e-6 * kappa)
    assert vg == pytest.approx(0, abs=1e-3 * spec.group_velocity)

    _, vg = infinite_grating_response(spec, detuned(spec, np.sqrt(2)))
    assert vg == pytest.approx(spec.group_velocity / np.sqrt(2), rel=1e-9)
    q, vg = infinite_grating_response(spec, spec.bragg_omega())
    assert np.isnan(vg) and q.imag > 0
    _, vg = infinite_grating_response(spec, detuned(spec, 20.0))
    assert vg / spec.group_velocity == pytest.approx(1, rel=0.01)


def test_fundamental_gap_centre(reference_grating):
    F = fundamental_matrix(reference_grating, reference_grating.bragg_omega())
    assert transmission(F) == pytest.approx(1 / np.cosh(4.0) ** 2, abs=1e-12)


def test_fundamental_without_coupling(reference_grating):
    spec = reference_grating
    bare = GratingSpec(spec.n_bar, [GratingComponent(spec.components[0].period, 0.0)], spec.length,
                       spec.group_velocity)
    F = fundamental_matrix(bare, detuned(spec, np.linspace(-5, 5, 11)))
    assert np.allclose(np.abs(F[:, 0, 0]), 1)
    assert np.allclose(F[:, 1, 0], 0)
    # pure propagation: t = exp(i beta L)
    omega = detuned(spec, 2.0)
    t = 1 / fundamental_matrix(bare, omega)[0, 0]
    assert np.angle(t * np.exp(-1j * bare.beta(omega) * bare.length)) == pytest.approx(0, abs=1e-6)


def test_band_edge_is_finite(reference_grating):
    F = fundamental_matrix(reference_grating, detuned(reference_grating, [-1.0, 1.0]))
    assert np.all(np.isfinite(F))
    # q -> 0 limit: |t|^2 = 1 / (1 + (kappa L)^2)
    assert transmission(F) == pytest.approx(1 / (1 + 16.0), rel=1e-6)


@given(st.floats(-30, 30))
def test_fundamental_determinant_and_unitarity(units):
    spec = single_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    F = fundamental_matrix(spec, detuned(spec, units))
    assert abs(np.linalg.det(F) - 1) < 1e-9
    r, t = F[1, 0] / F[0, 0], 1 / F[0, 0]
    assert abs(abs(r) ** 2 + abs(t) ** 2 - 1) < 1e-12


def test_thin_layer_uniform_profile(short_grating):
    omega = detuned(short_grating, np.linspace(-5, 5, 7))
    F = thin_layer_matrix(short_grating, omega, profile=lambda z: np.full(z.shape, short_grating.n_bar))
    assert np.allclose(np.abs(1 / F[:, 0, 0]), 1, atol=1e-12)
    assert np.allclose(F[:, 1, 0], 0, atol=1e-12)


def test_thin_layer_matches_fundamental(short_grating):
    omega = detuned(short_grating, np.linspace(-10, 10, 81))
    T_fund = transmission(fundamental_matrix(short_grating, omega))
    T_thin = transmission(thin_layer_matrix(short_grating, omega))
    assert np.max(np.abs(T_fund - T_thin)) < 2e-2
    # with the staircase correction the agreement is much tighter
    assert np.max(np.abs(T_fund - T_thin)) < 2e-3


def test_uncorrected_staircase_undercouples(short_grating):
    omega = detuned(short_grating, np.linspace(-3, 3, 25))
    T_fund = transmission(fundamental_matrix(short_grating, omega))
    T_raw = transmission(thin_layer_matrix(short_grating, omega, staircase_correction=False))
    T_cor = transmission(thin_layer_matrix(short_grating, omega))
    assert np.max(np.abs(T_raw - T_fund)) > 5 * np.max(np.abs(T_cor - T_fund))


def test_thin_layer_self_convergence(short_grating):
    omega = detuned(short_grating, np.linspace(-10, 10, 41))
    n = short_grating.minimum_segments()
    T1 = transmission(thin_layer_matrix(short_grating, omega, n))
    T2 = transmission(thin_layer_matrix(short_grating, omega, 2 * n))
    assert np.max(np.abs(T1 - T2)) < 1e-3


def test_thin_layer_reciprocity(short_grating):
    spec = short_grating
    omega = detuned(spec, np.linspace(-6, 6, 25))
    l = spec.length / spec.minimum_segments()
    forward = thin_layer_matrix(spec, omega, profile=lambda z: spec.index_profile(z + 0.1 * spec.components[0].period, l))
    backward = thin_layer_matrix(spec, omega, profile=lambda z: spec.index_profile(spec.length - z + 0.1 * spec.components[0].period, l))
    assert np.allclose(np.abs(1 / forward[:, 0, 0]), np.abs(1 / backward[:, 0, 0]), atol=1e-9)


def test_thin_layer_determinant_and_unitarity(short_grating):
    F = thin_layer_matrix(short_grating, detuned(short_grating, np.linspace(-4, 4, 9)))
    assert np.allclose(np.linalg.det(F), 1, atol=1e-9)
    r, t = F[:, 1, 0] / F[:, 0, 0], 1 / F[:, 0, 0]
    assert np.allclose(np.abs(r) ** 2 + np.abs(t) ** 2, 1, atol=1e-6)


def test_resolution_floor(short_grating):
    minimum = short_grating.minimum_segments()
    with pytest.raises(ResolutionError) as info:
        thin_layer_matrix(short_grating, OMEGA_REF, minimum - 1)
    assert info.value.minimum == minimum
    assert str(minimum) in str(info.value)


def test_spectrum_single_grating(reference_grating):
    spec = reference_grating
    units = np.linspace(-25, 25, 5001)
    resp = grating_spectrum(spec, detuned(spec, units))
    assert np.allclose(resp.reflectance + resp.transmission, 1, atol=1e-6)
    assert np.all((resp.transmission >= 0) & (resp.transmission <= 1))
    centre = np.argmin(np.abs(units))
    # Hartman regime: superluminal tunnelling with almost no transmission
    assert resp.transmission[centre] < 0.01 and resp.vg_ratio[centre] > 1
    # finite V_g converges on the infinite-grating result away from the gap
    for u in (-20.0, -5.0, 5.0, 20.0):
        i = np.argmin(np.abs(units - u))
        _, v_inf = infinite_grating_response(spec, resp.omega[i])
        assert resp.group_velocity[i] / v_inf == pytest.approx(1, rel=0.02)
    i = np.argmin(np.abs(units - 20))
    assert resp.vg_ratio[i] == pytest.approx(1, rel=0.01)
    # far from the gap the effective index returns to the waveguide index
    bare_index = spec.beta(resp.omega[-1]) * C_LIGHT / resp.omega[-1]
    assert resp.effective_index[-1] == pytest.approx(bare_index, rel=1e-5)
    # oscillation about the infinite curve near the gap
    near = (np.abs(units) > 1.2) & (np.abs(units) < 4)
    _, v_inf = infinite_grating_response(spec, resp.omega[near])
    dev = resp.group_velocity[near] / v_inf - 1
    assert dev.min() < 0 < dev.max()


def test_reflection_and_transmission_delays_agree(reference_grating):
    spec = reference_grating
    units = np.linspace(-8, 8, 1601)
    resp = grating_spectrum(spec, detuned(spec, units))
    interior = slice(5, -5)
    assert np.allclose(resp.transmission_delay[interior], resp.reflection_delay[interior], rtol=1e-6)
    refl = grating_spectrum(spec, resp.omega, phase_source="reflection")
    assert np.allclose(refl.group_velocity[interior], resp.group_velocity[interior], rtol=1e-6)


def test_spectrum_columns(reference_grating):
    resp = grating_spectrum(reference_grating, detuned(reference_grating, np.linspace(-5, 5, 201)))
    assert list(resp.columns()) == ["omega_rad_s", "wavelength_nm", "re_r", "im_r", "re_t", "im_t",
                                    "transmission", "vg_over_vgnative", "n_eff"]


def test_grid_too_coarse(reference_grating):
    with pytest.raises(GridTooCoarseError, match="grid too coarse"):
        grating_spectrum(reference_grating, detuned(reference_grating, np.linspace(-3, 3, 9)))


def test_spectrum_rejects_bad_grids(reference_grating):
    with pytest.raises(ValueError):
        grating_spectrum(reference_grating, detuned(reference_grating, [3.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        grating_spectrum(reference_grating, detuned(reference_grating, [1.0, 2.0]))


def test_double_grating_requires_thin_layer():
    spec = double_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    with pytest.raises(ValueError, match="thin-layer"):
        grating_spectrum(spec, OMEGA_REF + np.arange(3.0), method="fundamental")
    with pytest.raises(ValueError):
        fundamental_matrix(spec, OMEGA_REF)


def test_double_grating_gap_centres():
    spec = double_grating(REFERENCE_GEOMETRY, REFERENCE_WAVELENGTH)
    for k, lam in enumerate((1549.82e-9, 1550.18e-9)):
        assert 2 * np.pi * C_LIGHT / spec.bragg_omega(k) == pytest.approx(lam, rel=1e-12)
        assert spec.coupling(k) * spec.length == pytest.approx(4.0, rel=0.01)
    mid = 0.5 * (spec.bragg_omega(0) + spec.bragg_omega(1))
    assert not spec.in_band_gap(mid)
    assert spec.in_band_gap(spec.bragg_omega(0)) and spec.in_band_gap(spec.bragg_omega(1))


def test_dispersion_formula():
    assert dispersion_from_group_velocity(6.58e-3, 1.5e8, 1.5e8) == 0
    vg = 0.5 * C_LIGHT
    dphi = dispersion_from_group_velocity(6.58e-3, vg, 0.68 * vg)
    assert OMEGA_REF * dphi == pytest.approx(2.5e4, rel=0.10)


def test_phase_dispersion_matches_finite_difference(reference_grating):
    spec = reference_grating
    omega = detuned(spec, np.array([-9.0, -4.0, 3.0, 7.5]))
    phi, dphi = grating_phase_dispersion(spec, omega)
    h = 2e-3 * spec.group_velocity / spec.length
    plus, _ = grating_phase_dispersion(spec, omega + h)
    minus, _ = grating_phase_dispersion(spec, omega - h)
    fd = np.angle(np.exp(1j * (plus - minus))) / (2 * h)
    assert np.allclose(dphi, fd, rtol=0.01)
    assert np.all(np.abs(phi) <= np.pi)
    # slow light gives positive dispersion
    resp = grating_spectrum(spec, detuned(spec, np.linspace(-9.5, -8.5, 101)))
    slow = resp.vg_ratio[50] < 1
    assert (dphi[0] > 0) == slow


def test_phase_dispersion_in_gap(reference_grating):
    with pytest.raises(BandGapError):
        grating_phase_dispersion(reference_grating, reference_grating.bragg_omega())


def test_phase_dispersion_scalar(reference_grating):
    phi, dphi = grating_phase_dispersion(reference_grating, float(detuned(reference_grating, 6.0)))
    assert isinstance(phi, float) and isinstance(dphi, float)


def test_spec_validation():
    with pytest.raises(ValueError):
        GratingComponent(-1.0, 1e-4)
    with pytest.raises(ValueError):
        GratingComponent(1e-6, -1e-4)
    with pytest.raises(ValueError):
        GratingSpec(1.8, [GratingComponent(4e-7, 1e-4)], 0.0)
    with pytest.raises(ValueError):
        GratingSpec(1.8, [], 1e-3)
    with pytest.raises(ValueError):
        GratingSpec(1.8, [GratingComponent(4e-7, 0.5)], 1e-3)
