"""
Bragg gratings and slow light
=============================

A uniform grating with kappa*L = 4 shows the familiar stop band and the
slowed group velocity at its edges.  Two gratings centered 0.36 nm apart
leave a transparent window between them where the phase is steep: this is
the dispersion that the interferometer turns into a frequency signal.
The double grating has no closed form and is built from thin layers; the
staircase is first checked against the closed form on the uniform grating.
"""
import numpy as np

from _common import pyplot, save
from wvasim import (C_LIGHT, WaveguideGeometry, double_grating, grating_phase_dispersion,
                    grating_spectrum, single_grating)

geometry = WaveguideGeometry(0.3e-6, 1.98, 1.45)
wavelength = 1550e-9


def grid(span_nm, points):
    wl = wavelength + np.linspace(-0.5, 0.5, points) * span_nm * 1e-9
    return np.sort(2 * np.pi * C_LIGHT / wl)


single = single_grating(geometry, wavelength, kappa_length=4.0)
sp = grating_spectrum(single, grid(2.0, 2001))
print(f"single grating: min T = {sp.transmission.min():.5f}  "
      f"(1/cosh^2(4) = {1 / np.cosh(4) ** 2:.5f})")

dg = double_grating(geometry, wavelength)
dsp = grating_spectrum(dg, grid(0.8, 801), method="thin-layer")
omega_mid = 0.5 * (dg.bragg_omega(0) + dg.bragg_omega(1))
phi, dphi = grating_phase_dispersion(dg, omega_mid)
print(f"double grating, window center: T = {np.interp(omega_mid, dsp.omega, dsp.transmission):.5f}")
print(f"  phase {phi:.3e} rad, dphi/domega = {dphi:.4e} s")

# thin-layer staircase vs closed form on the single grating
probe = grid(2.0, 41)
closed = grating_spectrum(single, probe).transmission
staircase = grating_spectrum(single, probe, method="thin-layer").transmission
print(f"single grating, thin-layer vs closed form: max |dT| = {np.max(np.abs(closed - staircase)):.2e}")

plt = pyplot()
if plt is not None:
    fig, axes = plt.subplots(2, 2, figsize=(9, 5.5), sharex="col")
    axes[0, 0].plot(sp.wavelength * 1e9, sp.transmission)
    axes[1, 0].plot(sp.wavelength * 1e9, sp.vg_ratio)
    axes[0, 1].plot(dsp.wavelength * 1e9, dsp.transmission)
    axes[1, 1].plot(dsp.wavelength * 1e9, dsp.vg_ratio)
    axes[0, 0].set_ylabel("T")
    axes[1, 0].set_ylabel("V_g / v_g")
    axes[0, 0].set_title("single, kappa L = 4")
    axes[0, 1].set_title("double grating")
    for ax in axes[1]:
        ax.set_xlabel("wavelength (nm)")
        ax.set_ylim(0, 1.2)
    save(fig, "02_bragg_gratings.png")
