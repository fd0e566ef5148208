"""
Slab waveguide modes
====================

The symmetric SiN/SiO2 slab (half-width 0.3 um) carries exactly two TE modes
at 1550 nm.  We print their effective indices, the antisymmetric overlap that
sets the displacement gain, the native group velocity, and the thermo-optic
slopes, then plot the normalized profiles.
"""
import numpy as np
from scipy.integrate import trapezoid

from _common import pyplot, save
from wvasim import (C_LIGHT, ThermoOpticModel, WaveguideGeometry, evaluate_mode,
                    mode_overlap_alpha, native_group_velocity, solve_te_modes, thermo_optic_slope)

geometry = WaveguideGeometry(half_width=0.3e-6, n_core=1.98, n_clad=1.45)
wavelength = 1550e-9
modes = solve_te_modes(geometry, wavelength)

print(f"V number         : {geometry.v_number(wavelength):.4f}")
for m in modes:
    print(f"TE{m.mode_index} n_eff        : {m.n_eff:.9f}")

alpha = mode_overlap_alpha(modes[0], modes[1], geometry)
print(f"alpha = <0|x|1>/d : {alpha:.6f}")

omega = 2 * np.pi * C_LIGHT / wavelength
print(f"v_g / c          : {native_group_velocity(geometry, omega) / C_LIGHT:.5f}")

thermo = ThermoOpticModel(dn1_dT=2.45e-5, dn2_dT=9.5e-6)
for k in (0, 1):
    print(f"dn_eff/dT TE{k}    : {thermo_optic_slope(geometry, thermo, wavelength, k):.4e} /K")

# L2 normalization check; TE1 is close to cutoff so its tail is long
x = np.linspace(-60 * geometry.half_width, 60 * geometry.half_width, 200001)
for m in modes:
    norm = trapezoid(evaluate_mode(m, geometry, x) ** 2, x)
    print(f"TE{m.mode_index} norm on +-60d : {norm:.8f}")

plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for m in modes:
        ax.plot(x * 1e6, evaluate_mode(m, geometry, x) * 1e-3, label=f"TE{m.mode_index}")
    for s in (-1, 1):
        ax.axvline(s * geometry.half_width * 1e6, color="0.6", lw=0.8, ls="--")
    ax.set_xlim(-2, 2)
    ax.set_xlabel("x (um)")
    ax.set_ylabel("field (1/sqrt(mm))")
    ax.legend()
    save(fig, "01_slab_modes.png")
