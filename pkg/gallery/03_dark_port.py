"""
Dark-port readout
=================

The weak TE0->TE1 conversion (kappa = 0.05) leaves a small dark-port field
whose TE0/TE1 mix depends on the arm phase.  Two readouts are shown: the
mode ratio and the split-detector displacement of the transverse profile.
Both stay close to their linear small-phase laws while phi << kappa.
"""
import numpy as np

from _common import pyplot, save
from wvasim import ModePair, WaveguideGeometry, dark_port_state, displacement_signal, propagate
from wvasim.interferometer import mode_ratio_signal

geometry = WaveguideGeometry(0.3e-6, 1.98, 1.45)
kappa = 0.05
modes = ModePair.solve(geometry, 1550e-9)

print(f"window gain (J_R - J_L)/P1 = {modes.gain:.4f}")
print(" phi      mode-ratio   phi/(2k)    displacement   post-select P")
profiles = []
for phi in (0.0, 0.002, 0.004, 0.006):
    dark = dark_port_state(propagate(phi, kappa))
    s_disp, profile = displacement_signal(dark, modes)
    profiles.append((phi, profile))
    print(f"{phi:6.3f}   {mode_ratio_signal(dark):10.6f}   {phi / (2 * kappa):9.5f}   "
          f"{s_disp:12.6f}   {np.sum(np.abs(dark) ** 2):.4e}")

plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for phi, prof in profiles:
        ax.plot(prof.x_grid * 1e6, prof.intensity / prof.intensity.max(), label=f"phi = {phi}")
    ax.set_xlabel("x (um)")
    ax.set_ylabel("normalized dark-port intensity")
    ax.legend()
    save(fig, "03_dark_port.png")
