"""
Precision bounds
================

Both architectures reach the same Fisher information per input photon,
(dphi/domega)^2.  The WVA device gets its advantage by accepting a larger
input power while the detector still sees only 2 mW.  We also check that
the weak-value pair and the mode-resolved detector reach the quantum limit.
"""
import numpy as np

from wvasim import C_LIGHT, PrecisionScenario, precision_report, propagate, qfi
from wvasim.metrology import mode_resolved_fisher

scenario = PrecisionScenario(detected_power=2e-3, kappa=0.05, dphi_domega=2.06e-11)
for arch in ("mzi", "wva"):
    r = precision_report(scenario, arch)
    print(f"{arch.upper():3s}  power {('%.3g W' % (r.photon_rate * 6.626e-34 * C_LIGHT / 1550e-9))}  "
          f"CRB delta omega = {r.crb_delta_omega:8.2f} rad/s/sqrtHz")

dphi, kappa = 2.06e-11, 0.05
omega0 = 2 * np.pi * C_LIGHT / 1550e-9


def family(omega):
    return propagate(dphi * (omega - omega0), kappa)


full = qfi(family, omega0, "full")
fisher = mode_resolved_fisher(0.0, kappa, dphi)
print(f"QFI full output   : {full:.6e}  (dphi^2 = {dphi ** 2:.6e})")
print(f"mode-resolved FI  : {fisher:.6e}")
