"""
Command-line front end.

    wvasim [--config FILE] [--set key=value ...] [--seed N] [--output DIR] SUBCOMMAND

Each subcommand writes CSV and/or JSON into the output directory (default
``$WVASIM_OUTPUT`` or ``./wvasim-output``).  Exit status is 0 on success, 1 on
a computational or validation failure and 2 on a usage error.  Files written
by a failing subcommand are removed.
"""
import argparse
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import acceptance as acc
from . import grating as gr
from . import interferometer as itf
from . import metrology as met
from . import noise
from .config import load_config, parse_overrides, with_seed
from .errors import WVAError
from .io import remove_quietly, write_csv, write_json
from .waveguide import C_LIGHT, evaluate_mode, native_group_velocity, solve_te_modes, thermo_optic_slope


class Outputs:
    """Collects written files so a failing run can remove them."""

    def __init__(self, directory, formats):
        self.directory = Path(directory)
        self.formats = set(formats)
        self.written = []

    def csv(self, name, columns):
        if "csv" in self.formats:
            self.written.append(write_csv(self.directory / f"{name}.csv", columns))

    def json(self, name, payload):
        if "json" in self.formats:
            self.written.append(write_json(self.directory / f"{name}.json", payload))

    def discard(self):
        remove_quietly(self.written)
        self.written = []


def _omega(cfg):
    return 2 * np.pi * C_LIGHT / cfg.waveguide.wavelength


def _segments(cfg, spec):
    per_period = cfg.grating.segments_per_period
    return int(np.ceil(per_period * spec.length / spec.shortest_period()))


def cmd_modes(cfg, out):
    geo, lam = cfg.geometry(), cfg.waveguide.wavelength
    modes = solve_te_modes(geo, lam)
    out.csv("modes", {
        "mode_index": np.array([m.mode_index for m in modes]),
        "n_eff": np.array([m.n_eff for m in modes]),
        "beta_rad_m": np.array([m.beta for m in modes]),
        "K_rad_m": np.array([m.K for m in modes]),
        "gamma_rad_m": np.array([m.gamma for m in modes]),
        "A": np.array([m.A for m in modes]),
        "B_plus": np.array([m.B_plus for m in modes]),
        "B_minus": np.array([m.B_minus for m in modes]),
    })
    d = geo.half_width
    x = np.linspace(-4 * d, 4 * d, 801)
    profiles = {"x_m": x}
    profiles.update({f"te{m.mode_index}": evaluate_mode(m, geo, x) for m in modes})
    out.csv("mode_profiles", profiles)
    summary = {
        "v_number": geo.v_number(lam),
        "mode_count": len(modes),
        "n_eff": [m.n_eff for m in modes],
        "native_group_velocity_m_s": native_group_velocity(geo, _omega(cfg)),
    }
    summary["vg_over_c"] = summary["native_group_velocity_m_s"] / C_LIGHT
    thermo = cfg.thermo_model()
    summary["thermo_optic_slopes"] = [thermo_optic_slope(geo, thermo, lam, m.mode_index)
                                      for m in modes]
    if len(modes) >= 2:
        pair = itf.ModePair(modes[0], modes[1], geo, cfg.interferometer.detector_window)
        summary["alpha"] = pair.alpha
        summary["displacement_gain"] = pair.gain
    out.json("modes", summary)
    print(f"{len(modes)} TE modes; n_eff = {', '.join(f'{n:.6f}' for n in summary['n_eff'])}; "
          f"v_g = {summary['vg_over_c']:.5f} c")


def cmd_grating(cfg, out):
    spec = cfg.single_grating()
    s = cfg.grating.single
    omega = cfg.omega_grid(s.span_nm, s.points)
    method = cfg.grating.method
    seg = _segments(cfg, spec) if method == "thin-layer" else None
    resp = gr.grating_spectrum(spec, omega, method, cfg.grating.phase_source, seg)
    out.csv("grating_spectrum", resp.columns())
    centre = spec.bragg_omega()
    T0 = float(np.abs(1 / gr.fundamental_matrix(spec, centre)[0, 0]) ** 2)
    out.json("grating", {
        "method": method, "n_bar": spec.n_bar, "period_m": spec.components[0].period,
        "index_amplitude": spec.components[0].index_amplitude,
        "kappa_g_per_m": spec.coupling(), "kappa_g_L": spec.coupling() * spec.length,
        "bragg_omega_rad_s": centre, "band_gap_rad_s": list(spec.band_gap()),
        "gap_centre_transmission": T0,
    })
    print(f"single grating: kappa_g L = {spec.coupling() * spec.length:.4f}, "
          f"gap-centre transmission = {T0:.6e}")


def cmd_double_grating(cfg, out):
    spec = cfg.double_grating()
    d = cfg.grating.double
    mid = 0.5 * (spec.bragg_omega(0) + spec.bragg_omega(1))
    omega = cfg.omega_grid(d.span_nm, d.points)
    # put the mid-window frequency on the grid
    omega = omega - omega[d.points // 2] + mid
    resp = gr.grating_spectrum(spec, omega, "thin-layer", cfg.grating.phase_source,
                               _segments(cfg, spec))
    out.csv("double_grating_spectrum", resp.columns())
    k = d.points // 2
    summary = {"mid_omega_rad_s": mid, "mid_wavelength_nm": 2e9 * np.pi * C_LIGHT / mid,
               "mid_transmission": resp.transmission[k], "mid_vg_over_vgnative": resp.vg_ratio[k],
               "phase_source": cfg.grating.phase_source,
               "gaps_rad_s": [list(spec.band_gap(i)) for i in range(2)]}
    out.json("double_grating", summary)
    print(f"double grating mid-window: T = {summary['mid_transmission']:.5f}, "
          f"V_g/v_g = {summary['mid_vg_over_vgnative']:.4f}")


def cmd_dark_port(cfg, out):
    kappa = cfg.interferometer.kappa
    modes = itf.ModePair.solve(cfg.geometry(), cfg.waveguide.wavelength,
                               cfg.interferometer.detector_window)
    rows = []
    for k, phi in enumerate(cfg.interferometer.phi_values):
        dark = itf.dark_port_state(itf.propagate(phi, kappa))
        S, profile = itf.displacement_signal(dark, modes)
        out.csv(f"dark_port_{k}", profile.columns())
        rows.append({"phi_rad": phi, "signal": S, "I_left": profile.I_left,
                     "I_right": profile.I_right, "mean_x_m": profile.mean_x,
                     "mode_ratio_signal": itf.mode_ratio_signal(dark)})
    out.json("dark_port", {"kappa": kappa, "detector_window": modes.window, "alpha": modes.alpha,
                           "gain": modes.gain, "profiles": rows})
    for r in rows:
        print(f"phi = {r['phi_rad']:.4g}: S = {r['signal']:.6g}, <x> = {r['mean_x_m']:.4e} m")


def cmd_sweep(cfg, out):
    spec = cfg.double_grating()
    mid = 0.5 * (spec.bragg_omega(0) + spec.bragg_omega(1))
    i = cfg.interferometer
    span = 2 * np.pi * C_LIGHT * i.sweep_span_nm * 1e-9 / cfg.waveguide.wavelength**2
    omega = mid + np.linspace(-0.5, 0.5, i.sweep_points) * span
    modes = None
    if i.readout == "displacement":
        modes = itf.ModePair.solve(cfg.geometry(), cfg.waveguide.wavelength, i.detector_window)
    res = itf.simulate_frequency_readout(omega, spec, cfg.readout_config(), modes=modes)
    out.csv("sweep", res.columns())
    slope = np.polyfit(omega / mid, res.signal, 1)[0]
    out.json("sweep", {"readout": i.readout, "kappa": i.kappa, "signal_slope_per_fractional_omega": slope})
    print(f"readout sweep: dS/(domega/omega) = {slope:.4e}")


def cmd_precision(cfg, out):
    scenario = cfg.precision_scenario()
    omega = _omega(cfg)
    reports = {a: met.precision_report(scenario, a).to_dict() for a in ("mzi", "wva")}
    payload = {
        "units": "crb_delta_omega in rad/s per sqrt(Hz)",
        "mzi": reports["mzi"], "wva": reports["wva"],
        "sensitivity_mzi": met.sensitivity(scenario.dphi_domega, omega, "mzi"),
        "sensitivity_wva": met.sensitivity(scenario.dphi_domega, omega, "wva", scenario.kappa),
    }
    out.json("precision", payload)
    print(f"CRB: MZI {reports['mzi']['crb_delta_omega']:.4g}, WVA {reports['wva']['crb_delta_omega']:.4g} "
          "(rad/s)/sqrt(Hz)")


def cmd_bias_offset(cfg, out):
    b_cfg = cfg.noise.bias
    kappa = cfg.interferometer.kappa
    phis = np.linspace(0, b_cfg.phi_max, b_cfg.phi_points)
    cols = {k: [] for k in ("b", "phi_rad", "mzi_linear", "wva_linear", "mzi_exact", "wva_exact",
                            "mzi_sampled", "wva_sampled")}
    photons = met.photon_rate(cfg.metrology.detected_power, cfg.waveguide.wavelength) * cfg.noise.drift.gate_time
    for j, b in enumerate(b_cfg.offsets):
        mzi_mc, wva_mc = noise.simulate_bias_offset(phis, b, kappa, photons, seed=cfg.seed + j)
        cols["b"].append(np.full(phis.shape, b))
        cols["phi_rad"].append(phis)
        cols["mzi_linear"].append(noise.biased_estimate(phis, b, kappa, "mzi"))
        cols["wva_linear"].append(noise.biased_estimate(phis, b, kappa, "wva"))
        cols["mzi_exact"].append(noise.biased_readout(phis, b, kappa, "mzi"))
        cols["wva_exact"].append(noise.biased_readout(phis, b, kappa, "wva"))
        cols["mzi_sampled"].append(mzi_mc)
        cols["wva_sampled"].append(wva_mc)
    out.csv("bias_offset", {k: np.concatenate(v) for k, v in cols.items()})
    ratios = [float(noise.biased_readout(0.0, b, kappa, "wva") / noise.biased_readout(0.0, b, kappa, "mzi"))
              for b in b_cfg.offsets]
    out.json("bias_offset", {"kappa": kappa, "offsets": list(b_cfg.offsets), "wva_over_mzi": ratios})
    print("WVA/MZI offset ratio: " + ", ".join(f"{r:.4g}" for r in ratios) + f" (2 kappa = {2 * kappa:.4g})")


def _drift_runs(cfg):
    d = cfg.noise.drift
    modes = None
    if d.wva_readout == "displacement":
        modes = itf.ModePair.solve(cfg.geometry(), cfg.waveguide.wavelength, d.detector_window)
    return noise.simulate_drift_experiment(
        cfg.bias_model(), cfg.metrology.detected_power, cfg.waveguide.wavelength,
        cfg.interferometer.kappa, d.trajectories, d.gate_time, d.wva_readout, modes, cfg.geometry())


def cmd_drift(cfg, out):
    runs = _drift_runs(cfg)
    for k, run in enumerate(runs):
        out.csv(f"drift_trajectory_{k}", run.columns())
    summary = {
        "trajectories": len(runs), "photons_per_step": runs[0].photons_per_step,
        "drift_rate_std_deg_s": {a: noise.drift_rate_std(runs, a) for a in ("mzi", "wva")},
        "final_phase_estimate_rad": {
            "mzi": [r.phase_estimate_mzi[-1] for r in runs],
            "wva": [r.phase_estimate_wva[-1] for r in runs]},
    }
    out.json("drift", summary)
    rates = summary["drift_rate_std_deg_s"]
    print(f"drift-rate std: MZI {rates['mzi']:.3e} deg/s, WVA {rates['wva']:.3e} deg/s")


def cmd_allan(cfg, out):
    comp = noise.allan_comparison(_drift_runs(cfg))
    out.csv("allan", comp.columns())
    out.json("allan", {"mean_ratio": comp.mean_ratio, **{k: v for k, v in comp.columns().items()}})
    print(f"mean Allan-deviation ratio WVA/MZI = {comp.mean_ratio:.4g}")


def cmd_thermal(cfg, out):
    res = noise.thermal_drift(cfg.thermal_model(), cfg.noise.thermal.delta_T)
    out.json("thermal", {"delta_T": cfg.noise.thermal.delta_T, **asdict(res)})
    print(f"dphi/dT = {res.dphi_dT:.4e} rad/degC, (1/omega) domega/dT = "
          f"{res.fractional_frequency_per_degree:.4e} /degC, dphi01/dT = {res.dphi01_dT:.4e} rad/degC")


def cmd_acceptance(cfg, out, criteria=None):
    results = acc.run_acceptance(criteria, stream=sys.stdout)
    out.json("acceptance", [{"number": r.number, "name": r.name, "passed": r.passed,
                             "seconds": r.seconds, "checks": r.checks} for r in results])
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def cmd_config(cfg, out):
    sys.stdout.write(cfg.to_yaml())


COMMANDS = {
    "modes": (cmd_modes, "TE modes, profiles, group velocity and thermo-optic slopes"),
    "grating": (cmd_grating, "single-grating spectrum"),
    "double-grating": (cmd_double_grating, "double-grating spectrum (thin-layer method)"),
    "dark-port": (cmd_dark_port, "dark-port intensity profiles and displacement signals"),
    "sweep": (cmd_sweep, "readout signal versus frequency through the double grating"),
    "precision": (cmd_precision, "Cramer-Rao bounds and sensitivities"),
    "bias-offset": (cmd_bias_offset, "phase estimate under a constant bias"),
    "drift": (cmd_drift, "random-walk bias trajectories"),
    "allan": (cmd_allan, "Allan deviation of the drift experiment"),
    "thermal": (cmd_thermal, "thermo-optic drift"),
    "acceptance": (cmd_acceptance, "run the acceptance suite"),
    "config": (cmd_config, "print the effective scenario configuration"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="wvasim", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--config", help="scenario YAML file")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, e.g. --set interferometer.kappa=0.1")
    parser.add_argument("--seed", type=int, help="random seed (overrides the config)")
    parser.add_argument("--output", help="output directory (default $WVASIM_OUTPUT or ./wvasim-output)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        if name == "acceptance":
            p.add_argument("criteria", nargs="*", type=int, help="criterion numbers (default: all)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    out = None
    try:
        cfg = with_seed(load_config(args.config, parse_overrides(args.overrides)), args.seed)
        if args.output:
            cfg = replace(cfg, output=replace(cfg.output, directory=args.output))
        out = Outputs(cfg.output_directory(), cfg.output.formats)
        fn = COMMANDS[args.command][0]
        if args.command == "acceptance":
            if any(c not in acc.REGISTRY for c in args.criteria):
                parser.error(f"criteria must be among {sorted(acc.REGISTRY)}")
            status = fn(cfg, out, args.criteria or None)
        else:
            status = fn(cfg, out) or 0
    except (WVAError, ValueError, OSError, ArithmeticError) as exc:
        if out is not None:
            out.discard()
        print(f"wvasim {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
