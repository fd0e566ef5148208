"""
Scenario configuration: a nested YAML file whose every key has a default.

An empty file yields the default scenario.  Unknown keys and type errors are
reported with the offending key path and file line.  ``--set a.b=value``
overrides are applied on top of the file before validation.
"""
import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace

import numpy as np
import yaml

from .errors import ConfigError
from .grating import double_grating, single_grating
from .interferometer import ReadoutConfig
from .metrology import PrecisionScenario
from .noise import DEFAULT_GATE_TIME, BiasModel, ThermalDriftModel
from .waveguide import C_LIGHT, ThermoOpticModel, WaveguideGeometry

OUTPUT_ENV = "WVASIM_OUTPUT"


@dataclass(frozen=True)
class ThermoSection:
    dn1_dT: float = 2.45e-5
    dn2_dT: float = 9.5e-6
    reference_temperature: float = 25.0


@dataclass(frozen=True)
class WaveguideSection:
    half_width: float = 0.3e-6
    n_core: float = 1.98
    n_clad: float = 1.45
    wavelength: float = 1550e-9
    thermo: ThermoSection = field(default_factory=ThermoSection)


@dataclass(frozen=True)
class SingleGratingSection:
    kappa_length: float = 4.0
    span_nm: float = 2.0
    points: int = 4001


@dataclass(frozen=True)
class DoubleGratingSection:
    centers_nm: tuple = (1549.82, 1550.18)
    amplitudes: tuple = (3e-4, 3e-4)
    span_nm: float = 0.8
    points: int = 801


@dataclass(frozen=True)
class GratingSection:
    length: float = 6.58e-3
    method: str = "fundamental"
    phase_source: str = "transmission"
    segments_per_period: int = 20
    single: SingleGratingSection = field(default_factory=SingleGratingSection)
    double: DoubleGratingSection = field(default_factory=DoubleGratingSection)


@dataclass(frozen=True)
class InterferometerSection:
    kappa: float = 0.05
    readout: str = "mode-ratio"
    detector_window: str = "core"
    phi_values: tuple = (0.0, 0.002, 0.004, 0.006)
    sweep_span_nm: float = 0.001
    sweep_points: int = 41


@dataclass(frozen=True)
class MetrologySection:
    detected_power: float = 2e-3
    input_power: float = None
    dphi_domega: float = 2.06e-11
    integration_bandwidth: float = 1.0


@dataclass(frozen=True)
class BiasSection:
    b0: float = 0.0
    sigma_walk: float = 1e-5
    dt: float = 1.0
    steps: int = 1000
    offsets: tuple = (0.002, 0.01, 0.02)
    phi_max: float = 0.1
    phi_points: int = 21


@dataclass(frozen=True)
class DriftSection:
    trajectories: int = 5
    gate_time: float = DEFAULT_GATE_TIME
    wva_readout: str = "displacement"
    detector_window: str = "full"


@dataclass(frozen=True)
class ThermalSection:
    delta_L: float = 10e-6
    delta_T: float = 1.0


@dataclass(frozen=True)
class NoiseSection:
    bias: BiasSection = field(default_factory=BiasSection)
    drift: DriftSection = field(default_factory=DriftSection)
    thermal: ThermalSection = field(default_factory=ThermalSection)


@dataclass(frozen=True)
class OutputSection:
    directory: str = None
    formats: tuple = ("csv", "json")


@dataclass(frozen=True)
class ScenarioConfig:
    waveguide: WaveguideSection = field(default_factory=WaveguideSection)
    grating: GratingSection = field(default_factory=GratingSection)
    interferometer: InterferometerSection = field(default_factory=InterferometerSection)
    metrology: MetrologySection = field(default_factory=MetrologySection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    output: OutputSection = field(default_factory=OutputSection)
    seed: int = 0

    # domain objects built from the sections

    def geometry(self):
        w = self.waveguide
        return WaveguideGeometry(w.half_width, w.n_core, w.n_clad)

    def thermo_model(self):
        t = self.waveguide.thermo
        return ThermoOpticModel(t.dn1_dT, t.dn2_dT, t.reference_temperature)

    def single_grating(self):
        return single_grating(self.geometry(), self.waveguide.wavelength, self.grating.length,
                              self.grating.single.kappa_length)

    def double_grating(self):
        d = self.grating.double
        return double_grating(self.geometry(), self.waveguide.wavelength,
                              tuple(c * 1e-9 for c in d.centers_nm), tuple(d.amplitudes),
                              self.grating.length)

    def omega_grid(self, span_nm, points):
        lam = self.waveguide.wavelength
        wl = lam + np.linspace(-0.5, 0.5, points) * span_nm * 1e-9
        return np.sort(2 * np.pi * C_LIGHT / wl)

    def readout_config(self):
        return ReadoutConfig(self.interferometer.kappa, self.interferometer.readout)

    def precision_scenario(self):
        m = self.metrology
        return PrecisionScenario(m.detected_power, self.waveguide.wavelength, self.interferometer.kappa,
                                 m.dphi_domega, m.input_power, m.integration_bandwidth)

    def bias_model(self):
        b = self.noise.bias
        return BiasModel(b.b0, b.sigma_walk, b.dt, b.steps, self.seed)

    def thermal_model(self):
        return ThermalDriftModel(self.noise.thermal.delta_L, self.waveguide.wavelength,
                                 self.metrology.dphi_domega, self.thermo_model(), self.geometry())

    def output_directory(self):
        return self.output.directory or os.environ.get(OUTPUT_ENV) or "wvasim-output"

    def validate(self):
        """Build every domain object once so their invariants are checked."""
        try:
            self.geometry()
            self.thermo_model()
            self.readout_config()
            self.precision_scenario()
            self.bias_model()
            self.thermal_model()
        except ValueError as exc:
            raise ConfigError(f"invalid scenario: {exc}") from exc
        checks = [
            (self.waveguide.wavelength > 0, "waveguide.wavelength must be positive"),
            (self.grating.length > 0, "grating.length must be positive"),
            (self.grating.method in ("fundamental", "thin-layer"),
             "grating.method must be 'fundamental' or 'thin-layer'"),
            (self.grating.phase_source in ("transmission", "reflection"),
             "grating.phase_source must be 'transmission' or 'reflection'"),
            (self.grating.segments_per_period >= 20, "grating.segments_per_period must be >= 20"),
            (len(self.grating.double.centers_nm) == 2 and len(self.grating.double.amplitudes) == 2,
             "grating.double needs two centers and two amplitudes"),
            (self.grating.single.points >= 3 and self.grating.double.points >= 3,
             "grids need at least 3 points"),
            (self.interferometer.detector_window in ("core", "full"),
             "interferometer.detector_window must be 'core' or 'full'"),
            (self.noise.drift.wva_readout in ("displacement", "mode-ratio"),
             "noise.drift.wva_readout must be 'displacement' or 'mode-ratio'"),
            (self.noise.drift.detector_window in ("core", "full"),
             "noise.drift.detector_window must be 'core' or 'full'"),
            (self.noise.drift.trajectories >= 1, "noise.drift.trajectories must be >= 1"),
            (self.noise.drift.gate_time > 0, "noise.drift.gate_time must be positive"),
            (self.noise.thermal.delta_L >= 0, "noise.thermal.delta_L must be nonnegative"),
            (set(self.output.formats) <= {"csv", "json"}, "output.formats may contain only csv, json"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(f"invalid scenario: {message}")
        return self

    def to_dict(self):
        return _plain(asdict(self))

    def to_yaml(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _coerce(value, kind, path, line):
    """Check ``value`` against the declared field type; ``None`` keeps a default of None."""
    where = path + (f" (line {line})" if line else "")
    if value is None:
        return None
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if kind is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        return tuple(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    return value


def _build(cls, data, lines, prefix=""):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or 'top level'}: expected a mapping, got {data!r}")
    known = {f.name: f for f in fields(cls)}
    unknown = [k for k in data if k not in known]
    if unknown:
        key = f"{prefix}{unknown[0]}"
        line = lines.get(key)
        raise ConfigError(f"unknown key '{key}'" + (f" at line {line}" if line else "")
                          + f"; allowed: {', '.join(known)}")
    kwargs = {}
    for name, value in data.items():
        path = f"{prefix}{name}"
        kind = known[name].type
        if is_dataclass(kind):
            kwargs[name] = _build(kind, value, lines, path + ".")
        else:
            kwargs[name] = _coerce(value, kind, path, lines.get(path))
    return cls(**kwargs)


def _key_lines(node, prefix="", out=None):
    """Map dotted key paths to 1-based line numbers from a composed YAML node."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            path = f"{prefix}{key.value}"
            out[path] = key.start_mark.line + 1
            _key_lines(value, path + ".", out)
    return out


def _set_path(data, dotted, value):
    parts = dotted.split(".")
    cursor = data
    for p in parts[:-1]:
        nxt = cursor.setdefault(p, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"--set {dotted}: '{p}' is not a section")
        cursor = nxt
    cursor[parts[-1]] = value


def parse_overrides(items):
    """Parse ``key=value`` strings; values are read as YAML scalars/lists."""
    out = []
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigError(f"--set {key}: cannot parse value {raw!r}: {exc}") from exc
        out.append((key.strip(), value))
    return out


def load_config_text(text, overrides=(), source="<string>"):
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{source}: YAML parse error{where}: {getattr(exc, 'problem', exc)}") from exc
    lines = _key_lines(node) if node is not None else {}
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    for key, value in overrides:
        _set_path(data, key, value)
    try:
        cfg = _build(ScenarioConfig, data, lines)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    except TypeError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return cfg.validate()


def load_config(path=None, overrides=()):
    """Read a scenario file (or defaults when ``path`` is None) and apply overrides."""
    if path is None:
        return load_config_text("", overrides, "<defaults>")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return load_config_text(text, overrides, str(path))


def with_seed(cfg, seed):
    return cfg if seed is None else replace(cfg, seed=seed)
