import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wvasim.config import ScenarioConfig, load_config, load_config_text, parse_overrides
from wvasim.errors import ConfigError
from wvasim.io import read_csv, read_json, write_csv, write_json


def test_empty_config_is_default(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("")
    cfg = load_config(path)
    assert cfg == ScenarioConfig()
    assert cfg.waveguide.wavelength == 1550e-9
    assert cfg.waveguide.half_width == 0.3e-6
    assert (cfg.waveguide.n_core, cfg.waveguide.n_clad) == (1.98, 1.45)
    assert cfg.interferometer.kappa == 0.05
    assert cfg.grating.length == 6.58e-3
    assert cfg.grating.double.centers_nm == (1549.82, 1550.18)
    assert cfg.grating.double.amplitudes == (3e-4, 3e-4)
    assert cfg.noise.thermal.delta_L == 10e-6
    assert cfg.noise.bias.sigma_walk == 1e-5


def test_not_guiding_rejected():
    with pytest.raises(ConfigError, match="not guiding"):
        load_config_text("waveguide:\n  n_clad: 2.5\n")


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match=r"unknown key 'grating\.period' at line 3"):
        load_config_text("seed: 1\ngrating:\n  period: 4e-7\n")


def test_type_errors_and_parse_errors():
    with pytest.raises(ConfigError, match="interferometer.kappa.*line 2"):
        load_config_text("interferometer:\n  kappa: big\n")
    with pytest.raises(ConfigError, match="YAML parse error at line"):
        load_config_text("grating: [\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_config_text("- 1\n- 2\n")
    with pytest.raises(ConfigError, match="grating.method"):
        load_config_text("grating:\n  method: spectral\n")
    with pytest.raises(ConfigError):
        load_config("/nonexistent/scenario.yaml")


def test_overrides():
    cfg = load_config_text("interferometer:\n  kappa: 0.1\n",
                           parse_overrides(["interferometer.kappa=0.02", "noise.bias.steps=10"]))
    assert cfg.interferometer.kappa == 0.02 and cfg.noise.bias.steps == 10
    with pytest.raises(ConfigError):
        parse_overrides(["kappa"])
    with pytest.raises(ConfigError):
        load_config_text("", parse_overrides(["seed.value=1"]))


def test_round_trip():
    cfg = load_config_text("seed: 42\nnoise:\n  drift:\n    trajectories: 3\n")
    again = load_config_text(cfg.to_yaml())
    assert again == cfg


@given(st.floats(0.01, 0.3), st.integers(0, 2**31), st.floats(0.2e-6, 1e-6))
def test_round_trip_property(kappa, seed, d):
    cfg = load_config_text("", [("interferometer.kappa", kappa), ("seed", seed),
                                ("waveguide.half_width", d)])
    assert load_config_text(cfg.to_yaml()) == cfg


def test_output_directory_env(monkeypatch):
    monkeypatch.setenv("WVASIM_OUTPUT", "/tmp/somewhere")
    assert ScenarioConfig().output_directory() == "/tmp/somewhere"
    cfg = load_config_text("output:\n  directory: here\n")
    assert cfg.output_directory() == "here"


def test_csv_round_trip(tmp_path):
    cols = {"b": np.array([1.0, 2.5]), "a": np.array([np.pi, -1e-30])}
    path = write_csv(tmp_path / "x.csv", cols)
    lines = path.read_text().splitlines()
    assert lines[0] == "b,a"
    assert lines[1] == "1,3.14159265359"
    back = read_csv(path)
    assert list(back) == ["b", "a"]
    assert np.allclose(back["a"], cols["a"], rtol=1e-11)


def test_empty_csv_is_header_only(tmp_path):
    path = write_csv(tmp_path / "e.csv", {"tau_s": np.array([]), "ratio": np.array([])})
    assert path.read_text() == "tau_s,ratio\n"
    assert read_csv(path)["ratio"].size == 0


def test_csv_rejects_ragged(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "r.csv", {"a": np.zeros(2), "b": np.zeros(3)})


def test_json_round_trip(tmp_path):
    payload = {"value": 1 / 3, "arr": np.array([1e-12, 2.0]), "n": np.int64(4), "flag": np.bool_(True)}
    back = read_json(write_json(tmp_path / "p.json", payload))
    assert abs(back["value"] - 1 / 3) < 1e-12
    assert back["arr"] == [1e-12, 2.0] and back["n"] == 4 and back["flag"] is True


def test_io_errors_name_the_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError, match="file"):
        write_csv(blocker / "sub" / "x.csv", {"a": np.zeros(1)})
    with pytest.raises(OSError, match="missing.json"):
        read_json(tmp_path / "missing.json")
