"""Command-line harness: config parsing, outputs, determinism, exit codes."""

import math
import os

import numpy as np
import pytest

from peakonlab import cli
from peakonlab.cli import (ConfigError, ScenarioConfig, main, parse_config_file,
                           parse_ic_spec, read_state_csv, run_scenario)
from peakonlab.kernel import M

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------- ic grammar

def test_parse_ic_spec_basic():
    assert parse_ic_spec("sin") == (0.0, (), (1.0,))
    assert parse_ic_spec("cos") == (0.0, (1.0,), ())
    assert parse_ic_spec("0.5*sin2") == (0.0, (), (0.0, 0.5))
    const, cos_c, sin_c = parse_ic_spec("0.5*sin + 0.25*cos3 + 0.1")
    assert const == pytest.approx(0.1)
    assert cos_c == (0.0, 0.0, 0.25)
    assert sin_c == (0.5,)
    assert parse_ic_spec("") == (0.0, (), ())
    assert parse_ic_spec("-2e-3*sin") == (0.0, (), (-2e-3,))


def test_parse_ic_spec_errors():
    with pytest.raises(ConfigError):
        parse_ic_spec("tan")
    with pytest.raises(ConfigError):
        parse_ic_spec("sin0")
    with pytest.raises(ConfigError):
        parse_ic_spec("sin++cos")


# --------------------------------------------------------------- config file

def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nmode = linear-exact\nic = 0.5*sin\n"
                   "t = 0,1,2\ndt = 0.002\nnchars = 64\nout = somewhere\n")
    updates = parse_config_file(str(cfg))
    assert updates["ic_spec"] == "0.5*sin"
    assert updates["t_samples"] == (0.0, 1.0, 2.0)
    assert updates["dt"] == 0.002
    assert updates["n_chars"] == 64


def test_config_file_errors_carry_line_numbers(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mode = linear-exact\nwhatever = 3\n")
    with pytest.raises(ConfigError, match="bad.cfg:2"):
        parse_config_file(str(cfg))
    cfg.write_text("dt == 0.1\n")
    with pytest.raises(ConfigError, match="bad.cfg:1"):
        parse_config_file(str(cfg))


def test_cli_overrides_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("ic = sin\nt = 1\nnchars = 32\n")
    out = tmp_path / "out"
    code = main(["linear-exact", "--config", str(cfg), "--nchars", "48",
                 "--out", str(out)])
    assert code == 0
    text = (out / "summary.txt").read_text()
    assert "nchars=48" in text


def test_scenario_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(mode="bogus").validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(t_samples=()).validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(t_samples=(1.0, 0.5)).validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(dt=-1.0).validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(n_chars=4).validate()
    with pytest.raises(ConfigError):
        ScenarioConfig(mode="classify", c=-2.0).validate()


# ------------------------------------------------------------------ outputs

def test_linear_exact_outputs_and_roundtrip(tmp_path):
    out = tmp_path / "lab"
    config = ScenarioConfig(mode="linear-exact", ic_spec="sin",
                            t_samples=(0.0, 1.0), n_chars=64, out_dir=str(out))
    assert run_scenario(config) == 0
    data = read_state_csv(out / "state_01.csv")
    n = 64
    assert len(data["X"]) == 2 * n
    # shifted block first: X covers [-2pi, 2pi]
    assert data["X"][0] == pytest.approx(-TWO_PI)
    assert data["X"][-1] == pytest.approx(TWO_PI)
    # shifted and fundamental blocks carry identical field values
    assert np.array_equal(data["V"][:n], data["V"][n:])
    # round-trip: doubles survive the 17-digit format exactly
    from peakonlab.linear import exact_state
    st = exact_state(1.0, config.initial_condition(), 64)
    assert np.array_equal(data["V"][n:], st.V)
    assert np.array_equal(data["U"][n:], st.U)
    assert np.array_equal(data["X"][n:], st.X)
    assert np.array_equal(data["X"][:n], st.X - TWO_PI)
    text = (out / "summary.txt").read_text()
    assert "t1_peak_slope_right=" in text
    assert "drift_combo_linear_rel=" in text


def test_byte_identical_reruns(tmp_path):
    for d in ("a", "b"):
        config = ScenarioConfig(mode="linear-ode", ic_spec="0.3*sin+0.1*cos2",
                                t_samples=(0.5, 1.0), dt=5e-3, n_chars=48,
                                out_dir=str(tmp_path / d))
        assert run_scenario(config) == 0
    for name in ("state_00.csv", "state_01.csv", "summary.txt"):
        a = (tmp_path / "a" / name).read_bytes()
        b = (tmp_path / "b" / name).read_bytes()
        assert a == b


def test_thread_cap_env_does_not_change_results(tmp_path):
    outputs = {}
    for workers in ("1", "3"):
        os.environ["PEAKON_LAB_THREADS"] = workers
        try:
            out = tmp_path / f"w{workers}"
            config = ScenarioConfig(mode="linear-exact", ic_spec="cos",
                                    t_samples=(0.0, 0.5, 1.0, 1.5), n_chars=48,
                                    out_dir=str(out))
            assert run_scenario(config) == 0
            outputs[workers] = (out / "state_03.csv").read_bytes()
        finally:
            del os.environ["PEAKON_LAB_THREADS"]
    assert outputs["1"] == outputs["3"]


def test_invalid_thread_env_is_reported(tmp_path):
    os.environ["PEAKON_LAB_THREADS"] = "many"
    try:
        code = main(["linear-exact", "--ic", "sin", "--t", "0.5",
                     "--out", str(tmp_path / "x")])
        assert code == 1
    finally:
        del os.environ["PEAKON_LAB_THREADS"]


def test_nonlinear_zero_profile_matches_linear_exact(tmp_path):
    shared = dict(ic_spec="", t_samples=(0.5, 1.0), dt=1e-3, n_chars=32)
    run_scenario(ScenarioConfig(mode="linear-exact", out_dir=str(tmp_path / "le"), **shared))
    run_scenario(ScenarioConfig(mode="nonlinear", out_dir=str(tmp_path / "nl"), **shared))
    for name in ("state_00.csv", "state_01.csv"):
        a = read_state_csv(tmp_path / "le" / name)
        b = read_state_csv(tmp_path / "nl" / name)
        assert np.max(np.abs(a["X"] - b["X"])) < 1e-8
        assert np.max(np.abs(a["V"] - b["V"])) < 1e-8
        assert np.max(np.abs(a["W"] - b["W"])) < 1e-8


def test_nonlinear_breaking_exit_code(tmp_path):
    from peakonlab.profiles import steepest_budget_bump
    beta = steepest_budget_bump(0.01).bump_amplitude
    code = main(["nonlinear", "--ic", "", "--bump", str(beta), "--t", "8",
                 "--dt", "0.001", "--nchars", "64", "--threshold", "100",
                 "--out", str(tmp_path / "blow")])
    assert code == 2
    text = (tmp_path / "blow" / "summary.txt").read_text()
    assert "blowup_status=blew_up" in text
    assert "blowup_riccati_bound=" in text


def test_energies_mode_emits_forecast_table(tmp_path):
    out = tmp_path / "en"
    code = main(["energies", "--ic", "cos", "--t", "0,0.5,1", "--dt", "0.002",
                 "--nchars", "128", "--out", str(out)])
    assert code == 0
    text = (out / "summary.txt").read_text()
    assert "h1_S_plus=" in text
    rel_errs = [float(line.split("=")[1]) for line in text.splitlines()
                if "_E_rel_err=" in line]
    assert rel_errs and max(rel_errs) < 1e-3


def test_classify_mode(tmp_path, capsys):
    code = main(["classify", "--a", "0", "--c", str(M), "--out", str(tmp_path / "cl")])
    assert code == 0
    assert "peaked" in capsys.readouterr().out
    assert "family=peaked" in (tmp_path / "cl" / "summary.txt").read_text()
    code = main(["classify", "--a", "-1", "--c", "1.0", "--out", str(tmp_path / "cl2")])
    assert code == 1  # beyond the fold: reported, never silent


def test_error_exit_code_on_bad_ic(tmp_path):
    code = main(["linear-exact", "--ic", "sin**", "--t", "1",
                 "--out", str(tmp_path / "x")])
    assert code == 1


def test_unwritable_output_dir_reported():
    config = ScenarioConfig(mode="classify", out_dir="/proc/definitely/not/writable")
    with pytest.raises(ConfigError):
        run_scenario(config)
