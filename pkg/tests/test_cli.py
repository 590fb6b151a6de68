import csv
import json

import pytest

from thermosym import __version__
from thermosym.cli import SCENARIOS, UsageError, main, resolve_config, run

SMALL_SPECTRUM = ["--set", "N=10", "--set", "max_order=4", "--set", "b=0.5", "--set", "converged=false", "--set", "N_stationary=12"]


def test_report_fields():
    rep = run("ekert")
    assert set(rep) >= {"scenario", "version", "config", "seed", "checks", "passed", "wall_time_s"}
    assert rep["scenario"] == "ekert" and rep["version"] == __version__
    assert rep["passed"]
    for ch in rep["checks"]:
        assert set(ch) == {"name", "value", "tolerance", "comparison", "pass", "paper_tag", "detail"}
        assert ch["paper_tag"]


def test_deterministic_apart_from_timing():
    a, b = run("gaussian"), run("gaussian")
    a.pop("wall_time_s"), b.pop("wall_time_s")
    assert json.dumps(a, default=str, sort_keys=True) == json.dumps(b, default=str, sort_keys=True)


def test_resolve_defaults_and_conversion():
    cfg = resolve_config("coth-scan", {"T": "2", "n_omega": 10.0})
    assert cfg["T"] == 2.0 and cfg["n_omega"] == 10
    assert "seed" in cfg


def test_resolve_lists_every_bad_field():
    with pytest.raises(UsageError) as info:
        resolve_config("coth-scan", {"T": -1, "bogus": 3, "n_omega": 1})
    msg = str(info.value)
    assert "T:" in msg and "bogus" in msg and "n_omega" in msg


def test_unknown_scenario():
    with pytest.raises(UsageError):
        resolve_config("nope", {})


def test_every_scenario_has_defaults():
    for name in SCENARIOS:
        resolve_config(name, {})


def test_main_usage_error_exit_code(tmp_path, capsys):
    assert main(["run", "--scenario", "coth-scan", "--set", "T=-3", "--out", str(tmp_path)]) == 2
    assert "T:" in capsys.readouterr().err
    assert main(["run", "--out", str(tmp_path)]) == 2
    assert main(["run", "--scenario", "ekert", "--set", "oops", "--out", str(tmp_path)]) == 2


def test_main_success_writes_report(tmp_path, capsys):
    assert main(["run", "--scenario", "spectrum", *SMALL_SPECTRUM, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "PASS spectrum_match" in out
    body = json.loads((tmp_path / "report.json").read_text())
    assert body["passed"] and body["config"]["N"] == 10
    with open(tmp_path / "spectrum.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["m", "n", "sign", "re_predicted", "im_predicted", "re_computed", "im_computed", "abs_delta"]


def test_negative_control_exit_code(tmp_path, capsys):
    code = main(["run", "--scenario", "spectrum", *SMALL_SPECTRUM, "--set", "predict_omega0=1.1", "--out", str(tmp_path)])
    assert code == 1
    assert "FAIL spectrum_match" in capsys.readouterr().out


def test_config_file_and_override_precedence(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("scenario: coth-scan\nT: 1.0\nT_prime: 2.0\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--set", "T_prime=1.0", "--out", str(out)]) == 0
    body = json.loads((out / "report.json").read_text())
    assert body["config"]["T_prime"] == 1.0
    assert body["checks"][0]["comparison"] == "<="


def test_bad_config_file(tmp_path):
    bad = tmp_path / "c.yaml"
    bad.write_text("- 1\n- 2\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.yaml"), "--out", str(tmp_path)]) == 2


def test_evolve_csv(tmp_path):
    assert main(["run", "--scenario", "evolve", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "evolve.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "re_mean_a", "im_mean_a", "p1_vacuum_channel"]
    assert len(rows) == 1 + 101


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in SCENARIOS:
        assert name in out
