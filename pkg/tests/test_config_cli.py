"""Configuration schema and the command-line front end."""
import json

import numpy as np
import pytest

from bicopter_safe import cli
from bicopter_safe.config import (default_octagon_config, load_config,
                                  scenario_from_config, scenario_to_config)
from bicopter_safe.errors import ConfigError


def small_hold_config(**overrides):
    doc = default_octagon_config()
    doc["plan"] = {"type": "waypoints", "points": [[0.0, 0.0], [0.4, 0.2]],
                   "v_max": 1.0, "a_max": 1.0}
    doc["t_end"] = 1.0
    doc["output"] = "small_log.csv"
    doc.update(overrides)
    return doc


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_roundtrip_octagon_config():
    doc = default_octagon_config()
    sc = scenario_from_config(doc)
    assert scenario_to_config(sc, output=doc["output"]) == doc


def test_roundtrip_waypoints_config():
    doc = small_hold_config()
    sc = scenario_from_config(doc)
    assert scenario_to_config(sc, output=doc["output"]) == doc
    sc2 = scenario_from_config(scenario_to_config(sc, output=doc["output"]))
    assert scenario_to_config(sc2, output=doc["output"]) == doc


def test_config_rejects_velocity_out_of_bounds():
    doc = small_hold_config()
    doc["x0"]["x2"] = [0.6, 0.0]
    with pytest.raises(ConfigError, match=r"x0\.x2\[0\]"):
        scenario_from_config(doc)


def test_config_rejects_zero_initial_force():
    doc = small_hold_config()
    doc["x0"]["x3"] = [0.0, 0.0]
    with pytest.raises(ConfigError, match="f_epsilon"):
        scenario_from_config(doc)


def test_config_rejects_missing_field():
    doc = small_hold_config()
    del doc["plant"]["m"]
    with pytest.raises(ConfigError, match=r"plant\.m"):
        scenario_from_config(doc)


def test_config_rejects_wrong_schema_version():
    doc = small_hold_config(schema_version=99)
    with pytest.raises(ConfigError, match="schema_version"):
        scenario_from_config(doc)


def test_config_rejects_inconsistent_k2():
    doc = small_hold_config()
    doc["gains"]["k2"] = 0.7
    with pytest.raises(ConfigError, match="k2"):
        scenario_from_config(doc)


def test_load_config_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(path)


def test_simulate_success(tmp_path, capsys):
    path = write_config(tmp_path, small_hold_config())
    out = tmp_path / "run.csv"
    code = cli.main(["simulate", "--config", str(path), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "safe-set: OK" in captured.out
    assert "lyapunov: OK" in captured.out
    assert out.exists()


def test_simulate_bad_config_exits_2(tmp_path, capsys):
    doc = small_hold_config()
    doc["x0"]["x2"] = [0.6, 0.0]
    path = write_config(tmp_path, doc)
    code = cli.main(["simulate", "--config", str(path)])
    captured = capsys.readouterr()
    assert code == 2
    assert "x0.x2[0]" in captured.err


def test_simulate_zero_force_exits_2(tmp_path, capsys):
    doc = small_hold_config()
    doc["x0"]["x3"] = [0.0, 0.0]
    path = write_config(tmp_path, doc)
    code = cli.main(["simulate", "--config", str(path)])
    captured = capsys.readouterr()
    assert code == 2
    assert "f_epsilon" in captured.err


def test_simulate_runtime_failure_exits_3(tmp_path, capsys):
    doc = small_hold_config()
    doc["plan"] = {"type": "waypoints", "points": [[0.0, 0.0], [6.7, 0.0]],
                   "v_max": 1.0, "a_max": 1.0}
    doc["t_end"] = 20.0
    path = write_config(tmp_path, doc)
    out = tmp_path / "partial.csv"
    code = cli.main(["simulate", "--config", str(path), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 3
    assert "runtime error" in captured.err
    assert out.exists()  # partial log flushed up to the failure


def test_simulate_out_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    path = write_config(tmp_path, small_hold_config())
    code = cli.main(["simulate", "--config", str(path), "--out", "relative.csv"])
    capsys.readouterr()
    assert code == 0
    assert (tmp_path / "relative.csv").exists()


def test_check_clean_and_tampered(tmp_path, capsys):
    path = write_config(tmp_path, small_hold_config())
    out = tmp_path / "run.csv"
    assert cli.main(["simulate", "--config", str(path), "--out", str(out)]) == 0
    capsys.readouterr()

    assert cli.main(["check", "--log", str(out), "--config", str(path)]) == 0
    captured = capsys.readouterr()
    assert "position-bounds: OK" in captured.out

    rows = out.read_text().splitlines()
    cells = rows[3].split(",")
    cells[1] = "7.5"  # r1 out of bounds
    rows[3] = ",".join(cells)
    tampered = tmp_path / "tampered.csv"
    tampered.write_text("\n".join(rows) + "\n", encoding="utf-8")
    code = cli.main(["check", "--log", str(tampered), "--config", str(path)])
    captured = capsys.readouterr()
    assert code == 1
    assert "position-bounds: VIOLATED" in captured.out
    assert "t=0.002" in captured.out

    broken = tmp_path / "broken.csv"
    broken.write_text("t,r1\n0.0,0.0\n", encoding="utf-8")
    assert cli.main(["check", "--log", str(broken), "--config", str(path)]) == 2


def test_verify_derivatives_passes(capsys):
    code = cli.main(["verify-derivatives", "--seed", "42", "--count", "5"])
    captured = capsys.readouterr()
    assert code == 0
    assert "all 10 derivative checks" in captured.out


def test_verify_derivatives_rejects_zero_count(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["verify-derivatives", "--count", "0"])
    assert excinfo.value.code == 2


def test_verify_derivatives_fault_injection(capsys, monkeypatch):
    from bicopter_safe import oracles

    broken = dict(oracles._ANALYTIC)
    original = broken["Q_ddot"]
    broken["Q_ddot"] = lambda ctx: original(ctx) + 1e-2
    monkeypatch.setattr(oracles, "_ANALYTIC", broken)
    code = cli.main(["verify-derivatives", "--count", "3"])
    captured = capsys.readouterr()
    assert code == 1
    assert "Q_ddot" in captured.out
    assert "FAIL" in captured.out


def test_plan_defaults(tmp_path, capsys):
    doc = small_hold_config()
    doc["plan"] = {"type": "octagon", "v_max": 1.0, "a_max": 1.0}
    del doc["t_end"]  # derived from the plan when omitted
    path = write_config(tmp_path, doc)
    code = cli.main(["plan", "--config", str(path)])
    captured = capsys.readouterr()
    assert code == 0
    assert "waypoints: 10" in captured.out
    assert "(6.3, -2.25)" in captured.out
    assert "(3.15, 4.5)" in captured.out
    assert '"margin_fraction": 0.9' in captured.out


def test_plan_degenerate_chamfer_exits_2(tmp_path, capsys):
    doc = small_hold_config()
    doc["plan"] = {"type": "octagon", "chamfer_fraction": 1.0,
                   "v_max": 1.0, "a_max": 1.0}
    path = write_config(tmp_path, doc)
    code = cli.main(["plan", "--config", str(path)])
    captured = capsys.readouterr()
    assert code == 2
    assert "chamfer" in captured.err


def test_default_octagon_config_is_valid():
    sc = scenario_from_config(default_octagon_config())
    assert sc.n_rows == 48001
    assert len(sc.plan.waypoints) == 10
