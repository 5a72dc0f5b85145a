"""Figure rendering from scenario logs."""
import numpy as np
import pytest

from bicopter_viz import (FIGURES, EmptyLogError, FigureSpec, LogSchemaError,
                          data_extents, load_log, render_figures)
from bicopter_viz.figures import LOG_COLUMNS


def synthetic_log(tmp_path, rows=50):
    """Minimal schema-valid log with a small spiral trajectory."""
    t = np.linspace(0.0, 1.0, rows)
    arr = np.zeros((rows, len(LOG_COLUMNS)))
    arr[:, 0] = t
    arr[:, 1] = 2.0 * np.cos(2 * np.pi * t)
    arr[:, 2] = 1.5 * np.sin(2 * np.pi * t)
    arr[:, 3] = np.gradient(arr[:, 1], t)
    arr[:, 4] = np.gradient(arr[:, 2], t)
    arr[:, 6] = 9.81
    arr[:, 19] = 784.8
    path = tmp_path / "synthetic.csv"
    header = ",".join(LOG_COLUMNS)
    np.savetxt(path, arr, fmt="%.17g", delimiter=",", header=header,
               comments="")
    return path


def test_load_log_roundtrip(tmp_path):
    path = synthetic_log(tmp_path)
    log = load_log(path)
    assert set(log) == set(LOG_COLUMNS)
    assert log["t"].size == 50


def test_load_log_rejects_missing_column(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("t,r1,r2\n0,1,2\n", encoding="utf-8")
    with pytest.raises(LogSchemaError):
        load_log(path)


def test_load_log_rejects_empty(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(",".join(LOG_COLUMNS) + "\n", encoding="utf-8")
    with pytest.raises(EmptyLogError):
        load_log(path)


def test_render_all_figures(tmp_path):
    path = synthetic_log(tmp_path)
    spec = FigureSpec(log_path=path, out_dir=tmp_path / "figs")
    written = render_figures(spec)
    assert len(written) == 4
    names = {p.name for p in written}
    assert names == {"fig3_trajectory.png", "fig4_velocity.png",
                     "fig5_timeseries.png", "fig6_actuation.png"}
    for p in written:
        assert p.stat().st_size > 0


def test_render_subset(tmp_path):
    path = synthetic_log(tmp_path)
    spec = FigureSpec(log_path=path, out_dir=tmp_path / "figs",
                      figures=("trajectory", "actuation"))
    written = render_figures(spec)
    assert {p.name for p in written} == {"fig3_trajectory.png",
                                         "fig6_actuation.png"}


def test_unknown_figure_rejected(tmp_path):
    with pytest.raises(ValueError):
        FigureSpec(log_path=tmp_path / "log.csv", out_dir=tmp_path,
                   figures=("sparklines",))


def test_render_is_read_only(tmp_path):
    path = synthetic_log(tmp_path)
    before = path.read_bytes()
    render_figures(FigureSpec(log_path=path, out_dir=tmp_path / "figs"))
    assert path.read_bytes() == before


def test_extents_cover_safe_boxes(tmp_path):
    path = synthetic_log(tmp_path)
    spec = FigureSpec(log_path=path, out_dir=tmp_path)
    ext = data_extents(load_log(path), spec)
    (x_lo, x_hi), (y_lo, y_hi) = ext["trajectory"]
    assert x_lo <= -7.0 and x_hi >= 7.0 and y_lo <= -5.0 and y_hi >= 5.0
    (vx_lo, vx_hi), (vy_lo, vy_hi) = ext["velocity"]
    assert vx_lo <= -0.5 and vx_hi >= 0.5 and vy_lo <= -0.5 and vy_hi >= 0.5


def test_extents_stable_across_rerenders(tmp_path):
    path = synthetic_log(tmp_path)
    spec = FigureSpec(log_path=path, out_dir=tmp_path)
    a = data_extents(load_log(path), spec)
    b = data_extents(load_log(path), spec)
    assert a == b


def test_cli_render(tmp_path, capsys):
    from bicopter_viz import cli

    path = synthetic_log(tmp_path)
    out = tmp_path / "cli_figs"
    code = cli.main(["render", "--log", str(path), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert len(captured.out.strip().splitlines()) == 4
    assert (out / "fig4_velocity.png").exists()


def test_cli_rejects_bad_log(tmp_path, capsys):
    from bicopter_viz import cli

    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n", encoding="utf-8")
    code = cli.main(["render", "--log", str(bad), "--out", str(tmp_path)])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_cli_rejects_unknown_figure(tmp_path, capsys):
    from bicopter_viz import cli

    path = synthetic_log(tmp_path)
    code = cli.main(["render", "--log", str(path), "--out", str(tmp_path),
                     "--figs", "trajectory,holograms"])
    assert code == 2
