"""Render the four result figures from a scenario log.

Consumes the simulator's CSV log contract (20 named columns) and produces
raster images at a fixed 150 dpi with stable filenames:

    fig3_trajectory.png   position path, desired path, safe rectangle
    fig4_velocity.png     velocity phase plot with the velocity box
    fig5_timeseries.png   positions and velocities against time with bounds
    fig6_actuation.png    pitch, net force, and moment against time

The moment M is reconstructed from the logged input column u2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = ["LOG_COLUMNS", "FIGURES", "FigureSpec", "LogSchemaError",
           "EmptyLogError", "load_log", "data_extents", "render_figures"]

# column contract of the simulator's CSV logs
LOG_COLUMNS = ("t", "r1", "r2", "v1", "v2", "theta", "F", "thetadot", "Fdot",
               "u1", "u2", "rd1", "rd2", "V", "Vdot", "e1", "e2", "e3", "e4",
               "detPsi")

FIGURES = ("trajectory", "velocity", "timeseries", "actuation")

_FILENAMES = {
    "trajectory": "fig3_trajectory.png",
    "velocity": "fig4_velocity.png",
    "timeseries": "fig5_timeseries.png",
    "actuation": "fig6_actuation.png",
}

DPI = 150


class LogSchemaError(ValueError):
    """Log file does not match the simulator's column contract."""


class EmptyLogError(ValueError):
    """Log file contains a header but no rows."""


@dataclass(frozen=True)
class FigureSpec:
    """What to render: which log, where to write, which figures."""

    log_path: Path
    out_dir: Path
    figures: tuple = FIGURES
    position_bounds: tuple = (7.0, 5.0)
    velocity_bounds: tuple = (0.5, 0.5)

    def __post_init__(self):
        object.__setattr__(self, "log_path", Path(self.log_path))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        unknown = set(self.figures) - set(FIGURES)
        if unknown:
            raise ValueError(f"unknown figures {sorted(unknown)}; "
                             f"choose from {', '.join(FIGURES)}")


def load_log(path) -> dict:
    """Read a CSV log into named columns, validating the schema."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header != list(LOG_COLUMNS):
            raise LogSchemaError(
                f"unexpected log columns {header}; expected {list(LOG_COLUMNS)}")
        body = fh.read()
    if not body.strip():
        raise EmptyLogError(f"log {path} has no data rows")
    arr = np.loadtxt(body.splitlines(), delimiter=",", ndmin=2)
    if arr.shape[1] != len(LOG_COLUMNS):
        raise LogSchemaError(f"log rows have {arr.shape[1]} fields, "
                             f"expected {len(LOG_COLUMNS)}")
    return {name: arr[:, i] for i, name in enumerate(LOG_COLUMNS)}


def data_extents(log: dict, spec: FigureSpec) -> dict:
    """Axis extents each figure will use; pure function of the log."""
    pb, vb = spec.position_bounds, spec.velocity_bounds
    return {
        "trajectory": (
            (min(-pb[0], log["r1"].min()), max(pb[0], log["r1"].max())),
            (min(-pb[1], log["r2"].min()), max(pb[1], log["r2"].max()))),
        "velocity": (
            (min(-vb[0], log["v1"].min()), max(vb[0], log["v1"].max())),
            (min(-vb[1], log["v2"].min()), max(vb[1], log["v2"].max()))),
        "timeseries": ((log["t"][0], log["t"][-1]), None),
        "actuation": ((log["t"][0], log["t"][-1]), None),
    }


def _pad(lo: float, hi: float, frac: float = 0.05):
    span = hi - lo
    return lo - frac * span, hi + frac * span


def _render_trajectory(log, spec, path):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    pb = spec.position_bounds
    ax.add_patch(plt.Rectangle((-pb[0], -pb[1]), 2 * pb[0], 2 * pb[1],
                               facecolor="gold", alpha=0.35, edgecolor="goldenrod",
                               label="safe set"))
    ax.plot(log["rd1"], log["rd2"], "k--", linewidth=1.2, label="desired")
    ax.plot(log["r1"], log["r2"], "b-", linewidth=1.2, label="response")
    (x_ext, y_ext) = data_extents(log, spec)["trajectory"]
    ax.set_xlim(*_pad(*x_ext))
    ax.set_ylim(*_pad(*y_ext))
    ax.set_xlabel("horizontal position [m]")
    ax.set_ylabel("vertical position [m]")
    ax.set_title("Position response inside the safe set")
    ax.legend(loc="upper right")
    ax.set_aspect("equal", adjustable="box")
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def _render_velocity(log, spec, path):
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    vb = spec.velocity_bounds
    ax.add_patch(plt.Rectangle((-vb[0], -vb[1]), 2 * vb[0], 2 * vb[1],
                               facecolor="pink", alpha=0.5, edgecolor="crimson",
                               label="velocity bounds"))
    ax.plot(log["v1"], log["v2"], "b-", linewidth=0.9, label="response")
    (x_ext, y_ext) = data_extents(log, spec)["velocity"]
    ax.set_xlim(*_pad(*x_ext))
    ax.set_ylim(*_pad(*y_ext))
    ax.set_xlabel("horizontal velocity [m/s]")
    ax.set_ylabel("vertical velocity [m/s]")
    ax.set_title("Velocity response inside the safe set")
    ax.legend(loc="upper right")
    ax.set_aspect("equal", adjustable="box")
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def _render_timeseries(log, spec, path):
    fig, axes = plt.subplots(2, 1, figsize=(7.2, 5.6), sharex=True)
    t = log["t"]
    pb, vb = spec.position_bounds, spec.velocity_bounds

    axes[0].plot(t, log["rd1"], "k--", linewidth=0.9)
    axes[0].plot(t, log["rd2"], "k--", linewidth=0.9, label="desired")
    axes[0].plot(t, log["r1"], "b-", linewidth=1.0, label="$r_1$")
    axes[0].plot(t, log["r2"], "g-", linewidth=1.0, label="$r_2$")
    for bound, color in ((pb[0], "b"), (pb[1], "g")):
        axes[0].axhline(bound, color=color, linestyle=":", linewidth=0.8)
        axes[0].axhline(-bound, color=color, linestyle=":", linewidth=0.8)
    axes[0].set_ylabel("position [m]")
    axes[0].legend(loc="upper right", ncols=3)

    axes[1].plot(t, log["v1"], "b-", linewidth=1.0, label="$v_1$")
    axes[1].plot(t, log["v2"], "g-", linewidth=1.0, label="$v_2$")
    for bound in vb:
        axes[1].axhline(bound, color="crimson", linestyle=":", linewidth=0.8)
        axes[1].axhline(-bound, color="crimson", linestyle=":", linewidth=0.8)
    axes[1].set_ylabel("velocity [m/s]")
    axes[1].set_xlabel("time [s]")
    axes[1].legend(loc="upper right", ncols=2)

    fig.suptitle("Position and velocity tracking against time")
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def _render_actuation(log, spec, path):
    fig, axes = plt.subplots(3, 1, figsize=(7.2, 6.4), sharex=True)
    t = log["t"]
    axes[0].plot(t, log["theta"], "b-", linewidth=1.0)
    axes[0].set_ylabel(r"$\theta$ [rad]")
    axes[1].plot(t, log["F"], "b-", linewidth=1.0)
    axes[1].set_ylabel("F [N]")
    axes[2].plot(t, log["u2"], "b-", linewidth=1.0)
    axes[2].set_ylabel("M [N m]")
    axes[2].set_xlabel("time [s]")
    fig.suptitle("Pitch angle and applied force and moment")
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


_RENDERERS = {
    "trajectory": _render_trajectory,
    "velocity": _render_velocity,
    "timeseries": _render_timeseries,
    "actuation": _render_actuation,
}


def render_figures(spec: FigureSpec) -> list:
    """Render the selected figures; returns the written image paths."""
    log = load_log(spec.log_path)
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIGURES:
        if name not in spec.figures:
            continue
        path = spec.out_dir / _FILENAMES[name]
        _RENDERERS[name](log, spec, path)
        written.append(path)
    return written
