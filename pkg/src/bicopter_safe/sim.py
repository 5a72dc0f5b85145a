"""Deterministic closed-loop simulation, safety monitors, and log I/O.

A scenario fixes the plant, controller, reference plan, initial state, and
step size; `run_scenario` integrates the closed loop with classical RK4 and
zero-order-hold control at a fixed dt and records one log row per step.
Identical scenarios produce bit-identical logs.

Monitors re-check the claims the controller is supposed to enforce: strict
position/velocity bounds at every sample, nonpositive closed-form Vdot, and
non-increasing V across constant-setpoint stretches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .ctrl import ControllerConfig
from .errors import (IntegrationBlowupError, LogSchemaError,
                     ReferenceInfeasibleError, SimulationError)
from .model import ControlInput, PlantParams, PlantState, plant_derivative
from .traj import WaypointPlan, sample_positions

__all__ = [
    "LOG_COLUMNS",
    "DEFAULT_MONITOR_TOLERANCES",
    "Scenario",
    "ScenarioLog",
    "MonitorCheck",
    "MonitorReport",
    "rk4_step",
    "run_scenario",
    "monitor_invariants",
    "write_log",
    "read_log",
]

LOG_COLUMNS = ("t", "r1", "r2", "v1", "v2", "theta", "F", "thetadot", "Fdot",
               "u1", "u2", "rd1", "rd2", "V", "Vdot", "e1", "e2", "e3", "e4",
               "detPsi")

DEFAULT_MONITOR_TOLERANCES = {
    "vdot_max": 1e-12,       # allowed positive excursion of closed-form Vdot
    "dv_hold_max": 1e-6,     # allowed per-step V increase while the setpoint holds
    "setpoint_atol": 1e-12,  # per-component reference change treated as "constant"
}

_MAX_DT = 1e-2  # explicit RK4 with this controller is not trusted above this


@dataclass
class Scenario:
    """Complete, validated description of one closed-loop experiment."""

    params: PlantParams
    cfg: ControllerConfig
    plan: WaypointPlan
    x0: PlantState
    t_end: float
    dt: float = 1e-3
    monitor_tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        tol = dict(DEFAULT_MONITOR_TOLERANCES)
        tol.update(self.monitor_tolerances)
        self.monitor_tolerances = tol
        if not 0.0 < self.dt <= _MAX_DT:
            raise ValueError(f"dt must lie in (0, {_MAX_DT:g}], got {self.dt!r}")
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if not self.cfg.safe.contains(self.x0.x1, self.x0.x2):
            raise ValueError("x0 must start strictly inside the safe set")
        if abs(self.x0.x3[1]) < self.cfg.f_epsilon:
            raise ValueError(
                f"initial net force {self.x0.x3[1]!r} lies inside the projection "
                f"band (-{self.cfg.f_epsilon:g}, {self.cfg.f_epsilon:g})")
        self.plan.validate_inside(self.cfg.safe)

    @property
    def n_rows(self) -> int:
        """Log rows: one per step plus the final state."""
        return int(round(self.t_end / self.dt)) + 1


@dataclass(eq=False)
class ScenarioLog:
    """Column-oriented record of a scenario run."""

    t: np.ndarray           # (n,)
    states: np.ndarray      # (n, 8) r1 r2 v1 v2 theta F thetadot Fdot
    controls: np.ndarray    # (n, 2)
    references: np.ndarray  # (n, 2)
    V: np.ndarray           # (n,)
    V_dot: np.ndarray       # (n,)
    e_norms: np.ndarray     # (n, 4)
    det_psi: np.ndarray     # (n,)

    def __len__(self) -> int:
        return self.t.size

    def to_array(self) -> np.ndarray:
        """(n, 20) array in LOG_COLUMNS order."""
        return np.column_stack([
            self.t, self.states, self.controls, self.references,
            self.V, self.V_dot, self.e_norms, self.det_psi,
        ])

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ScenarioLog":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != len(LOG_COLUMNS):
            raise LogSchemaError(
                f"log array must have {len(LOG_COLUMNS)} columns, got shape {arr.shape}")
        return cls(t=arr[:, 0], states=arr[:, 1:9], controls=arr[:, 9:11],
                   references=arr[:, 11:13], V=arr[:, 13], V_dot=arr[:, 14],
                   e_norms=arr[:, 15:19], det_psi=arr[:, 19])

    def row_slice(self, n: int) -> "ScenarioLog":
        """First n rows as a new log."""
        return ScenarioLog.from_array(self.to_array()[:n])


def rk4_step(state: PlantState, u, dt: float, params: PlantParams) -> PlantState:
    """One classical RK4 step with the control held constant (zero-order hold)."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    uv = u if isinstance(u, ControlInput) else ControlInput(np.asarray(u, float))
    x = state.as_vector()

    def f(vec):
        return plant_derivative(PlantState.from_vector(vec), uv, params)

    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise IntegrationBlowupError("rk4_step produced a non-finite state")
    return PlantState.from_vector(out)


def _kernel_params(sc: Scenario) -> tuple:
    from .ctrl import DET_FLOOR

    p, g, s = sc.params, sc.cfg.gains, sc.cfg.safe
    return (p.m, p.J, p.g, g.k1, g.k3, g.k4,
            s.xbar1[0], s.xbar1[1], s.xbar2[0], s.xbar2[1],
            s.chi_clamp, s.zeta_clamp, sc.cfg.f_epsilon, DET_FLOOR)


def run_scenario(sc: Scenario, engine: str | None = None) -> ScenarioLog:
    """Run a scenario to completion and return its log.

    The per-step loop is: sample the reference, transform it, evaluate the
    control law, record the row, advance one RK4 step with the control held.
    On a runtime failure the raised SimulationError carries the partial log.
    """
    kernel = _engine.get(engine)
    n = sc.n_rows
    t = np.arange(n, dtype=float) * sc.dt
    xd = sample_positions(sc.plan, t)
    xb1 = sc.cfg.safe.xbar1
    if not np.all(np.abs(xd) < xb1):
        raise ReferenceInfeasibleError("sampled reference leaves the position bounds")
    zd = np.ascontiguousarray(xb1 * np.arctanh(xd / xb1))

    out_x = np.empty((n, 8))
    out_u = np.empty((n, 2))
    out_diag = np.empty((n, 7))

    def _log(rows: int) -> ScenarioLog:
        return ScenarioLog(
            t=t[:rows], states=out_x[:rows], controls=out_u[:rows],
            references=xd[:rows], V=out_diag[:rows, 0], V_dot=out_diag[:rows, 1],
            e_norms=out_diag[:rows, 2:6], det_psi=out_diag[:rows, 6])

    try:
        kernel.run_loop(sc.x0.as_vector(), zd, sc.dt, _kernel_params(sc),
                        out_x, out_u, out_diag)
    except Exception as exc:
        rows = getattr(exc, "rows", 0)
        step = getattr(exc, "step", None)
        raise SimulationError(
            f"scenario aborted at step {step}: {exc}",
            partial_log=_log(rows), step=step) from exc
    return _log(n)


@dataclass(frozen=True)
class MonitorCheck:
    """Outcome of one invariant check over a log."""

    name: str
    passed: bool
    t_violation: float | None = None
    detail: str = ""

    def verdict(self) -> str:
        if self.passed:
            return f"{self.name}: OK"
        return f"{self.name}: VIOLATED at t={self.t_violation:.6g} ({self.detail})"


@dataclass(frozen=True)
class MonitorReport:
    """All invariant checks for one log."""

    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        return "\n".join(c.verdict() for c in self.checks)

    def first_violation(self) -> MonitorCheck | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None


def _bound_check(name, t, values, bounds) -> MonitorCheck:
    inside = np.abs(values) < bounds
    if np.all(inside):
        return MonitorCheck(name, True)
    idx = int(np.argmax(~inside.all(axis=1)))
    comp = int(np.argmax(~inside[idx]))
    return MonitorCheck(name, False, float(t[idx]),
                        f"component {comp}: |{values[idx, comp]:.9g}| >= {bounds[comp]:g}")


def monitor_invariants(log: ScenarioLog, sc: Scenario) -> MonitorReport:
    """Check safety and Lyapunov invariants over every logged row."""
    if len(log) == 0:
        raise ValueError("cannot monitor an empty log")
    tol = sc.monitor_tolerances
    checks = [
        _bound_check("position-bounds", log.t, log.states[:, 0:2], sc.cfg.safe.xbar1),
        _bound_check("velocity-bounds", log.t, log.states[:, 2:4], sc.cfg.safe.xbar2),
    ]

    bad = log.V_dot > tol["vdot_max"]
    if np.any(bad):
        idx = int(np.argmax(bad))
        checks.append(MonitorCheck("vdot-nonpositive", False, float(log.t[idx]),
                                   f"Vdot = {log.V_dot[idx]:.3e} > {tol['vdot_max']:g}"))
    else:
        checks.append(MonitorCheck("vdot-nonpositive", True))

    # V must not increase while the sampled setpoint is constant (Lyapunov
    # decrease only applies for a fixed z_d1)
    if len(log) >= 2:
        held = np.all(np.abs(np.diff(log.references, axis=0)) < tol["setpoint_atol"],
                      axis=1)
        dv = np.diff(log.V)
        bad = held & (dv > tol["dv_hold_max"])
        if np.any(bad):
            idx = int(np.argmax(bad))
            checks.append(MonitorCheck(
                "v-nonincreasing-hold", False, float(log.t[idx + 1]),
                f"dV = {dv[idx]:.3e} > {tol['dv_hold_max']:g}"))
        else:
            checks.append(MonitorCheck("v-nonincreasing-hold", True))
    else:
        checks.append(MonitorCheck("v-nonincreasing-hold", True))
    return MonitorReport(tuple(checks))


def write_log(log: ScenarioLog, path) -> None:
    """Write a log as CSV at full double precision (lossless roundtrip)."""
    np.savetxt(path, log.to_array(), fmt="%.17g", delimiter=",",
               header=",".join(LOG_COLUMNS), comments="")


def read_log(path) -> ScenarioLog:
    """Read a CSV log written by write_log, validating the column header."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.split(",") != list(LOG_COLUMNS):
            raise LogSchemaError(
                f"unexpected log header {header!r}; expected {','.join(LOG_COLUMNS)!r}")
        body = fh.read()
    if not body.strip():
        return ScenarioLog.from_array(np.empty((0, len(LOG_COLUMNS))))
    arr = np.loadtxt(body.splitlines(), delimiter=",", ndmin=2)
    if arr.shape[1] != len(LOG_COLUMNS):
        raise LogSchemaError(
            f"log has {arr.shape[1]} columns, expected {len(LOG_COLUMNS)}")
    return ScenarioLog.from_array(arr)
