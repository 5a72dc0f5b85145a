"""JSON scenario configuration: validation into a Scenario and back.

The document is a single human-editable JSON object with a schema_version
field. Validation errors name the offending field. A config -> Scenario ->
config roundtrip preserves every field.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .ctrl import ControlGains, ControllerConfig
from .errors import ConfigError, PlanGeometryError
from .model import PlantParams, PlantState
from .sim import DEFAULT_MONITOR_TOLERANCES, Scenario
from .traj import WaypointPlan, plan_octagon
from .xform import SafeSet

__all__ = [
    "SCHEMA_VERSION",
    "load_config",
    "scenario_from_config",
    "scenario_to_config",
    "plan_from_config",
    "plan_to_config",
    "default_octagon_config",
]

SCHEMA_VERSION = 1


def _get(d: dict, key: str, kind, where: str, default=None, required=True):
    if key not in d:
        if required:
            raise ConfigError(f"{where}{key}: missing required field")
        return default
    value = d[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where}{key}: expected a number, got {value!r}")
        return float(value)
    if kind is dict and not isinstance(value, dict):
        raise ConfigError(f"{where}{key}: expected an object, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise ConfigError(f"{where}{key}: expected a list, got {value!r}")
    if kind is str and not isinstance(value, str):
        raise ConfigError(f"{where}{key}: expected a string, got {value!r}")
    return value


def _pair(d: dict, key: str, where: str, default=None, required=True):
    raw = _get(d, key, list, where, default=default, required=required)
    if raw is default and not required:
        return default
    if len(raw) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                for v in raw):
        raise ConfigError(f"{where}{key}: expected a pair of numbers, got {raw!r}")
    return [float(raw[0]), float(raw[1])]


def load_config(path) -> dict:
    """Parse a JSON config file; parse errors become ConfigError."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def plan_from_config(d: dict, safe: SafeSet) -> WaypointPlan:
    """Build a plan from its config section (octagon parameters or points)."""
    kind = _get(d, "type", str, "plan.")
    v_max = _get(d, "v_max", float, "plan.", default=1.0, required=False)
    a_max = _get(d, "a_max", float, "plan.", default=1.0, required=False)
    if kind == "octagon":
        return plan_octagon(
            safe,
            margin_fraction=_get(d, "margin_fraction", float, "plan.",
                                 default=0.9, required=False),
            chamfer_fraction=_get(d, "chamfer_fraction", float, "plan.",
                                  default=0.5, required=False),
            v_max=v_max, a_max=a_max)
    if kind == "waypoints":
        points = _get(d, "points", list, "plan.")
        plan = WaypointPlan(np.asarray(points, dtype=float), v_max, a_max,
                            origin={"type": "waypoints",
                                    "points": [list(map(float, p)) for p in points],
                                    "v_max": v_max, "a_max": a_max})
        plan.validate_inside(safe)
        return plan
    raise ConfigError(f"plan.type: unknown plan type {kind!r}")


def plan_to_config(plan: WaypointPlan) -> dict:
    """Serialize a plan back to its config section."""
    if plan.origin:
        return dict(plan.origin)
    return {"type": "waypoints",
            "points": plan.waypoints.tolist(),
            "v_max": plan.v_max, "a_max": plan.a_max}


def scenario_from_config(doc: dict) -> Scenario:
    """Validate a config document into a Scenario, field by field."""
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    plant_d = _get(doc, "plant", dict, "")
    try:
        params = PlantParams(
            m=_get(plant_d, "m", float, "plant."),
            J=_get(plant_d, "J", float, "plant."),
            l=_get(plant_d, "l", float, "plant."),
            g=_get(plant_d, "g", float, "plant.", default=9.81, required=False))
    except ValueError as exc:
        raise ConfigError(f"plant: {exc}") from exc

    gains_d = _get(doc, "gains", dict, "")
    try:
        gains = ControlGains(
            k1=_get(gains_d, "k1", float, "gains."),
            k3=_get(gains_d, "k3", float, "gains."),
            k4=_get(gains_d, "k4", float, "gains."),
            k2=_get(gains_d, "k2", float, "gains.", default=None, required=False))
    except ValueError as exc:
        raise ConfigError(f"gains: {exc}") from exc

    safe_d = _get(doc, "safe_set", dict, "")
    try:
        safe = SafeSet(
            xbar1=_pair(safe_d, "xbar1", "safe_set."),
            xbar2=_pair(safe_d, "xbar2", "safe_set."),
            chi_clamp=_get(safe_d, "chi_clamp", float, "safe_set.",
                           default=1e-9, required=False),
            zeta_clamp=_get(safe_d, "zeta_clamp", float, "safe_set.",
                            default=30.0, required=False))
    except ValueError as exc:
        raise ConfigError(f"safe_set: {exc}") from exc

    try:
        cfg = ControllerConfig(gains=gains, safe=safe,
                               f_epsilon=_get(doc, "f_epsilon", float, "",
                                              default=0.1, required=False))
    except ValueError as exc:
        raise ConfigError(f"f_epsilon: {exc}") from exc

    try:
        plan = plan_from_config(_get(doc, "plan", dict, ""), safe)
    except PlanGeometryError as exc:
        raise ConfigError(f"plan: {exc}") from exc

    x0_d = _get(doc, "x0", dict, "", default=None, required=False)
    if x0_d is None:
        x0 = PlantState.hover(params)
    else:
        x0 = PlantState(
            x1=_pair(x0_d, "x1", "x0."), x2=_pair(x0_d, "x2", "x0."),
            x3=_pair(x0_d, "x3", "x0."), x4=_pair(x0_d, "x4", "x0."))
    for i in range(2):
        if abs(x0.x1[i]) >= safe.xbar1[i]:
            raise ConfigError(
                f"x0.x1[{i}]: |{x0.x1[i]!r}| must be < xbar1[{i}] = {safe.xbar1[i]!r}")
        if abs(x0.x2[i]) >= safe.xbar2[i]:
            raise ConfigError(
                f"x0.x2[{i}]: |{x0.x2[i]!r}| must be < xbar2[{i}] = {safe.xbar2[i]!r}")
    if abs(x0.x3[1]) < cfg.f_epsilon:
        raise ConfigError(
            f"x0.x3[1]: initial net force {x0.x3[1]!r} lies inside the projection "
            f"band (-{cfg.f_epsilon:g}, {cfg.f_epsilon:g}); the controller "
            f"requires |F(0)| >= f_epsilon")

    dt = _get(doc, "dt", float, "", default=1e-3, required=False)
    t_end = _get(doc, "t_end", float, "", default=None, required=False)
    if t_end is None:
        t_end = plan.duration + 30.0
    tol_d = _get(doc, "monitor_tolerances", dict, "", default={}, required=False)
    unknown = set(tol_d) - set(DEFAULT_MONITOR_TOLERANCES)
    if unknown:
        raise ConfigError(f"monitor_tolerances: unknown keys {sorted(unknown)}")

    try:
        return Scenario(params=params, cfg=cfg, plan=plan, x0=x0,
                        t_end=t_end, dt=dt,
                        monitor_tolerances={k: float(v) for k, v in tol_d.items()})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def scenario_to_config(sc: Scenario, output: str | None = None) -> dict:
    """Serialize a Scenario into the canonical config document."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "plant": {"m": sc.params.m, "J": sc.params.J, "l": sc.params.l,
                  "g": sc.params.g},
        "gains": {"k1": sc.cfg.gains.k1, "k3": sc.cfg.gains.k3,
                  "k4": sc.cfg.gains.k4},
        "safe_set": {"xbar1": sc.cfg.safe.xbar1.tolist(),
                     "xbar2": sc.cfg.safe.xbar2.tolist(),
                     "chi_clamp": sc.cfg.safe.chi_clamp,
                     "zeta_clamp": sc.cfg.safe.zeta_clamp},
        "f_epsilon": sc.cfg.f_epsilon,
        "plan": plan_to_config(sc.plan),
        "x0": {"x1": sc.x0.x1.tolist(), "x2": sc.x0.x2.tolist(),
               "x3": sc.x0.x3.tolist(), "x4": sc.x0.x4.tolist()},
        "dt": sc.dt,
        "t_end": sc.t_end,
        "monitor_tolerances": dict(sc.monitor_tolerances),
    }
    if output is not None:
        doc["output"] = output
    return doc


def default_octagon_config() -> dict:
    """The shipped octagon experiment.

    The octagon scale is chosen so the sampled-setpoint pursuit stays well
    inside the velocity bounds at dt = 1e-3: the reference moves at up to
    v_max = 1 m/s against a 0.5 m/s velocity cap, so larger octagons let the
    pursuit gap grow until the velocity channel rides the constraint boundary
    closer than the discrete step can resolve.
    """
    return {
        "schema_version": SCHEMA_VERSION,
        "plant": {"m": 1.0, "J": 0.2, "l": 0.2, "g": 9.81},
        "gains": {"k1": 1.0, "k3": 1.0, "k4": 1.0},
        "safe_set": {"xbar1": [7.0, 5.0], "xbar2": [0.5, 0.5],
                     "chi_clamp": 1e-9, "zeta_clamp": 30.0},
        "f_epsilon": 0.1,
        "plan": {"type": "octagon", "margin_fraction": 0.18,
                 "chamfer_fraction": 0.5, "v_max": 1.0, "a_max": 1.0},
        "x0": {"x1": [0.0, 0.0], "x2": [0.0, 0.0], "x3": [0.0, 9.81],
               "x4": [0.0, 0.0]},
        "dt": 1e-3,
        "t_end": 48.0,
        "monitor_tolerances": dict(DEFAULT_MONITOR_TOLERANCES),
        "output": "octagon_log.csv",
    }
