"""Plant model: physical parameters and the dynamically extended bicopter.

The bicopter is a planar two-rotor vehicle with total thrust F and moment M.
Augmenting the thrust with two integrator states (F, Fdot) yields an 8-state
system in four 2-blocks,

    x1 = [r1, r2]      position            x1dot = x2
    x2 = [v1, v2]      velocity            x2dot = f2 + g2(x3)
    x3 = [theta, F]    attitude / thrust   x3dot = x4
    x4 = [thetadot, Fdot]                  x4dot = g4 u,   u = [Fddot, M]

with f2 = [0, -g] and the input map g4 constant and invertible, which is what
makes backstepping through all four blocks possible.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PlantParams",
    "PlantState",
    "ControlInput",
    "eval_g2",
    "eval_g4",
    "eval_N",
    "eval_Ndot",
    "rotor_forces",
    "plant_derivative",
    "f2_vector",
]


def _vec2(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).reshape(-1)
    if arr.shape != (2,):
        raise ValueError(f"{name} must have exactly 2 entries, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PlantParams:
    """Physical constants: mass, inertia, arm length, gravity. All positive."""

    m: float = 1.0
    J: float = 0.2
    l: float = 0.2
    g: float = 9.81

    def __post_init__(self):
        for name in ("m", "J", "l", "g"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"PlantParams.{name} must be strictly positive")


@dataclass(eq=False)
class PlantState:
    """Extended state in four 2-blocks; exposed flat as an 8-vector for integration."""

    x1: np.ndarray
    x2: np.ndarray
    x3: np.ndarray
    x4: np.ndarray

    def __post_init__(self):
        self.x1 = _vec2(self.x1, "x1")
        self.x2 = _vec2(self.x2, "x2")
        self.x3 = _vec2(self.x3, "x3")
        self.x4 = _vec2(self.x4, "x4")
        if not np.all(np.isfinite(self.as_vector())):
            raise ValueError("PlantState entries must be finite")

    def as_vector(self) -> np.ndarray:
        """Flat [r1, r2, v1, v2, theta, F, thetadot, Fdot]."""
        return np.concatenate([self.x1, self.x2, self.x3, self.x4])

    @classmethod
    def from_vector(cls, vec) -> "PlantState":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.shape != (8,):
            raise ValueError(f"state vector must have 8 entries, got {vec.shape}")
        return cls(vec[0:2], vec[2:4], vec[4:6], vec[6:8])

    @classmethod
    def hover(cls, params: PlantParams, x1=(0.0, 0.0)) -> "PlantState":
        """Equilibrium state at position x1: zero rates, thrust m*g."""
        return cls(np.asarray(x1, float), np.zeros(2),
                   np.array([0.0, params.m * params.g]), np.zeros(2))


@dataclass(eq=False)
class ControlInput:
    """u = [Fddot, M]: thrust second derivative and body moment."""

    u: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.u = _vec2(self.u, "u")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("ControlInput entries must be finite")


def f2_vector(params: PlantParams) -> np.ndarray:
    """Constant drift of the velocity block, [0, -g]."""
    return np.array([0.0, -params.g])


def eval_g2(x3, params: PlantParams) -> np.ndarray:
    """Thrust acceleration m^-1 [-sin(theta), cos(theta)] F for x3 = [theta, F]."""
    theta, force = np.asarray(x3, dtype=float)
    return np.array([-np.sin(theta), np.cos(theta)]) * (force / params.m)


def eval_g4(params: PlantParams) -> np.ndarray:
    """Constant input map [[0, 1/J], [1, 0]]; nonsingular for J > 0."""
    return np.array([[0.0, 1.0 / params.J], [1.0, 0.0]])


def eval_N(x3, params: PlantParams) -> np.ndarray:
    """Jacobian of eval_g2 with respect to x3; det N = -F/m^2, singular iff F = 0."""
    theta, force = np.asarray(x3, dtype=float)
    s, c = np.sin(theta), np.cos(theta)
    return np.array([[-c * force, -s], [-s * force, c]]) / params.m


def eval_Ndot(x3, x4, params: PlantParams) -> np.ndarray:
    """Entrywise time derivative of eval_N along x3dot = x4."""
    theta, force = np.asarray(x3, dtype=float)
    td, fd = np.asarray(x4, dtype=float)
    s, c = np.sin(theta), np.cos(theta)
    return np.array([
        [s * td * force - c * fd, -c * td],
        [-c * td * force - s * fd, -s * td],
    ]) / params.m


def rotor_forces(force: float, moment: float, params: PlantParams) -> np.ndarray:
    """Invert F = f1 + f2, M = (f2 - f1) l into the individual rotor forces."""
    half_diff = moment / params.l
    return np.array([(force - half_diff) / 2.0, (force + half_diff) / 2.0])


def plant_derivative(state: PlantState, u: ControlInput, params: PlantParams) -> np.ndarray:
    """Flat 8-vector (x1dot, x2dot, x3dot, x4dot) of the extended dynamics."""
    uv = u.u if isinstance(u, ControlInput) else _vec2(u, "u")
    return np.concatenate([
        state.x2,
        f2_vector(params) + eval_g2(state.x3, params),
        state.x4,
        eval_g4(params) @ uv,
    ])
