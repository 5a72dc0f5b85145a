"""Constraint-removing state transformation and its derivative algebra.

Positions and velocities are normalized by their bounds and pushed through
atanh, mapping the open safe box onto all of R^2 per axis:

    z1 = D(xbar1) atanh(x1 / xbar1),    z2 = D(xbar2) atanh(x2 / xbar2),

with z3 = x3 and z4 = x4 unchanged. The inverse is the tanh squashing map, so
any finite transformed state corresponds to a state strictly inside the box.
Working in zeta = z / xbar keeps the hyperbolic expressions dimensionless.

Two numeric guards keep the map total in floating point: chi is clamped to
[-1 + delta, 1 - delta] before atanh (boundary contact becomes a large finite
value instead of infinity), and zeta is clipped to [-Z, Z] so that the cosh
powers appearing downstream cannot overflow. With the defaults the chi clamp
caps |zeta| near 10.7, well under Z = 30.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SafeSetViolationError
from .model import PlantParams, PlantState, eval_g2, eval_N, f2_vector

__all__ = [
    "SafeSet",
    "TransformedState",
    "diag_of",
    "diag_inv_of",
    "ch_of",
    "sh_of",
    "forward_map",
    "inverse_map",
    "transformed_drift_F1",
    "zeta_rates",
]


@dataclass(frozen=True, eq=False)
class SafeSet:
    """Position/velocity box bounds plus the numeric guards of the transformation."""

    xbar1: np.ndarray
    xbar2: np.ndarray
    chi_clamp: float = 1e-9
    zeta_clamp: float = 30.0

    def __post_init__(self):
        object.__setattr__(self, "xbar1", np.asarray(self.xbar1, dtype=float).reshape(2))
        object.__setattr__(self, "xbar2", np.asarray(self.xbar2, dtype=float).reshape(2))
        if not (np.all(self.xbar1 > 0.0) and np.all(self.xbar2 > 0.0)):
            raise ValueError("SafeSet bounds must be entrywise positive")
        if not 0.0 < self.chi_clamp < 1.0:
            raise ValueError("SafeSet.chi_clamp must lie in (0, 1)")
        if not self.zeta_clamp > 0.0:
            raise ValueError("SafeSet.zeta_clamp must be positive")

    def contains(self, x1, x2) -> bool:
        """Strict interior test for a position/velocity pair."""
        return bool(np.all(np.abs(np.asarray(x1)) < self.xbar1)
                    and np.all(np.abs(np.asarray(x2)) < self.xbar2))


@dataclass(eq=False)
class TransformedState:
    """Transformed state (z1, z2, z3, z4) with the normalized zeta coordinates."""

    z1: np.ndarray
    z2: np.ndarray
    z3: np.ndarray
    z4: np.ndarray
    zeta1: np.ndarray
    zeta2: np.ndarray

    @classmethod
    def from_plant(cls, state: PlantState, safe: SafeSet) -> "TransformedState":
        z1, z2 = forward_map(state.x1, state.x2, safe)
        zc = safe.zeta_clamp
        zeta1 = np.clip(z1 / safe.xbar1, -zc, zc)
        zeta2 = np.clip(z2 / safe.xbar2, -zc, zc)
        return cls(safe.xbar1 * zeta1, safe.xbar2 * zeta2,
                   state.x3.copy(), state.x4.copy(), zeta1, zeta2)


def diag_of(q) -> np.ndarray:
    """diag(q1, ..., qn)."""
    return np.diag(np.asarray(q, dtype=float))


def diag_inv_of(q) -> np.ndarray:
    """diag(1/q1, ..., 1/qn); every entry must be nonzero."""
    arr = np.asarray(q, dtype=float)
    if np.any(arr == 0.0):
        raise ValueError("diag_inv_of requires all entries nonzero")
    return np.diag(1.0 / arr)


def ch_of(q) -> np.ndarray:
    """Entrywise cosh."""
    return np.cosh(np.asarray(q, dtype=float))


def sh_of(q) -> np.ndarray:
    """Entrywise sinh."""
    return np.sinh(np.asarray(q, dtype=float))


def _clamped_chi(x, xbar, delta, what: str) -> np.ndarray:
    chi = np.asarray(x, dtype=float) / xbar
    if np.any(np.abs(chi) >= 1.0):
        raise SafeSetViolationError(
            f"{what} outside the open safe set: |chi| = {np.max(np.abs(chi)):.6g} >= 1")
    return np.clip(chi, -1.0 + delta, 1.0 - delta)


def forward_map(x1, x2, safe: SafeSet):
    """(x1, x2) inside the box -> (z1, z2) in R^2 x R^2 via the atanh map."""
    chi1 = _clamped_chi(x1, safe.xbar1, safe.chi_clamp, "position")
    chi2 = _clamped_chi(x2, safe.xbar2, safe.chi_clamp, "velocity")
    return safe.xbar1 * np.arctanh(chi1), safe.xbar2 * np.arctanh(chi2)


def inverse_map(z1, z2, safe: SafeSet):
    """(z1, z2) anywhere in R^2 x R^2 -> (x1, x2) strictly inside the box.

    tanh rounds to exactly 1.0 for arguments beyond about 19, which would put
    the output on the boundary; the result is pinned to the nearest double
    strictly inside so the strict-range guarantee survives in floating point.
    """
    def squash(z, xbar):
        x = xbar * np.tanh(np.asarray(z, dtype=float) / xbar)
        interior = np.nextafter(xbar, 0.0)
        return np.clip(x, -interior, interior)

    return squash(z1, safe.xbar1), squash(z2, safe.xbar2)


def _guarded(zeta, safe: SafeSet) -> np.ndarray:
    return np.clip(np.asarray(zeta, dtype=float), -safe.zeta_clamp, safe.zeta_clamp)


def transformed_drift_F1(zeta1, zeta2, safe: SafeSet) -> np.ndarray:
    """z1dot expressed in transformed coordinates: Ch(zeta1)^2 * xbar2 * tanh(zeta2)."""
    zeta1 = _guarded(zeta1, safe)
    zeta2 = _guarded(zeta2, safe)
    return np.cosh(zeta1) ** 2 * safe.xbar2 * np.tanh(zeta2)


def zeta_rates(zeta1, zeta2, z3, z4, safe: SafeSet, params: PlantParams):
    """First and second time derivatives of the normalized coordinates.

    Returns (zeta1_dot, zeta2_dot, zeta1_ddot, zeta2_ddot). These are the
    closed-form chain-rule derivatives of the transformed dynamics; they are
    cross-validated against finite differences of the flow in the test suite.
    """
    zeta1 = _guarded(zeta1, safe)
    zeta2 = _guarded(zeta2, safe)
    c1, c2 = np.cosh(zeta1), np.cosh(zeta2)
    t2 = np.tanh(zeta2)
    sh2_1 = np.sinh(2.0 * zeta1)
    sh2_2 = np.sinh(2.0 * zeta2)

    w = f2_vector(params) + eval_g2(z3, params)
    n_z4 = eval_N(z3, params) @ np.asarray(z4, dtype=float)

    zeta1_dot = c1 ** 2 * safe.xbar2 * t2 / safe.xbar1
    zeta2_dot = c2 ** 2 * w / safe.xbar2
    zeta1_ddot = (sh2_1 * zeta1_dot * safe.xbar2 * t2
                  + c1 ** 2 * safe.xbar2 * zeta2_dot / c2 ** 2) / safe.xbar1
    zeta2_ddot = (sh2_2 * zeta2_dot * w + c2 ** 2 * n_z4) / safe.xbar2
    return zeta1_dot, zeta2_dot, zeta1_ddot, zeta2_ddot
