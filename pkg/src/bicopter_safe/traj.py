"""Waypoint plans and the trapezoidal-speed reference sampler.

A plan is an ordered list of 2D waypoints joined by straight segments, each
followed at trapezoidal speed: accelerate at a_max up to min(v_max,
sqrt(d a_max)), cruise, decelerate, stopping at every waypoint. Past the last
segment the reference holds the final waypoint, so the sampled output is
continuous for all t >= 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PlanGeometryError
from .xform import SafeSet

__all__ = [
    "WaypointPlan",
    "ReferenceSample",
    "SegmentProfile",
    "plan_octagon",
    "segment_profile",
    "sample_reference",
    "sample_positions",
]


@dataclass(frozen=True, eq=False)
class SegmentProfile:
    """Trapezoidal speed profile along one straight segment."""

    p_from: np.ndarray
    p_to: np.ndarray
    length: float
    v_peak: float
    t_accel: float
    duration: float

    def arc_length(self, tau: float) -> float:
        """Distance travelled at local time tau in [0, duration].

        Branches and operation order mirror sample_positions exactly so the
        scalar and vectorized samplers agree bit for bit.
        """
        tau = min(max(tau, 0.0), self.duration)
        a = self.v_peak / self.t_accel
        if tau < self.t_accel:
            return 0.5 * a * tau ** 2
        if tau <= self.duration - self.t_accel:
            return 0.5 * self.v_peak * self.t_accel + self.v_peak * (tau - self.t_accel)
        return self.length - 0.5 * a * (self.duration - tau) ** 2

    def position(self, tau: float) -> np.ndarray:
        frac = self.arc_length(tau) / self.length
        return self.p_from + frac * (self.p_to - self.p_from)


@dataclass(frozen=True, eq=False)
class WaypointPlan:
    """Ordered waypoints with speed/acceleration limits; immutable once built.

    origin stores the configuration fragment the plan was constructed from
    (octagon parameters or explicit points) so a plan can be serialized back
    without loss.
    """

    waypoints: np.ndarray
    v_max: float
    a_max: float
    origin: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.waypoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise PlanGeometryError("plan needs at least 1 waypoint of dimension 2")
        # a single waypoint is a zero-length plan: the reference holds it forever
        if pts.shape[0] > 1 and np.any(
                np.linalg.norm(np.diff(pts, axis=0), axis=1) == 0.0):
            raise PlanGeometryError("consecutive waypoints must be distinct")
        if not (self.v_max > 0.0 and self.a_max > 0.0):
            raise PlanGeometryError("v_max and a_max must be positive")
        object.__setattr__(self, "waypoints", pts)
        segs = [segment_profile(a, b, self.v_max, self.a_max)
                for a, b in zip(pts[:-1], pts[1:])]
        object.__setattr__(self, "_segments", tuple(segs))
        starts = np.concatenate([[0.0], np.cumsum([s.duration for s in segs])])
        object.__setattr__(self, "_starts", starts)

    @property
    def segments(self):
        return self._segments

    @property
    def duration(self) -> float:
        """Total reference duration; the final waypoint is held afterwards."""
        return float(self._starts[-1])

    def validate_inside(self, safe: SafeSet, margin: float = 0.0) -> None:
        """Require every waypoint strictly inside the position bounds minus margin."""
        if margin < 0.0:
            raise ValueError("margin must be nonnegative")
        limit = safe.xbar1 - margin
        bad = np.abs(self.waypoints) >= limit
        if np.any(bad):
            idx = int(np.argwhere(bad.any(axis=1))[0][0])
            raise PlanGeometryError(
                f"waypoint {idx} = {self.waypoints[idx].tolist()} not strictly "
                f"inside position bounds {limit.tolist()}")


@dataclass(frozen=True, eq=False)
class ReferenceSample:
    """One sampled reference point."""

    t: float
    x_d1: np.ndarray


def segment_profile(p_from, p_to, v_max: float, a_max: float) -> SegmentProfile:
    """Trapezoidal profile for one straight segment; triangular when too short
    to reach v_max."""
    p_from = np.asarray(p_from, dtype=float).reshape(2)
    p_to = np.asarray(p_to, dtype=float).reshape(2)
    d = float(np.linalg.norm(p_to - p_from))
    if d == 0.0:
        raise PlanGeometryError("segment endpoints coincide")
    if not (v_max > 0.0 and a_max > 0.0):
        raise PlanGeometryError("v_max and a_max must be positive")
    if d >= v_max * v_max / a_max:
        v_peak = v_max
        duration = d / v_max + v_max / a_max
    else:
        v_peak = math.sqrt(d * a_max)
        duration = 2.0 * math.sqrt(d / a_max)
    return SegmentProfile(p_from, p_to, d, v_peak, v_peak / a_max, duration)


def plan_octagon(safe: SafeSet, margin_fraction: float = 0.9,
                 chamfer_fraction: float = 0.5, v_max: float = 1.0,
                 a_max: float = 1.0) -> WaypointPlan:
    """Octagon tour: origin, eight vertices counter-clockwise, origin again.

    The octagon is the axis-aligned rectangle with half-extents
    (margin_fraction * xbar1) and each corner chamfered by the given fraction
    of the half-extent, starting at the rightmost-lower vertex.
    """
    if not 0.0 < margin_fraction < 1.0:
        raise PlanGeometryError("margin_fraction must lie in (0, 1)")
    if not 0.0 < chamfer_fraction < 1.0:
        raise PlanGeometryError(
            "chamfer_fraction must lie in (0, 1): chamfer >= half-extent "
            "degenerates the octagon")
    w, h = margin_fraction * safe.xbar1
    cut_w, cut_h = chamfer_fraction * w, chamfer_fraction * h
    vertices = np.array([
        (w, -(h - cut_h)),
        (w, h - cut_h),
        (w - cut_w, h),
        (-(w - cut_w), h),
        (-w, h - cut_h),
        (-w, -(h - cut_h)),
        (-(w - cut_w), -h),
        (w - cut_w, -h),
    ])
    pts = np.vstack([[0.0, 0.0], vertices, [0.0, 0.0]])
    plan = WaypointPlan(pts, v_max, a_max, origin={
        "type": "octagon",
        "margin_fraction": margin_fraction,
        "chamfer_fraction": chamfer_fraction,
        "v_max": v_max,
        "a_max": a_max,
    })
    plan.validate_inside(safe)
    return plan


def sample_reference(plan: WaypointPlan, t: float) -> ReferenceSample:
    """Reference position at time t >= 0; holds the final waypoint after the
    last segment ends."""
    if t < 0.0:
        raise ValueError("sample time must be nonnegative")
    starts = plan._starts
    if t >= starts[-1]:
        return ReferenceSample(t, plan.waypoints[-1].copy())
    k = int(np.searchsorted(starts, t, side="right") - 1)
    seg = plan.segments[k]
    return ReferenceSample(t, seg.position(t - starts[k]))


def sample_positions(plan: WaypointPlan, ts) -> np.ndarray:
    """Vectorized reference positions for an array of sample times."""
    ts = np.asarray(ts, dtype=float)
    out = np.empty((ts.size, 2))
    if not plan.segments:
        out[:] = plan.waypoints[-1]
        return out
    starts = plan._starts
    idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0,
                  len(plan.segments) - 1)
    held = ts >= starts[-1]
    for k, seg in enumerate(plan.segments):
        mask = (idx == k) & ~held
        if not np.any(mask):
            continue
        tau = ts[mask] - starts[k]
        ta, vp, d, T = seg.t_accel, seg.v_peak, seg.length, seg.duration
        a = vp / ta
        s = np.where(
            tau < ta,
            0.5 * a * tau ** 2,
            np.where(tau <= T - ta,
                     0.5 * vp * ta + vp * (tau - ta),
                     d - 0.5 * a * (T - tau) ** 2))
        out[mask] = seg.p_from + (s / d)[:, None] * (seg.p_to - seg.p_from)
    out[held] = plan.waypoints[-1]
    return out
