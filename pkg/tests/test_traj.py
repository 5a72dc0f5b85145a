"""Waypoint plans and the trapezoidal reference sampler."""
import numpy as np
import pytest

from bicopter_safe import plan_octagon, sample_reference, segment_profile
from bicopter_safe.errors import PlanGeometryError
from bicopter_safe.traj import WaypointPlan, sample_positions


def test_trapezoid_duration():
    prof = segment_profile([0, 0], [4, 0], 1.0, 1.0)
    assert prof.duration == pytest.approx(5.0, rel=1e-15)
    assert prof.v_peak == 1.0


def test_trapezoid_midpoint():
    # symmetric trapezoid over 4 m: 0.5 m after the 1 s ramp, then cruise
    prof = segment_profile([0, 0], [4, 0], 1.0, 1.0)
    assert prof.arc_length(2.5) == pytest.approx(2.0, rel=1e-15)


def test_triangular_profile_frozen():
    prof = segment_profile([0, 0], [0.5, 0], 1.0, 1.0)
    assert prof.v_peak == pytest.approx(0.7071067811865476, rel=1e-15)
    assert prof.duration == pytest.approx(1.4142135623730951, rel=1e-15)


def test_profile_reaches_endpoint():
    prof = segment_profile([1, 2], [-2, 3], 1.0, 1.0)
    np.testing.assert_allclose(prof.position(prof.duration), [-2, 3],
                               atol=1e-12)


def test_profile_rejects_degenerate():
    with pytest.raises(PlanGeometryError):
        segment_profile([1, 1], [1, 1], 1.0, 1.0)


def test_octagon_default_vertices(safe):
    plan = plan_octagon(safe)
    assert plan.waypoints.shape == (10, 2)
    np.testing.assert_array_equal(plan.waypoints[0], [0.0, 0.0])
    np.testing.assert_array_equal(plan.waypoints[-1], [0.0, 0.0])
    expected = {(6.3, -2.25), (6.3, 2.25), (3.15, 4.5), (-3.15, 4.5),
                (-6.3, 2.25), (-6.3, -2.25), (-3.15, -4.5), (3.15, -4.5)}
    got = {tuple(np.round(p, 12)) for p in plan.waypoints[1:-1]}
    assert got == expected
    assert np.all(np.abs(plan.waypoints[:, 0]) < 7.0)
    assert np.all(np.abs(plan.waypoints[:, 1]) < 5.0)


def test_octagon_vertex_order_counterclockwise(safe):
    verts = plan_octagon(safe).waypoints[1:-1]
    # shoelace formula: positive area means counter-clockwise ordering
    x, y = verts[:, 0], verts[:, 1]
    area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert area > 0.0
    np.testing.assert_array_equal(verts[0], [6.3, -2.25])


def test_octagon_degenerate_chamfer(safe):
    with pytest.raises(PlanGeometryError):
        plan_octagon(safe, chamfer_fraction=1.0)
    plan = plan_octagon(safe, chamfer_fraction=0.99)
    assert len({tuple(p) for p in plan.waypoints[1:-1]}) == 8


def test_octagon_margin_bounds(safe):
    with pytest.raises(PlanGeometryError):
        plan_octagon(safe, margin_fraction=1.0)


def test_sample_reference_endpoints(safe):
    plan = plan_octagon(safe)
    np.testing.assert_array_equal(sample_reference(plan, 0.0).x_d1, [0.0, 0.0])
    np.testing.assert_array_equal(sample_reference(plan, plan.duration).x_d1,
                                  [0.0, 0.0])
    np.testing.assert_array_equal(sample_reference(plan, plan.duration + 50).x_d1,
                                  [0.0, 0.0])


def test_sample_reference_rejects_negative_time(safe):
    with pytest.raises(ValueError):
        sample_reference(plan_octagon(safe), -1.0)


def test_reference_strictly_interior(safe):
    plan = plan_octagon(safe)
    ts = np.linspace(0.0, plan.duration + 5.0, 20000)
    xd = sample_positions(plan, ts)
    assert np.all(np.abs(xd) < safe.xbar1)


def test_reference_speed_capped(safe):
    plan = plan_octagon(safe)
    h = 1e-3
    ts = np.arange(0.0, plan.duration + 1.0, h)
    xd = sample_positions(plan, ts)
    speed = np.linalg.norm(np.diff(xd, axis=0), axis=1) / h
    assert np.all(speed <= plan.v_max + 1e-9)


def test_reference_continuity(safe):
    plan = plan_octagon(safe)
    for h in (1e-3, 1e-4):
        ts = np.arange(0.0, plan.duration + 1.0, h)
        xd = sample_positions(plan, ts)
        step = np.linalg.norm(np.diff(xd, axis=0), axis=1)
        assert np.all(step <= (plan.v_max + plan.a_max * h) * h + 1e-15)


def test_batch_matches_scalar_sampler(safe, rng):
    plan = plan_octagon(safe)
    ts = np.sort(rng.uniform(0.0, plan.duration + 3.0, 500))
    batch = sample_positions(plan, ts)
    scalar = np.array([sample_reference(plan, t).x_d1 for t in ts])
    np.testing.assert_array_equal(batch, scalar)


def test_single_waypoint_plan_holds(safe):
    plan = WaypointPlan(np.array([[1.0, -2.0]]), 1.0, 1.0)
    assert plan.duration == 0.0
    np.testing.assert_array_equal(sample_reference(plan, 0.0).x_d1, [1.0, -2.0])
    np.testing.assert_array_equal(sample_reference(plan, 7.5).x_d1, [1.0, -2.0])
    np.testing.assert_array_equal(sample_positions(plan, np.array([0.0, 3.0])),
                                  [[1.0, -2.0], [1.0, -2.0]])


def test_plan_rejects_repeated_waypoints():
    with pytest.raises(PlanGeometryError):
        WaypointPlan(np.array([[0.0, 0.0], [0.0, 0.0]]), 1.0, 1.0)


def test_plan_margin_validation(safe):
    plan = WaypointPlan(np.array([[0.0, 0.0], [6.9, 0.0]]), 1.0, 1.0)
    plan.validate_inside(safe)
    with pytest.raises(PlanGeometryError):
        plan.validate_inside(safe, margin=0.2)


def test_plan_duration_concatenates_segments(safe):
    plan = WaypointPlan(np.array([[0.0, 0.0], [4.0, 0.0], [4.0, 2.0]]), 1.0, 1.0)
    assert plan.duration == pytest.approx(5.0 + 3.0, rel=1e-15)
