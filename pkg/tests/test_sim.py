"""Simulation harness: integrator, scenario runs, monitors, log I/O."""
import numpy as np
import pytest

from bicopter_safe import (ControlInput, PlantState, Scenario, ScenarioLog,
                           SimulationError, monitor_invariants, read_log,
                           rk4_step, run_scenario, write_log)
from bicopter_safe.errors import LogSchemaError
from bicopter_safe.sim import LOG_COLUMNS
from bicopter_safe.traj import WaypointPlan


def hold_plan(point=(0.0, 0.0)):
    return WaypointPlan(np.array([point], dtype=float), 1.0, 1.0)


@pytest.fixture
def hover_scenario(params, cfg):
    return Scenario(params=params, cfg=cfg, plan=hold_plan(),
                    x0=PlantState.hover(params), t_end=0.5, dt=1e-3)


def test_rk4_hover_fixed_point(params):
    state = PlantState.hover(params)
    for dt in (1e-3, 1e-2):
        out = rk4_step(state, ControlInput(), dt, params)
        np.testing.assert_allclose(out.as_vector(), state.as_vector(),
                                   atol=1e-14)


def test_rk4_free_fall_exact(params):
    # constant acceleration: RK4 integrates the quadratic exactly
    state = PlantState(np.zeros(2), np.zeros(2), np.zeros(2), np.zeros(2))
    out = rk4_step(state, ControlInput(), 0.1, params)
    assert out.x2[1] == pytest.approx(-0.981, rel=1e-15)
    assert out.x1[1] == pytest.approx(-0.04905, rel=1e-15)


def test_rk4_torque_double_integrator(params):
    # M = 0.2, J = 0.2: thetaddot = 1 rad/s^2, theta(1 s) = 0.5 rad
    state = PlantState.hover(params)
    u = ControlInput([0.0, 0.2])
    for _ in range(1000):
        state = rk4_step(state, u, 1e-3, params)
    assert state.x3[0] == pytest.approx(0.5, abs=1e-12)
    assert state.x4[0] == pytest.approx(1.0, abs=1e-12)


def test_rk4_rejects_nonpositive_dt(params):
    with pytest.raises(ValueError):
        rk4_step(PlantState.hover(params), ControlInput(), 0.0, params)


def test_scenario_validation(params, cfg):
    with pytest.raises(ValueError, match="dt"):
        Scenario(params=params, cfg=cfg, plan=hold_plan(),
                 x0=PlantState.hover(params), t_end=1.0, dt=0.1)
    with pytest.raises(ValueError, match="safe set"):
        Scenario(params=params, cfg=cfg, plan=hold_plan(),
                 x0=PlantState([8.0, 0.0], [0, 0], [0, 9.81], [0, 0]),
                 t_end=1.0)
    with pytest.raises(ValueError, match="projection"):
        Scenario(params=params, cfg=cfg, plan=hold_plan(),
                 x0=PlantState([0, 0], [0, 0], [0.0, 0.0], [0, 0]), t_end=1.0)


def test_hold_scenario_stays_at_equilibrium(hover_scenario):
    log = run_scenario(hover_scenario)
    assert len(log) == hover_scenario.n_rows
    x0 = hover_scenario.x0.as_vector()
    assert np.max(np.abs(log.states - x0)) < 1e-12
    assert np.max(np.abs(log.controls)) < 1e-12


def test_run_scenario_deterministic(hover_scenario, params, cfg):
    sc = Scenario(params=params, cfg=cfg,
                  plan=WaypointPlan(np.array([[0.0, 0.0], [1.0, 0.5]]), 1.0, 1.0),
                  x0=PlantState.hover(params), t_end=3.0, dt=1e-3)
    a = run_scenario(sc).to_array()
    b = run_scenario(sc).to_array()
    assert np.array_equal(a, b)


def test_step_halving_converges(params, cfg):
    # the converged endpoint of a constant-setpoint run is insensitive to dt;
    # mid-transient states carry the O(dt) zero-order-hold sampling error, so
    # the comparison is made after the regulation has settled
    plan = hold_plan((2.0, 1.0))
    final = {}
    for dt in (1e-3, 5e-4):
        sc = Scenario(params=params, cfg=cfg, plan=plan,
                      x0=PlantState.hover(params), t_end=60.0, dt=dt)
        final[dt] = run_scenario(sc).states[-1, 0:2]
    assert np.linalg.norm(final[1e-3] - final[5e-4]) < 1e-6


def test_monitor_clean_on_hover(hover_scenario):
    log = run_scenario(hover_scenario)
    report = monitor_invariants(log, hover_scenario)
    assert report.ok
    assert report.first_violation() is None
    assert "OK" in report.summary()


def test_monitor_detects_position_violation(hover_scenario):
    log = run_scenario(hover_scenario)
    arr = log.to_array()
    arr[17, 1] = 7.1  # r1 out of bounds at row 17
    bad = ScenarioLog.from_array(arr)
    report = monitor_invariants(bad, hover_scenario)
    assert not report.ok
    violation = report.first_violation()
    assert violation.name == "position-bounds"
    assert violation.t_violation == pytest.approx(0.017)


def test_monitor_detects_vdot_violation(hover_scenario):
    log = run_scenario(hover_scenario)
    arr = log.to_array()
    arr[5, 14] = 1e-6  # positive Vdot
    report = monitor_invariants(ScenarioLog.from_array(arr), hover_scenario)
    assert not report.ok
    assert report.first_violation().name == "vdot-nonpositive"


def test_monitor_detects_v_increase_during_hold(hover_scenario):
    log = run_scenario(hover_scenario)
    arr = log.to_array()
    arr[10, 13] = arr[9, 13] + 1e-3  # V jumps while the setpoint is constant
    report = monitor_invariants(ScenarioLog.from_array(arr), hover_scenario)
    assert not report.ok
    assert report.first_violation().name == "v-nonincreasing-hold"


def test_partial_log_on_safe_set_exit(params, cfg):
    # a 6.7 m sprint at v_max twice the velocity bound erodes the pursuit
    # margin until the discrete step crosses the boundary
    sc = Scenario(params=params, cfg=cfg,
                  plan=WaypointPlan(np.array([[0.0, 0.0], [6.7, 0.0]]), 1.0, 1.0),
                  x0=PlantState.hover(params), t_end=20.0, dt=1e-3)
    with pytest.raises(SimulationError) as excinfo:
        run_scenario(sc)
    err = excinfo.value
    assert err.partial_log is not None
    assert 0 < len(err.partial_log) < sc.n_rows
    assert err.step == len(err.partial_log)
    # everything logged before the failure is still inside the safe set
    assert np.all(np.abs(err.partial_log.states[:, 2]) < 0.5)


def test_theorem_limits_after_long_hold(params, cfg):
    # desk-scale check of the asymptotic limits: z2, z4, u -> 0 and
    # z3 -> [0, mg] after a long regulation hold
    sc = Scenario(params=params, cfg=cfg, plan=hold_plan((3.0, 2.0)),
                  x0=PlantState.hover(params), t_end=60.0, dt=1e-3)
    log = run_scenario(sc)
    final = log.states[-1]
    assert np.linalg.norm(final[2:4]) < 1e-6   # velocity (z2 ~ x2 near 0)
    assert np.linalg.norm(final[6:8]) < 1e-6   # z4
    assert np.linalg.norm(log.controls[-1]) < 1e-6
    assert abs(final[4]) < 1e-4                # theta
    assert abs(final[5] - params.m * params.g) < 1e-4


def test_log_roundtrip_exact(hover_scenario, tmp_path):
    log = run_scenario(hover_scenario)
    path = tmp_path / "log.csv"
    write_log(log, path)
    back = read_log(path)
    np.testing.assert_array_equal(back.to_array(), log.to_array())
    header = path.read_text().splitlines()[0]
    assert header == ",".join(LOG_COLUMNS)
    assert path.read_text().endswith("\n")


def test_log_roundtrip_empty(tmp_path):
    empty = ScenarioLog.from_array(np.empty((0, len(LOG_COLUMNS))))
    path = tmp_path / "empty.csv"
    write_log(empty, path)
    back = read_log(path)
    assert len(back) == 0
    assert path.read_text().splitlines() == [",".join(LOG_COLUMNS)]


def test_read_log_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,r1\n0.0,1.0\n")
    with pytest.raises(LogSchemaError):
        read_log(path)


def test_monitor_rejects_empty_log(hover_scenario):
    empty = ScenarioLog.from_array(np.empty((0, len(LOG_COLUMNS))))
    with pytest.raises(ValueError):
        monitor_invariants(empty, hover_scenario)
