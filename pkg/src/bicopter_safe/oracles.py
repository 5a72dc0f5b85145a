"""Finite-difference oracles for every closed-form derivative the controller uses.

Each analytic quantity is compared against a centered finite difference of
its base quantity, either along the closed-loop flow (time derivatives) or
over the x3 arguments (the Jacobian N). The e4 check exercises the complete
Phi/Psi assembly through the identity e4dot = Phi - e3 + Psi u, which holds
for any constant u.

Errors are reported as max-abs deviation over max(1, max-abs analytic), a
relative error with a unit floor so near-zero quantities do not inflate the
metric.
"""
from __future__ import annotations

import numpy as np

from .ctrl import ControlGains, ControllerConfig, control_law, error_stack
from .model import PlantParams, PlantState, eval_g2, eval_N, eval_Ndot
from .sim import rk4_step
from .xform import SafeSet

__all__ = ["QUANTITIES", "run_derivative_checks", "default_check_setup"]

QUANTITIES = ("N_jacobian", "N_dot", "zeta1_ddot", "zeta2_ddot", "e2_dot",
              "e2_ddot", "e3_dot", "Q_dot", "Q_ddot", "e4_dot")

# analytic-value extractors, keyed by quantity; kept at module level so a
# fault-injection test can monkeypatch one entry and watch the check fail
_ANALYTIC = {
    "zeta1_ddot": lambda ctx: ctx["rates"][2],
    "zeta2_ddot": lambda ctx: ctx["rates"][3],
    "e2_dot": lambda ctx: ctx["stack"].e2_dot,
    "e2_ddot": lambda ctx: ctx["stack"].e2_ddot,
    "e3_dot": lambda ctx: ctx["stack"].e3_dot,
    "Q_dot": lambda ctx: np.diag(ctx["stack"].Q_dot),
    "Q_ddot": lambda ctx: np.diag(ctx["stack"].Q_ddot),
    "e4_dot": lambda ctx: (ctx["stack"].Phi - ctx["stack"].e3
                           + ctx["stack"].Psi @ ctx["u"]),
}

# base quantities whose flow derivative the analytic values must match
_BASE = {
    "zeta1_ddot": lambda ctx: ctx["rates"][0],
    "zeta2_ddot": lambda ctx: ctx["rates"][1],
    "e2_dot": lambda ctx: ctx["stack"].e2,
    "e2_ddot": lambda ctx: ctx["stack"].e2_dot,
    "e3_dot": lambda ctx: ctx["stack"].e3,
    "Q_dot": lambda ctx: np.diag(ctx["stack"].Q),
    "Q_ddot": lambda ctx: np.diag(ctx["stack"].Q_dot),
    "e4_dot": lambda ctx: ctx["stack"].e4,
}


def default_check_setup():
    """Paper-experiment plant and controller used by the verification command."""
    params = PlantParams(m=1.0, J=0.2, l=0.2, g=9.81)
    safe = SafeSet(xbar1=[7.0, 5.0], xbar2=[0.5, 0.5])
    cfg = ControllerConfig(gains=ControlGains(k1=1.0, k3=1.0, k4=1.0), safe=safe)
    return params, cfg


def _rel_err(analytic: np.ndarray, numeric: np.ndarray) -> float:
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    return float(np.max(np.abs(analytic - numeric))
                 / max(1.0, np.max(np.abs(analytic))))


def _random_interior_state(rng, safe: SafeSet) -> PlantState:
    # moderate interior ranges keep the centered differences well conditioned;
    # extreme corner states inflate third derivatives and with them the O(h^2)
    # truncation term
    chi1 = rng.uniform(-0.7, 0.7, 2)
    chi2 = rng.uniform(-0.7, 0.7, 2)
    return PlantState(
        x1=chi1 * safe.xbar1,
        x2=chi2 * safe.xbar2,
        x3=np.array([rng.uniform(-0.8, 0.8), rng.uniform(2.0, 12.0)]),
        x4=rng.uniform(-1.0, 1.0, 2))


def _context(state, z_d1, u, cfg, params) -> dict:
    from .xform import TransformedState, zeta_rates

    stack = error_stack(state, z_d1, cfg, params)
    ts = TransformedState.from_plant(state, cfg.safe)
    rates = zeta_rates(ts.zeta1, ts.zeta2, state.x3, state.x4, cfg.safe, params)
    return {"stack": stack, "rates": rates, "u": u}


def run_derivative_checks(seed: int, count: int, params: PlantParams | None = None,
                          cfg: ControllerConfig | None = None,
                          h: float = 1e-6) -> dict:
    """Worst relative error per quantity over `count` random interior states."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if params is None or cfg is None:
        d_params, d_cfg = default_check_setup()
        params = params or d_params
        cfg = cfg or d_cfg
    rng = np.random.default_rng(seed)
    worst = {name: 0.0 for name in QUANTITIES}

    for _ in range(count):
        # Jacobian and N_dot checks use the wider ranges of the model contract
        x3 = np.array([rng.uniform(-np.pi, np.pi), rng.uniform(-20.0, 20.0)])
        x4 = rng.uniform(-2.0, 2.0, 2)
        fd_n = np.column_stack([
            (eval_g2(x3 + [h, 0.0], params) - eval_g2(x3 - [h, 0.0], params)) / (2 * h),
            (eval_g2(x3 + [0.0, h], params) - eval_g2(x3 - [0.0, h], params)) / (2 * h),
        ])
        worst["N_jacobian"] = max(worst["N_jacobian"],
                                  _rel_err(eval_N(x3, params), fd_n))
        fd_ndot = (eval_N(x3 + h * x4, params) - eval_N(x3 - h * x4, params)) / (2 * h)
        worst["N_dot"] = max(worst["N_dot"],
                             _rel_err(eval_Ndot(x3, x4, params), fd_ndot))

        # flow-based checks with the closed-loop input held constant
        state = _random_interior_state(rng, cfg.safe)
        x_d1 = np.array([rng.uniform(-0.85, 0.85) * cfg.safe.xbar1[0],
                         rng.uniform(-0.85, 0.85) * cfg.safe.xbar1[1]])
        u = control_law(state, x_d1, cfg, params).u
        z_d1 = cfg.safe.xbar1 * np.arctanh(x_d1 / cfg.safe.xbar1)
        ctx0 = _context(state, z_d1, u, cfg, params)
        ctx_p = _context(rk4_step(state, u, h, params), z_d1, u, cfg, params)
        ctx_m = _context(_reverse_step(state, u, h, params), z_d1, u, cfg, params)

        for name in QUANTITIES[2:]:
            fd = (_BASE[name](ctx_p) - _BASE[name](ctx_m)) / (2 * h)
            worst[name] = max(worst[name], _rel_err(_ANALYTIC[name](ctx0), fd))
    return worst


def _reverse_step(state: PlantState, u, h: float, params: PlantParams) -> PlantState:
    """State at time -h along the same flow, via one RK4 step of the reversed field."""
    from .model import ControlInput, plant_derivative

    uv = ControlInput(np.asarray(u, dtype=float))
    x = state.as_vector()

    def f(vec):
        return -plant_derivative(PlantState.from_vector(vec), uv, params)

    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return PlantState.from_vector(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
