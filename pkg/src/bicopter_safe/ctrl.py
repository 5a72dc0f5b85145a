"""Backstepping error stack, Lyapunov functions, and the explicit control law.

The controller is synthesized in the transformed coordinates through four
error variables,

    e1 = z1 - zd1
    e2 = F1(z1, z2) + k1 e1
    e3 = Q (f2 + g2(z3)) + k2 e2,      Q = D(Ch_z2)^2 D_I(Ch_z1)^2 D_I(xbar2)^2
    e4 = e2 - k1 e1 + Qdot w + Q N z4 + k2 e2dot + k3 e3,

driven by the composite Lyapunov function

    V = 1/2 |e1|^2 + sum_i log cosh(zeta2_i) + 1/2 |e3|^2 + 1/2 |e4|^2.

With k2 = 1/k1 the cross terms telescope and the input u = -Psi^-1 (Phi + k4 e4)
renders

    Vdot = -|sqrt(k1) e1 - sqrt(k2) e2|^2 - k3 |e3|^2 - k4 |e4|^2 <= 0

exactly, where Psi = Q N g4 and Phi collects every remaining term of e4dot.
All derivative quantities (e2dot, e2ddot, e3dot, Qdot, Qddot, Ndot) are
closed-form functions of the measured state, never numerical derivatives; the
test suite validates each one against finite differences of the flow.

Psi is singular exactly when the net force F is zero, so F is projected away
from the band (-f_epsilon, f_epsilon) before any N-dependent term is formed.

The log-cosh velocity term is the load-bearing choice: it is quadratic near
the origin but only linearly growing far away, so its gradient (tanh) stays
bounded and the velocity channel can be confined without barrier blowup.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ControllerSingularityError, ReferenceInfeasibleError
from .model import ControlInput, PlantParams, PlantState, eval_g2, eval_g4, eval_N, eval_Ndot, f2_vector
from .xform import SafeSet, TransformedState

__all__ = [
    "DET_FLOOR",
    "ControlGains",
    "ControllerConfig",
    "ErrorStack",
    "project_force",
    "desired_z1",
    "lyapunov_V",
    "lyapunov_Vdot_closed",
    "error_stack",
    "compute_Phi_Psi",
    "control_law",
]

# |det Psi| below this floor raises ControllerSingularityError. The 2x2
# adjugate inverse is exact, so the floor only guards degenerate states that
# the force projection failed to exclude.
DET_FLOOR = 1e-12


@dataclass(frozen=True)
class ControlGains:
    """Backstepping gains. k2 is not free: the telescoping of the Lyapunov
    cross terms requires k2 = 1/k1 exactly, so the constructor derives it and
    rejects any inconsistent explicit value."""

    k1: float = 1.0
    k3: float = 1.0
    k4: float = 1.0
    k2: float = None  # type: ignore[assignment]

    def __post_init__(self):
        for name in ("k1", "k3", "k4"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"ControlGains.{name} must be strictly positive")
        derived = 1.0 / self.k1
        if self.k2 is None:
            object.__setattr__(self, "k2", derived)
        elif self.k2 != derived:
            raise ValueError(
                f"ControlGains.k2 must equal 1/k1 = {derived!r}, got {self.k2!r}")


@dataclass(frozen=True)
class ControllerConfig:
    """Gains, safe set, and the net-force projection threshold."""

    gains: ControlGains
    safe: SafeSet
    f_epsilon: float = 0.1

    def __post_init__(self):
        if not self.f_epsilon > 0.0:
            raise ValueError("ControllerConfig.f_epsilon must be positive")


@dataclass(eq=False)
class ErrorStack:
    """Every controller quantity evaluated at one instant."""

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray
    e2_dot: np.ndarray
    e2_ddot: np.ndarray
    e3_dot: np.ndarray
    Q: np.ndarray
    Q_dot: np.ndarray
    Q_ddot: np.ndarray
    N: np.ndarray
    N_dot: np.ndarray
    V: float
    V_dot: float
    Phi: np.ndarray = None  # type: ignore[assignment]
    Psi: np.ndarray = None  # type: ignore[assignment]


def project_force(force: float, epsilon: float) -> float:
    """Push F out of the singular band (-epsilon, epsilon), keeping its sign.

    The tie at F = 0 resolves to +epsilon: hover requires positive thrust.
    """
    if epsilon <= 0.0:
        raise ValueError("projection threshold epsilon must be positive")
    if abs(force) >= epsilon:
        return float(force)
    if force == 0.0:
        return float(epsilon)
    return float(np.copysign(epsilon, force))


def desired_z1(x_d1, safe: SafeSet) -> np.ndarray:
    """Transform a desired position into z-coordinates; the reference must be
    strictly inside the position bounds."""
    x_d1 = np.asarray(x_d1, dtype=float).reshape(2)
    chi = x_d1 / safe.xbar1
    if np.any(np.abs(chi) >= 1.0):
        raise ReferenceInfeasibleError(
            f"desired position {x_d1.tolist()} not strictly inside bounds "
            f"{safe.xbar1.tolist()}")
    return safe.xbar1 * np.arctanh(chi)


def lyapunov_V(e1, e3, e4, zeta2) -> float:
    """Composite Lyapunov value: quadratic e-terms plus log cosh of zeta2."""
    e1 = np.asarray(e1, float)
    e3 = np.asarray(e3, float)
    e4 = np.asarray(e4, float)
    zeta2 = np.asarray(zeta2, float)
    return float(0.5 * e1 @ e1 + np.sum(np.log(np.cosh(zeta2)))
                 + 0.5 * e3 @ e3 + 0.5 * e4 @ e4)


def lyapunov_Vdot_closed(e1, e2, e3, e4, gains: ControlGains) -> float:
    """Closed-form derivative of V under the control law; nonpositive by
    construction."""
    e1 = np.asarray(e1, float)
    e2 = np.asarray(e2, float)
    e3 = np.asarray(e3, float)
    e4 = np.asarray(e4, float)
    d = np.sqrt(gains.k1) * e1 - np.sqrt(gains.k2) * e2
    return float(-(d @ d) - gains.k3 * (e3 @ e3) - gains.k4 * (e4 @ e4))


def _stack_inputs(state: PlantState, cfg: ControllerConfig, params: PlantParams):
    """Transformed state with projected force, plus every hyperbolic helper."""
    ts = TransformedState.from_plant(state, cfg.safe)
    z3 = np.array([state.x3[0], project_force(state.x3[1], cfg.f_epsilon)])
    z4 = state.x4.copy()
    c1, s1 = np.cosh(ts.zeta1), np.sinh(ts.zeta1)
    c2, s2 = np.cosh(ts.zeta2), np.sinh(ts.zeta2)
    helpers = {
        "c1": c1, "s1": s1, "t1": s1 / c1,
        "c2": c2, "s2": s2, "t2": s2 / c2,
        "sh2_1": 2.0 * s1 * c1, "ch2_1": 2.0 * c1 * c1 - 1.0,
        "sh2_2": 2.0 * s2 * c2, "ch2_2": 2.0 * c2 * c2 - 1.0,
        "w": f2_vector(params) + eval_g2(z3, params),
    }
    return ts, z3, z4, helpers


def error_stack(state: PlantState, z_d1, cfg: ControllerConfig,
                params: PlantParams) -> ErrorStack:
    """Evaluate the full error stack at one state for a fixed setpoint z_d1."""
    g = cfg.gains
    xb1, xb2 = cfg.safe.xbar1, cfg.safe.xbar2
    z_d1 = np.asarray(z_d1, dtype=float).reshape(2)
    ts, z3, z4, h = _stack_inputs(state, cfg, params)
    c1, t1, c2, t2 = h["c1"], h["t1"], h["c2"], h["t2"]
    sh2_1, ch2_1, sh2_2, ch2_2 = h["sh2_1"], h["ch2_1"], h["sh2_2"], h["ch2_2"]
    w = h["w"]

    n_mat = eval_N(z3, params)
    n_dot = eval_Ndot(z3, z4, params)
    n_z4 = n_mat @ z4

    # transformed rates (diagonal algebra, kept as entrywise vectors)
    f1 = c1 ** 2 * xb2 * t2                       # z1dot
    zeta1_dot = f1 / xb1
    zeta2_dot = c2 ** 2 * w / xb2
    zeta1_ddot = (sh2_1 * zeta1_dot * xb2 * t2
                  + c1 ** 2 * xb2 * zeta2_dot / c2 ** 2) / xb1
    zeta2_ddot = (sh2_2 * zeta2_dot * w + c2 ** 2 * n_z4) / xb2
    f1_dot = xb1 * zeta1_ddot                     # z1ddot
    f1_ddot = (2.0 * ch2_1 * zeta1_dot ** 2 * xb2 * t2
               + sh2_1 * zeta1_ddot * xb2 * t2
               + 2.0 * sh2_1 * zeta1_dot * xb2 * zeta2_dot / c2 ** 2
               - 2.0 * c1 ** 2 * xb2 * t2 * zeta2_dot ** 2 / c2 ** 2
               + c1 ** 2 * xb2 * zeta2_ddot / c2 ** 2)

    # error stack; e2_dot is the complete derivative of e2, including the
    # k1 z1dot term from e1dot (Phi subtracts it again below)
    e1 = ts.z1 - z_d1
    e2 = f1 + g.k1 * e1
    q = c2 ** 2 / (c1 ** 2 * xb2 ** 2)
    e3 = q * w + g.k2 * e2
    q_dot = (sh2_2 * zeta2_dot / (c1 ** 2 * xb2 ** 2)
             - c2 ** 2 * sh2_1 * zeta1_dot / (c1 ** 4 * xb2 ** 2))
    q_ddot = ((2.0 * ch2_2 * zeta2_dot ** 2 + sh2_2 * zeta2_ddot
               - 4.0 * sh2_2 * zeta2_dot * t1 * zeta1_dot
               + 4.0 * c2 ** 2 * t1 ** 2 * zeta1_dot ** 2
               - 2.0 * c2 ** 2 * zeta1_dot ** 2 / c1 ** 2
               - 2.0 * c2 ** 2 * t1 * zeta1_ddot) / (c1 ** 2 * xb2 ** 2))
    e2_dot = f1_dot + g.k1 * f1
    e2_ddot = f1_ddot + g.k1 * f1_dot
    e4 = e2 - g.k1 * e1 + q_dot * w + q * n_z4 + g.k2 * e2_dot + g.k3 * e3
    e3_dot = q_dot * w + q * n_z4 + g.k2 * e2_dot

    stack = ErrorStack(
        e1=e1, e2=e2, e3=e3, e4=e4,
        e2_dot=e2_dot, e2_ddot=e2_ddot, e3_dot=e3_dot,
        Q=np.diag(q), Q_dot=np.diag(q_dot), Q_ddot=np.diag(q_ddot),
        N=n_mat, N_dot=n_dot,
        V=lyapunov_V(e1, e3, e4, ts.zeta2),
        V_dot=lyapunov_Vdot_closed(e1, e2, e3, e4, g),
    )
    phi, psi = compute_Phi_Psi(stack, state, cfg, params)
    return replace(stack, Phi=phi, Psi=psi)


def compute_Phi_Psi(stack: ErrorStack, state: PlantState, cfg: ControllerConfig,
                    params: PlantParams):
    """Assemble Phi and Psi from a populated stack so that e4dot = Phi - e3 + Psi u.

    Differentiating e4 term by term gives

        Phi = e3 + e2dot - k1 z1dot + Qddot w + k2 e2ddot + k3 e3dot
              + 2 Qdot N z4 + Q Ndot z4,

    and Psi = Q N g4. Q Ndot z4 carries the leading Q that a naive reading of
    the stacked derivative drops; the finite-difference oracle on e4dot is the
    arbiter and confirms this form.
    """
    g = cfg.gains
    ts, z3, z4, h = _stack_inputs(state, cfg, params)
    w = h["w"]
    z1_dot = h["c1"] ** 2 * cfg.safe.xbar2 * h["t2"]
    n_z4 = stack.N @ z4

    phi = (stack.e3 + stack.e2_dot - g.k1 * z1_dot + stack.Q_ddot @ w
           + g.k2 * stack.e2_ddot + g.k3 * stack.e3_dot
           + 2.0 * (stack.Q_dot @ n_z4) + stack.Q @ (stack.N_dot @ z4))
    psi = stack.Q @ stack.N @ eval_g4(params)
    return phi, psi


def control_law(state: PlantState, x_d1, cfg: ControllerConfig,
                params: PlantParams) -> ControlInput:
    """Static feedback u = -Psi^-1 (Phi + k4 e4) for the setpoint x_d1.

    Deterministic function of its inputs; the 2x2 inverse uses the closed
    adjugate with a determinant floor.
    """
    z_d1 = desired_z1(x_d1, cfg.safe)
    stack = error_stack(state, z_d1, cfg, params)
    rhs = stack.Phi + cfg.gains.k4 * stack.e4
    det = stack.Psi[0, 0] * stack.Psi[1, 1] - stack.Psi[0, 1] * stack.Psi[1, 0]
    if abs(det) < DET_FLOOR:
        raise ControllerSingularityError(
            f"|det Psi| = {abs(det):.3e} below floor {DET_FLOOR:g}")
    u1 = -(stack.Psi[1, 1] * rhs[0] - stack.Psi[0, 1] * rhs[1]) / det
    u2 = -(-stack.Psi[1, 0] * rhs[0] + stack.Psi[0, 0] * rhs[1]) / det
    return ControlInput(np.array([u1, u2]))
