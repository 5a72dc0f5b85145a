"""Pure-Python scalar kernel for the closed-loop hot path.

This module is the fallback twin of the compiled extension `_kernel_c`; the
two implement identical statement sequences so their outputs agree to the
last few ulps. Everything here is plain floats on purpose: per-step numpy
dispatch on length-2 arrays would dominate the runtime of a 50k-step run.

The readable numpy formulation of the same mathematics lives in `ctrl` and
`xform`; the test suite pins this kernel against it at random states.
"""
import math

from .errors import (ControllerSingularityError, IntegrationBlowupError,
                     SafeSetViolationError)

BACKEND = "python"

# params tuple layout shared by both kernels
# (m, J, g, k1, k3, k4, xb11, xb12, xb21, xb22, chi_clamp, zeta_clamp,
#  f_eps, det_floor)


def _controller(r1, r2, v1, v2, th, f_raw, thd, fd, zd1a, zd1b, p):
    (m, J, g, k1, k3, k4, xb11, xb12, xb21, xb22,
     chi_clamp, zeta_clamp, f_eps, det_floor) = p
    k2 = 1.0 / k1

    chi1a = r1 / xb11
    chi1b = r2 / xb12
    chi2a = v1 / xb21
    chi2b = v2 / xb22
    if (abs(chi1a) >= 1.0 or abs(chi1b) >= 1.0
            or abs(chi2a) >= 1.0 or abs(chi2b) >= 1.0):
        raise SafeSetViolationError(
            "state left the closed safe set: chi = "
            f"({chi1a:.9g}, {chi1b:.9g}, {chi2a:.9g}, {chi2b:.9g})")
    lim = 1.0 - chi_clamp
    chi1a = min(max(chi1a, -lim), lim)
    chi1b = min(max(chi1b, -lim), lim)
    chi2a = min(max(chi2a, -lim), lim)
    chi2b = min(max(chi2b, -lim), lim)
    zc = zeta_clamp
    ze1a = min(max(math.atanh(chi1a), -zc), zc)
    ze1b = min(max(math.atanh(chi1b), -zc), zc)
    ze2a = min(max(math.atanh(chi2a), -zc), zc)
    ze2b = min(max(math.atanh(chi2b), -zc), zc)
    z1a = xb11 * ze1a
    z1b = xb12 * ze1b

    # force projection ahead of every N-dependent term
    if abs(f_raw) >= f_eps:
        f = f_raw
    elif f_raw == 0.0:
        f = f_eps
    else:
        f = math.copysign(f_eps, f_raw)

    sth = math.sin(th)
    cth = math.cos(th)
    c1a = math.cosh(ze1a)
    c1b = math.cosh(ze1b)
    s1a = math.sinh(ze1a)
    s1b = math.sinh(ze1b)
    t1a = s1a / c1a
    t1b = s1b / c1b
    c2a = math.cosh(ze2a)
    c2b = math.cosh(ze2b)
    s2a = math.sinh(ze2a)
    s2b = math.sinh(ze2b)
    t2a = s2a / c2a
    t2b = s2b / c2b
    sh2_1a = 2.0 * s1a * c1a
    sh2_1b = 2.0 * s1b * c1b
    ch2_1a = 2.0 * c1a * c1a - 1.0
    ch2_1b = 2.0 * c1b * c1b - 1.0
    sh2_2a = 2.0 * s2a * c2a
    sh2_2b = 2.0 * s2b * c2b
    ch2_2a = 2.0 * c2a * c2a - 1.0
    ch2_2b = 2.0 * c2b * c2b - 1.0

    wa = -sth * f / m
    wb = cth * f / m - g
    n11 = -cth * f / m
    n12 = -sth / m
    n21 = -sth * f / m
    n22 = cth / m
    nd11 = (sth * thd * f - cth * fd) / m
    nd12 = -cth * thd / m
    nd21 = (-cth * thd * f - sth * fd) / m
    nd22 = -sth * thd / m
    nz4a = n11 * thd + n12 * fd
    nz4b = n21 * thd + n22 * fd
    ndz4a = nd11 * thd + nd12 * fd
    ndz4b = nd21 * thd + nd22 * fd

    c1a2 = c1a * c1a
    c1b2 = c1b * c1b
    c2a2 = c2a * c2a
    c2b2 = c2b * c2b

    f1a = c1a2 * xb21 * t2a
    f1b = c1b2 * xb22 * t2b
    zd1_a = f1a / xb11
    zd1_b = f1b / xb12
    zd2_a = c2a2 * wa / xb21
    zd2_b = c2b2 * wb / xb22
    zdd1_a = (sh2_1a * zd1_a * xb21 * t2a + c1a2 * xb21 * zd2_a / c2a2) / xb11
    zdd1_b = (sh2_1b * zd1_b * xb22 * t2b + c1b2 * xb22 * zd2_b / c2b2) / xb12
    zdd2_a = (sh2_2a * zd2_a * wa + c2a2 * nz4a) / xb21
    zdd2_b = (sh2_2b * zd2_b * wb + c2b2 * nz4b) / xb22
    f1d_a = xb11 * zdd1_a
    f1d_b = xb12 * zdd1_b
    f1dd_a = (2.0 * ch2_1a * zd1_a * zd1_a * xb21 * t2a
              + sh2_1a * zdd1_a * xb21 * t2a
              + 2.0 * sh2_1a * zd1_a * xb21 * zd2_a / c2a2
              - 2.0 * c1a2 * xb21 * t2a * zd2_a * zd2_a / c2a2
              + c1a2 * xb21 * zdd2_a / c2a2)
    f1dd_b = (2.0 * ch2_1b * zd1_b * zd1_b * xb22 * t2b
              + sh2_1b * zdd1_b * xb22 * t2b
              + 2.0 * sh2_1b * zd1_b * xb22 * zd2_b / c2b2
              - 2.0 * c1b2 * xb22 * t2b * zd2_b * zd2_b / c2b2
              + c1b2 * xb22 * zdd2_b / c2b2)

    e1a = z1a - zd1a
    e1b = z1b - zd1b
    e2a = f1a + k1 * e1a
    e2b = f1b + k1 * e1b
    qa = c2a2 / (c1a2 * (xb21 * xb21))
    qb = c2b2 / (c1b2 * (xb22 * xb22))
    e3a = qa * wa + k2 * e2a
    e3b = qb * wb + k2 * e2b
    qd_a = (sh2_2a * zd2_a / (c1a2 * (xb21 * xb21))
            - c2a2 * sh2_1a * zd1_a / (c1a2 * c1a2 * (xb21 * xb21)))
    qd_b = (sh2_2b * zd2_b / (c1b2 * (xb22 * xb22))
            - c2b2 * sh2_1b * zd1_b / (c1b2 * c1b2 * (xb22 * xb22)))
    qdd_a = ((2.0 * ch2_2a * zd2_a * zd2_a + sh2_2a * zdd2_a
              - 4.0 * sh2_2a * zd2_a * t1a * zd1_a
              + 4.0 * c2a2 * t1a * t1a * zd1_a * zd1_a
              - 2.0 * c2a2 * zd1_a * zd1_a / c1a2
              - 2.0 * c2a2 * t1a * zdd1_a) / (c1a2 * (xb21 * xb21)))
    qdd_b = ((2.0 * ch2_2b * zd2_b * zd2_b + sh2_2b * zdd2_b
              - 4.0 * sh2_2b * zd2_b * t1b * zd1_b
              + 4.0 * c2b2 * t1b * t1b * zd1_b * zd1_b
              - 2.0 * c2b2 * zd1_b * zd1_b / c1b2
              - 2.0 * c2b2 * t1b * zdd1_b) / (c1b2 * (xb22 * xb22)))
    e2d_a = f1d_a + k1 * f1a
    e2d_b = f1d_b + k1 * f1b
    e2dd_a = f1dd_a + k1 * f1d_a
    e2dd_b = f1dd_b + k1 * f1d_b
    e4a = e2a - k1 * e1a + qd_a * wa + qa * nz4a + k2 * e2d_a + k3 * e3a
    e4b = e2b - k1 * e1b + qd_b * wb + qb * nz4b + k2 * e2d_b + k3 * e3b
    e3d_a = qd_a * wa + qa * nz4a + k2 * e2d_a
    e3d_b = qd_b * wb + qb * nz4b + k2 * e2d_b

    # Psi = Q N g4 with g4 = [[0, 1/J], [1, 0]]
    p11 = qa * n12
    p12 = qa * n11 / J
    p21 = qb * n22
    p22 = qb * n21 / J
    det = p11 * p22 - p12 * p21
    phi_a = (e3a + e2d_a - k1 * f1a + qdd_a * wa + k2 * e2dd_a + k3 * e3d_a
             + 2.0 * qd_a * nz4a + qa * ndz4a)
    phi_b = (e3b + e2d_b - k1 * f1b + qdd_b * wb + k2 * e2dd_b + k3 * e3d_b
             + 2.0 * qd_b * nz4b + qb * ndz4b)
    rhs_a = phi_a + k4 * e4a
    rhs_b = phi_b + k4 * e4b
    if abs(det) < det_floor:
        raise ControllerSingularityError(
            f"|det Psi| = {abs(det):.3e} below floor {det_floor:g}")
    u1 = -(p22 * rhs_a - p12 * rhs_b) / det
    u2 = -(-p21 * rhs_a + p11 * rhs_b) / det

    v_val = (0.5 * (e1a * e1a + e1b * e1b)
             + math.log(c2a) + math.log(c2b)
             + 0.5 * (e3a * e3a + e3b * e3b)
             + 0.5 * (e4a * e4a + e4b * e4b))
    rk1 = math.sqrt(k1)
    rk2 = math.sqrt(k2)
    da = rk1 * e1a - rk2 * e2a
    db = rk1 * e1b - rk2 * e2b
    vdot = (-(da * da + db * db) - k3 * (e3a * e3a + e3b * e3b)
            - k4 * (e4a * e4a + e4b * e4b))

    return (u1, u2, v_val, vdot,
            math.hypot(e1a, e1b), math.hypot(e2a, e2b),
            math.hypot(e3a, e3b), math.hypot(e4a, e4b), det)


def eval_controller(x, zd1, p):
    """Controller output and diagnostics at a single state.

    Returns (u1, u2, V, Vdot, |e1|, |e2|, |e3|, |e4|, det Psi).
    """
    return _controller(x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7],
                       zd1[0], zd1[1], p)


def run_loop(x0, zd, dt, p, out_x, out_u, out_diag):
    """Closed-loop fixed-step run: controller + RK4 with zero-order hold.

    Fills row k of the output arrays with the state at t = k dt and the
    control/diagnostics evaluated there, then steps. On failure the raised
    error carries `.rows`, the number of rows already complete.
    """
    m, J, g = p[0], p[1], p[2]
    n = out_x.shape[0]
    r1, r2, v1, v2, th, f, thd, fd = (x0[0], x0[1], x0[2], x0[3],
                                      x0[4], x0[5], x0[6], x0[7])
    for k in range(n):
        out_x[k, 0] = r1
        out_x[k, 1] = r2
        out_x[k, 2] = v1
        out_x[k, 3] = v2
        out_x[k, 4] = th
        out_x[k, 5] = f
        out_x[k, 6] = thd
        out_x[k, 7] = fd
        try:
            (u1, u2, v_val, vdot, e1n, e2n, e3n, e4n, det) = _controller(
                r1, r2, v1, v2, th, f, thd, fd, zd[k, 0], zd[k, 1], p)
        except (SafeSetViolationError, ControllerSingularityError) as exc:
            exc.step = k
            exc.rows = k
            raise
        out_u[k, 0] = u1
        out_u[k, 1] = u2
        out_diag[k, 0] = v_val
        out_diag[k, 1] = vdot
        out_diag[k, 2] = e1n
        out_diag[k, 3] = e2n
        out_diag[k, 4] = e3n
        out_diag[k, 5] = e4n
        out_diag[k, 6] = det
        if k == n - 1:
            break

        # classical RK4 on the 8-state plant, u held across the step
        a1_1 = v1
        a1_2 = v2
        a1_3 = -math.sin(th) * f / m
        a1_4 = math.cos(th) * f / m - g
        a1_5 = thd
        a1_6 = fd
        a1_7 = u2 / J
        a1_8 = u1

        th_2 = th + 0.5 * dt * a1_5
        f_2 = f + 0.5 * dt * a1_6
        a2_1 = v1 + 0.5 * dt * a1_3
        a2_2 = v2 + 0.5 * dt * a1_4
        a2_3 = -math.sin(th_2) * f_2 / m
        a2_4 = math.cos(th_2) * f_2 / m - g
        a2_5 = thd + 0.5 * dt * a1_7
        a2_6 = fd + 0.5 * dt * a1_8
        a2_7 = u2 / J
        a2_8 = u1

        th_3 = th + 0.5 * dt * a2_5
        f_3 = f + 0.5 * dt * a2_6
        a3_1 = v1 + 0.5 * dt * a2_3
        a3_2 = v2 + 0.5 * dt * a2_4
        a3_3 = -math.sin(th_3) * f_3 / m
        a3_4 = math.cos(th_3) * f_3 / m - g
        a3_5 = thd + 0.5 * dt * a2_7
        a3_6 = fd + 0.5 * dt * a2_8
        a3_7 = u2 / J
        a3_8 = u1

        th_4 = th + dt * a3_5
        f_4 = f + dt * a3_6
        a4_1 = v1 + dt * a3_3
        a4_2 = v2 + dt * a3_4
        a4_3 = -math.sin(th_4) * f_4 / m
        a4_4 = math.cos(th_4) * f_4 / m - g
        a4_5 = thd + dt * a3_7
        a4_6 = fd + dt * a3_8
        a4_7 = u2 / J
        a4_8 = u1

        sixth = dt / 6.0
        r1 = r1 + sixth * (a1_1 + 2.0 * a2_1 + 2.0 * a3_1 + a4_1)
        r2 = r2 + sixth * (a1_2 + 2.0 * a2_2 + 2.0 * a3_2 + a4_2)
        v1 = v1 + sixth * (a1_3 + 2.0 * a2_3 + 2.0 * a3_3 + a4_3)
        v2 = v2 + sixth * (a1_4 + 2.0 * a2_4 + 2.0 * a3_4 + a4_4)
        th = th + sixth * (a1_5 + 2.0 * a2_5 + 2.0 * a3_5 + a4_5)
        f = f + sixth * (a1_6 + 2.0 * a2_6 + 2.0 * a3_6 + a4_6)
        thd = thd + sixth * (a1_7 + 2.0 * a2_7 + 2.0 * a3_7 + a4_7)
        fd = fd + sixth * (a1_8 + 2.0 * a2_8 + 2.0 * a3_8 + a4_8)
        if not (math.isfinite(r1) and math.isfinite(r2) and math.isfinite(v1)
                and math.isfinite(v2) and math.isfinite(th) and math.isfinite(f)
                and math.isfinite(thd) and math.isfinite(fd)):
            exc = IntegrationBlowupError(
                f"non-finite state after step {k}", step=k)
            exc.rows = k + 1
            raise exc
