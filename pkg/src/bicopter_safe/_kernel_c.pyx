# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the closed-loop hot path.

Statement-for-statement twin of `_kernel_py`; see that module for the
commentary. Compiled without fast-math so both kernels follow IEEE double
semantics and stay interchangeable.
"""
from libc.math cimport atanh, copysign, cos, cosh, fabs, hypot, isfinite
from libc.math cimport log, sin, sinh, sqrt

from .errors import (ControllerSingularityError, IntegrationBlowupError,
                     SafeSetViolationError)

BACKEND = "compiled"


cdef int _controller(double r1, double r2, double v1, double v2, double th,
                     double f_raw, double thd, double fd,
                     double zd1a, double zd1b, double* p,
                     double* out) except -1:
    cdef double m = p[0], J = p[1], g = p[2]
    cdef double k1 = p[3], k3 = p[4], k4 = p[5]
    cdef double xb11 = p[6], xb12 = p[7], xb21 = p[8], xb22 = p[9]
    cdef double chi_clamp = p[10], zeta_clamp = p[11]
    cdef double f_eps = p[12], det_floor = p[13]
    cdef double k2 = 1.0 / k1

    cdef double chi1a = r1 / xb11
    cdef double chi1b = r2 / xb12
    cdef double chi2a = v1 / xb21
    cdef double chi2b = v2 / xb22
    if (fabs(chi1a) >= 1.0 or fabs(chi1b) >= 1.0
            or fabs(chi2a) >= 1.0 or fabs(chi2b) >= 1.0):
        raise SafeSetViolationError(
            "state left the closed safe set: chi = "
            f"({chi1a:.9g}, {chi1b:.9g}, {chi2a:.9g}, {chi2b:.9g})")
    cdef double lim = 1.0 - chi_clamp
    chi1a = min(max(chi1a, -lim), lim)
    chi1b = min(max(chi1b, -lim), lim)
    chi2a = min(max(chi2a, -lim), lim)
    chi2b = min(max(chi2b, -lim), lim)
    cdef double zc = zeta_clamp
    cdef double ze1a = min(max(atanh(chi1a), -zc), zc)
    cdef double ze1b = min(max(atanh(chi1b), -zc), zc)
    cdef double ze2a = min(max(atanh(chi2a), -zc), zc)
    cdef double ze2b = min(max(atanh(chi2b), -zc), zc)
    cdef double z1a = xb11 * ze1a
    cdef double z1b = xb12 * ze1b

    cdef double f
    if fabs(f_raw) >= f_eps:
        f = f_raw
    elif f_raw == 0.0:
        f = f_eps
    else:
        f = copysign(f_eps, f_raw)

    cdef double sth = sin(th)
    cdef double cth = cos(th)
    cdef double c1a = cosh(ze1a)
    cdef double c1b = cosh(ze1b)
    cdef double s1a = sinh(ze1a)
    cdef double s1b = sinh(ze1b)
    cdef double t1a = s1a / c1a
    cdef double t1b = s1b / c1b
    cdef double c2a = cosh(ze2a)
    cdef double c2b = cosh(ze2b)
    cdef double s2a = sinh(ze2a)
    cdef double s2b = sinh(ze2b)
    cdef double t2a = s2a / c2a
    cdef double t2b = s2b / c2b
    cdef double sh2_1a = 2.0 * s1a * c1a
    cdef double sh2_1b = 2.0 * s1b * c1b
    cdef double ch2_1a = 2.0 * c1a * c1a - 1.0
    cdef double ch2_1b = 2.0 * c1b * c1b - 1.0
    cdef double sh2_2a = 2.0 * s2a * c2a
    cdef double sh2_2b = 2.0 * s2b * c2b
    cdef double ch2_2a = 2.0 * c2a * c2a - 1.0
    cdef double ch2_2b = 2.0 * c2b * c2b - 1.0

    cdef double wa = -sth * f / m
    cdef double wb = cth * f / m - g
    cdef double n11 = -cth * f / m
    cdef double n12 = -sth / m
    cdef double n21 = -sth * f / m
    cdef double n22 = cth / m
    cdef double nd11 = (sth * thd * f - cth * fd) / m
    cdef double nd12 = -cth * thd / m
    cdef double nd21 = (-cth * thd * f - sth * fd) / m
    cdef double nd22 = -sth * thd / m
    cdef double nz4a = n11 * thd + n12 * fd
    cdef double nz4b = n21 * thd + n22 * fd
    cdef double ndz4a = nd11 * thd + nd12 * fd
    cdef double ndz4b = nd21 * thd + nd22 * fd

    cdef double c1a2 = c1a * c1a
    cdef double c1b2 = c1b * c1b
    cdef double c2a2 = c2a * c2a
    cdef double c2b2 = c2b * c2b

    cdef double f1a = c1a2 * xb21 * t2a
    cdef double f1b = c1b2 * xb22 * t2b
    cdef double zd1_a = f1a / xb11
    cdef double zd1_b = f1b / xb12
    cdef double zd2_a = c2a2 * wa / xb21
    cdef double zd2_b = c2b2 * wb / xb22
    cdef double zdd1_a = (sh2_1a * zd1_a * xb21 * t2a
                          + c1a2 * xb21 * zd2_a / c2a2) / xb11
    cdef double zdd1_b = (sh2_1b * zd1_b * xb22 * t2b
                          + c1b2 * xb22 * zd2_b / c2b2) / xb12
    cdef double zdd2_a = (sh2_2a * zd2_a * wa + c2a2 * nz4a) / xb21
    cdef double zdd2_b = (sh2_2b * zd2_b * wb + c2b2 * nz4b) / xb22
    cdef double f1d_a = xb11 * zdd1_a
    cdef double f1d_b = xb12 * zdd1_b
    cdef double f1dd_a = (2.0 * ch2_1a * zd1_a * zd1_a * xb21 * t2a
                          + sh2_1a * zdd1_a * xb21 * t2a
                          + 2.0 * sh2_1a * zd1_a * xb21 * zd2_a / c2a2
                          - 2.0 * c1a2 * xb21 * t2a * zd2_a * zd2_a / c2a2
                          + c1a2 * xb21 * zdd2_a / c2a2)
    cdef double f1dd_b = (2.0 * ch2_1b * zd1_b * zd1_b * xb22 * t2b
                          + sh2_1b * zdd1_b * xb22 * t2b
                          + 2.0 * sh2_1b * zd1_b * xb22 * zd2_b / c2b2
                          - 2.0 * c1b2 * xb22 * t2b * zd2_b * zd2_b / c2b2
                          + c1b2 * xb22 * zdd2_b / c2b2)

    cdef double e1a = z1a - zd1a
    cdef double e1b = z1b - zd1b
    cdef double e2a = f1a + k1 * e1a
    cdef double e2b = f1b + k1 * e1b
    cdef double qa = c2a2 / (c1a2 * (xb21 * xb21))
    cdef double qb = c2b2 / (c1b2 * (xb22 * xb22))
    cdef double e3a = qa * wa + k2 * e2a
    cdef double e3b = qb * wb + k2 * e2b
    cdef double qd_a = (sh2_2a * zd2_a / (c1a2 * (xb21 * xb21))
                        - c2a2 * sh2_1a * zd1_a / (c1a2 * c1a2 * (xb21 * xb21)))
    cdef double qd_b = (sh2_2b * zd2_b / (c1b2 * (xb22 * xb22))
                        - c2b2 * sh2_1b * zd1_b / (c1b2 * c1b2 * (xb22 * xb22)))
    cdef double qdd_a = ((2.0 * ch2_2a * zd2_a * zd2_a + sh2_2a * zdd2_a
                          - 4.0 * sh2_2a * zd2_a * t1a * zd1_a
                          + 4.0 * c2a2 * t1a * t1a * zd1_a * zd1_a
                          - 2.0 * c2a2 * zd1_a * zd1_a / c1a2
                          - 2.0 * c2a2 * t1a * zdd1_a) / (c1a2 * (xb21 * xb21)))
    cdef double qdd_b = ((2.0 * ch2_2b * zd2_b * zd2_b + sh2_2b * zdd2_b
                          - 4.0 * sh2_2b * zd2_b * t1b * zd1_b
                          + 4.0 * c2b2 * t1b * t1b * zd1_b * zd1_b
                          - 2.0 * c2b2 * zd1_b * zd1_b / c1b2
                          - 2.0 * c2b2 * t1b * zdd1_b) / (c1b2 * (xb22 * xb22)))
    cdef double e2d_a = f1d_a + k1 * f1a
    cdef double e2d_b = f1d_b + k1 * f1b
    cdef double e2dd_a = f1dd_a + k1 * f1d_a
    cdef double e2dd_b = f1dd_b + k1 * f1d_b
    cdef double e4a = (e2a - k1 * e1a + qd_a * wa + qa * nz4a
                       + k2 * e2d_a + k3 * e3a)
    cdef double e4b = (e2b - k1 * e1b + qd_b * wb + qb * nz4b
                       + k2 * e2d_b + k3 * e3b)
    cdef double e3d_a = qd_a * wa + qa * nz4a + k2 * e2d_a
    cdef double e3d_b = qd_b * wb + qb * nz4b + k2 * e2d_b

    cdef double p11 = qa * n12
    cdef double p12 = qa * n11 / J
    cdef double p21 = qb * n22
    cdef double p22 = qb * n21 / J
    cdef double det = p11 * p22 - p12 * p21
    cdef double phi_a = (e3a + e2d_a - k1 * f1a + qdd_a * wa + k2 * e2dd_a
                         + k3 * e3d_a + 2.0 * qd_a * nz4a + qa * ndz4a)
    cdef double phi_b = (e3b + e2d_b - k1 * f1b + qdd_b * wb + k2 * e2dd_b
                         + k3 * e3d_b + 2.0 * qd_b * nz4b + qb * ndz4b)
    cdef double rhs_a = phi_a + k4 * e4a
    cdef double rhs_b = phi_b + k4 * e4b
    if fabs(det) < det_floor:
        raise ControllerSingularityError(
            f"|det Psi| = {fabs(det):.3e} below floor {det_floor:g}")
    cdef double u1 = -(p22 * rhs_a - p12 * rhs_b) / det
    cdef double u2 = -(-p21 * rhs_a + p11 * rhs_b) / det

    cdef double v_val = (0.5 * (e1a * e1a + e1b * e1b)
                         + log(c2a) + log(c2b)
                         + 0.5 * (e3a * e3a + e3b * e3b)
                         + 0.5 * (e4a * e4a + e4b * e4b))
    cdef double rk1 = sqrt(k1)
    cdef double rk2 = sqrt(k2)
    cdef double da = rk1 * e1a - rk2 * e2a
    cdef double db = rk1 * e1b - rk2 * e2b
    cdef double vdot = (-(da * da + db * db) - k3 * (e3a * e3a + e3b * e3b)
                        - k4 * (e4a * e4a + e4b * e4b))

    out[0] = u1
    out[1] = u2
    out[2] = v_val
    out[3] = vdot
    out[4] = hypot(e1a, e1b)
    out[5] = hypot(e2a, e2b)
    out[6] = hypot(e3a, e3b)
    out[7] = hypot(e4a, e4b)
    out[8] = det
    return 0


cdef void _params(object p, double* buf):
    cdef int i
    for i in range(14):
        buf[i] = p[i]


def eval_controller(x, zd1, p):
    """Controller output and diagnostics at a single state.

    Returns (u1, u2, V, Vdot, |e1|, |e2|, |e3|, |e4|, det Psi).
    """
    cdef double pbuf[14]
    cdef double out[9]
    _params(p, pbuf)
    _controller(x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7],
                zd1[0], zd1[1], pbuf, out)
    return (out[0], out[1], out[2], out[3], out[4], out[5], out[6],
            out[7], out[8])


def run_loop(double[::1] x0, double[:, ::1] zd, double dt, p,
             double[:, ::1] out_x, double[:, ::1] out_u,
             double[:, ::1] out_diag):
    """Closed-loop fixed-step run; see `_kernel_py.run_loop`."""
    cdef double pbuf[14]
    cdef double out[9]
    _params(p, pbuf)
    cdef double m = pbuf[0], J = pbuf[1], g = pbuf[2]
    cdef Py_ssize_t n = out_x.shape[0]
    cdef Py_ssize_t k
    cdef double r1 = x0[0], r2 = x0[1], v1 = x0[2], v2 = x0[3]
    cdef double th = x0[4], f = x0[5], thd = x0[6], fd = x0[7]
    cdef double u1, u2, sixth
    cdef double a1_1, a1_2, a1_3, a1_4, a1_5, a1_6, a1_7, a1_8
    cdef double a2_1, a2_2, a2_3, a2_4, a2_5, a2_6, a2_7, a2_8
    cdef double a3_1, a3_2, a3_3, a3_4, a3_5, a3_6, a3_7, a3_8
    cdef double a4_1, a4_2, a4_3, a4_4, a4_5, a4_6, a4_7, a4_8
    cdef double th_2, f_2, th_3, f_3, th_4, f_4

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
            _controller(r1, r2, v1, v2, th, f, thd, fd,
                        zd[k, 0], zd[k, 1], pbuf, out)
        except (SafeSetViolationError, ControllerSingularityError) as exc:
            exc.step = k
            exc.rows = k
            raise
        u1 = out[0]
        u2 = out[1]
        out_u[k, 0] = u1
        out_u[k, 1] = u2
        out_diag[k, 0] = out[2]
        out_diag[k, 1] = out[3]
        out_diag[k, 2] = out[4]
        out_diag[k, 3] = out[5]
        out_diag[k, 4] = out[6]
        out_diag[k, 5] = out[7]
        out_diag[k, 6] = out[8]
        if k == n - 1:
            break

        a1_1 = v1
        a1_2 = v2
        a1_3 = -sin(th) * f / m
        a1_4 = cos(th) * f / m - g
        a1_5 = thd
        a1_6 = fd
        a1_7 = u2 / J
        a1_8 = u1

        th_2 = th + 0.5 * dt * a1_5
        f_2 = f + 0.5 * dt * a1_6
        a2_1 = v1 + 0.5 * dt * a1_3
        a2_2 = v2 + 0.5 * dt * a1_4
        a2_3 = -sin(th_2) * f_2 / m
        a2_4 = cos(th_2) * f_2 / m - g
        a2_5 = thd + 0.5 * dt * a1_7
        a2_6 = fd + 0.5 * dt * a1_8
        a2_7 = u2 / J
        a2_8 = u1

        th_3 = th + 0.5 * dt * a2_5
        f_3 = f + 0.5 * dt * a2_6
        a3_1 = v1 + 0.5 * dt * a2_3
        a3_2 = v2 + 0.5 * dt * a2_4
        a3_3 = -sin(th_3) * f_3 / m
        a3_4 = cos(th_3) * f_3 / m - g
        a3_5 = thd + 0.5 * dt * a2_7
        a3_6 = fd + 0.5 * dt * a2_8
        a3_7 = u2 / J
        a3_8 = u1

        th_4 = th + dt * a3_5
        f_4 = f + dt * a3_6
        a4_1 = v1 + dt * a3_3
        a4_2 = v2 + dt * a3_4
        a4_3 = -sin(th_4) * f_4 / m
        a4_4 = cos(th_4) * f_4 / m - g
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
        if not (isfinite(r1) and isfinite(r2) and isfinite(v1)
                and isfinite(v2) and isfinite(th) and isfinite(f)
                and isfinite(thd) and isfinite(fd)):
            exc2 = IntegrationBlowupError(
                f"non-finite state after step {k}", step=k)
            exc2.rows = k + 1
            raise exc2
