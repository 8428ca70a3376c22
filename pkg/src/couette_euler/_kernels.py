"""Compiled per-mode integrators (numba).

All kernels march one complex mode state with classical RK4, an adaptive
step controlled by step doubling (one full step vs. two half steps,
error = |y2 - y1| / 15), and the oscillation cap

    dt <= c_osc * M / sqrt(p(t, k, eta)),

which keeps the acoustic phase advance per step below c_osc radians.
Accepted steps advance with the two-half-step solution (clean 4th order).
Modes are independent, so the batch kernels parallelize over them with no
shared state; results are bitwise reproducible for a fixed input.

Status codes: 0 ok, 1 step underflow (dt < min_dt), 2 step budget exceeded.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_SAFETY = 0.9
_GROW = 4.0
_SHRINK = 0.1


@njit(cache=True, inline="always")
def _full_rhs(t, yr, ya, yo, yt, k, eta, inv_gm2, gm1):
    q = eta - k * t
    p = k * k + q * q
    dtp_over_p = -2.0 * k * q / p
    two_k2_over_p = 2.0 * k * k / p
    da = dtp_over_p * ya - two_k2_over_p * yo + (p * inv_gm2) * (yr + yt)
    return -ya, da, ya, -gm1 * ya


@njit(cache=True, inline="always")
def _full_rk4(t, h, yr, ya, yo, yt, k, eta, inv_gm2, gm1):
    r1, a1, o1, t1 = _full_rhs(t, yr, ya, yo, yt, k, eta, inv_gm2, gm1)
    hh = 0.5 * h
    r2, a2, o2, t2 = _full_rhs(t + hh, yr + hh * r1, ya + hh * a1,
                               yo + hh * o1, yt + hh * t1, k, eta, inv_gm2, gm1)
    r3, a3, o3, t3 = _full_rhs(t + hh, yr + hh * r2, ya + hh * a2,
                               yo + hh * o2, yt + hh * t2, k, eta, inv_gm2, gm1)
    r4, a4, o4, t4 = _full_rhs(t + h, yr + h * r3, ya + h * a3,
                               yo + h * o3, yt + h * t3, k, eta, inv_gm2, gm1)
    c = h / 6.0
    return (yr + c * (r1 + 2.0 * (r2 + r3) + r4),
            ya + c * (a1 + 2.0 * (a2 + a3) + a4),
            yo + c * (o1 + 2.0 * (o2 + o3) + o4),
            yt + c * (t1 + 2.0 * (t2 + t3) + t4))


@njit(cache=True, parallel=True)
def rk4_full_batch(kvec, etavec, y0, gamma, mach, sample_times,
                   base_dt, c_osc, tol, min_dt, max_steps):
    n = etavec.shape[0]
    ns = sample_times.shape[0]
    out = np.empty((ns, 4, n), dtype=np.complex128)
    status = np.zeros(n, dtype=np.int64)
    tfail = np.zeros(n, dtype=np.float64)
    nsteps = np.zeros(n, dtype=np.int64)
    inv_gm2 = 1.0 / (gamma * mach * mach)
    gm1 = gamma - 1.0
    for i in prange(n):
        k = kvec[i]
        eta = etavec[i]
        yr = y0[0, i]
        ya = y0[1, i]
        yo = y0[2, i]
        yt = y0[3, i]
        out[0, 0, i] = yr
        out[0, 1, i] = ya
        out[0, 2, i] = yo
        out[0, 3, i] = yt
        t = sample_times[0]
        steps = 0
        h = base_dt
        ok = True
        for j in range(1, ns):
            tt = sample_times[j]
            while t < tt:
                if steps >= max_steps:
                    status[i] = 2
                    tfail[i] = t
                    ok = False
                    break
                p = k * k + (eta - k * t) ** 2
                hcap = c_osc * mach / np.sqrt(p)
                h_eff = h
                if h_eff > base_dt:
                    h_eff = base_dt
                if h_eff > hcap:
                    h_eff = hcap
                closing = False
                if h_eff >= tt - t:
                    h_eff = tt - t
                    closing = True
                fr, fa, fo, ft = _full_rk4(t, h_eff, yr, ya, yo, yt,
                                           k, eta, inv_gm2, gm1)
                hh = 0.5 * h_eff
                mr, ma, mo, mt = _full_rk4(t, hh, yr, ya, yo, yt,
                                           k, eta, inv_gm2, gm1)
                sr, sa, so, st = _full_rk4(t + hh, hh, mr, ma, mo, mt,
                                           k, eta, inv_gm2, gm1)
                err = abs(sr - fr)
                e2 = abs(sa - fa)
                if e2 > err:
                    err = e2
                e2 = abs(so - fo)
                if e2 > err:
                    err = e2
                e2 = abs(st - ft)
                if e2 > err:
                    err = e2
                err /= 15.0
                ymax = abs(sr)
                v = abs(sa)
                if v > ymax:
                    ymax = v
                v = abs(so)
                if v > ymax:
                    ymax = v
                v = abs(st)
                if v > ymax:
                    ymax = v
                sc = tol * (1.0 + ymax)
                if err <= sc:
                    yr = sr
                    ya = sa
                    yo = so
                    yt = st
                    t = tt if closing else t + h_eff
                    steps += 1
                    if err > 0.0:
                        fac = _SAFETY * (sc / err) ** 0.2
                        if fac > _GROW:
                            fac = _GROW
                        elif fac < 0.2:
                            fac = 0.2
                    else:
                        fac = _GROW
                    h = h_eff * fac
                else:
                    fac = _SAFETY * (sc / err) ** 0.2
                    if fac < _SHRINK:
                        fac = _SHRINK
                    h = h_eff * fac
                    if h < min_dt:
                        status[i] = 1
                        tfail[i] = t
                        ok = False
                        break
            out[j, 0, i] = yr
            out[j, 1, i] = ya
            out[j, 2, i] = yo
            out[j, 3, i] = yt
            if not ok:
                break
        nsteps[i] = steps
    return out, status, tfail, nsteps


@njit(cache=True, inline="always")
def _pair_coeffs(t, k, eta, mach, inv_g, printed, weighted):
    """Coefficients (c11, c12, c21, c22, f2) of the 2x2 system at time t."""
    q = eta - k * t
    p = k * k + q * q
    a = -0.5 * k * q / p
    if weighted:
        b = np.sqrt(p) / mach
        d = b + 2.0 * mach * k * k / (p * np.sqrt(p))
        if printed:
            d += b
        f2 = -2.0 * k * k * inv_g / (p * np.sqrt(np.sqrt(p)) * np.sqrt(p))
        return -a, -b, d, a, f2
    # unweighted pair (delta_hat, A_hat)
    pm2 = p / (mach * mach)
    coef = pm2 + 2.0 * k * k / p
    if printed:
        coef += pm2
    f2 = -2.0 * k * k * inv_g / p
    return 0.0, -1.0, coef, 4.0 * a, f2


@njit(cache=True, inline="always")
def _pair_rk4(t, h, z1, z2, src, k, eta, mach, inv_g, printed, weighted):
    c11, c12, c21, c22, f2 = _pair_coeffs(t, k, eta, mach, inv_g, printed, weighted)
    k11 = c11 * z1 + c12 * z2
    k12 = c21 * z1 + c22 * z2 + f2 * src
    hh = 0.5 * h
    c11, c12, c21, c22, f2 = _pair_coeffs(t + hh, k, eta, mach, inv_g, printed, weighted)
    u1 = z1 + hh * k11
    u2 = z2 + hh * k12
    k21 = c11 * u1 + c12 * u2
    k22 = c21 * u1 + c22 * u2 + f2 * src
    u1 = z1 + hh * k21
    u2 = z2 + hh * k22
    k31 = c11 * u1 + c12 * u2
    k32 = c21 * u1 + c22 * u2 + f2 * src
    c11, c12, c21, c22, f2 = _pair_coeffs(t + h, k, eta, mach, inv_g, printed, weighted)
    u1 = z1 + h * k31
    u2 = z2 + h * k32
    k41 = c11 * u1 + c12 * u2
    k42 = c21 * u1 + c22 * u2 + f2 * src
    c = h / 6.0
    return (z1 + c * (k11 + 2.0 * (k21 + k31) + k41),
            z2 + c * (k12 + 2.0 * (k22 + k32) + k42))


@njit(cache=True, parallel=True)
def rk4_pair_batch(kvec, etavec, z0, src, gamma, mach, printed, weighted,
                   sample_times, base_dt, c_osc, tol, min_dt, max_steps):
    n = etavec.shape[0]
    ns = sample_times.shape[0]
    out = np.empty((ns, 2, n), dtype=np.complex128)
    status = np.zeros(n, dtype=np.int64)
    tfail = np.zeros(n, dtype=np.float64)
    nsteps = np.zeros(n, dtype=np.int64)
    inv_g = 1.0 / gamma
    for i in prange(n):
        k = kvec[i]
        eta = etavec[i]
        z1 = z0[0, i]
        z2 = z0[1, i]
        s = src[i]
        out[0, 0, i] = z1
        out[0, 1, i] = z2
        t = sample_times[0]
        steps = 0
        h = base_dt
        ok = True
        for j in range(1, ns):
            tt = sample_times[j]
            while t < tt:
                if steps >= max_steps:
                    status[i] = 2
                    tfail[i] = t
                    ok = False
                    break
                p = k * k + (eta - k * t) ** 2
                hcap = c_osc * mach / np.sqrt(p)
                h_eff = h
                if h_eff > base_dt:
                    h_eff = base_dt
                if h_eff > hcap:
                    h_eff = hcap
                closing = False
                if h_eff >= tt - t:
                    h_eff = tt - t
                    closing = True
                f1, f2c = _pair_rk4(t, h_eff, z1, z2, s, k, eta, mach,
                                    inv_g, printed, weighted)
                hh = 0.5 * h_eff
                m1, m2 = _pair_rk4(t, hh, z1, z2, s, k, eta, mach,
                                   inv_g, printed, weighted)
                s1, s2 = _pair_rk4(t + hh, hh, m1, m2, s, k, eta, mach,
                                   inv_g, printed, weighted)
                err = abs(s1 - f1)
                e2 = abs(s2 - f2c)
                if e2 > err:
                    err = e2
                err /= 15.0
                ymax = abs(s1)
                v = abs(s2)
                if v > ymax:
                    ymax = v
                sc = tol * (1.0 + ymax)
                if err <= sc:
                    z1 = s1
                    z2 = s2
                    t = tt if closing else t + h_eff
                    steps += 1
                    if err > 0.0:
                        fac = _SAFETY * (sc / err) ** 0.2
                        if fac > _GROW:
                            fac = _GROW
                        elif fac < 0.2:
                            fac = 0.2
                    else:
                        fac = _GROW
                    h = h_eff * fac
                else:
                    fac = _SAFETY * (sc / err) ** 0.2
                    if fac < _SHRINK:
                        fac = _SHRINK
                    h = h_eff * fac
                    if h < min_dt:
                        status[i] = 1
                        tfail[i] = t
                        ok = False
                        break
            out[j, 0, i] = z1
            out[j, 1, i] = z2
            if not ok:
                break
        nsteps[i] = steps
    return out, status, tfail, nsteps


@njit(cache=True, inline="always")
def _mat_rhs(t, m11, m12, m21, m22, k, eta, mach, printed):
    q = eta - k * t
    p = k * k + q * q
    a = -0.5 * k * q / p
    b = np.sqrt(p) / mach
    d = b + 2.0 * mach * k * k / (p * np.sqrt(p))
    if printed:
        d += b
    # columns of Phi evolve by the homogeneous weighted system
    return (-a * m11 - b * m21, -a * m12 - b * m22,
            d * m11 + a * m21, d * m12 + a * m22)


@njit(cache=True, inline="always")
def _mat_rk4(t, h, m11, m12, m21, m22, k, eta, mach, printed):
    a11, a12, a21, a22 = _mat_rhs(t, m11, m12, m21, m22, k, eta, mach, printed)
    hh = 0.5 * h
    b11, b12, b21, b22 = _mat_rhs(t + hh, m11 + hh * a11, m12 + hh * a12,
                                  m21 + hh * a21, m22 + hh * a22,
                                  k, eta, mach, printed)
    c11, c12, c21, c22 = _mat_rhs(t + hh, m11 + hh * b11, m12 + hh * b12,
                                  m21 + hh * b21, m22 + hh * b22,
                                  k, eta, mach, printed)
    d11, d12, d21, d22 = _mat_rhs(t + h, m11 + h * c11, m12 + h * c12,
                                  m21 + h * c21, m22 + h * c22,
                                  k, eta, mach, printed)
    c = h / 6.0
    return (m11 + c * (a11 + 2.0 * (b11 + c11) + d11),
            m12 + c * (a12 + 2.0 * (b12 + c12) + d12),
            m21 + c * (a21 + 2.0 * (b21 + c21) + d21),
            m22 + c * (a22 + 2.0 * (b22 + c22) + d22))


@njit(cache=True)
def propagator_kernel(k, eta, gamma, mach, printed, t_from, t_to, accumulate,
                      base_dt, c_osc, tol, min_dt, max_steps):
    """Propagator of Z' = L Z from t_from to t_to, plus the forcing integral.

    Returns (Phi(t_to, t_from), I, status, tfail, steps) where
    I = int_{t_from}^{t_to} Phi(t_from, s) F(s) ds accumulated by the
    trapezoid rule on the accepted time samples (only when accumulate).
    """
    m11 = 1.0
    m12 = 0.0
    m21 = 0.0
    m22 = 1.0
    i1 = 0.0
    i2 = 0.0
    inv_g = 1.0 / gamma
    t = t_from
    h = base_dt
    steps = 0
    status = 0
    # integrand g(s) = Phi(t_from, s) F(s) = adj(Phi(s, t_from)) F(s) / det
    p = k * k + (eta - k * t) ** 2
    f2 = -2.0 * k * k * inv_g / (p ** 1.75)
    g1_prev = -m12 * f2
    g2_prev = m11 * f2
    while t < t_to:
        if steps >= max_steps:
            status = 2
            break
        p = k * k + (eta - k * t) ** 2
        hcap = c_osc * mach / np.sqrt(p)
        h_eff = h
        if h_eff > base_dt:
            h_eff = base_dt
        if h_eff > hcap:
            h_eff = hcap
        closing = False
        if h_eff >= t_to - t:
            h_eff = t_to - t
            closing = True
        f_11, f_12, f_21, f_22 = _mat_rk4(t, h_eff, m11, m12, m21, m22,
                                          k, eta, mach, printed)
        hh = 0.5 * h_eff
        x11, x12, x21, x22 = _mat_rk4(t, hh, m11, m12, m21, m22,
                                      k, eta, mach, printed)
        s11, s12, s21, s22 = _mat_rk4(t + hh, hh, x11, x12, x21, x22,
                                      k, eta, mach, printed)
        err = abs(s11 - f_11)
        for e in (abs(s12 - f_12), abs(s21 - f_21), abs(s22 - f_22)):
            if e > err:
                err = e
        err /= 15.0
        ymax = abs(s11)
        for v in (abs(s12), abs(s21), abs(s22)):
            if v > ymax:
                ymax = v
        sc = tol * (1.0 + ymax)
        if err <= sc:
            m11 = s11
            m12 = s12
            m21 = s21
            m22 = s22
            t_new = t_to if closing else t + h_eff
            if accumulate:
                det = m11 * m22 - m12 * m21
                p = k * k + (eta - k * t_new) ** 2
                f2 = -2.0 * k * k * inv_g / (p ** 1.75)
                g1 = -m12 * f2 / det
                g2 = m11 * f2 / det
                i1 += 0.5 * h_eff * (g1_prev + g1)
                i2 += 0.5 * h_eff * (g2_prev + g2)
                g1_prev = g1
                g2_prev = g2
            t = t_new
            steps += 1
            if err > 0.0:
                fac = _SAFETY * (sc / err) ** 0.2
                if fac > _GROW:
                    fac = _GROW
                elif fac < 0.2:
                    fac = 0.2
            else:
                fac = _GROW
            h = h_eff * fac
        else:
            fac = _SAFETY * (sc / err) ** 0.2
            if fac < _SHRINK:
                fac = _SHRINK
            h = h_eff * fac
            if h < min_dt:
                status = 1
                break
    return m11, m12, m21, m22, i1, i2, status, t, steps
