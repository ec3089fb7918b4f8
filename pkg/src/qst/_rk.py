"""Adaptive embedded Runge-Kutta kernel for Schrodinger-type systems.

Dormand-Prince 5(4) with FSAL, per-component error weighting and cubic
Hermite dense output, compiled with numba so that parameter scans stay
cheap.  The right-hand side is specialized to the decomposed Hamiltonian
-i * (diag * psi + g_A(t) * VA @ psi + g_B(t) * VB @ psi) where ``diag``
may carry a negative imaginary part (no-jump decay) and VA/VB are passed
already scaled by 2*pi.
"""

import math

import numpy as np
from numba import njit

# pulse kinds
KIND_CONST = 0
KIND_SECH3 = 1

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2

_MAX_STEPS = 50_000_000


@njit(cache=True, nogil=True, inline="always")
def _env(t, kind, g0, kappa, tau_d, dur):
    if kind == KIND_CONST:
        if t < 0.0 or t > dur:
            return 0.0
        return g0
    tau = 6.0 / kappa
    tc = 2.0 * tau + tau_d
    if t < 0.0 or t > tc:
        return 0.0
    if t < tau:
        return g0 / math.cosh(kappa * (t - tau))
    if t < tau + tau_d:
        return g0
    return g0 / math.cosh(kappa * (t - (tau + tau_d)))


@njit(cache=True, nogil=True)
def _rhs(t, y, diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale):
    ga = _env(t - off_a, kind, g0, kappa, tau_d, dur)
    gb = b_scale * _env(t - off_b, kind, g0, kappa, tau_d, dur)
    out = diag * y
    if ga != 0.0:
        out = out + ga * np.dot(va, y)
    if gb != 0.0:
        out = out + gb * np.dot(vb, y)
    return -1j * out


@njit(cache=True, nogil=True)
def integrate(diag, va, vb, kind, g0, kappa, tau_d, dur,
              off_a, off_b, b_scale, breakpoints,
              psi0, t_end, t_samples, rtol, atol, max_step):
    """Integrate from t=0 to t_end, writing dense output at t_samples.

    Returns (samples[n_samples, d], y_final, status, n_steps).
    """
    d = psi0.shape[0]
    ns = t_samples.shape[0]
    out = np.empty((ns, d), dtype=np.complex128)

    # Dormand-Prince coefficients
    a21 = 1.0 / 5.0
    a31 = 3.0 / 40.0; a32 = 9.0 / 40.0
    a41 = 44.0 / 45.0; a42 = -56.0 / 15.0; a43 = 32.0 / 9.0
    a51 = 19372.0 / 6561.0; a52 = -25360.0 / 2187.0
    a53 = 64448.0 / 6561.0; a54 = -212.0 / 729.0
    a61 = 9017.0 / 3168.0; a62 = -355.0 / 33.0; a63 = 46732.0 / 5247.0
    a64 = 49.0 / 176.0; a65 = -5103.0 / 18656.0
    b1 = 35.0 / 384.0; b3 = 500.0 / 1113.0; b4 = 125.0 / 192.0
    b5 = -2187.0 / 6784.0; b6 = 11.0 / 84.0
    e1 = 71.0 / 57600.0; e3 = -71.0 / 16695.0; e4 = 71.0 / 1920.0
    e5 = -17253.0 / 339200.0; e6 = 22.0 / 525.0; e7 = -1.0 / 40.0

    t = 0.0
    y = psi0.copy()
    f0 = _rhs(t, y, diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale)

    si = 0
    while si < ns and t_samples[si] <= 1e-300:
        out[si, :] = y
        si += 1

    bi = 0
    nb = breakpoints.shape[0]
    while bi < nb and breakpoints[bi] <= 1e-12:
        bi += 1

    h = min(1e-4, t_end) if t_end > 0.0 else 0.0
    n_steps = 0
    status = STATUS_OK

    while t < t_end:
        n_steps += 1
        if n_steps > _MAX_STEPS:
            status = STATUS_MAX_STEPS
            break
        if h > max_step:
            h = max_step
        # do not step across a pulse-segment boundary
        hard_stop = t_end
        if bi < nb and breakpoints[bi] < hard_stop:
            hard_stop = breakpoints[bi]
        if t + h >= hard_stop:
            h = hard_stop - t
        if h < 1e-14 * max(1.0, abs(t)):
            status = STATUS_STEP_UNDERFLOW
            break

        k1 = f0
        k2 = _rhs(t + 0.2 * h, y + h * (a21 * k1),
                  diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale)
        k3 = _rhs(t + 0.3 * h, y + h * (a31 * k1 + a32 * k2),
                  diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale)
        k4 = _rhs(t + 0.8 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3),
                  diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale)
        k5 = _rhs(t + 8.0 / 9.0 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4),
                  diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale)
        k6 = _rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
                  diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale)
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)
        k7 = _rhs(t + h, y_new,
                  diag, va, vb, kind, g0, kappa, tau_d, dur, off_a, off_b, b_scale)

        # weighted RMS error norm
        acc = 0.0
        for i in range(d):
            e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i]
                     + e5 * k5[i] + e6 * k6[i] + e7 * k7[i])
            ay = abs(y[i])
            ayn = abs(y_new[i])
            sc = atol + rtol * (ay if ay > ayn else ayn)
            r = abs(e) / sc
            acc += r * r
        err = math.sqrt(acc / d)

        if err <= 1.0:
            t1 = t + h
            # dense output via cubic Hermite on (y, f0) -> (y_new, k7)
            while si < ns and t_samples[si] <= t1 + 1e-12 * max(1.0, t1):
                th = (t_samples[si] - t) / h
                h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th)
                h10 = th * (1.0 - th) * (1.0 - th)
                h01 = th * th * (3.0 - 2.0 * th)
                h11 = th * th * (th - 1.0)
                out[si, :] = (h00 * y + (h10 * h) * f0
                              + h01 * y_new + (h11 * h) * k7)
                si += 1
            if bi < nb and t1 >= breakpoints[bi] - 1e-12:
                bi += 1
                # re-evaluate across the boundary (derivative may jump)
                f0 = _rhs(t1, y_new, diag, va, vb, kind, g0, kappa, tau_d,
                          dur, off_a, off_b, b_scale)
            else:
                f0 = k7
            t = t1
            y = y_new
            fac = 0.9 * err ** -0.2 if err > 1e-12 else 5.0
            if fac > 5.0:
                fac = 5.0
            h = h * fac
        else:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            h = h * fac

    while si < ns:
        out[si, :] = y
        si += 1
    return out, y, status, n_steps
