"""Compiled RK4 kernels for Psi''' = c sin(Psi).

All kernels march the first-order system (Psi, Psi', Psi'') on a uniform
grid of ``n`` steps over [0, 1] and stop at the first sample where
|Psi| >= pi/2.
"""

import math

import numpy as np
from numba import njit

HALF_PI = 0.5 * math.pi


@njit(cache=True)
def _rk4_step(y0, y1, y2, c, h):
    a0 = y1
    a1 = y2
    a2 = c * math.sin(y0)
    b0 = y1 + 0.5 * h * a1
    b1 = y2 + 0.5 * h * a2
    b2 = c * math.sin(y0 + 0.5 * h * a0)
    c0 = y1 + 0.5 * h * b1
    c1 = y2 + 0.5 * h * b2
    c2 = c * math.sin(y0 + 0.5 * h * b0)
    d0 = y1 + h * c1
    d1 = y2 + h * c2
    d2 = c * math.sin(y0 + h * c0)
    w = h / 6.0
    return (
        y0 + w * (a0 + 2.0 * b0 + 2.0 * c0 + d0),
        y1 + w * (a1 + 2.0 * b1 + 2.0 * c1 + d1),
        y2 + w * (a2 + 2.0 * b2 + 2.0 * c2 + d2),
    )


@njit(cache=True)
def march(psi, alpha, c, n):
    """Return (states, flag); flag is 0, +1 or -1 for no exit / exit side.

    ``states`` has one row per sample; on exit the last row is the first
    sample at or beyond the band edge.  A non-finite state ends the march
    with flag 2.
    """
    h = 1.0 / n
    out = np.empty((n + 1, 3))
    out[0, 0] = psi
    out[0, 1] = alpha
    out[0, 2] = 0.0
    y0, y1, y2 = psi, alpha, 0.0
    for k in range(n):
        y0, y1, y2 = _rk4_step(y0, y1, y2, c, h)
        out[k + 1, 0] = y0
        out[k + 1, 1] = y1
        out[k + 1, 2] = y2
        if not (math.isfinite(y0) and math.isfinite(y1) and math.isfinite(y2)):
            return out[: k + 2], 2
        if y0 >= HALF_PI:
            return out[: k + 2], 1
        if y0 <= -HALF_PI:
            return out[: k + 2], -1
    return out, 0


@njit(cache=True)
def endpoint(psi, alpha, c, n):
    """Like ``march`` but keeps only the last state: (flag, k, y0, y1, y2)."""
    h = 1.0 / n
    y0, y1, y2 = psi, alpha, 0.0
    for k in range(n):
        y0, y1, y2 = _rk4_step(y0, y1, y2, c, h)
        if not (math.isfinite(y0) and math.isfinite(y1) and math.isfinite(y2)):
            return 2, k + 1, y0, y1, y2
        if y0 >= HALF_PI:
            return 1, k + 1, y0, y1, y2
        if y0 <= -HALF_PI:
            return -1, k + 1, y0, y1, y2
    return 0, n, y0, y1, y2


@njit(cache=True)
def endpoints(psi, alphas, c, n):
    m = alphas.shape[0]
    flags = np.empty(m, np.int64)
    ends = np.empty((m, 3))
    for i in range(m):
        f, k, y0, y1, y2 = endpoint(psi, alphas[i], c, n)
        flags[i] = f
        ends[i, 0] = y0
        ends[i, 1] = y1
        ends[i, 2] = y2
    return flags, ends


@njit(cache=True)
def escape_sign(psi, alpha, c, n):
    """Monotone sign functional in alpha whose sign change is alpha-hat.

    Exit through -pi/2 counts as negative and exit through +pi/2 as
    positive; inside the band the sign of Psi''(1) decides.  Returns
    (sign, in_band, Psi''(1)).
    """
    f, k, y0, y1, y2 = endpoint(psi, alpha, c, n)
    if f == 2:
        return 0, False, np.nan
    if f != 0:
        return f, False, np.nan
    if y2 > 0.0:
        return 1, True, y2
    if y2 < 0.0:
        return -1, True, y2
    return 0, True, 0.0


@njit(cache=True)
def bisect_alpha_hat(psi, c, lo, hi, n, alpha_tol, res_tol):
    """Bisect ``escape_sign`` on [lo, hi].

    Stops once the bracket is narrower than ``alpha_tol`` and an in-band
    probe met ``res_tol``, or when the bracket reaches adjacent floats.
    Returns (lo, hi, best_alpha, best_residual, status) where status is 0
    on success, 1 when no in-band probe was seen, 2 on a blowup.
    """
    best = 0.5 * (lo + hi)
    best_res = np.inf
    seen = False
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        s, inband, y2 = escape_sign(psi, mid, c, n)
        if inband:
            seen = True
            if abs(y2) < best_res:
                best_res = abs(y2)
                best = mid
        if s > 0:
            hi = mid
        elif s < 0:
            lo = mid
        elif inband:
            return mid, mid, mid, 0.0, 0
        else:
            return lo, hi, mid, np.inf, 2
        if hi - lo <= alpha_tol and best_res <= res_tol:
            break
    if not seen:
        return lo, hi, 0.5 * (lo + hi), np.inf, 1
    return lo, hi, best, best_res, 0


@njit(cache=True)
def bisect_band_edge(psi, c, a_in, a_out, n, tol):
    """Bisect the predicate "stays in the band" between an admissible
    ``a_in`` and an exiting ``a_out``; returns the final (a_in, a_out)."""
    while abs(a_out - a_in) > tol:
        mid = 0.5 * (a_in + a_out)
        if mid == a_in or mid == a_out:
            break
        f, k, y0, y1, y2 = endpoint(psi, mid, c, n)
        if f == 0:
            a_in = mid
        else:
            a_out = mid
    return a_in, a_out


@njit(cache=True)
def theta_end_many(psi, cs, n_min, per_cube_root, alpha_tol, res_tol):
    """Psi-hat(1; c) for each c; NaN where no in-band trajectory exists."""
    m = cs.shape[0]
    out = np.empty(m)
    alphas = np.empty(m)
    for i in range(m):
        c = cs[i]
        n = max(n_min, int(math.ceil(per_cube_root * c ** (1.0 / 3.0))))
        n += n % 2
        lo = -HALF_PI - psi - c / 6.0
        hi = HALF_PI - psi + c / 6.0
        _, _, a, r, st = bisect_alpha_hat(psi, c, lo, hi, n, alpha_tol, res_tol * max(1.0, c))
        f, k, y0, y1, y2 = endpoint(psi, a, c, n)
        alphas[i] = a
        out[i] = y0 if (st == 0 and f == 0) else np.nan
    return out, alphas
