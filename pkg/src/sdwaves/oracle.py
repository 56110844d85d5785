"""Brute-force scans used to cross-check the shooting solvers.

Everything here works on fixed grids so the results are reproducible
bit for bit.  The alpha scan refines crossings of Psi''(1) directly
(no escape-sign trick) and the c scan refines with Brent's method, so
neither shares its root-finding path with the main solvers.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .alpha_shooting import band_interval
from .c_shooting import theta_end_grid
from .errors import DomainError
from .ode_core import IvpParams, Trajectory, default_steps, integrate_ivp

REFERENCE_STEPS = 2 ** 17
MIN_SCAN = 1000


@dataclass(frozen=True)
class ScanReport:
    axis: str
    grid: list
    signs: list
    crossings: list
    count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "count", len(self.crossings))

    def to_dict(self) -> dict:
        return asdict(self)


def _sign_changes(signs: np.ndarray) -> list[tuple[int, int]]:
    """Consecutive nonzero-sign sample pairs with opposite signs."""
    nz = np.flatnonzero(signs != 0)
    return [(int(a), int(b)) for a, b in zip(nz[:-1], nz[1:]) if signs[a] != signs[b]]


def _psi2_end(psi_minus: float, alpha: float, c: float, n: int) -> float:
    f, _, _, _, y2 = _kernels.endpoint(psi_minus, alpha, c, n)
    return y2 if f == 0 else math.nan


def alpha_root_scan(psi_minus: float, c: float, n: int = 10_000, steps: int | None = None) -> ScanReport:
    """Sign changes of Psi''(1; alpha, c) over n slopes spanning I(c)."""
    if n < MIN_SCAN:
        raise DomainError(f"n={n!r} must be at least {MIN_SCAN}")
    steps = default_steps(c) if steps is None else steps
    band = band_interval(psi_minus, c, steps=steps)
    alphas = np.linspace(band.alpha_lower, band.alpha_upper, n)
    flags, ends = _kernels.endpoints(psi_minus, alphas, c, steps)
    keep = flags == 0
    signs = np.where(keep, np.sign(ends[:, 2]), 0).astype(int)
    crossings = []
    for a, b in _sign_changes(signs):
        lo, hi = alphas[a], alphas[b]
        s_lo = signs[a]
        while True:
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            v = _psi2_end(psi_minus, mid, c, steps)
            if v == 0.0 or not math.isfinite(v):
                lo = hi = mid
                break
            if np.sign(v) == s_lo:
                lo = mid
            else:
                hi = mid
        crossings.append(float(0.5 * (lo + hi)))
    return ScanReport("alpha", alphas.tolist(), signs.tolist(), crossings)


@functools.lru_cache(maxsize=32)
def _theta_end_cached(psi_minus: float, c_lo: float, c_hi: float, n: int) -> np.ndarray:
    th = theta_end_grid(psi_minus, np.geomspace(c_lo, c_hi, n))
    th.setflags(write=False)
    return th


def c_root_scan(psi_minus: float, psi_plus: float, c_lo: float, c_hi: float, n: int = MIN_SCAN, *,
                refine: bool = True, rtol: float = 1e-12) -> ScanReport:
    """Sign changes of Psi-hat(1; c) + psi_plus over a log grid of speeds."""
    if n < MIN_SCAN:
        raise DomainError(f"n={n!r} must be at least {MIN_SCAN}")
    if not 0 < c_lo < c_hi:
        raise DomainError(f"need 0 < c_lo < c_hi, got ({c_lo!r}, {c_hi!r})")
    cs = np.geomspace(c_lo, c_hi, n)
    m = _theta_end_cached(float(psi_minus), float(c_lo), float(c_hi), int(n)) + psi_plus
    signs = np.where(np.isfinite(m), np.sign(m), 0).astype(int)
    pairs = _sign_changes(signs)
    if refine:
        def f(c):
            return theta_end_grid(psi_minus, [c], exact=True)[0] + psi_plus

        crossings = [float(brentq(f, cs[a], cs[b], xtol=rtol * cs[a], rtol=rtol)) for a, b in pairs]
    else:
        crossings = [float(math.sqrt(cs[a] * cs[b])) for a, b in pairs]
    return ScanReport("c", cs.tolist(), signs.tolist(), crossings)


def multiplicity_threshold(psi_minus: float, min_count: int = 3, c_lo: float = 1.0,
                           c_hi: float = 1e4, n: int = MIN_SCAN, rtol: float = 1e-3) -> float:
    """Largest psi_plus (to relative ``rtol``) with at least ``min_count`` c-roots.

    Bisects on log psi_plus between psi_minus and a tiny positive value,
    assuming the root count only drops as psi_plus grows.
    """
    def count(pp):
        return c_root_scan(psi_minus, pp, c_lo, c_hi, n, refine=False).count

    lo, hi = 1e-6 * psi_minus, psi_minus * (1 - 1e-9)
    if count(lo) < min_count:
        raise DomainError(f"fewer than {min_count} roots even at psi_plus={lo:g} on [{c_lo:g}, {c_hi:g}]")
    if count(hi) >= min_count:
        return hi
    while hi / lo - 1 > rtol:
        mid = math.sqrt(lo * hi)
        if count(mid) >= min_count:
            lo = mid
        else:
            hi = mid
    return lo


def reference_solution(params: IvpParams) -> Trajectory:
    """The same RK4 at 2^17 steps; ground truth for coarser runs."""
    return integrate_ivp(params, REFERENCE_STEPS, estimate_error=False)


def _last_valid_s(traj: Trajectory) -> float:
    """Last uniform-grid sample before any band exit."""
    return float(traj.s[-1] if traj.band_exit is None else traj.s[-2])


def _state_at_grid(traj: Trajectory, s: float, steps: int) -> np.ndarray:
    return traj.y[:, int(round(s * steps))]


def error_vs_reference(params: IvpParams, steps: int, ref: Trajectory | None = None,
                       s_at: float | None = None) -> float:
    """Max state difference to the reference at a shared grid point.

    ``s_at`` must be a sample of the ``steps`` grid; by default it is the
    last one both runs reach before a band exit.
    """
    ref = reference_solution(params) if ref is None else ref
    run = integrate_ivp(params, steps, estimate_error=False)
    if s_at is None:
        s_at = math.floor(min(_last_valid_s(run), _last_valid_s(ref)) * steps) / steps
    return float(np.max(np.abs(_state_at_grid(run, s_at, steps) - _state_at_grid(ref, s_at, REFERENCE_STEPS))))


def step_halving_ratio(params: IvpParams, steps: int = 256) -> float:
    """Error(steps) / Error(2 steps) against the reference; ~16 for 4th order.

    Both errors are taken at the same arclength, the last point of the
    coarse grid that all three runs reach before a band exit.
    """
    ref = reference_solution(params)
    coarse = integrate_ivp(params, steps, estimate_error=False)
    fine = integrate_ivp(params, 2 * steps, estimate_error=False)
    s_at = math.floor(min(map(_last_valid_s, (coarse, fine, ref))) * steps) / steps
    return error_vs_reference(params, steps, ref, s_at) / error_vs_reference(params, 2 * steps, ref, s_at)


def band_edge_scan(psi_minus: float, c: float, n: int = 10_000, tol: float = 1e-10,
                   steps: int | None = None) -> tuple[float, float]:
    """Edges of I(c) from an n-point scan of the bound box plus plain bisection."""
    steps = default_steps(c) if steps is None else steps
    lo, hi = -math.pi / 2 - psi_minus - c / 6, math.pi / 2 - psi_minus + c / 6
    alphas = np.linspace(lo, hi, n)
    flags, _ = _kernels.endpoints(psi_minus, alphas, c, steps)
    good = np.flatnonzero(flags == 0)
    if not good.size:
        raise DomainError(f"no admissible slope on the {n}-point grid at c={c!r}")

    def edge(a_in, a_out):
        while abs(a_out - a_in) > tol:
            mid = 0.5 * (a_in + a_out)
            if _kernels.endpoint(psi_minus, mid, c, steps)[0] == 0:
                a_in = mid
            else:
                a_out = mid
        return float(a_in)

    return edge(alphas[good[0]], alphas[good[0] - 1]), edge(alphas[good[-1]], alphas[good[-1] + 1])
