"""Inner shoot: the admissible slope interval I(c) and the slope alpha-hat(c).

For c > 0 the endpoint data Psi(1), Psi'(1), Psi''(1) are increasing in
alpha, so both the band edges and the root of Psi''(1) are located by
bisection.  The root is bisected on an "escape sign": -1 if the
trajectory leaves the band through -pi/2, +1 through +pi/2, and the sign
of Psi''(1) otherwise.  This functional is monotone on the whole bound
box and keeps working when I(c) is only a few floats wide.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DomainError,
    IntegrationBlowupError,
    InternalContradictionError,
    PrecisionLimitError,
    SDWaveError,
)
from .ode_core import HALF_PI, IvpParams, State3, Trajectory, default_steps, integrate_ivp

log = logging.getLogger(__name__)

ALPHA_TOL = 1e-12
RESIDUAL_TOL = 1e-9
BAND_TOL = 1e-10
N_SEED = 64


def _check(psi_minus: float, c: float) -> None:
    if not 0.0 < psi_minus < HALF_PI:
        raise DomainError(f"psi_minus={psi_minus!r} must lie in (0, pi/2)")
    if not (c > 0.0 and math.isfinite(c)):
        raise DomainError(f"c={c!r} must be positive and finite", c=c)


def bound_box(psi_minus: float, c: float) -> tuple[float, float]:
    """Open box outside of which no slope keeps the trajectory in the band."""
    return -HALF_PI - psi_minus - c / 6.0, HALF_PI - psi_minus + c / 6.0


def shoot(psi_minus: float, alpha: float, c: float, steps: int | None = None) -> tuple[int, State3]:
    """Endpoint of one trajectory without storing samples.

    Returns (exit_flag, state) where exit_flag is 0 when the trajectory
    stays in the band, otherwise the side (+1/-1) of the first sample at
    or beyond pi/2 (the state is that sample).
    """
    n = default_steps(c) if steps is None else steps
    f, k, y0, y1, y2 = _kernels.endpoint(psi_minus, alpha, c, n)
    if f == 2:
        raise IntegrationBlowupError(f"non-finite state at alpha={alpha!r}", c=c)
    return int(f), State3(k / n, y0, y1, y2)


@dataclass(frozen=True)
class BandInterval:
    c: float
    alpha_lower: float
    alpha_upper: float
    tol: float
    psi_minus: float = math.nan

    @property
    def width(self) -> float:
        return self.alpha_upper - self.alpha_lower

    def __contains__(self, alpha: float) -> bool:
        return self.alpha_lower <= alpha <= self.alpha_upper


@dataclass(frozen=True)
class AlphaHatResult:
    """alpha-hat(c) and the trajectory Psi-hat(.; c).

    ``residual`` is |Psi''(1)| of the returned slope.  ``resolved`` is False
    when double precision cannot push the residual below the requested
    tolerance; the slope is then the best representable one.  With
    ``require_band=False`` the trajectory may leave the band before s=1,
    in which case ``theta_end`` is NaN.
    """

    c: float
    alpha_hat: float
    residual: float
    trajectory: Trajectory
    theta_end: float
    psi_minus: float
    bracket: tuple[float, float]
    resolved: bool = True

    @property
    def in_band(self) -> bool:
        return self.trajectory.band_exit is None


def band_interval(psi_minus: float, c: float, tol: float = BAND_TOL,
                  steps: int | None = None) -> BandInterval:
    """Bisect both edges of I(c) from 64 seeds in the bound box.

    If no seed is admissible (I(c) is narrower than the seed spacing),
    the alpha-hat bisection supplies one.  Returned edges are admissible.
    """
    _check(psi_minus, c)
    n = default_steps(c) if steps is None else steps
    lo, hi = bound_box(psi_minus, c)
    box_flags, _ = _kernels.endpoints(psi_minus, np.array([lo, hi]), c, n)
    if box_flags[0] == 0 or box_flags[1] == 0:
        raise InternalContradictionError(
            f"slope at the edge of the bound box stays in the band (c={c!r})", c=c)
    probes = np.linspace(lo, hi, N_SEED + 2)
    flags, _ = _kernels.endpoints(psi_minus, probes[1:-1], c, n)
    flags = np.concatenate([box_flags[:1], flags, box_flags[1:]])
    good = np.flatnonzero(flags == 0)
    if good.size:
        i, j = good[0], good[-1]
        seed_lo, seed_hi = probes[i], probes[j]
        out_lo, out_hi = probes[i - 1], probes[j + 1]
    else:
        seed = _seed_from_alpha_hat(psi_minus, c, n)
        seed_lo = seed_hi = seed
        k = int(np.searchsorted(probes, seed))
        out_lo, out_hi = probes[k - 1], probes[k]
    a_lo, _ = _kernels.bisect_band_edge(psi_minus, c, seed_lo, out_lo, n, tol)
    a_hi, _ = _kernels.bisect_band_edge(psi_minus, c, seed_hi, out_hi, n, tol)
    if not a_lo < a_hi:
        raise PrecisionLimitError(
            f"band interval at c={c!r} is a single float; not resolvable", c=c)
    return BandInterval(c, float(a_lo), float(a_hi), tol, psi_minus)


def _seed_from_alpha_hat(psi_minus: float, c: float, n: int) -> float:
    lo, hi = bound_box(psi_minus, c)
    _, _, a, res, status = _kernels.bisect_alpha_hat(psi_minus, c, lo, hi, n, 0.0, 0.0)
    if status == 2:
        raise IntegrationBlowupError("non-finite state while seeding", c=c)
    if status == 1:
        raise PrecisionLimitError(
            f"no slope keeps the trajectory in the band at c={c!r}; "
            "the admissible interval is below double precision", c=c)
    return float(a)


def find_alpha_hat(psi_minus: float, c: float, tol: float = ALPHA_TOL, *,
                   residual_tol: float = RESIDUAL_TOL, steps: int | None = None,
                   require_band: bool = True) -> AlphaHatResult:
    """Unique slope with Psi''(1) = 0 and the trajectory inside the band.

    Bisection stops when the bracket is below ``tol`` and the residual is
    below ``residual_tol * max(1, c)``, or when the bracket reaches
    adjacent floats.
    """
    _check(psi_minus, c)
    n = default_steps(c) if steps is None else steps
    lo, hi = bound_box(psi_minus, c)
    s_lo, _, _ = _kernels.escape_sign(psi_minus, lo, c, n)
    s_hi, _, _ = _kernels.escape_sign(psi_minus, hi, c, n)
    if not (s_lo < 0 < s_hi):
        raise InternalContradictionError(
            f"escape signs at the bound box are ({s_lo}, {s_hi}), expected (-1, +1)", c=c)
    res_tol = residual_tol * max(1.0, c)
    b_lo, b_hi, a, res, status = _kernels.bisect_alpha_hat(psi_minus, c, lo, hi, n, tol, res_tol)
    if status == 2:
        raise IntegrationBlowupError("non-finite state during alpha bisection", c=c)
    if status == 1 and require_band:
        raise PrecisionLimitError(
            f"no slope keeps the trajectory in the band at c={c!r}", c=c)
    traj = integrate_ivp(IvpParams(psi_minus, float(a), c), n)
    if traj.band_exit is not None and require_band:
        raise PrecisionLimitError(f"alpha-hat trajectory leaves the band at c={c!r}", c=c)
    resolved = bool(res <= res_tol)
    if not resolved:
        log.debug("alpha-hat at c=%g limited by float spacing: |Psi''(1)|=%g", c, res)
    theta_end = float(traj.theta[-1]) if traj.band_exit is None else math.nan
    residual = abs(float(traj.theta2[-1])) if traj.band_exit is None else math.inf
    return AlphaHatResult(c, float(a), residual, traj, theta_end, psi_minus,
                          (float(b_lo), float(b_hi)), resolved)


def alpha_hat_curve(psi_minus: float, c_values, tol: float = ALPHA_TOL, **kw) -> list[AlphaHatResult]:
    """``find_alpha_hat`` over an increasing grid of speeds."""
    cs = np.asarray(c_values, dtype=float)
    if cs.ndim != 1 or np.any(np.diff(cs) <= 0):
        raise DomainError("c_values must be strictly increasing")
    out = []
    for c in cs:
        try:
            out.append(find_alpha_hat(psi_minus, float(c), tol, **kw))
        except SDWaveError as exc:
            if exc.c is None:
                exc.c = float(c)
            raise
    return out
