"""Outer shoot: wave speeds c with Psi-hat(1; c) = -psi_plus.

The mismatch Psi-hat(1; c) + psi_plus is sampled on a log grid of c,
every sign change is bisected, and each root is turned into a
``WaveSolution`` carrying the profile and its validation residuals.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .alpha_shooting import ALPHA_TOL, RESIDUAL_TOL, find_alpha_hat
from .errors import DomainError, NoWaveFoundError
from .geometry import ProfileCurve, arc_solution, reconstruct_profile, reflect
from .ode_core import HALF_PI, MIN_STEPS, STEPS_PER_LOBE, IvpParams, Trajectory
from .validation import closure_residual, energy_residual
from .zero_structure import ZeroLadder, deepest_branch, extract_zeros, wave_index

log = logging.getLogger(__name__)

C_MIN = 1e-4
C_MAX = 1e4
GRID = 160
MIN_GRID = 64
C_RTOL = 1e-10
DEDUPE_RTOL = 1e-8
MISMATCH_TOL = 1e-8


@dataclass(frozen=True)
class MismatchSample:
    c: float
    theta_end: float
    mismatch: float
    ladder: ZeroLadder
    alpha_hat: float = math.nan


@dataclass(frozen=True)
class WaveSolution:
    c: float
    alpha_hat: float
    trajectory: Trajectory
    ladder: ZeroLadder
    k_index: int
    profile: ProfileCurve
    energy_residual: float
    closure_residual: float
    psi_minus: float
    psi_plus: float
    mismatch: float
    branch: str
    merged: bool = False

    @property
    def theta(self) -> np.ndarray:
        return self.trajectory.theta


def _check_angles(psi_minus: float, psi_plus: float, allow_negative: bool) -> None:
    if not 0.0 < psi_minus < HALF_PI:
        raise DomainError(f"psi_minus={psi_minus!r} must lie in (0, pi/2)")
    if not -HALF_PI < psi_plus < HALF_PI:
        raise DomainError(f"psi_plus={psi_plus!r} must lie in (-pi/2, pi/2)")
    if psi_plus == psi_minus:
        raise DomainError("equal contact angles: the wave is the stationary arc (c = 0)")
    if psi_plus > psi_minus:
        raise DomainError("psi_plus > psi_minus gives c < 0; solve the reflected problem")
    if psi_plus < 0 and not allow_negative:
        raise DomainError("negative psi_plus needs the allow_negative flag")


def theta_end_grid(psi_minus: float, cs, *, exact: bool = False) -> np.ndarray:
    """Psi-hat(1; c) on a grid; NaN where no in-band slope exists.

    ``exact`` bisects alpha-hat to adjacent floats instead of stopping at
    the default tolerances, which removes most of the noise in the
    endpoint value.
    """
    cs = np.ascontiguousarray(cs, dtype=float)
    a_tol, r_tol = (0.0, 0.0) if exact else (ALPHA_TOL, RESIDUAL_TOL)
    th, _ = _kernels.theta_end_many(psi_minus, cs, MIN_STEPS, float(STEPS_PER_LOBE), a_tol, r_tol)
    return th


def mismatch(psi_minus: float, psi_plus: float, c: float, *,
             allow_negative: bool = False) -> MismatchSample:
    _check_angles(psi_minus, psi_plus, allow_negative)
    res = find_alpha_hat(psi_minus, c)
    ladder = extract_zeros(res.trajectory)
    return MismatchSample(c, res.theta_end, res.theta_end + psi_plus, ladder, res.alpha_hat)


def classify_branch(sample) -> str:
    """Deepest delta/mu class present, e.g. 'mu1-' or 'delta2+'."""
    return deepest_branch(sample.ladder)


def bracket_roots(cs: np.ndarray, values: np.ndarray) -> list[tuple[float, float]]:
    """Adjacent grid pairs with a strict sign change (NaN samples break brackets)."""
    out = []
    for i in range(len(cs) - 1):
        a, b = values[i], values[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            out.append((cs[i], cs[i]))
        elif a * b < 0.0:
            out.append((cs[i], cs[i + 1]))
    if len(values) and values[-1] == 0.0:
        out.append((cs[-1], cs[-1]))
    return out


def refine_root(psi_minus: float, psi_plus: float, lo: float, hi: float,
                rtol: float = C_RTOL) -> float:
    """Bisect the mismatch in log c until the bracket is below ``rtol``."""
    def f(c):
        return theta_end_grid(psi_minus, [c], exact=True)[0] + psi_plus

    f_lo = f(lo)
    while hi - lo > rtol * lo:
        mid = math.sqrt(lo * hi)
        if not lo < mid < hi:
            break
        f_mid = f(mid)
        if not np.isfinite(f_mid):
            break
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def build_wave(psi_minus: float, psi_plus: float, c: float) -> WaveSolution:
    res = find_alpha_hat(psi_minus, c, 0.0, residual_tol=0.0)
    traj = res.trajectory
    ladder = extract_zeros(traj)
    return WaveSolution(
        c=c,
        alpha_hat=res.alpha_hat,
        trajectory=traj,
        ladder=ladder,
        k_index=wave_index(ladder),
        profile=reconstruct_profile(traj, c, psi_plus),
        energy_residual=energy_residual(traj, c, 0.0, 1.0),
        closure_residual=closure_residual(traj),
        psi_minus=psi_minus,
        psi_plus=psi_plus,
        mismatch=abs(res.theta_end + psi_plus),
        branch=deepest_branch(ladder),
    )


def _dedupe(roots: list[float], rtol: float) -> list[tuple[float, bool]]:
    out: list[tuple[float, bool]] = []
    for r in sorted(roots):
        if out and abs(r - out[-1][0]) <= rtol * max(abs(r), abs(out[-1][0])):
            out[-1] = (out[-1][0], True)
        else:
            out.append((r, False))
    return out


def enumerate_waves(psi_minus: float, psi_plus: float, c_max: float = C_MAX, grid: int = GRID, *,
                    c_min: float = C_MIN, allow_negative: bool = False,
                    rtol: float = C_RTOL) -> list[WaveSolution]:
    """All waves whose speed is bracketed on a log grid over [c_min, c_max]."""
    _check_angles(psi_minus, psi_plus, allow_negative)
    if grid < MIN_GRID:
        raise DomainError(f"grid={grid!r} must be at least {MIN_GRID}")
    if not 0 < c_min < c_max:
        raise DomainError(f"need 0 < c_min < c_max, got ({c_min!r}, {c_max!r})")
    cs = np.geomspace(c_min, c_max, grid)
    m = theta_end_grid(psi_minus, cs) + psi_plus
    roots = [lo if lo == hi else refine_root(psi_minus, psi_plus, lo, hi, rtol)
             for lo, hi in bracket_roots(cs, m)]
    if not roots:
        if psi_plus > 0:
            raise NoWaveFoundError(
                f"no sign change of the mismatch on [{c_min:g}, {c_max:g}] with {grid} points; "
                "raise --c-max or --grid", c_grid=cs, mismatch=m)
        log.info("no waves for psi_plus=%g on [%g, %g]", psi_plus, c_min, c_max)
        return []
    waves = []
    for c, merged in _dedupe(roots, DEDUPE_RTOL):
        w = build_wave(psi_minus, psi_plus, c)
        waves.append(replace(w, merged=True) if merged else w)
    return waves


def reflect_wave(wave: WaveSolution) -> WaveSolution:
    """Mirror image: a (psi_plus, psi_minus) wave with speed -c."""
    t = wave.trajectory
    s = (t.s[-1] - t.s)[::-1]
    y = np.vstack([-t.theta[::-1], t.theta1[::-1], -t.theta2[::-1]])
    params = IvpParams(wave.psi_plus, float(y[1, 0]), -wave.c)
    traj = Trajectory(params, np.ascontiguousarray(s), np.ascontiguousarray(y), t.step, None,
                      t.error_estimate)
    ladder = extract_zeros(traj)
    profile, c = reflect(wave.profile, wave.c)
    return WaveSolution(
        c=c,
        alpha_hat=float(y[1, 0]),
        trajectory=traj,
        ladder=ladder,
        k_index=wave.k_index,
        profile=profile,
        energy_residual=energy_residual(traj, c, 0.0, float(s[-1])),
        closure_residual=closure_residual(traj),
        psi_minus=wave.psi_plus,
        psi_plus=wave.psi_minus,
        mismatch=wave.mismatch,
        branch=wave.branch,
        merged=wave.merged,
    )


def solve_waves(psi_minus: float, psi_plus: float, c_max: float = C_MAX, grid: int = GRID, *,
                allow_negative: bool = False) -> list[WaveSolution]:
    """Waves for any ordering of the contact angles.

    Equal angles give the stationary arc; psi_minus < psi_plus is solved
    as the mirrored problem and reflected back (speeds negative).
    """
    if psi_minus == psi_plus:
        return [arc_solution(psi_minus)]
    if psi_minus < psi_plus:
        mirrored = enumerate_waves(psi_plus, psi_minus, c_max, grid, allow_negative=allow_negative)
        return [reflect_wave(w) for w in mirrored]
    return enumerate_waves(psi_minus, psi_plus, c_max, grid, allow_negative=allow_negative)
