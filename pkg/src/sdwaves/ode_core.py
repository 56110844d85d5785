"""Initial value problem Psi''' = c sin(Psi) on [0, 1].

Initial data are Psi(0) = psi_minus, Psi'(0) = alpha, Psi''(0) = 0.  The
system (Psi, Psi', Psi'') is marched with fixed-step classical RK4; the
march stops when |Psi| reaches pi/2 (the graph condition of the profile
breaks there).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationBlowupError

HALF_PI = 0.5 * math.pi
MIN_STEPS = 4096
STEPS_PER_LOBE = 64
EXIT_TOL = 1e-10


def default_steps(c: float) -> int:
    """Step count resolving the c^(-1/3) oscillation scale; always even."""
    n = max(MIN_STEPS, math.ceil(STEPS_PER_LOBE * abs(c) ** (1.0 / 3.0)))
    return n + n % 2


@dataclass(frozen=True)
class IvpParams:
    psi_minus: float
    alpha: float
    c: float

    def validate(self) -> None:
        if not 0.0 < self.psi_minus < HALF_PI:
            raise DomainError(f"psi_minus={self.psi_minus!r} must lie in (0, pi/2)")
        if not (math.isfinite(self.alpha) and math.isfinite(self.c)):
            raise DomainError("alpha and c must be finite")


@dataclass(frozen=True)
class State3:
    s: float
    theta: float
    theta1: float
    theta2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.theta, self.theta1, self.theta2])


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution; ``y[:, k]`` holds (Psi, Psi', Psi'') at ``s[k]``.

    If ``band_exit`` is set the last sample is the located exit point and
    the preceding ones lie on the uniform grid of spacing ``step``.
    """

    params: IvpParams
    s: np.ndarray
    y: np.ndarray
    step: float
    band_exit: float | None = None
    error_estimate: float = math.nan

    def __post_init__(self):
        self.s.setflags(write=False)
        self.y.setflags(write=False)

    def __len__(self) -> int:
        return len(self.s)

    @property
    def theta(self) -> np.ndarray:
        return self.y[0]

    @property
    def theta1(self) -> np.ndarray:
        return self.y[1]

    @property
    def theta2(self) -> np.ndarray:
        return self.y[2]

    @property
    def complete(self) -> bool:
        return self.band_exit is None

    def state(self, k: int) -> State3:
        return State3(float(self.s[k]), *(float(v) for v in self.y[:, k]))

    @property
    def states(self) -> list[State3]:
        return [self.state(k) for k in range(len(self.s))]

    @property
    def endpoint(self) -> State3:
        return self.state(len(self.s) - 1)

    def derivative(self) -> np.ndarray:
        """d/ds of (Psi, Psi', Psi'') at the samples."""
        c = self.params.c
        return np.vstack([self.y[1], self.y[2], c * np.sin(self.y[0])])


def _hermite(s0, s1, p0, p1, m0, m1, s):
    h = s1 - s0
    t = (s - s0) / h
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * h * m0
            + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * h * m1)


def _locate_exit(s0, s1, y0, y1, c):
    """Bisect the Hermite interpolant of Psi in [s0, s1] for |Psi| = pi/2."""
    d0 = np.array([y0[1], y0[2], c * math.sin(y0[0])])
    d1 = np.array([y1[1], y1[2], c * math.sin(y1[0])])
    lo, hi = s0, s1
    while hi - lo > EXIT_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if abs(_hermite(s0, s1, y0[0], y1[0], d0[0], d1[0], mid)) >= HALF_PI:
            hi = mid
        else:
            lo = mid
    return hi, _hermite(s0, s1, y0, y1, d0, d1, hi)


def _march(params: IvpParams, n: int):
    y, flag = _kernels.march(params.psi_minus, params.alpha, params.c, n)
    if flag == 2:
        raise IntegrationBlowupError(
            f"non-finite state for alpha={params.alpha!r}, c={params.c!r}", c=params.c)
    return y, flag


def integrate_ivp(params: IvpParams, steps: int | None = None, *,
                  estimate_error: bool = True) -> Trajectory:
    """Integrate on [0, 1] with ``steps`` RK4 steps (default: ``default_steps``).

    The error estimate is the Richardson-extrapolated difference against a
    re-integration at half the step, taken at the last grid sample the
    two runs share before any band exit.
    """
    params.validate()
    n = default_steps(params.c) if steps is None else int(steps)
    if n < 2:
        raise DomainError(f"steps={steps!r} must be at least 2")
    y, flag = _march(params, n)
    s = np.arange(len(y)) / n
    band_exit = None
    if flag != 0:
        s_star, last = _locate_exit(s[-2], s[-1], y[-2], y[-1], params.c)
        s = np.append(s[:-1], s_star)
        y = np.vstack([y[:-1], last])
        band_exit = float(s_star)
    err = math.nan
    if estimate_error:
        fine, fine_flag = _march(params, 2 * n)
        last_coarse = len(s) - 1 if band_exit is None else len(s) - 2
        last_fine = len(fine) - 1 if fine_flag == 0 else len(fine) - 2
        k = min(last_coarse, last_fine // 2)
        err = float(np.max(np.abs(y[k] - fine[2 * k]))) * 16.0 / 15.0
    return Trajectory(params, s, np.ascontiguousarray(y.T), 1.0 / n, band_exit, err)


def evaluate_at(traj: Trajectory, s: float) -> State3:
    """Dense output: cubic Hermite for all three components.

    Each component is interpolated with its exact derivative at the two
    bracketing samples, so sample points are reproduced exactly.
    """
    grid = traj.s
    if not (0.0 <= s <= grid[-1]):
        raise DomainError(f"s={s!r} outside [0, {grid[-1]!r}]")
    i = int(np.searchsorted(grid, s, side="right")) - 1
    i = min(max(i, 0), len(grid) - 2)
    if s == grid[i]:
        return traj.state(i)
    d = traj.derivative()
    v = _hermite(grid[i], grid[i + 1], traj.y[:, i], traj.y[:, i + 1], d[:, i], d[:, i + 1], s)
    return State3(float(s), float(v[0]), float(v[1]), float(v[2]))


def evaluate_many(traj: Trajectory, s: np.ndarray) -> np.ndarray:
    """Vectorised ``evaluate_at``; returns an array of shape (3, len(s))."""
    s = np.asarray(s, dtype=float)
    grid = traj.s
    if np.any(s < 0.0) or np.any(s > grid[-1]):
        raise DomainError("evaluation points outside the trajectory")
    i = np.clip(np.searchsorted(grid, s, side="right") - 1, 0, len(grid) - 2)
    d = traj.derivative()
    return _hermite(grid[i], grid[i + 1], traj.y[:, i], traj.y[:, i + 1], d[:, i], d[:, i + 1], s)


def integral_representation_residuals(traj: Trajectory) -> np.ndarray:
    """|integrated - integral formula| for (Psi'', Psi', Psi) at the last sample.

    Uses the Taylor remainder forms with kernel sin(Psi), evaluated by the
    trapezoid rule on the samples.
    """
    p = traj.params
    s = traj.s
    end = s[-1]
    sin_t = np.sin(traj.theta)
    d2 = p.c * np.trapezoid(sin_t, s)
    d1 = p.alpha + p.c * np.trapezoid((end - s) * sin_t, s)
    d0 = p.psi_minus + p.alpha * end + 0.5 * p.c * np.trapezoid((end - s) ** 2 * sin_t, s)
    last = traj.y[:, -1]
    return np.abs(np.array([d2, d1, d0]) - last[::-1])


def verify_integral_representation(traj: Trajectory, tol: float) -> bool:
    return bool(np.all(integral_representation_residuals(traj) <= tol))


def linear_trajectory(psi_minus: float, alpha: float, steps: int = MIN_STEPS) -> Trajectory:
    """Closed-form c=0 solution Psi = psi_minus + alpha s on a uniform grid."""
    s = np.arange(steps + 1) / steps
    y = np.vstack([psi_minus + alpha * s, np.full_like(s, alpha), np.zeros_like(s)])
    return Trajectory(IvpParams(psi_minus, alpha, 0.0), s, y, 1.0 / steps, None, 0.0)
