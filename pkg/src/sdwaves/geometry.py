"""Profile curves from the tangent angle, and the symmetries of the problem.

With arclength s and tangent angle Theta, x' = cos(Theta) and
y' = sin(Theta).  On the band |Theta| < pi/2 the curve is a graph
y = w(x) with w_x = tan(Theta), w_xx = Theta' / cos(Theta)^3 and, for a
traveling wave of speed c != 0, w = Theta'' / c.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import DomainError, InvalidWaveError
from .ode_core import HALF_PI, Trajectory, linear_trajectory

CSV_COLUMNS = ("s", "x", "y", "theta", "theta1", "theta2")
ARC_STEPS = 4096
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class ProfileCurve:
    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    c: float
    psi_minus: float
    psi_plus: float

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def arclength(self) -> float:
        return float(self.s[-1] - self.s[0])

    @property
    def left_endpoint(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.y[0])

    @property
    def right_endpoint(self) -> tuple[float, float]:
        return float(self.x[-1]), float(self.y[-1])

    @property
    def contact_residuals(self) -> tuple[float, float]:
        return (abs(float(self.theta[0]) - self.psi_minus),
                abs(-float(self.theta[-1]) - self.psi_plus))

    @property
    def y_end_residual(self) -> float:
        return abs(float(self.y[-1] - self.y[0]))

    @property
    def w_x(self) -> np.ndarray:
        return np.tan(self.theta)

    @property
    def w_xx(self) -> np.ndarray:
        return self.theta1 / np.cos(self.theta) ** 3

    @property
    def w(self) -> np.ndarray | None:
        """Height from the profile equation; None for the stationary arc."""
        if self.c == 0:
            return None
        return self.theta2 / self.c

    def chord_length(self) -> float:
        return float(np.sum(np.hypot(np.diff(self.x), np.diff(self.y))))


def integrate_xy(s: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """x(s), y(s) from the tangent angle, starting at the origin."""
    x = cumulative_simpson(np.cos(theta), x=s, initial=0.0)
    y = cumulative_simpson(np.sin(theta), x=s, initial=0.0)
    return x, y


def reconstruct_profile(traj: Trajectory, c: float | None = None,
                        psi_plus: float | None = None) -> ProfileCurve:
    """Curve through the origin with tangent angle ``traj.theta``.

    ``psi_plus`` defaults to -Theta(1), the right contact angle the data
    actually realise; pass the target to obtain a meaningful residual.
    """
    if traj.band_exit is not None:
        raise DomainError("trajectory leaves the band; the curve is not a graph")
    c = traj.params.c if c is None else float(c)
    theta = np.asarray(traj.theta)
    psi_minus = float(theta[0])
    realised = -float(theta[-1])
    psi_plus = realised if psi_plus is None else float(psi_plus)
    if c == 0 and abs(psi_minus - realised) > ANGLE_TOL:
        raise InvalidWaveError(
            f"c=0 requires equal contact angles, got {psi_minus!r} and {realised!r}")
    x, y = integrate_xy(traj.s, theta)
    return ProfileCurve(np.array(traj.s), x, y, theta.copy(), np.array(traj.theta1),
                        np.array(traj.theta2), c, psi_minus, psi_plus)


def scale_translate(curve: ProfileCurve, c: float, lam: float, a: float = 0.0) -> tuple[ProfileCurve, float]:
    """(lam * W + a e1, c / lam^3) is again a traveling wave."""
    if not lam > 0:
        raise DomainError(f"lambda={lam!r} must be positive")
    c_new = c / lam ** 3
    out = replace(curve, s=lam * curve.s, x=lam * curve.x + a, y=lam * curve.y,
                  theta1=curve.theta1 / lam, theta2=curve.theta2 / lam ** 2, c=c_new)
    return out, c_new


def reflect(curve: ProfileCurve, c: float) -> tuple[ProfileCurve, float]:
    """Mirror in the y-axis: a (psi-, psi+) wave becomes a (psi+, psi-) wave of speed -c."""
    length = curve.s[-1] + curve.s[0]
    out = replace(
        curve,
        s=(length - curve.s)[::-1],
        x=-curve.x[::-1],
        y=curve.y[::-1].copy(),
        theta=-curve.theta[::-1],
        theta1=curve.theta1[::-1].copy(),
        theta2=-curve.theta2[::-1],
        c=-c,
        psi_minus=curve.psi_plus,
        psi_plus=curve.psi_minus,
    )
    return out, -c


def reflect_trajectory_arrays(traj: Trajectory):
    """(s, Theta, Theta', Theta'') of the mirrored problem, speed -c."""
    s = (traj.s[-1] - traj.s)[::-1]
    return s, -traj.theta[::-1], traj.theta1[::-1].copy(), -traj.theta2[::-1]


def arc_solution(psi: float, steps: int = ARC_STEPS):
    """Stationary wave for equal contact angles: Theta(s) = psi - 2 psi s, c = 0."""
    from .c_shooting import WaveSolution
    from .validation import closure_residual, energy_residual
    from .zero_structure import extract_zeros, wave_index

    if not 0.0 < psi < HALF_PI:
        raise DomainError(f"psi={psi!r} must lie in (0, pi/2)")
    traj = linear_trajectory(psi, -2.0 * psi, steps)
    profile = reconstruct_profile(traj, 0.0, psi)
    ladder = extract_zeros(traj)
    return WaveSolution(
        c=0.0,
        alpha_hat=-2.0 * psi,
        trajectory=traj,
        ladder=ladder,
        k_index=wave_index(ladder),
        profile=profile,
        energy_residual=energy_residual(traj, 0.0, 0.0, 1.0),
        closure_residual=closure_residual(traj),
        psi_minus=psi,
        psi_plus=psi,
        mismatch=abs(float(traj.theta[-1]) + psi),
        branch="arc",
    )


def arc_radius(psi: float) -> float:
    """Radius of the unit-length stationary arc (curvature magnitude 2 psi)."""
    return math.inf if psi == 0 else 1.0 / (2.0 * psi)


def to_csv(curve: ProfileCurve, fh=None) -> str | None:
    """Write s, x, y, theta, theta1, theta2 with 17 significant digits.

    Returns the text when ``fh`` is None.
    """
    data = np.column_stack([curve.s, curve.x, curve.y, curve.theta, curve.theta1, curve.theta2])
    return write_rows(data, fh)


def write_rows(data: np.ndarray, fh=None) -> str | None:
    buf = io.StringIO() if fh is None else fh
    np.savetxt(buf, data, fmt="%.17g", delimiter=",", header=",".join(CSV_COLUMNS), comments="")
    if fh is None:
        return buf.getvalue()
    return None
