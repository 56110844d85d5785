"""Numeric residuals of the wave identities and c^(1/3) scaling fits."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.stats import linregress

from .errors import DomainError, SDWaveError
from .ode_core import Trajectory, evaluate_at, evaluate_many
from .zero_structure import (
    ZeroLadder,
    counts_consistent,
    extract_zeros,
    sign_change_counts,
    verify_alternation,
)

ENERGY_TOL = 1e-6
CLOSURE_TOL = 1e-8
MONO_TOL = 1e-9
SLOPE_TOL = 0.02
R2_MIN = 0.999
ASYMPTOTIC_C = 1e3

THEORETICAL = {
    "alpha_hat": 1 / 3,
    "delta1_plus": -1 / 3,
    "psi2_at_delta1": 2 / 3,
    "psi1_at_delta1": 1 / 3,
    "gap_mu1_delta1": -1 / 3,
    "gap_gamma1_mu1": -1 / 3,
}
QUANTITIES = tuple(THEORETICAL)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)


def _integrate_sq_theta2(traj: Trajectory, s1: float, s2: float) -> float:
    """Integral of Psi''^2 over [s1, s2].

    On the full sample range this is Simpson on the samples; otherwise
    4-point Gauss on each (partial) cell of the Hermite interpolant.
    """
    s = traj.s
    if s1 == s[0] and s2 == s[-1]:
        return float(simpson(traj.theta2 ** 2, x=s))
    inner = s[(s > s1) & (s < s2)]
    knots = np.concatenate([[s1], inner, [s2]])
    a, b = knots[:-1], knots[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    vals = evaluate_many(traj, nodes)[2].reshape(-1, 4)
    return float(np.sum(half * (vals ** 2 @ _GL_W)))


def energy_terms(traj: Trajectory, c: float, s1: float, s2: float) -> tuple[float, float, float]:
    """(bracket [Psi'' Psi'], integral of Psi''^2, c (cos Psi(s2) - cos Psi(s1)))."""
    if not 0.0 <= s1 < s2 <= traj.s[-1]:
        raise DomainError(f"need 0 <= s1 < s2 <= {traj.s[-1]!r}, got ({s1!r}, {s2!r})")
    a, b = evaluate_at(traj, s1), evaluate_at(traj, s2)
    bracket = b.theta2 * b.theta1 - a.theta2 * a.theta1
    return bracket, _integrate_sq_theta2(traj, s1, s2), c * (math.cos(b.theta) - math.cos(a.theta))


def energy_residual(traj: Trajectory, c: float, s1: float = 0.0, s2: float = 1.0) -> float:
    """Relative defect of [Psi''Psi'] - int Psi''^2 + c [cos Psi] = 0 on [s1, s2]."""
    bracket, sq, dcos = energy_terms(traj, c, s1, s2)
    return abs(bracket - sq + dcos) / max(1.0, abs(dcos))


def closure_residual(traj: Trajectory) -> float:
    """|int_0^1 sin(Theta)|, i.e. the height difference of the endpoints."""
    if traj.band_exit is not None:
        raise DomainError("closure needs a trajectory on the whole of [0, 1]")
    return abs(float(simpson(np.sin(traj.theta), x=traj.s)))


def _non_increasing(values, tol: float) -> bool:
    v = np.abs(np.asarray(values, dtype=float))
    return bool(np.all(v[1:] <= v[:-1] + tol * np.maximum(1.0, v[:-1])))


def _values_at(traj: Trajectory, points, row: int) -> np.ndarray:
    pts = np.sort(np.asarray(points, dtype=float))
    return evaluate_many(traj, pts)[row] if len(pts) else np.empty(0)


def amplitude_monotonicity_check(traj: Trajectory, ladder: ZeroLadder, tol: float = MONO_TOL) -> bool:
    """Amplitudes of Psi, Psi', Psi'' do not grow along the ladder.

    (i) |Psi| on mu, gamma and both ends; (ii) |Psi'| on delta, gamma and
    both ends; (iii) |Psi''| on delta and mu.  s=0 is left out of (iii)
    because Psi''(0)=0 there by construction.
    """
    end = traj.s[-1]
    checks = [
        (0, (0.0, *ladder.mu, *ladder.gamma, end)),
        (1, (0.0, *ladder.delta, *ladder.gamma, end)),
        (2, (*ladder.delta, *ladder.mu)),
    ]
    return all(_non_increasing(_values_at(traj, pts, row), tol) for row, pts in checks)


def global_bounds_check(traj: Trajectory, ladder: ZeroLadder, tol: float = MONO_TOL) -> bool:
    """max|Psi| and max|Psi'| sit at s=0, max|Psi''| at delta1+."""
    y = np.abs(traj.y)
    ok = y[0].max() <= y[0, 0] * (1 + tol) and y[1].max() <= y[1, 0] * (1 + tol)
    if ladder.delta:
        peak = abs(evaluate_at(traj, ladder.delta[0]).theta2)
        ok = ok and y[2].max() <= peak * (1 + tol) + tol
    return bool(ok)


@dataclass(frozen=True)
class ScalingFit:
    quantity: str
    exponent: float
    theoretical: float
    r2: float
    c_range: tuple[float, float]
    n_points: int
    prefactor: float = math.nan

    @property
    def ok(self) -> bool:
        return abs(self.exponent - self.theoretical) <= SLOPE_TOL and self.r2 >= R2_MIN

    def to_dict(self) -> dict:
        d = asdict(self)
        d["c_range"] = list(self.c_range)
        return d


def scaling_quantities(psi_minus: float, c: float, steps: int | None = None) -> dict[str, float]:
    """All six scaling quantities of Psi-hat(.; c), as positive magnitudes.

    For large c the slope alpha-hat is only known to float resolution and
    its trajectory may leave the band late on; the leading zeros used
    here lie well before that point.
    """
    from .alpha_shooting import find_alpha_hat

    res = find_alpha_hat(psi_minus, c, steps=steps, require_band=False)
    ladder = extract_zeros(res.trajectory, allow_truncated=True)
    d1, m1, g1 = ladder.get("delta1+"), ladder.get("mu1-"), ladder.get("gamma1+")
    missing = [n for n, z in (("delta1+", d1), ("mu1-", m1), ("gamma1+", g1)) if z is None]
    if missing:
        raise SDWaveError(f"zero(s) {', '.join(missing)} absent at c={c!r}; fit aborted", c=c)
    at = evaluate_at(res.trajectory, d1)
    return {
        "alpha_hat": abs(res.alpha_hat),
        "delta1_plus": d1,
        "psi2_at_delta1": abs(at.theta2),
        "psi1_at_delta1": abs(at.theta1),
        "gap_mu1_delta1": m1 - d1,
        "gap_gamma1_mu1": g1 - m1,
    }


def _check_fit_args(c_lo, c_hi, n):
    if not c_lo >= ASYMPTOTIC_C:
        raise DomainError(f"c_lo={c_lo!r} below the asymptotic regime (>= {ASYMPTOTIC_C:g})")
    if not c_hi > c_lo:
        raise DomainError("need c_hi > c_lo")
    if n < 8:
        raise DomainError(f"n={n!r} too small; at least 8 points")


def _fit(quantity: str, cs: np.ndarray, values: np.ndarray) -> ScalingFit:
    reg = linregress(np.log(cs), np.log(values))
    return ScalingFit(quantity, float(reg.slope), THEORETICAL[quantity], float(reg.rvalue ** 2),
                      (float(cs[0]), float(cs[-1])), len(cs), float(math.exp(reg.intercept)))


def fit_all_scaling(psi_minus: float, c_lo: float = 1e3, c_hi: float = 1e6, n: int = 20) -> list[ScalingFit]:
    _check_fit_args(c_lo, c_hi, n)
    cs = np.geomspace(c_lo, c_hi, n)
    rows = [scaling_quantities(psi_minus, float(c)) for c in cs]
    return [_fit(q, cs, np.array([r[q] for r in rows])) for q in QUANTITIES]


def fit_scaling_exponent(psi_minus: float, quantity: str, c_lo: float, c_hi: float, n: int) -> ScalingFit:
    """Least-squares slope of log|quantity| against log c."""
    if quantity not in THEORETICAL:
        raise DomainError(f"unknown quantity {quantity!r}; one of {', '.join(QUANTITIES)}")
    _check_fit_args(c_lo, c_hi, n)
    cs = np.geomspace(c_lo, c_hi, n)
    vals = np.array([scaling_quantities(psi_minus, float(c))[quantity] for c in cs])
    return _fit(quantity, cs, vals)


def prefactor_spread(psi_minus: float, c_values) -> float:
    """max/min of -alpha-hat(c) c^(-1/3) over the grid."""
    cs = np.asarray(c_values, dtype=float)
    pre = np.array([scaling_quantities(psi_minus, float(c))["alpha_hat"] for c in cs]) * cs ** (-1 / 3)
    return float(pre.max() / pre.min())


def sign_relation_check(psi_minus: float, psi_plus: float, waves) -> bool:
    """Every speed has the sign of psi_minus - psi_plus."""
    want = np.sign(psi_minus - psi_plus)
    return all(np.sign(w.c) == want for w in waves)


def validate_wave(wave, *, energy_tol: float = ENERGY_TOL, closure_tol: float = CLOSURE_TOL,
                  angle_tol: float = 1e-8) -> dict[str, bool]:
    """Full invariant suite on one wave; maps check name to pass/fail.

    Ladder and boundary-shape checks are stated for c > 0; a wave with
    c < 0 gets them through its mirror image (prefixed ``mirror_``).
    """
    traj, prof = wave.trajectory, wave.profile
    c = wave.c
    left, right = prof.contact_residuals
    checks = {
        "energy": wave.energy_residual <= energy_tol,
        "closure": wave.closure_residual <= closure_tol,
        "y_end": prof.y_end_residual <= closure_tol,
        "left_angle": left <= angle_tol,
        "right_angle": right <= angle_tol,
        "graph": bool(np.all(np.diff(prof.x) > 0)),
        "w_x_left": abs(prof.w_x[0] - math.tan(wave.psi_minus)) <= angle_tol,
    }
    if c != 0:
        w = prof.w
        checks["sign_w_x"] = bool(np.all(np.sign(prof.w_x) == np.sign(traj.theta)))
        checks["sign_w_xx"] = bool(np.all(np.sign(prof.w_xx) == np.sign(traj.theta1)))
        checks["sign_w"] = bool(np.all(np.sign(w) == np.sign(traj.theta2) * np.sign(c)))
        checks["y_end_matches_theta2"] = abs(prof.y[-1] - (traj.theta2[-1] - traj.theta2[0]) / c) <= closure_tol
    if c < 0:
        from .c_shooting import reflect_wave

        mirror = validate_wave(reflect_wave(wave), energy_tol=energy_tol,
                               closure_tol=closure_tol, angle_tol=angle_tol)
        checks.update({"mirror_" + k: v for k, v in mirror.items()})
        return {k: bool(v) for k, v in checks.items()}
    ladder = wave.ladder
    checks.update({
        "alternation": verify_alternation(ladder),
        "amplitude": amplitude_monotonicity_check(traj, ladder),
        "global_bounds": global_bounds_check(traj, ladder),
        "w_xx_left_negative": prof.w_xx[0] < 0,
    })
    if ladder.gamma:
        checks["delta1_before_gamma1"] = ladder.delta[0] < ladder.gamma[0]
    if c > 0:
        checks["w_positive_right_of_left"] = bool(prof.w[1] > 0)
        checks["counts"] = counts_consistent(sign_change_counts(ladder), wave.k_index)
    return {k: bool(v) for k, v in checks.items()}


def wave_report(wave, fits=()) -> dict:
    """JSON-ready summary of a wave."""
    return {
        "c": wave.c,
        "alpha_hat": wave.alpha_hat,
        "k_index": wave.k_index,
        "energy_residual": wave.energy_residual,
        "closure_residual": wave.closure_residual,
        "ladder": wave.ladder.to_dict(),
        "fits": [f.to_dict() for f in fits],
    }


__all__ = [
    "ScalingFit", "amplitude_monotonicity_check", "closure_residual",
    "energy_residual", "fit_all_scaling", "fit_scaling_exponent", "global_bounds_check",
    "prefactor_spread", "scaling_quantities", "sign_relation_check", "validate_wave", "wave_report",
]
