"""Zero ladder of Psi-hat, Psi-hat' and Psi-hat''.

Zeros are labelled by the sign of the function just before them and a
running index: delta1+ is the first zero of Psi where Psi goes from
positive to negative, mu1- the first zero of Psi' (Psi' negative before
it), gamma1+ the first interior zero of Psi''.  For a wave the merged
ladder follows the cyclic template

    delta+, mu-, gamma+, delta-, mu+, gamma-, delta+, ...

with the index advancing after each full cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import DomainError, UnderResolvedError
from .ode_core import Trajectory

S_TOL = 1e-10
MIN_SEPARATION_STEPS = 4
KINDS = ("delta", "mu", "gamma")
# first sign of each kind: Psi(0) > 0, Psi'(0) < 0, Psi'' > 0 right of 0
_FIRST_SIGN = {"delta": "+", "mu": "-", "gamma": "+"}
_CYCLE = (("delta", "+"), ("mu", "-"), ("gamma", "+"), ("delta", "-"), ("mu", "+"), ("gamma", "-"))


def _label(kind: str, sign: str, index: int) -> str:
    return f"{kind}{index}{sign}"


def template(length: int) -> list[str]:
    """First ``length`` labels of the alternation template."""
    return [_label(*_CYCLE[p % 6], p // 6 + 1) for p in range(length)]


def _labels_from_signs(kind: str, signs) -> tuple[str, ...]:
    counts = {"+": 0, "-": 0}
    out = []
    for sg in signs:
        counts[sg] += 1
        out.append(_label(kind, sg, counts[sg]))
    return tuple(out)


def _alternating_signs(kind: str, n: int) -> list[str]:
    first = _FIRST_SIGN[kind]
    other = "-" if first == "+" else "+"
    return [first if i % 2 == 0 else other for i in range(n)]


@dataclass(frozen=True)
class ZeroLadder:
    delta: tuple[float, ...]
    mu: tuple[float, ...]
    gamma: tuple[float, ...]
    delta_labels: tuple[str, ...] = ()
    mu_labels: tuple[str, ...] = ()
    gamma_labels: tuple[str, ...] = ()
    truncated: bool = False
    alternating: bool = field(init=False)
    j_membership: dict = field(init=False, compare=False)

    def __post_init__(self):
        for kind in KINDS:
            zs = tuple(float(z) for z in getattr(self, kind))
            object.__setattr__(self, kind, zs)
            labels = getattr(self, kind + "_labels")
            if not labels:
                labels = _labels_from_signs(kind, _alternating_signs(kind, len(zs)))
                object.__setattr__(self, kind + "_labels", labels)
            if len(labels) != len(zs):
                raise ValueError(f"{kind}: {len(zs)} zeros but {len(labels)} labels")
        object.__setattr__(self, "alternating", verify_alternation(self))
        object.__setattr__(self, "j_membership", {
            kind: (getattr(self, kind + "_labels")[-1] if getattr(self, kind) else None)
            for kind in KINDS})

    @classmethod
    def from_zeros(cls, delta=(), mu=(), gamma=()) -> "ZeroLadder":
        """Ladder with labels assigned assuming each function alternates sign."""
        return cls(tuple(delta), tuple(mu), tuple(gamma))

    def merged(self) -> list[tuple[float, str]]:
        items = []
        for kind in KINDS:
            items += zip(getattr(self, kind), getattr(self, kind + "_labels"))
        return sorted(items)

    def get(self, label: str) -> float | None:
        for kind in KINDS:
            labels = getattr(self, kind + "_labels")
            if label in labels:
                return getattr(self, kind)[labels.index(label)]
        return None

    def to_dict(self) -> dict:
        return {
            "delta": list(self.delta),
            "mu": list(self.mu),
            "gamma": list(self.gamma),
            "labels": [lab for _, lab in self.merged()],
            "alternating": self.alternating,
            "j_membership": dict(self.j_membership),
        }


def _sign_brackets(v: np.ndarray) -> np.ndarray:
    """Index pairs (a, b) of consecutive nonzero samples with opposite sign."""
    nz = np.flatnonzero(v != 0.0)
    sg = np.sign(v[nz])
    k = np.flatnonzero(sg[:-1] != sg[1:])
    return np.column_stack([nz[k], nz[k + 1]])


def extract_zeros(traj: Trajectory, s_tol: float = S_TOL, *,
                  allow_truncated: bool = False) -> ZeroLadder:
    """Sign changes of (Psi, Psi', Psi'') refined on the Hermite interpolant.

    Psi''(0) = 0 and, for a complete trajectory, Psi''(1) ~ 0 hold by
    construction, so neither boundary sample can bracket an interior zero
    of Psi''.  With ``allow_truncated`` a band-exiting trajectory is
    accepted and its ladder marked truncated.
    """
    if traj.band_exit is not None and not allow_truncated:
        raise DomainError("trajectory leaves the band; zero ladder undefined")
    s = traj.s
    deriv = traj.derivative()
    ladder = {}
    for row, kind in enumerate(KINDS):
        v = np.array(traj.y[row])
        if kind == "gamma":
            v[0] = 0.0
            if traj.band_exit is None:
                v[-1] = 0.0
        brackets = _sign_brackets(v)
        zeros, signs = [], []
        if len(brackets):
            spline = CubicHermiteSpline(s, traj.y[row], deriv[row])
            for a, b in brackets:
                z = brentq(spline, s[a], s[b], xtol=s_tol, rtol=4 * np.finfo(float).eps)
                zeros.append(z)
                signs.append("+" if v[a] > 0 else "-")
        gaps = np.diff(zeros)
        if np.any(gaps < MIN_SEPARATION_STEPS * traj.step):
            raise UnderResolvedError(
                f"zeros of {kind} closer than {MIN_SEPARATION_STEPS} steps; raise steps",
                c=traj.params.c)
        ladder[kind] = (tuple(zeros), _labels_from_signs(kind, signs))
    return ZeroLadder(ladder["delta"][0], ladder["mu"][0], ladder["gamma"][0],
                      ladder["delta"][1], ladder["mu"][1], ladder["gamma"][1],
                      truncated=traj.band_exit is not None)


def verify_alternation(ladder: ZeroLadder) -> bool:
    """Merged ladder is a prefix of the template (hence J-sets are nested)."""
    labels = [lab for _, lab in ladder.merged()]
    return labels == template(len(labels))


def sign_change_counts(ladder: ZeroLadder) -> tuple[int, int, int]:
    return len(ladder.delta), len(ladder.mu), len(ladder.gamma)


def expected_counts(k: int) -> tuple[int, int, int]:
    """Sign-change counts of (w_x, w_xx, w) for a wave of index k."""
    return (k, k, k - 1) if k % 2 else (k + 1, k, k)


def counts_consistent(counts: tuple[int, int, int], k: int) -> bool:
    """Counts match index k; k=1 also admits the convex shape (1, 0, 0)."""
    return tuple(counts) == expected_counts(k) or (k == 1 and tuple(counts) == (1, 0, 0))


def wave_index(ladder: ZeroLadder) -> int:
    """Index k read off the number of sign changes of Psi'."""
    return max(1, len(ladder.mu))


def deepest_branch(ladder: ZeroLadder) -> str:
    """Last delta or mu label of the merged ladder, e.g. 'mu1-' or 'delta2+'."""
    for _, lab in reversed(ladder.merged()):
        if not lab.startswith("gamma"):
            return lab
    return "none"


def expected_branch(root_number: int) -> str:
    """Branch of the i-th wave speed (1-based): mu_l- for i = 2l-1, delta_(l+1)+ for i = 2l."""
    if root_number < 1:
        raise DomainError("root numbers start at 1")
    l = (root_number + 1) // 2
    return f"mu{l}-" if root_number % 2 else f"delta{l + 1}+"
