import numpy as np
import pytest
from hypothesis import given, strategies as st

from sdwaves.alpha_shooting import find_alpha_hat
from sdwaves.errors import DomainError, UnderResolvedError
from sdwaves.ode_core import IvpParams, integrate_ivp, linear_trajectory
from sdwaves.oracle import reference_solution
from sdwaves.zero_structure import (
    ZeroLadder,
    counts_consistent,
    deepest_branch,
    expected_branch,
    expected_counts,
    extract_zeros,
    sign_change_counts,
    template,
    verify_alternation,
    wave_index,
)


def test_arc_ladder():
    lad = extract_zeros(linear_trajectory(0.5, -1.0))
    assert lad.delta == (0.5,)
    assert lad.mu == () and lad.gamma == ()
    assert lad.alternating and deepest_branch(lad) == "delta1+"


def test_small_c_ladder():
    lad = extract_zeros(find_alpha_hat(1.2, 1e-2).trajectory)
    assert len(lad.delta) == 1 and lad.mu == () and lad.gamma == ()


def test_ladder_against_dense_reference():
    r = find_alpha_hat(1.2, 754.0)
    lad = extract_zeros(r.trajectory)
    ref = reference_solution(IvpParams(1.2, r.alpha_hat, 754.0))
    dense = []
    for row in range(3):
        v = ref.y[row].copy()
        if row == 2:
            v[0] = v[-1] = 0.0
        nz = np.flatnonzero(v != 0)
        sg = np.sign(v[nz])
        dense.append(int(np.sum(sg[1:] != sg[:-1])))
    assert sign_change_counts(lad) == tuple(dense) == (3, 2, 2)
    assert [lab for _, lab in lad.merged()] == template(7)
    assert lad.get("delta1+") == pytest.approx(
        ref.s[np.argmax(ref.theta < 0)], abs=2 * ref.step)


def test_ladder_properties_on_psi_hat():
    r = find_alpha_hat(1.2, 2081.0)
    tr, lad = r.trajectory, extract_zeros(r.trajectory)
    assert abs(tr.theta2[0]) == 0 and abs(tr.theta2[-1]) <= 1e-9 * 2081
    assert all(0 < z < 1 for z in lad.delta + lad.mu + lad.gamma)
    assert lad.delta[0] < lad.gamma[0]
    assert np.all(tr.theta[tr.s < lad.delta[0]] > 0)
    inner = (tr.s > 0) & (tr.s < lad.gamma[0])
    assert np.all(tr.theta2[inner] > 0)
    # constant sign of Psi'' between consecutive gamma zeros
    for a, b in zip(lad.gamma[:-1], lad.gamma[1:]):
        seg = tr.theta2[(tr.s > a) & (tr.s < b)]
        assert np.all(seg > 0) or np.all(seg < 0)
    # each listed zero is a sign flip
    for row, zs in enumerate((lad.delta, lad.mu, lad.gamma)):
        for z in zs:
            left = np.interp(z - 3 * tr.step, tr.s, tr.y[row])
            right = np.interp(z + 3 * tr.step, tr.s, tr.y[row])
            assert left * right < 0


def test_alternation_rules():
    assert ZeroLadder.from_zeros([0.5]).alternating
    assert not ZeroLadder.from_zeros([0.3], [], [0.6]).alternating
    assert verify_alternation(ZeroLadder.from_zeros([0.1, 0.4, 0.7], [0.2, 0.5], [0.3, 0.6]))
    assert not verify_alternation(ZeroLadder.from_zeros([0.1, 0.25], [0.2], [0.3]))


@given(st.integers(0, 30))
def test_template_prefix_is_valid(n):
    labels = template(n)
    kinds = {"delta": [], "mu": [], "gamma": []}
    for p, lab in enumerate(labels):
        kinds[lab.rstrip("+-").rstrip("0123456789")].append(float(p + 1) / (n + 1))
    assert ZeroLadder.from_zeros(kinds["delta"], kinds["mu"], kinds["gamma"]).alternating


def test_counts_and_index():
    assert expected_counts(1) == (1, 1, 0)
    assert expected_counts(2) == (3, 2, 2)
    assert expected_counts(3) == (3, 3, 2)
    assert counts_consistent((1, 0, 0), 1)
    assert not counts_consistent((1, 0, 0), 2)
    lad = ZeroLadder.from_zeros([0.1, 0.4, 0.7], [0.2, 0.5, 0.8], [0.3, 0.6])
    assert wave_index(lad) == 3 and counts_consistent(sign_change_counts(lad), 3)


def test_branches():
    assert deepest_branch(ZeroLadder.from_zeros([0.3], [0.6])) == "mu1-"
    lad = ZeroLadder.from_zeros([0.1, 0.4, 0.7], [0.2, 0.5], [0.3, 0.6])
    assert deepest_branch(lad) == "delta2+"
    assert [expected_branch(i) for i in (1, 2, 3, 4)] == ["mu1-", "delta2+", "mu2-", "delta3+"]


def test_truncated_requires_flag():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 100.0))
    with pytest.raises(DomainError):
        extract_zeros(tr)
    assert extract_zeros(tr, allow_truncated=True).truncated


def test_under_resolved():
    r = find_alpha_hat(1.2, 2081.0)
    coarse = integrate_ivp(IvpParams(1.2, r.alpha_hat, 2081.0), 32)
    with pytest.raises(UnderResolvedError):
        extract_zeros(coarse, allow_truncated=True)


def test_ladder_dict():
    d = ZeroLadder.from_zeros([0.3], [0.6]).to_dict()
    assert d["labels"] == ["delta1+", "mu1-"]
    assert d["j_membership"] == {"delta": "delta1+", "mu": "mu1-", "gamma": None}
