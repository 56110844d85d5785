import numpy as np
import pytest

from sdwaves.errors import DomainError
from sdwaves.ode_core import IvpParams
from sdwaves.oracle import (
    alpha_root_scan,
    c_root_scan,
    error_vs_reference,
    multiplicity_threshold,
    reference_solution,
    step_halving_ratio,
)


@pytest.mark.parametrize("c", [1.0, 1e4])
def test_alpha_scan_unique(c):
    rep = alpha_root_scan(0.7, c, 10_000)
    assert rep.count == 1 == len(rep.crossings)
    assert rep.axis == "alpha" and len(rep.grid) == len(rep.signs) == 10_000


def test_alpha_scan_deterministic():
    a = alpha_root_scan(0.7, 30.0, 2000).to_dict()
    b = alpha_root_scan(0.7, 30.0, 2000).to_dict()
    assert a == b


def test_c_scan_near_psi_minus_odd():
    rep = c_root_scan(1.0, 0.9, 1e-4, 1e4, 1000)
    assert rep.count >= 1 and rep.count % 2 == 1
    assert np.all(np.diff(rep.crossings) > 0)


def test_c_scan_three_below_threshold():
    assert c_root_scan(1.2, 0.005, 1.0, 1e4, 1000).count >= 3


def test_c_scan_parity_flip():
    pos = c_root_scan(0.5, 0.01, 1.0, 1e4, 1000, refine=False).count
    neg = c_root_scan(0.5, -0.01, 1.0, 1e4, 1000, refine=False).count
    assert pos % 2 == 1 and neg % 2 == 0 and neg >= 2


def test_threshold_bracketed():
    t = multiplicity_threshold(1.2, 3)
    assert c_root_scan(1.2, 0.99 * t, 1.0, 1e4, 1000, refine=False).count >= 3
    assert c_root_scan(1.2, 1.01 * t, 1.0, 1e4, 1000, refine=False).count < 3


def test_reference_and_order():
    p = IvpParams(1.0, -2.0, 100.0)
    assert error_vs_reference(p, 8192) < 1e-9
    assert 12 <= step_halving_ratio(p) <= 20
    assert len(reference_solution(IvpParams(0.5, 0.0, 0.0)).s) == 2 ** 17 + 1


def test_scan_sizes():
    with pytest.raises(DomainError):
        alpha_root_scan(0.7, 1.0, 10)
    with pytest.raises(DomainError):
        c_root_scan(1.0, 0.5, 1.0, 10.0, 10)
