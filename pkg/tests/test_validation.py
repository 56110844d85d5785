import math

import numpy as np
import pytest
from jsonschema import validate

from sdwaves.alpha_shooting import find_alpha_hat
from sdwaves.c_shooting import enumerate_waves, reflect_wave
from sdwaves.errors import DomainError
from sdwaves.geometry import arc_solution
from sdwaves.ode_core import IvpParams, integrate_ivp, linear_trajectory
from sdwaves.validation import (
    QUANTITIES,
    amplitude_monotonicity_check,
    closure_residual,
    energy_residual,
    energy_terms,
    fit_scaling_exponent,
    global_bounds_check,
    scaling_quantities,
    sign_relation_check,
    validate_wave,
    wave_report,
)
from sdwaves.zero_structure import ZeroLadder, extract_zeros

REPORT_SCHEMA = {
    "type": "object",
    "required": ["c", "alpha_hat", "k_index", "energy_residual", "closure_residual", "ladder", "fits"],
    "additionalProperties": False,
    "properties": {
        "c": {"type": "number"},
        "alpha_hat": {"type": "number"},
        "k_index": {"type": "integer", "minimum": 1},
        "energy_residual": {"type": "number", "minimum": 0},
        "closure_residual": {"type": "number", "minimum": 0},
        "ladder": {"type": "object", "required": ["delta", "mu", "gamma"]},
        "fits": {"type": "array"},
    },
}


@pytest.fixture(scope="module")
def waves():
    return enumerate_waves(1.2, 0.0105)


def test_arc_residuals_zero():
    tr = linear_trajectory(0.5, -1.0)
    assert energy_residual(tr, 0.0) == 0.0
    assert closure_residual(tr) < 1e-16


def test_energy_on_waves(waves):
    for w in waves:
        assert energy_residual(w.trajectory, w.c) < 1e-6
        d1 = w.ladder.delta[0]
        assert energy_residual(w.trajectory, w.c, 0.0, d1) < 1e-6
        # full interval: -int Theta''^2 = c (cos psi- - cos psi+)
        bracket, sq, dcos = energy_terms(w.trajectory, w.c, 0.0, 1.0)
        assert abs(bracket) < 1e-6
        assert -sq == pytest.approx(w.c * (math.cos(1.2) - math.cos(0.0105)), rel=1e-8)


def test_energy_identity_holds_off_wave():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 10.0), 8192)
    assert energy_residual(tr, 10.0, 0.1, 0.77) < 1e-9
    with pytest.raises(DomainError):
        energy_residual(tr, 10.0, 0.5, 0.5)


def test_closure_on_waves(waves):
    for w in waves:
        assert closure_residual(w.trajectory) < 1e-8


def test_closure_off_wave_matches_theta2():
    c = 10.0
    tr = integrate_ivp(IvpParams(1.0, -2.1, c), 8192)
    assert tr.band_exit is None
    assert closure_residual(tr) == pytest.approx(abs(tr.theta2[-1]) / c, abs=1e-12)
    assert closure_residual(tr) > 1e-3


def test_amplitude_and_bounds(waves):
    for w in waves:
        assert amplitude_monotonicity_check(w.trajectory, w.ladder)
        assert global_bounds_check(w.trajectory, w.ladder)


def test_amplitude_detects_growth():
    # Psi = 0.3 + s grows between the end checkpoints of (i)
    grow = linear_trajectory(0.3, 1.0)
    assert not amplitude_monotonicity_check(grow, ZeroLadder.from_zeros())


def test_amplitude_trivial_linear():
    tr = linear_trajectory(0.5, -1.0)
    assert amplitude_monotonicity_check(tr, extract_zeros(tr))


def test_delta1_is_global_max_of_psi2():
    r = find_alpha_hat(1.0, 20.0)
    lad = extract_zeros(r.trajectory)
    assert len(lad.delta) == 1
    assert global_bounds_check(r.trajectory, lad)


def test_scaling_quantities_positive():
    q = scaling_quantities(1.0, 1e3)
    assert set(q) == set(QUANTITIES)
    assert all(v > 0 for v in q.values())


def test_fit_alpha_hat_exponent():
    fit = fit_scaling_exponent(1.0, "alpha_hat", 1e3, 1e6, 8)
    assert fit.exponent == pytest.approx(1 / 3, abs=0.02) and fit.r2 >= 0.999 and fit.ok


def test_fit_preconditions():
    with pytest.raises(DomainError):
        fit_scaling_exponent(1.0, "alpha_hat", 10.0, 1e6, 8)
    with pytest.raises(DomainError):
        fit_scaling_exponent(1.0, "alpha_hat", 1e3, 1e6, 4)
    with pytest.raises(DomainError):
        fit_scaling_exponent(1.0, "nonsense", 1e3, 1e6, 8)


def test_sign_relation():
    assert sign_relation_check(0.5, 0.5, [arc_solution(0.5)])
    w = enumerate_waves(0.9, 0.1)
    assert sign_relation_check(0.9, 0.1, w)
    assert not sign_relation_check(0.1, 0.9, w)
    assert sign_relation_check(0.1, 0.9, [reflect_wave(x) for x in w])


def test_validate_wave_all_pass(waves):
    for w in waves + [arc_solution(0.7)]:
        checks = validate_wave(w)
        assert all(checks.values()), [k for k, v in checks.items() if not v]


def test_report_schema(waves):
    for w in waves:
        validate(wave_report(w), REPORT_SCHEMA)
    assert wave_report(waves[0])["k_index"] == 1
