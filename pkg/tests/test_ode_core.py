import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sdwaves.errors import DomainError, IntegrationBlowupError
from sdwaves.ode_core import (
    IvpParams,
    default_steps,
    evaluate_at,
    evaluate_many,
    integral_representation_residuals,
    integrate_ivp,
    linear_trajectory,
    verify_integral_representation,
)
from sdwaves.oracle import error_vs_reference, reference_solution, step_halving_ratio

psi_st = st.floats(0.05, 1.5)
EPS = np.finfo(float).eps


def test_default_steps_rule():
    assert default_steps(0) == 4096
    assert default_steps(1e6) == 6400
    assert default_steps(1e9) % 2 == 0
    assert default_steps(-1e6) == default_steps(1e6)


def test_linear_when_c_zero():
    tr = integrate_ivp(IvpParams(0.7, -1.4, 0.0), 4096)
    assert tr.band_exit is None
    # one rounding per step accumulates
    np.testing.assert_allclose(tr.theta, 0.7 - 1.4 * tr.s, rtol=0, atol=4096 * EPS)
    assert np.all(tr.theta2 == 0)
    assert tr.s[-1] == 1.0


def test_constant_when_alpha_zero():
    tr = integrate_ivp(IvpParams(0.7, 0.0, 0.0), 4096)
    assert np.all(tr.theta == 0.7)


def test_initial_state_exact():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 50.0))
    st0 = tr.states[0]
    assert (st0.s, st0.theta, st0.theta1, st0.theta2) == (0.0, 1.0, -2.0, 0.0)
    assert np.all(np.diff(tr.s) > 0)


@given(psi=psi_st, alpha=st.floats(-3, 3))
@settings(max_examples=30, deadline=None)
def test_linear_solution_property(psi, alpha):
    tr = integrate_ivp(IvpParams(psi, alpha, 0.0), 256, estimate_error=False)
    end = tr.s[-1]
    assert tr.theta[-1] == pytest.approx(psi + alpha * end, abs=1e-12)
    if tr.band_exit is None:
        assert np.max(np.abs(tr.theta)) < math.pi / 2
    else:
        assert abs(tr.theta[-1]) == pytest.approx(math.pi / 2, abs=1e-9)


def test_endpoint_against_reference():
    p = IvpParams(1.0, -2.0, 50.0)
    assert error_vs_reference(p, 8192) < 1e-9


def test_richardson_estimate_small():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 50.0), 8192)
    assert 0 <= tr.error_estimate < 1e-9


def test_band_exit_located():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 100.0), 4096)
    assert tr.band_exit == pytest.approx(0.5057, abs=1e-3)
    assert abs(tr.theta[-1]) == pytest.approx(math.pi / 2, abs=1e-8)
    assert np.max(np.abs(tr.theta[:-1])) < math.pi / 2
    # exit point is within one step of the last grid sample
    assert 0 < tr.band_exit - tr.s[-2] <= tr.step


def test_order_ratio():
    assert 12 <= step_halving_ratio(IvpParams(1.0, -2.0, 100.0), 256) <= 20


def test_reference_linear():
    ref = reference_solution(IvpParams(0.4, -0.8, 0.0))
    np.testing.assert_allclose(ref.theta, 0.4 - 0.8 * ref.s, rtol=0, atol=2 ** 17 * EPS)


def test_evaluate_at_samples_verbatim():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 10.0), 512)
    for k in (0, 17, 511, 512):
        assert evaluate_at(tr, tr.s[k]) == tr.state(k)


def test_evaluate_at_linear_exact():
    tr = linear_trajectory(0.7, -1.4, 4096)
    assert evaluate_at(tr, 0.37).theta == pytest.approx(0.7 - 0.37 * 1.4, rel=0, abs=4 * EPS)
    tr = integrate_ivp(IvpParams(0.7, -1.4, 0.0), 4096)
    assert evaluate_at(tr, 0.37).theta == pytest.approx(0.7 - 0.37 * 1.4, rel=0, abs=4096 * EPS)


def test_evaluate_at_out_of_range():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 100.0), 1024)
    with pytest.raises(DomainError):
        evaluate_at(tr, 0.9)
    with pytest.raises(DomainError):
        evaluate_at(tr, -1e-3)


def test_dense_output_accuracy():
    coarse = integrate_ivp(IvpParams(1.0, -2.0, 10.0), 512)
    fine = integrate_ivp(IvpParams(1.0, -2.0, 10.0), 8192)
    pts = np.linspace(0.001, 0.999, 37)
    np.testing.assert_allclose(evaluate_many(coarse, pts), evaluate_many(fine, pts), atol=1e-8)


def test_integral_representation():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 10.0), 8192)
    assert verify_integral_representation(tr, 1e-6)
    tr0 = integrate_ivp(IvpParams(0.7, -1.4, 0.0), 4096)
    assert np.all(integral_representation_residuals(tr0) < 4096 * EPS)


def test_integral_representation_truncated():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 100.0), 8192)
    assert tr.band_exit is not None
    assert verify_integral_representation(tr, 1e-6)


def test_continuity_in_parameters():
    base = integrate_ivp(IvpParams(1.0, -2.0, 10.0), 2048).y[:, -1]
    diffs = [np.max(np.abs(integrate_ivp(IvpParams(1.0, -2.0 + d, 10.0 + d), 2048).y[:, -1] - base))
             for d in (1e-2, 1e-3, 1e-4)]
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < 1e-2


@pytest.mark.parametrize("bad", [
    IvpParams(0.0, 1.0, 1.0), IvpParams(math.pi / 2, 1.0, 1.0), IvpParams(0.5, math.nan, 1.0),
    IvpParams(0.5, 1.0, math.inf),
])
def test_invalid_params(bad):
    with pytest.raises(DomainError):
        integrate_ivp(bad)


def test_steps_too_small():
    with pytest.raises(DomainError):
        integrate_ivp(IvpParams(0.5, 0.0, 1.0), 1)


def test_blowup_is_reported():
    # a huge speed with few steps overflows before the band test can fire
    with pytest.raises(IntegrationBlowupError):
        integrate_ivp(IvpParams(1.0, 1e308, 1e308), 2)


def test_trajectory_immutable():
    tr = integrate_ivp(IvpParams(1.0, -2.0, 1.0), 64)
    with pytest.raises(ValueError):
        tr.y[0, 0] = 3.0
