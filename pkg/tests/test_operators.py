import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from conftest import step_functions
from ricalc.operators import (
    apply_P,
    apply_Q,
    apply_R,
    apply_R_prime,
    apply_S,
    apply_S_alpha,
    apply_T_alpha,
    check_PQ_duality,
    compose_PQ,
    compose_QP,
    max_abs_difference,
)
from ricalc.stepfn import StepFunction, doublestar, rearrange

CHI = StepFunction([1.0], [1.0])
TS = np.array([0.05, 0.5, 0.99, 1.0, 2.0, 7.5])


def _quad_tail(f, t, weight):
    pts = [b for b in f.breakpoints if b > t]
    if not pts:
        return 0.0
    return quad(lambda s: f(s) * weight(s), t, pts[-1], points=pts[:-1] or None, limit=200)[0]


def test_P_indicator():
    assert np.allclose(apply_P(CHI)(TS), np.minimum(1, 1 / TS))


def test_Q_indicator_is_psi():
    want = np.where(TS < 1, np.log(1 / TS), 0.0)
    assert np.allclose(apply_Q(CHI)(TS), want, atol=1e-15)


def test_S_indicator_is_eta():
    want = np.where(TS <= 1, 1 - np.log(TS), 1 / TS)
    got = apply_S(CHI)
    assert np.allclose([got.limit(t, "left") for t in TS], want)


def test_zero_maps_to_zero():
    z = StepFunction.zero()
    for op in (apply_P, apply_Q, apply_S):
        assert op(z)(1.0) == 0.0


@given(step_functions(), step_functions())
def test_PQ_duality(f, g):
    lhs = apply_P(f).mul_step(g).integrate()
    scale = max(1.0, abs(lhs))
    assert check_PQ_duality(f, g) <= 1e-9 * scale


@given(step_functions(allow_zero=False))
def test_S_identities(f):
    s = apply_P(f) + apply_Q(f)
    assert max_abs_difference(s, compose_PQ(f))[1] < 1e-9
    assert max_abs_difference(s, compose_QP(f))[1] < 1e-9
    fs = rearrange(f)
    assert max_abs_difference(apply_S(fs), doublestar(f).tail_log_integral())[1] < 1e-9


@given(step_functions(allow_zero=False), st.sampled_from([1.5, 2.0, 4.0]))
def test_S_alpha_matches_quad(f, alpha):
    e = 1 / alpha - 1
    g = apply_S_alpha(f, alpha)
    for t in (0.2, 1.3, 4.0):
        head = t**e * quad(lambda s: f(s), 0, t, points=[b for b in f.breakpoints if b < t] or None, limit=200)[0]
        tail = _quad_tail(f, t, lambda s: s**e)
        assert g(t) == pytest.approx(head + tail, rel=1e-8, abs=1e-12)


@given(step_functions(allow_zero=False), st.sampled_from([0.25, 0.5, 0.75]))
def test_R_and_R_prime_match_quad(f, r):
    R, Rp = apply_R(f, r), apply_R_prime(f, r)
    for t in (0.2, 1.3, 4.0):
        assert R(t) == pytest.approx(_quad_tail(f, t, lambda s: s ** (r - 1)), rel=1e-8, abs=1e-12)
        head = quad(lambda s: f(s), 0, t, points=[b for b in f.breakpoints if b < t] or None, limit=200)[0]
        assert Rp(t) == pytest.approx(t ** (r - 1) * head, rel=1e-8, abs=1e-12)


@given(step_functions(allow_zero=False), st.sampled_from([1.5, 3.0]))
def test_S_alpha_lower_bounds(g, alpha):
    gss = doublestar(g)
    Sg = apply_S_alpha(rearrange(g), alpha)
    tail = gss.mul_power(1 / alpha - 1)
    for t in (0.1, 1.0, 10.0):
        floor = t ** (1 / alpha) * gss(t)
        # int_t^inf g**(s) s^(1/a - 1) ds dominates (a/(a-1)) t^(1/a) g**(t)
        assert tail.integrate(t, math.inf) >= alpha / (alpha - 1) * floor * (1 - 1e-12)
        assert Sg(t) >= floor * (1 - 1e-12)


@given(step_functions(allow_zero=False), st.sampled_from([1.5, 2.0, 4.0]))
def test_S_alpha_as_weighted_tail_of_P(f, alpha):
    # S_a f(t) = ((a - 1)/a) int_t^inf Pf(s) s^(1/a - 1) ds
    weighted = apply_P(f).mul_power(1 / alpha - 1)
    g = apply_S_alpha(f, alpha)
    for t in (0.3, 1.0, 7.0):
        assert g(t) == pytest.approx((alpha - 1) / alpha * weighted.integrate(t, math.inf), rel=1e-10)


def test_T_alpha_indicator():
    a = 2.5
    for alpha in (0.0, 0.3, 0.5):
        T = apply_T_alpha(StepFunction([a], [1.0]), alpha)
        for t in (0.1, 1.0, 2.4, 3.0):
            want = a**alpha * t ** (-alpha) if t < a else 0.0
            assert T(t) == pytest.approx(want, rel=1e-14)


@given(step_functions(allow_zero=False), st.sampled_from([0.2, 0.5, 0.9]))
def test_T_alpha_brute_force(f, alpha):
    T = apply_T_alpha(f, alpha)
    fs = rearrange(f)
    grid = np.geomspace(1e-3, 40.0, 3000)
    for t in (0.05, 0.7, 3.0):
        s = np.concatenate([[t], grid[grid >= t]])
        brute = t ** (-alpha) * np.max(s**alpha * fs(s))
        assert T(t) >= brute * (1 - 1e-12)
        assert T(t) <= brute * 1.01 + 1e-12


@pytest.mark.parametrize("bad", [0.0, 1.0, 1.5])
def test_parameter_errors(bad):
    with pytest.raises(ValueError):
        apply_R(CHI, bad)
    with pytest.raises(ValueError):
        apply_T_alpha(CHI, bad + 1.0 if bad == 0.0 else bad)
    with pytest.raises(ValueError):
        apply_S_alpha(CHI, 1.0)
