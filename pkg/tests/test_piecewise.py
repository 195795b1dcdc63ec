import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from ricalc.piecewise import CONST, LOG, POW, PiecewiseExpr, Term, normalize_terms

coef = st.floats(-3.0, 3.0).filter(lambda c: abs(c) > 1e-3)


@st.composite
def exprs(draw, kinds=(CONST, POW, LOG)):
    k = draw(st.integers(1, 3))
    knots = np.cumsum(draw(st.lists(st.floats(0.1, 3.0), min_size=k, max_size=k))).tolist()
    terms = []
    for _ in range(k):
        ts = []
        for _ in range(draw(st.integers(1, 3))):
            kind = draw(st.sampled_from(kinds))
            beta = draw(st.sampled_from([-0.5, 0.5, 1.0, 2.0])) if kind == POW else 0.0
            ts.append(Term(draw(coef), kind, beta))
        terms.append(ts)
    terms.append([Term(draw(coef), POW, -2.0)])
    return PiecewiseExpr(knots, terms)


def test_normalisation():
    ts = normalize_terms([Term(1, POW, 0.0), Term(2, CONST), Term(1, LOG), Term(-1, LOG)])
    assert ts == (Term(3.0, CONST),)


def test_merges_identical_segments():
    e = PiecewiseExpr([1.0, 2.0], [[Term(1, CONST)], [Term(1, CONST)], []])
    assert e.knots == (2.0,)


def test_eval_right_continuous():
    e = PiecewiseExpr([1.0], [[Term(2, CONST)], [Term(1, POW, -1.0)]])
    assert e(1.0) == 1.0
    assert e.limit(1.0, "left") == 2.0


def test_one_minus_log_integral():
    e = PiecewiseExpr([1.0], [[Term(1, CONST), Term(-1, LOG)], []])
    assert e.integrate(0, 1) == pytest.approx(2.0, rel=1e-14)


def test_divergence_is_signed_inf():
    assert PiecewiseExpr.power(-1.0).integrate(1.0, math.inf) == math.inf
    assert PiecewiseExpr.power(-1.0, -2.0).integrate(0.0, 1.0) == -math.inf


@given(exprs())
def test_integral_matches_quad(e):
    # quadrature oracle on each finite segment plus the decaying tail
    total = 0.0
    for a, b, _ in e.segments():
        val, _ = quad(lambda t: float(e(t)), a, b, limit=200, epsabs=1e-13, epsrel=1e-11)
        total += val
    got = e.integrate(0.0, math.inf)
    assert got == pytest.approx(total, rel=1e-7, abs=1e-8)


@given(exprs())
def test_sup_matches_dense_scan(e):
    ts = np.concatenate([np.geomspace(1e-6, 1e4, 20001), np.array(e.knots)])
    # the supremum may be a left limit at a knot
    scan = max(float(np.max(e(ts))), *(e.limit(k, "left") for k in e.knots))
    assert e.sup() >= scan - 1e-9 * max(1.0, abs(scan))
    assert e.sup() <= scan + 1e-3 * max(1.0, abs(scan)) or e.sup() == math.inf


@given(exprs(kinds=(CONST, POW)))
def test_head_average_matches_quad(e):
    h = e.head_average()
    for t in (0.3, 1.7, 5.0):
        val, _ = quad(lambda s: float(e(s)), 0, t, points=[k for k in e.knots if k < t], limit=200)
        assert h(t) == pytest.approx(val / t, rel=1e-8, abs=1e-10)


@given(exprs(kinds=(CONST, POW)))
def test_tail_log_integral_matches_quad(e):
    h = e.tail_log_integral()
    for t in (0.3, 1.7, 5.0):
        pts = [k for k in e.knots if k > t]
        val = quad(lambda s: float(e(s)) / s, t, max(pts + [t]) + 1, points=pts or None, limit=200)[0]
        val += quad(lambda s: float(e(s)) / s, max(pts + [t]) + 1, math.inf)[0]
        assert h(t) == pytest.approx(val, rel=1e-8, abs=1e-10)


@given(exprs())
def test_json_roundtrip(e):
    assert PiecewiseExpr.from_json(e.to_json()) == e


def test_arithmetic():
    a = PiecewiseExpr([1.0], [[Term(1, CONST)], [Term(1, POW, -1.0)]])
    b = PiecewiseExpr([2.0], [[Term(1, LOG)], []])
    s = a - b + b
    for t in (0.5, 1.5, 3.0):
        assert s(t) == pytest.approx(a(t), abs=1e-15)
    assert a.mul_power(2.0)(3.0) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        b.mul_power(1.0)
