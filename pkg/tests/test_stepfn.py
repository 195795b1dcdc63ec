import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import step_functions
from ricalc.piecewise import PiecewiseExpr
from ricalc.stepfn import (
    StepFunction,
    dilate,
    distribution,
    doublestar,
    hlp_compare,
    integrate,
    partial_integrals,
    rearrange,
)


def chi(a, b, h=1.0):
    return StepFunction.indicator(a, b, h)


class TestCanonicalForm:
    def test_merges_equal_neighbours(self):
        f = StepFunction([1, 2, 3], [1, 1, 2])
        assert f.breakpoints == (2.0, 3.0)
        assert f.values == (1.0, 2.0)

    def test_drops_trailing_zeros(self):
        assert StepFunction([1, 2], [1, 0]) == StepFunction([1], [1])
        assert StepFunction([1], [0]).is_zero()

    @pytest.mark.parametrize(
        "bps, vals",
        [([0, 1], [1, 1]), ([2, 1], [1, 2]), ([1], [-1]), ([1], [math.inf]), ([1, 2], [1])],
    )
    def test_rejects_invalid(self, bps, vals):
        with pytest.raises(ValueError):
            StepFunction(bps, vals)

    def test_right_continuous(self):
        f = StepFunction([1, 2], [3, 1])
        assert f(1.0) == 1.0
        assert f(0.999) == 3.0
        assert f(2.0) == 0.0

    def test_json_roundtrip(self):
        f = StepFunction([0.5, 1.25], [0, 2])
        assert StepFunction.from_json(f.to_json()) == f


class TestRearrange:
    def test_sorts_levels(self):
        f = StepFunction([1, 2, 3], [1, 3, 2])
        assert rearrange(f) == StepFunction([1, 2, 3], [3, 2, 1])

    def test_translation(self):
        assert rearrange(chi(0.5, 1.25, 2.0)) == StepFunction([0.75], [2.0])

    def test_zero(self):
        assert rearrange(StepFunction.zero()).is_zero()

    @given(step_functions())
    def test_idempotent(self, f):
        fs = rearrange(f)
        assert rearrange(fs) == fs

    @given(step_functions())
    def test_equimeasurable(self, f):
        fs = rearrange(f)
        for lam in set(f.values) | {0.0, 0.25, 1.7}:
            assert distribution(fs, lam) == pytest.approx(distribution(f, lam), rel=1e-12, abs=1e-12)

    @given(step_functions())
    def test_nonincreasing(self, f):
        vals = rearrange(f).values
        assert all(a >= b for a, b in zip(vals, vals[1:]))


class TestDoublestar:
    def test_indicator(self):
        g = doublestar(chi(0, 1))
        ts = np.array([0.3, 1.0, 2.0, 10.0])
        assert np.allclose(g(ts), np.minimum(1, 1 / ts))

    def test_two_levels(self):
        # 2 on (0,1), 1 + 1/t on (1,3), 4/t after
        g = doublestar(StepFunction([1, 3], [2, 1]))
        for t, want in [(0.5, 2.0), (2.0, 1.5), (3.5, 4 / 3.5)]:
            assert g(t) == pytest.approx(want, rel=1e-14)

    def test_zero(self):
        assert doublestar(StepFunction.zero())(1.0) == 0.0

    @given(step_functions(allow_zero=False))
    def test_dominates_star_and_decreases(self, f):
        fs = rearrange(f)
        g = doublestar(f)
        ts = np.geomspace(1e-3, 100, 200)
        vals = g(ts)
        assert np.all(vals >= fs(ts) - 1e-12)
        assert np.all(np.diff(vals) <= 1e-12)

    @given(step_functions(), step_functions())
    def test_subadditive(self, f, g):
        grid = np.union1d(np.union1d(rearrange(f + g).breakpoints, rearrange(f).breakpoints), rearrange(g).breakpoints)
        if grid.size:
            lhs = partial_integrals(f + g, grid)
            rhs = partial_integrals(f, grid) + partial_integrals(g, grid)
            assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-12)


class TestDilateDistribution:
    def test_dilate(self):
        assert dilate(chi(0, 1), 2) == chi(0, 0.5)
        f = StepFunction([1, 2], [3, 1])
        assert dilate(f, 1) == f
        with pytest.raises(ValueError):
            dilate(f, 0)

    def test_distribution(self):
        assert distribution(chi(0, 1), 0.5) == 1.0
        assert distribution(chi(0, 1), 1.0) == 0.0
        assert distribution(StepFunction([1, 4], [3, 1]), 0.5) == 4.0


class TestIntegrate:
    def test_one_minus_log(self):
        from ricalc.optimal import eta_profile

        assert integrate(eta_profile(), 0.0, 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_indicator(self):
        assert integrate(chi(0, 1)) == 1.0

    def test_divergent(self):
        g = PiecewiseExpr.power(-1.0)
        assert integrate(g, 1.0, math.inf) == math.inf


class TestHLP:
    def test_examples(self):
        f = StepFunction([1, 2], [3, 1])
        assert hlp_compare(f, f).holds
        assert hlp_compare(chi(0, 2), chi(0, 1, 2.0)).holds
        res = hlp_compare(chi(0, 1, 2.0), chi(0, 2))
        assert not res.holds and res.first_violation == 1.0

    @given(step_functions(), step_functions())
    def test_hardy_littlewood(self, f, g):
        assert f.product_integral(g) <= rearrange(f).product_integral(rearrange(g)) * (1 + 1e-12) + 1e-12

    @given(step_functions(allow_zero=False), st.integers(1, 4), st.randoms(use_true_random=False))
    def test_averaging_is_majorized(self, g, parts, rnd):
        gs = rearrange(g)
        segs = list(gs.segments())
        cuts = sorted({rnd.randint(1, len(segs)) for _ in range(parts)} | {len(segs)})
        lens, vals, lo = [], [], 0
        for c in cuts:
            part = segs[lo:c]
            if part:
                w = part[-1][1] - part[0][0]
                lens.append(w)
                vals.append(sum((b - a) * v for a, b, v in part) / w)
            lo = c
        order = list(range(len(lens)))
        rnd.shuffle(order)
        f = StepFunction.from_levels([lens[i] for i in order], [vals[i] for i in order])
        assert hlp_compare(f, g, rtol=1e-12).holds
