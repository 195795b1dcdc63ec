import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import nonincreasing_step, step_functions
from ricalc.lzspaces import INF, LZParams, lz_value
from ricalc.optimal import (
    ClassicalOperator,
    QuasiConcave,
    T_boundedness_predicate,
    eta_condition,
    frac_domain_condition,
    frac_fund_condition,
    frac_range_norm_simple,
    frac_range_norm_sup_estimate,
    hilbert_range_norm,
    lemma_lenka_check,
    lemma_unsup_check,
    lenka_equivalence_check,
    lenka_ratio,
    maximal_domain_condition,
    maximal_domain_norm,
    maximal_range_norm,
    numeric_T_bounded,
    optimal_partner_lookup,
    psi_condition,
    riesz_range_norm,
    staircase,
    xi_condition,
)
from ricalc.stepfn import StepFunction

CHI = StepFunction([1.0], [1.0])
M = ClassicalOperator("M")


class TestRangeFunctionals:
    def test_maximal_range_on_indicator(self):
        assert maximal_range_norm(CHI, LZParams(1, 1)) == INF
        assert maximal_range_norm(StepFunction.zero(), LZParams(1, 1)) == 0.0

    def test_maximal_range_log_weighted(self):
        # X' = L^(inf,inf;[-1,0]): sup_t (1 - log t)^-1 int_t^1 ds/s, approached as t -> 0
        f = StepFunction([1.0, 3.0], [2.0, 0.5])
        got = maximal_range_norm(f, LZParams(1, 1, (1, 0)))
        ts = np.geomspace(1e-300, 3.0, 20000)
        Qf = np.where(ts < 1, 2 * np.log(1 / ts) + 0.5 * np.log(3), np.where(ts < 3, 0.5 * np.log(3 / ts), 0))
        scan = float(np.max(Qf / np.where(ts < 1, 1 - np.log(ts), 1.0)))
        assert got == pytest.approx(max(scan, 2.0), rel=1e-6)

    def test_maximal_domain(self):
        assert maximal_domain_norm(CHI, LZParams(2, 2)) == pytest.approx(math.sqrt(2.0))
        assert maximal_domain_norm(CHI, LZParams(1, 1)) == INF

    def test_fractional_simple(self):
        for gamma in (0.25, 0.5):
            # sup of (n/gamma)(1 - t^(gamma/n)) is n/gamma, approached at t -> 0... from the constant head
            assert frac_range_norm_simple(CHI, LZParams(1, 1), gamma, 1) == pytest.approx(1 / gamma, rel=1e-9)

    @given(step_functions(allow_zero=False), st.sampled_from([0.25, 0.5]))
    def test_fractional_simple_L1_is_lorentz(self, f, gamma):
        # with X = L^1 the functional is the L^(n/gamma, 1) star functional
        got = frac_range_norm_simple(f, LZParams(1, 1), gamma, 1)
        want = lz_value(f, LZParams(1 / gamma, 1))
        assert got == pytest.approx(want, rel=1e-8)

    def test_hilbert_range(self):
        assert hilbert_range_norm(CHI, LZParams(1, 1)) == INF
        assert hilbert_range_norm(CHI, LZParams(2, 2)) == pytest.approx(math.sqrt(6.0), rel=1e-9)

    def test_riesz_range_matches_closed_form(self):
        import mpmath as mp

        f = StepFunction([1.0, 2.0], [2.0, 1.0])
        primitive = lambda t: 2 * t if t < 1 else (t + 1 if t < 2 else 3)

        def tail(t):
            if t < 1:
                return 4 * (1 - mp.sqrt(t)) + 2 * (mp.sqrt(2) - 1)
            return 2 * (mp.sqrt(2) - mp.sqrt(t)) if t < 2 else 0

        S = lambda t: t**-0.5 * primitive(t) + tail(t)
        want = float(mp.quad(lambda t: S(t) ** 3, [0, 1, 2, mp.inf]) ** (mp.mpf(1) / 3))
        assert riesz_range_norm(f, LZParams(1.5, 1.5), 0.5, 1) == pytest.approx(want, rel=1e-9)

    def test_riesz_range_infinite_when_head_escapes(self):
        # t^(-1/2) int_0^t f* is not square integrable at infinity
        assert riesz_range_norm(CHI, LZParams(2, 2), 0.5, 1) == INF


class TestConditions:
    def test_psi(self):
        assert psi_condition(LZParams(1, 1, (1, 0))) is True
        assert psi_condition(LZParams(1, 1)) is False
        assert psi_condition(LZParams(1, 2)) is None

    def test_eta(self):
        assert eta_condition(LZParams(2, 2)) is True
        assert eta_condition(LZParams(1, 1)) is False

    @pytest.mark.parametrize("p, q", [(1.5, 1), (1.5, 2), (1.9, INF)])
    def test_xi_for_subcritical(self, p, q):
        assert xi_condition(LZParams(p, q), 2.0) is True

    def test_xi_fails_at_critical(self):
        assert xi_condition(LZParams(2, 2), 2.0) is False

    def test_fund(self):
        assert frac_fund_condition(LZParams(2, INF), 0.5, 1)
        assert not frac_fund_condition(LZParams(INF, INF), 0.5, 1)
        assert frac_fund_condition(LZParams(1.5, 3), 0.5, 1)
        assert frac_fund_condition(LZParams(2, 2, (0, 1)), 0.5, 1)
        assert not frac_fund_condition(LZParams(2, 2, (0, -1)), 0.5, 1)

    def test_domain_conditions(self):
        assert maximal_domain_condition(LZParams(2, 2))
        assert not maximal_domain_condition(LZParams(1, 1))
        assert frac_domain_condition(LZParams(2, 2), 0.25, 1)
        assert not frac_domain_condition(LZParams(1, 1), 0.5, 1)


class TestLookup:
    @pytest.mark.parametrize("X", [LZParams(2, 2), LZParams(3, 1, (1, -1)), LZParams(1.5, INF, (0, 2))])
    def test_maximal_reflexive_range(self, X):
        res = optimal_partner_lookup(M, X)
        assert res.kind == "lz" and res.params == X

    def test_maximal_log_case(self):
        res = optimal_partner_lookup(M, LZParams(1, 1, (1, -2)))
        assert res.params == LZParams(1, 1, (0, -3))

    def test_maximal_L1_none(self):
        assert optimal_partner_lookup(M, LZParams(1, 1)).kind == "none"

    def test_riesz_subcritical(self):
        res = optimal_partner_lookup(ClassicalOperator("I", 1.0, 2), LZParams(1.5, 2, (0.5, 1)))
        assert res.params == LZParams(6, 2, (0.5, 1))

    def test_fractional_subcritical(self):
        res = optimal_partner_lookup(ClassicalOperator("Mgamma", 0.5, 1), LZParams(1.5, 3))
        assert res.params == LZParams(6, 3)

    def test_untabulated(self):
        assert optimal_partner_lookup(M, LZParams(1, 2)).kind == "untabulated"

    def test_domain(self):
        res = optimal_partner_lookup(M, LZParams(2, 2), "domain")
        assert res.kind == "induced" and res.condition_holds
        assert optimal_partner_lookup(M, LZParams(1, 1), "domain").kind == "none"

    def test_parse_and_json(self):
        op = ClassicalOperator.parse("riesz", 0.5, 1)
        assert op.kind == "I" and op.ratio == 0.5
        js = optimal_partner_lookup(op, LZParams(1.5, 2)).to_json()
        assert js["kind"] == "lz" and js["params"]["p"] == 6.0
        with pytest.raises(ValueError):
            ClassicalOperator("I", 2.0, 1)


class TestTBoundedness:
    def test_documented_cases(self):
        assert T_boundedness_predicate(LZParams(1, 1), 0.5) is True
        assert T_boundedness_predicate(LZParams(2, 2), 0.5) is False
        assert T_boundedness_predicate(LZParams(2, INF), 0.5) is True

    def test_uncertified(self):
        assert T_boundedness_predicate(LZParams(1, 2), 0.5) is None

    @pytest.mark.parametrize(
        "X, alpha",
        [(LZParams(1, 1), 0.5), (LZParams(2, 2), 0.5), (LZParams(3, 2), 0.5), (LZParams(2, INF, (1, 0)), 0.5), (LZParams(INF, INF, (-1, 0)), 0.5)],
    )
    def test_numeric_agrees(self, X, alpha):
        assert numeric_T_bounded(X, alpha).bounded == T_boundedness_predicate(X, alpha)


class TestSupEstimate:
    def test_lower_bound_dominates_simple(self):
        f = StepFunction([1.0, 2.0], [2.0, 1.0])
        est = frac_range_norm_sup_estimate(f, LZParams(1, 1), 0.5, 1, budget=60)
        assert est.lower >= est.simple
        assert est.candidates <= 60

    def test_bounded_case_close_to_simple(self):
        est = frac_range_norm_sup_estimate(CHI, LZParams(1, 1), 0.5, 1, budget=80)
        assert est.lower / est.simple < 2.0

    def test_zero(self):
        assert frac_range_norm_sup_estimate(StepFunction.zero(), LZParams(2, 2), 0.5, 1).lower == 0.0

    def test_indicator_ratio_is_scale_invariant(self):
        # the ratio along chi_(0,a) does not grow, which is why staircases are used as witnesses
        X = LZParams(2, 1)
        rs = []
        for a in (1.0, 10.0, 100.0):
            est = frac_range_norm_sup_estimate(StepFunction([a], [1.0]), X, 0.5, 1, budget=80)
            rs.append(est.lower / est.simple)
        assert max(rs) / min(rs) < 1.01

    def test_staircase_shape(self):
        s = staircase(3)
        assert s.breakpoints == (2.0, 4.0, 8.0)
        assert s.values == (1.0, 0.5, 0.25)

    def test_equivalence_report(self):
        good = lenka_equivalence_check(LZParams(1, 1), 0.5, 1, [CHI], budget=60)
        assert good.predicate is True and good.consistent
        bad = lenka_equivalence_check(LZParams(2, 1), 0.5, 1, [CHI], budget=60)
        assert bad.predicate is False and bad.consistent
        assert bad.witness_ratios[-1] > 1.25 * bad.witness_ratios[0]


class TestUnsup:
    def test_example(self):
        res = lemma_unsup_check(QuasiConcave((1.0,), (1.0,), 1.0), CHI, 1.0)
        assert res.lhs == pytest.approx(1.0) and res.rhs == pytest.approx(0.5) and res.passed

    def test_zero(self):
        res = lemma_unsup_check(QuasiConcave((1.0,), (1.0,), 0.0), StepFunction.zero(), 2.0)
        assert res.lhs == 0.0 and res.rhs == 0.0 and res.passed

    def test_rejects_bad_phi(self):
        with pytest.raises(ValueError):
            QuasiConcave((1.0, 2.0), (1.0, 0.5))
        with pytest.raises(ValueError):
            QuasiConcave((1.0, 2.0), (1.0, 3.0))

    @given(nonincreasing_step(), st.floats(0.1, 10.0), st.lists(st.tuples(st.floats(0.0, 3.0), st.floats(0.1, 3.0)), min_size=0, max_size=3), st.floats(0.1, 3.0))
    def test_against_brute_force(self, f, tau, lines, slope):
        assume(f.breakpoints)
        phi = QuasiConcave.min_of_lines([(slope, 0.0)] + lines)
        res = lemma_unsup_check(phi, f, tau)
        # brute force: fine grid in t for the left side, sampled rearrangement for the right
        end = max(f.breakpoints)
        ts = np.linspace(0, end, 200001)[1:]
        mids = ts - 0.5 * (ts[1] - ts[0])
        prod = phi(mids) * f(mids)
        sup_right = np.maximum.accumulate(prod[::-1])[::-1]
        h = ts[1] - ts[0]
        keep = mids < tau
        lhs = float(np.sum(sup_right[keep]) * h + max(0.0, tau - end) * 0.0)
        rhs = float(np.sum(np.sort(prod)[::-1][: int(min(tau, end) / h)]) * h)
        assert res.lhs == pytest.approx(lhs, rel=2e-3, abs=1e-4)
        assert res.rhs == pytest.approx(rhs, rel=2e-3, abs=1e-4)
        assert res.passed


class TestLenka:
    def test_single_block(self):
        left, right = lenka_ratio([1.0], [1.0], 0.5, LZParams(1, 1))
        assert left == pytest.approx(2.0 / 3.0) and right == pytest.approx(1.0)

    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
    def test_exact_endpoint_ratios(self, beta):
        a, t = [1.0, 2.0, 0.5], [0.3, 1.0, 4.0]
        l1 = lenka_ratio(a, t, beta, LZParams(1, 1))
        linf = lenka_ratio(a, t, beta, LZParams(INF, INF))
        assert l1[0] / l1[1] == pytest.approx(1 / (2 - beta), rel=1e-9)
        assert linf[0] / linf[1] == pytest.approx(1 / (1 - beta), rel=1e-9)

    def test_check_stable(self):
        inst = [([1.0], [1.0], 0.5, LZParams(2, 2)), ([2.0, 1.0], [0.5, 3.0], 0.5, LZParams(2, 2))] * 2
        iv, ok = lemma_lenka_check(inst)
        assert ok and iv.drift == 0.0
