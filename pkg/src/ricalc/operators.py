"""Averaging operators on step functions with exact closed-form images.

Every operator here returns a :class:`PiecewiseExpr`.  The two building
blocks are

* ``power_head(f, e)``: ``t -> t**e * int_0^t f``
* ``power_tail(f, e)``: ``t -> int_t^inf f(s) s**e ds``

and the named operators are thin combinations of them.
"""

from __future__ import annotations

import math

import numpy as np

from .piecewise import CONST, LOG, POW, PiecewiseExpr, Term
from .stepfn import StepFunction, rearrange


def power_head(f: StepFunction, e: float) -> PiecewiseExpr:
    terms = []
    run = 0.0
    lo = 0.0
    for b, v in zip(f.breakpoints, f.values):
        # int_0^t f = run + v (t - lo) on this segment
        terms.append((Term(v, POW, e + 1.0), Term(run - v * lo, POW, e)))
        run += v * (b - lo)
        lo = b
    terms.append((Term(run, POW, e),))
    return PiecewiseExpr(f.breakpoints, terms)


def power_tail(f: StepFunction, e: float) -> PiecewiseExpr:
    """``t -> int_t^inf f(s) s**e ds``; ``e = -1`` gives logarithms."""
    segs = list(f.segments())
    tails = [0.0] * len(segs)
    run = 0.0
    for i in range(len(segs) - 1, -1, -1):
        lo, hi, v = segs[i]
        tails[i] = run
        if e == -1.0:
            if v > 0:
                if lo == 0.0:
                    run = math.inf
                else:
                    run += v * math.log(hi / lo)
        else:
            k = e + 1.0
            if v > 0:
                if lo == 0.0 and k < 0:
                    run = math.inf
                else:
                    run += v * (hi**k - lo**k) / k
    terms = []
    for (lo, hi, v), tail in zip(segs, tails):
        if e == -1.0:
            terms.append((Term(-v, LOG), Term(v * math.log(hi) + tail, CONST)))
        else:
            k = e + 1.0
            terms.append((Term(-v / k, POW, k), Term(v * hi**k / k + tail, CONST)))
    terms.append(())
    return PiecewiseExpr(f.breakpoints, terms)


def apply_P(f: StepFunction) -> PiecewiseExpr:
    """Hardy average ``(1/t) int_0^t f``."""
    return power_head(f, -1.0)


def apply_Q(f: StepFunction) -> PiecewiseExpr:
    """Dual Hardy operator ``int_t^inf f(s) ds/s``."""
    return power_tail(f, -1.0)


def apply_S(f: StepFunction) -> PiecewiseExpr:
    """Calderon operator ``P + Q``."""
    return apply_P(f) + apply_Q(f)


def apply_S_alpha(f: StepFunction, alpha: float) -> PiecewiseExpr:
    """``t**(1/alpha - 1) int_0^t f + int_t^inf f(s) s**(1/alpha - 1) ds``.

    ``alpha > 1``; in the Riesz setting ``alpha = n / gamma``.
    """
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")
    e = 1.0 / alpha - 1.0
    return power_head(f, e) + power_tail(f, e)


def apply_T_alpha(f: StepFunction, alpha: float) -> PiecewiseExpr:
    """``t -> t**(-alpha) sup_{s >= t} s**alpha f*(s)`` with ``0 <= alpha < 1``."""
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    fs = rearrange(f)
    peaks = [b**alpha * v for b, v in zip(fs.breakpoints, fs.values)]
    suffix = []
    best = 0.0
    for p in reversed(peaks):
        best = max(best, p)
        suffix.append(best)
    suffix.reverse()
    terms = [(Term(m, POW, -alpha),) for m in suffix] + [()]
    return PiecewiseExpr(fs.breakpoints, terms)


def apply_R(g: StepFunction, gamma_over_n: float) -> PiecewiseExpr:
    """``t -> int_t^inf g(s) s**(gamma/n - 1) ds`` for ``0 < gamma/n < 1``."""
    _check_ratio(gamma_over_n)
    return power_tail(g, gamma_over_n - 1.0)


def apply_R_prime(g: StepFunction, gamma_over_n: float) -> PiecewiseExpr:
    """``t -> t**(gamma/n - 1) int_0^t g`` for ``0 < gamma/n < 1``."""
    _check_ratio(gamma_over_n)
    return power_head(g, gamma_over_n - 1.0)


def _check_ratio(r: float) -> None:
    if not 0 < r < 1:
        raise ValueError("gamma/n must lie in (0, 1)")


def check_PQ_duality(f: StepFunction, g: StepFunction) -> float:
    """Absolute defect ``|int (Pf) g - int f (Qg)|``."""
    lhs = apply_P(f).mul_step(g).integrate()
    rhs = apply_Q(g).mul_step(f).integrate()
    return abs(lhs - rhs)


def pq_duality_sides(f: StepFunction, g: StepFunction) -> tuple[float, float]:
    return apply_P(f).mul_step(g).integrate(), apply_Q(g).mul_step(f).integrate()


def compose_PQ(f: StepFunction) -> PiecewiseExpr:
    """``P(Qf)`` in closed form."""
    return apply_Q(f).head_average()


def compose_QP(f: StepFunction) -> PiecewiseExpr:
    """``Q(Pf)`` in closed form."""
    return apply_P(f).tail_log_integral()


def max_abs_difference(a: PiecewiseExpr, b: PiecewiseExpr) -> tuple[float, float]:
    """Largest absolute and relative gaps between two expressions.

    Sampled at every knot (both sides), at stationary points of the
    difference and at a logarithmic probe grid spanning the knots.
    """
    diff = a - b
    pts = set(diff.critical_points())
    knots = list(a.knots) + list(b.knots)
    lo = min(knots, default=1.0)
    hi = max(knots, default=1.0)
    pts.update(np.geomspace(lo * 1e-3, hi * 1e3, 97).tolist())
    xs = sorted(pts)
    ends = [x for x in xs if x == 0.0 or x == math.inf]
    inner = np.array([x for x in xs if 0.0 < x < math.inf])
    worst_abs = 0.0
    worst_rel = 0.0
    for side in ("left", "right"):
        da = np.concatenate([a.limits(inner, side), [a.limit(x, side) for x in ends]])
        db = np.concatenate([b.limits(inner, side), [b.limit(x, side) for x in ends]])
        with np.errstate(invalid="ignore"):
            gap = np.abs(da - db)
            # equal infinite limits count as agreement
            gap = np.where(da == db, 0.0, gap)
        if gap.size:
            worst_abs = max(worst_abs, float(gap.max()))
            worst_rel = max(worst_rel, float((gap / np.maximum(np.maximum(np.abs(da), np.abs(db)), 1e-300)).max()))
    return worst_abs, worst_rel
