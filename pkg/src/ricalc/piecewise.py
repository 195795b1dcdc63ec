"""Closed-form piecewise expressions on (0, inf).

A :class:`PiecewiseExpr` is a finite list of segments ``[a, b)`` covering
``(0, inf)``.  On each segment the value is a finite sum of terms drawn from
three kinds: a constant, a power ``c * t**beta`` and a logarithm
``c * log t``.  The class is closed under the averaging operators applied to
step functions, so every operator image in this package is exact.

The module also knows the asymptotic form of an expression near ``0`` and
near ``inf``; the Lorentz-Zygmund code uses it to decide finiteness without
quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

CONST = "const"
POW = "pow"
LOG = "log"
_KINDS = (CONST, POW, LOG)

_EXP_TOL = 1e-12


@dataclass(frozen=True)
class Term:
    c: float
    kind: str
    beta: float = 0.0

    def key(self) -> tuple[str, float]:
        return (self.kind, self.beta if self.kind == POW else 0.0)

    def value(self, t):
        if self.kind == CONST:
            return self.c * np.ones_like(np.asarray(t, dtype=float))
        if self.kind == POW:
            return self.c * np.power(t, self.beta)
        return self.c * np.log(t)

    def to_json(self) -> dict:
        return {"c": self.c, "kind": self.kind, "beta": self.beta}

    @staticmethod
    def from_json(obj: dict) -> "Term":
        kind = obj["kind"]
        if kind not in _KINDS:
            raise ValueError(f"unknown term kind {kind!r}")
        return Term(float(obj["c"]), kind, float(obj.get("beta", 0.0)))


def normalize_terms(terms: Iterable[Term]) -> tuple[Term, ...]:
    """Merge like terms, turn ``t**0`` into a constant and drop zeros."""
    acc: dict[tuple[str, float], float] = {}
    for term in terms:
        kind, beta = term.kind, term.beta
        if kind == POW and beta == 0.0:
            kind = CONST
        if kind != POW:
            beta = 0.0
        acc[(kind, beta)] = acc.get((kind, beta), 0.0) + term.c
    out = [Term(c, k, b) for (k, b), c in acc.items() if c != 0.0]
    out.sort(key=lambda tm: (_KINDS.index(tm.kind), tm.beta))
    return tuple(out)


def eval_terms(terms: Sequence[Term], t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for term in terms:
        out = out + term.value(t)
    return out


def log_eval_terms(terms: Sequence[Term], u: float) -> float:
    """``log g(e**u)`` computed without overflow; ``-inf`` where ``g <= 0``."""
    logs = []
    signs = []
    for term in terms:
        if term.kind == CONST:
            lg = math.log(abs(term.c))
            sg = 1.0 if term.c > 0 else -1.0
        elif term.kind == POW:
            lg = math.log(abs(term.c)) + term.beta * u
            sg = 1.0 if term.c > 0 else -1.0
        else:
            if u == 0.0:
                continue
            lg = math.log(abs(term.c)) + math.log(abs(u))
            sg = (1.0 if term.c > 0 else -1.0) * (1.0 if u > 0 else -1.0)
        logs.append(lg)
        signs.append(sg)
    if not logs:
        return -math.inf
    top = max(logs)
    total = sum(s * math.exp(lg - top) for s, lg in zip(signs, logs))
    if total <= 0.0:
        return -math.inf
    return top + math.log(total)


@dataclass(frozen=True)
class Asymptote:
    """Leading behaviour ``coef * t**power * |log t|**logpow`` at an end.

    ``coef == 0`` means the expression vanishes identically near that end.
    """

    coef: float
    power: float
    logpow: int


def _dominant(terms: Sequence[Term], at_zero: bool) -> Asymptote:
    if not terms:
        return Asymptote(0.0, 0.0, 0)
    pows = [tm for tm in terms if tm.kind == POW]
    const = sum(tm.c for tm in terms if tm.kind == CONST)
    logc = sum(tm.c for tm in terms if tm.kind == LOG)
    if at_zero:
        neg = [tm for tm in pows if tm.beta < 0]
        if neg:
            tm = min(neg, key=lambda x: x.beta)
            return Asymptote(tm.c, tm.beta, 0)
        if logc != 0.0:
            # log t -> -inf, so the leading coefficient in |log t| flips sign
            return Asymptote(-logc, 0.0, 1)
        if const != 0.0:
            return Asymptote(const, 0.0, 0)
        pos = [tm for tm in pows if tm.beta > 0]
        tm = min(pos, key=lambda x: x.beta)
        return Asymptote(tm.c, tm.beta, 0)
    pos = [tm for tm in pows if tm.beta > 0]
    if pos:
        tm = max(pos, key=lambda x: x.beta)
        return Asymptote(tm.c, tm.beta, 0)
    if logc != 0.0:
        return Asymptote(logc, 0.0, 1)
    if const != 0.0:
        return Asymptote(const, 0.0, 0)
    neg = [tm for tm in pows if tm.beta < 0]
    tm = max(neg, key=lambda x: x.beta)
    return Asymptote(tm.c, tm.beta, 0)


def _antiderivative_value(term: Term, t: float) -> float:
    """Antiderivative of one term at a finite positive ``t``."""
    if term.kind == CONST:
        return term.c * t
    if term.kind == POW:
        if term.beta == -1.0:
            return term.c * math.log(t)
        return term.c * t ** (term.beta + 1.0) / (term.beta + 1.0)
    return term.c * (t * math.log(t) - t)


def _segment_integral(terms: Sequence[Term], lo: float, hi: float) -> float:
    if hi <= lo or not terms:
        return 0.0
    if hi == math.inf:
        asym = _dominant(terms, at_zero=False)
        # integrable at infinity only when every term decays faster than 1/t
        if any(not (tm.kind == POW and tm.beta < -1.0) for tm in terms):
            return math.copysign(math.inf, asym.coef)
        upper = 0.0
    else:
        upper = sum(_antiderivative_value(tm, hi) for tm in terms)
    if lo == 0.0:
        bad = [tm for tm in terms if tm.kind == POW and tm.beta <= -1.0]
        if bad:
            return math.copysign(math.inf, _dominant(terms, at_zero=True).coef)
        lower = 0.0
    else:
        lower = sum(_antiderivative_value(tm, lo) for tm in terms)
    return upper - lower


def _stationary_points(terms: Sequence[Term], lo: float, hi: float) -> list[float]:
    """Zeros of the derivative inside ``(lo, hi)``.

    Closed forms cover one or two non-constant terms; anything richer falls
    back to a sign-change scan on a logarithmic grid refined by bisection.
    """
    active = [tm for tm in terms if tm.kind != CONST]
    if len(active) <= 1:
        return []
    pts: list[float] = []
    if len(active) == 2:
        a, b = active
        # derivative: da*t**(ea-1) + db*t**(eb-1)
        def dcoef(tm):
            return (tm.c * tm.beta, tm.beta) if tm.kind == POW else (tm.c, 0.0)

        (ca, ea), (cb, eb) = dcoef(a), dcoef(b)
        if ea != eb and ca != 0.0 and cb != 0.0 and -ca / cb > 0:
            t = (-ca / cb) ** (1.0 / (eb - ea))
            if lo < t < hi:
                pts.append(t)
        return pts
    hi_f = hi if hi < math.inf else max(lo, 1.0) * 1e12
    lo_f = lo if lo > 0 else min(hi_f, 1.0) * 1e-12
    grid = np.geomspace(lo_f, hi_f, 400)

    def deriv(t):
        s = 0.0
        for tm in active:
            if tm.kind == POW:
                s += tm.c * tm.beta * t ** (tm.beta - 1.0)
            else:
                s += tm.c / t
        return s

    vals = [deriv(float(x)) for x in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            pts.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            x0, x1 = float(grid[i]), float(grid[i + 1])
            for _ in range(100):
                xm = math.sqrt(x0 * x1)
                if deriv(x0) * deriv(xm) <= 0:
                    x1 = xm
                else:
                    x0 = xm
            pts.append(math.sqrt(x0 * x1))
    return [p for p in pts if lo < p < hi]


class PiecewiseExpr:
    """Exact piecewise function on ``(0, inf)``.

    ``knots`` are the interior breakpoints; segment ``i`` is
    ``[knots[i-1], knots[i])`` with ``knots[-1] = 0`` and a final segment
    reaching to ``inf``.  Evaluation is right-continuous.
    """

    __slots__ = ("knots", "terms")

    def __init__(self, knots: Sequence[float], terms: Sequence[Sequence[Term]]):
        knots = [float(k) for k in knots]
        if len(terms) != len(knots) + 1:
            raise ValueError("need one term list per segment")
        if any(k <= 0 or not math.isfinite(k) for k in knots):
            raise ValueError("knots must be finite and positive")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must be strictly increasing")
        norm = [normalize_terms(ts) for ts in terms]
        # merge neighbours with identical term lists
        mk: list[float] = []
        mt: list[tuple[Term, ...]] = [norm[0]]
        for k, ts in zip(knots, norm[1:]):
            if ts == mt[-1]:
                continue
            mk.append(k)
            mt.append(ts)
        self.knots = tuple(mk)
        self.terms = tuple(mt)

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls) -> "PiecewiseExpr":
        return cls([], [()])

    @classmethod
    def from_step(cls, f) -> "PiecewiseExpr":
        terms = [(Term(v, CONST),) for v in f.values] + [()]
        return cls(f.breakpoints, terms)

    @classmethod
    def power(cls, beta: float, c: float = 1.0) -> "PiecewiseExpr":
        return cls([], [(Term(c, POW, beta),)])

    # inspection ---------------------------------------------------------
    @property
    def edges(self) -> tuple[float, ...]:
        return (0.0,) + self.knots + (math.inf,)

    def segments(self):
        e = self.edges
        for i, ts in enumerate(self.terms):
            yield e[i], e[i + 1], ts

    def __repr__(self) -> str:
        return f"PiecewiseExpr(knots={list(self.knots)}, terms={list(self.terms)})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PiecewiseExpr)
            and self.knots == other.knots
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.knots, self.terms))

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        if np.any(t_arr <= 0):
            raise ValueError("expressions live on (0, inf)")
        idx = np.searchsorted(np.asarray(self.knots), t_arr, side="right")
        out = np.zeros_like(t_arr)
        for i, ts in enumerate(self.terms):
            m = idx == i
            if m.any() and ts:
                out[m] = eval_terms(ts, t_arr[m])
        return float(out[0]) if scalar else out

    def limit(self, t: float, side: str) -> float:
        """One-sided limit at ``t`` (``side`` is ``'left'`` or ``'right'``)."""
        if t == 0.0:
            asym = _dominant(self.terms[0], at_zero=True)
            return _asym_limit(asym, at_zero=True)
        if t == math.inf:
            asym = _dominant(self.terms[-1], at_zero=False)
            return _asym_limit(asym, at_zero=False)
        i = int(np.searchsorted(np.asarray(self.knots), t, side=side))
        return float(eval_terms(self.terms[i], t))

    def limits(self, ts, side: str) -> np.ndarray:
        """Vectorised :meth:`limit` for finite positive ``ts``."""
        ts = np.asarray(ts, dtype=float)
        idx = np.searchsorted(np.asarray(self.knots), ts, side=side)
        out = np.zeros_like(ts)
        for i in np.unique(idx):
            if self.terms[i]:
                m = idx == i
                out[m] = eval_terms(self.terms[i], ts[m])
        return out

    def asymptote(self, at_zero: bool) -> Asymptote:
        return _dominant(self.terms[0] if at_zero else self.terms[-1], at_zero)

    def support_end(self) -> float:
        """Left end of the trailing zero segment (``inf`` if there is none)."""
        if self.terms[-1]:
            return math.inf
        return self.knots[-1] if self.knots else 0.0

    # algebra ------------------------------------------------------------
    def refine(self, points: Iterable[float]) -> list[tuple[float, float, tuple[Term, ...]]]:
        pts = sorted(set(self.knots) | {float(p) for p in points if 0 < p < math.inf})
        edges = [0.0] + pts + [math.inf]
        kn = np.asarray(self.knots)
        out = []
        for a, b in zip(edges, edges[1:]):
            probe = a if a > 0 else 0.0
            i = int(np.searchsorted(kn, probe, side="right"))
            out.append((a, b, self.terms[i]))
        return out

    @classmethod
    def _from_refined(cls, segs) -> "PiecewiseExpr":
        knots = [a for a, _, _ in segs[1:]]
        return cls(knots, [ts for _, _, ts in segs])

    def __add__(self, other) -> "PiecewiseExpr":
        if not isinstance(other, PiecewiseExpr):
            return NotImplemented
        mine = self.refine(other.knots)
        theirs = other.refine(self.knots)
        segs = [(a, b, ta + tb) for (a, b, ta), (_, _, tb) in zip(mine, theirs)]
        return self._from_refined(segs)

    def __neg__(self) -> "PiecewiseExpr":
        return self.scale(-1.0)

    def __sub__(self, other) -> "PiecewiseExpr":
        return self + (-other)

    def scale(self, c: float) -> "PiecewiseExpr":
        return PiecewiseExpr(
            self.knots, [[Term(c * tm.c, tm.kind, tm.beta) for tm in ts] for ts in self.terms]
        )

    def mul_power(self, beta: float) -> "PiecewiseExpr":
        """Multiply by ``t**beta``; log terms must be absent."""
        out = []
        for ts in self.terms:
            row = []
            for tm in ts:
                if tm.kind == LOG:
                    raise ValueError("t**beta * log t is outside the term class")
                base = tm.beta if tm.kind == POW else 0.0
                row.append(Term(tm.c, POW, base + beta))
            out.append(row)
        return PiecewiseExpr(self.knots, out)

    def mul_step(self, f) -> "PiecewiseExpr":
        """Pointwise product with a :class:`~ricalc.stepfn.StepFunction`."""
        segs = self.refine(f.breakpoints)
        out = []
        for a, b, ts in segs:
            v = f.value_on(a, b)
            out.append((a, b, tuple(Term(v * tm.c, tm.kind, tm.beta) for tm in ts)))
        return self._from_refined(out)

    # calculus -----------------------------------------------------------
    def integrate(self, a: float = 0.0, b: float = math.inf) -> float:
        """Exact Lebesgue integral over ``(a, b)``; signed ``inf`` on divergence."""
        total = 0.0
        for lo, hi, ts in self.segments():
            lo2, hi2 = max(lo, a), min(hi, b)
            if hi2 > lo2:
                total += _segment_integral(ts, lo2, hi2)
        return total

    def head_average(self) -> "PiecewiseExpr":
        """``t -> (1/t) * integral_0^t g``.

        Needs ``g`` integrable at 0 and free of ``1/t`` terms so that the
        result stays in the term class.
        """
        out = []
        acc = 0.0  # integral from 0 to the left edge of the segment
        for lo, hi, ts in self.segments():
            row: list[Term] = []
            for tm in ts:
                if tm.kind == CONST:
                    row.append(Term(tm.c, CONST))
                elif tm.kind == POW:
                    if tm.beta == -1.0:
                        raise ValueError("1/t term leaves the term class")
                    row.append(Term(tm.c / (tm.beta + 1.0), POW, tm.beta))
                else:
                    row += [Term(tm.c, LOG), Term(-tm.c, CONST)]
            base = acc - (sum(_antiderivative_value(tm, lo) for tm in ts) if lo > 0 else 0.0)
            if lo == 0.0 and _segment_integral(ts, 0.0, min(hi, 1.0)) in (math.inf, -math.inf):
                raise ValueError("not integrable at 0")
            row.append(Term(base, POW, -1.0))
            out.append(row)
            if hi < math.inf:
                acc += _segment_integral(ts, lo, hi)
        return PiecewiseExpr(self.knots, out)

    def tail_log_integral(self) -> "PiecewiseExpr":
        """``t -> integral_t^inf g(s) ds / s``; log terms are not allowed."""
        segs = list(self.segments())
        tails = [0.0] * len(segs)
        run = 0.0
        for i in range(len(segs) - 1, -1, -1):
            lo, hi, ts = segs[i]
            tails[i] = run
            if lo > 0:
                run += _over_s_integral(ts, lo, hi)
        if not math.isfinite(tails[0]):
            raise ValueError("tail integral diverges")
        out = []
        for (lo, hi, ts), tail in zip(segs, tails):
            row: list[Term] = []
            upper = 0.0
            for tm in ts:
                if tm.kind == LOG:
                    raise ValueError("log(s)/s leaves the term class")
                if tm.kind == CONST:
                    row.append(Term(-tm.c, LOG))
                    if hi < math.inf:
                        upper += tm.c * math.log(hi)
                    else:
                        raise ValueError("tail integral diverges")
                else:
                    if tm.beta == 0.0:
                        raise AssertionError
                    row.append(Term(-tm.c / tm.beta, POW, tm.beta))
                    if hi < math.inf:
                        upper += tm.c * hi**tm.beta / tm.beta
                    elif tm.beta > 0:
                        raise ValueError("tail integral diverges")
            row.append(Term(upper + tail, CONST))
            out.append(row)
        return PiecewiseExpr(self.knots, out)

    # extrema ------------------------------------------------------------
    def critical_points(self, lo: float = 0.0, hi: float = math.inf) -> list[float]:
        """Finite knots and interior stationary points inside ``[lo, hi]``."""
        pts = {k for k in self.knots if lo <= k <= hi}
        for a, b, ts in self.segments():
            a2, b2 = max(a, lo), min(b, hi)
            if b2 > a2:
                pts.update(_stationary_points(ts, a2, b2))
        for x in (lo, hi):
            if 0 < x < math.inf:
                pts.add(x)
        return sorted(pts)

    def sup(self, lo: float = 0.0, hi: float = math.inf) -> float:
        """Supremum over ``(lo, hi)`` using one-sided limits at segment ends."""
        best = -math.inf
        for a, b, ts in self.segments():
            a2, b2 = max(a, lo), min(b, hi)
            if b2 <= a2:
                continue
            cands = []
            cands.append(_terms_limit(ts, a2, at_zero=True))
            cands.append(_terms_limit(ts, b2, at_zero=False))
            for x in _stationary_points(ts, a2, b2):
                cands.append(float(eval_terms(ts, x)))
            best = max(best, max(cands))
        return best

    def is_nonincreasing(self, rtol: float = 1e-10) -> bool:
        pts = self.critical_points()
        probes = []
        for x in pts:
            probes.append(self.limit(x, "left"))
            probes.append(self.limit(x, "right"))
        vals = [self.limit(0.0, "right")] + probes + [self.limit(math.inf, "left")]
        for u, v in zip(vals, vals[1:]):
            if v > u + rtol * max(1.0, abs(u)) and not (u == math.inf):
                return False
        # inside segments the derivative sign is fixed between stationary points
        for a, b, ts in self.segments():
            lo = a if a > 0 else (min(b, 1.0) * 1e-9)
            hi = b if b < math.inf else max(a, 1.0) * 1e9
            xs = [lo] + _stationary_points(ts, lo, hi) + [hi]
            for x0, x1 in zip(xs, xs[1:]):
                xm = math.sqrt(x0 * x1)
                if float(eval_terms(ts, xm)) > float(eval_terms(ts, x0)) + rtol * max(
                    1.0, abs(float(eval_terms(ts, x0)))
                ):
                    return False
        return True

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "segments": [
                {
                    "from": a,
                    "to": "inf" if b == math.inf else b,
                    "terms": [tm.to_json() for tm in ts],
                }
                for a, b, ts in self.segments()
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PiecewiseExpr":
        segs = obj["segments"]
        if not segs or float(segs[0]["from"]) != 0.0:
            raise ValueError("segments must start at 0")
        knots = []
        terms = []
        prev_to = 0.0
        for i, s in enumerate(segs):
            frm = float(s["from"])
            if frm != prev_to:
                raise ValueError("segments must be contiguous")
            to = math.inf if s["to"] in ("inf", math.inf) else float(s["to"])
            if i > 0:
                knots.append(frm)
            terms.append([Term.from_json(t) for t in s["terms"]])
            prev_to = to
        if prev_to != math.inf:
            raise ValueError("segments must reach inf")
        return cls(knots, terms)


def _over_s_integral(ts: Sequence[Term], lo: float, hi: float) -> float:
    """``integral_lo^hi g(s)/s ds`` for a const/pow term list."""
    total = 0.0
    for tm in ts:
        if tm.kind == LOG:
            raise ValueError("log(s)/s leaves the term class")
        beta = tm.beta if tm.kind == POW else 0.0
        if beta == 0.0:
            if hi == math.inf:
                return math.copysign(math.inf, tm.c)
            total += tm.c * math.log(hi / lo)
        else:
            if hi == math.inf and beta > 0:
                return math.copysign(math.inf, tm.c)
            up = 0.0 if hi == math.inf else hi**beta
            total += tm.c * (up - lo**beta) / beta
    return total


def _asym_limit(asym: Asymptote, at_zero: bool) -> float:
    if asym.coef == 0.0:
        return 0.0
    grows = asym.logpow > 0 or (asym.power < 0 if at_zero else asym.power > 0)
    if grows:
        return math.copysign(math.inf, asym.coef)
    if asym.power == 0.0:
        return asym.coef
    return 0.0


def _terms_limit(ts: Sequence[Term], t: float, at_zero: bool) -> float:
    if not ts:
        return 0.0
    if t == 0.0:
        return _asym_limit(_dominant(ts, True), True)
    if t == math.inf:
        return _asym_limit(_dominant(ts, False), False)
    return float(eval_terms(ts, t))
