"""Generalized Lorentz-Zygmund functionals.

``rho(f) = || t**(1/p - 1/q) l^A(t) ll^B(t) g(t) ||_{L^q(dt)}`` with ``g``
either ``f*`` (variant ``"star"``) or ``f**`` (variant ``"doublestar"``).
The broken logarithms switch branch at ``t = 1``:

* ``l^A``  = ``(1 - log t)**a0`` on ``(0, 1)``, ``(1 + log t)**a_inf`` after;
* ``ll^B`` = ``(1 + log(1 - log t))**b0`` and ``(1 + log(1 + log t))**b_inf``.

Finiteness is decided from the leading asymptotics of the integrand at both
ends.  Finite values are computed by adaptive quadrature after changing to
``u = log t`` on bounded pieces and to ``v = log(1 -+ u)`` on the two
unbounded ends, where all arithmetic is carried out on logarithms so that
neither ``t**beta`` nor the weights overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize as sp_optimize

from .piecewise import CONST, POW, PiecewiseExpr, Term, _dominant
from .stepfn import StepFunction, doublestar, rearrange

INF = math.inf
_ZERO = 1e-12
_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-11, limit=400)


def parse_number(x) -> float:
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "+inf"):
            return INF
        return float(s)
    return float(x)


def format_number(x: float):
    return "inf" if x == INF else x


def conjugate(p: float) -> float:
    """Hoelder conjugate exponent."""
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


class NotInTable(LookupError):
    """Raised when a parameter triple has no tabulated associate space."""


@dataclass(frozen=True)
class LZParams:
    p: float
    q: float
    A: tuple[float, float] = (0.0, 0.0)
    B: Optional[tuple[float, float]] = None
    variant: str = "star"

    def __post_init__(self):
        object.__setattr__(self, "p", parse_number(self.p))
        object.__setattr__(self, "q", parse_number(self.q))
        object.__setattr__(self, "A", tuple(float(a) for a in self.A))
        if self.B is not None:
            object.__setattr__(self, "B", tuple(float(b) for b in self.B))
        if not (1.0 <= self.p <= INF and 1.0 <= self.q <= INF):
            raise ValueError("p and q must lie in [1, inf]")
        if len(self.A) != 2 or (self.B is not None and len(self.B) != 2):
            raise ValueError("A and B are pairs")
        if self.variant not in ("star", "doublestar"):
            raise ValueError("variant is 'star' or 'doublestar'")

    @property
    def a0(self) -> float:
        return self.A[0]

    @property
    def ainf(self) -> float:
        return self.A[1]

    @property
    def b0(self) -> float:
        return 0.0 if self.B is None else self.B[0]

    @property
    def binf(self) -> float:
        return 0.0 if self.B is None else self.B[1]

    def has_loglog(self) -> bool:
        return self.B is not None and any(b != 0.0 for b in self.B)

    def is_trivial(self) -> bool:
        """``p = inf`` spaces that contain only the zero function."""
        if self.p < INF or self.variant == "doublestar":
            return False
        if self.q == INF:
            return self.a0 > 0 or (self.a0 == 0 and self.b0 > 0)
        s = self.a0 + 1.0 / self.q
        return s > 0 or (s == 0 and self.b0 + 1.0 / self.q >= 0)

    def is_exact_norm(self) -> bool:
        """Whether the functional is itself a rearrangement-invariant norm.

        Holds for the plain ``L^p`` scale and for the ``f**`` variant without
        logarithmic weights; elsewhere the functional is only equivalent to
        a norm (when it is one at all).
        """
        if any(a != 0.0 for a in self.A) or self.has_loglog():
            return False
        if self.variant == "doublestar":
            return True
        return self.p == self.q

    def with_(self, **kw) -> "LZParams":
        d = dict(p=self.p, q=self.q, A=self.A, B=self.B, variant=self.variant)
        d.update(kw)
        return LZParams(**d)

    def to_json(self) -> dict:
        out = {
            "p": format_number(self.p),
            "q": format_number(self.q),
            "A": list(self.A),
            "variant": self.variant,
        }
        if self.B is not None:
            out["B"] = list(self.B)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "LZParams":
        return cls(
            p=obj["p"],
            q=obj["q"],
            A=tuple(obj.get("A", (0.0, 0.0))),
            B=tuple(obj["B"]) if obj.get("B") is not None else None,
            variant=obj.get("variant", "star"),
        )

    def describe(self) -> str:
        def fmt(x):
            return "inf" if x == INF else f"{x:g}"

        s = f"L^({fmt(self.p)},{fmt(self.q)};{fmt(self.a0)},{fmt(self.ainf)}"
        if self.B is not None:
            s += f";{fmt(self.b0)},{fmt(self.binf)}"
        s += ")"
        return s if self.variant == "star" else s.replace("L^(", "L^((") + ")"


# ---------------------------------------------------------------------------
# weights


def broken_log(t, A: Sequence[float]):
    t = np.asarray(t, dtype=float)
    lt = np.log(t)
    return np.where(t < 1, (1.0 - lt) ** A[0], (1.0 + lt) ** A[1])


def broken_loglog(t, B: Sequence[float]):
    t = np.asarray(t, dtype=float)
    lt = np.log(t)
    near = 1.0 + np.log1p(-np.minimum(lt, 0.0))
    far = 1.0 + np.log1p(np.maximum(lt, 0.0))
    return np.where(t < 1, near ** B[0], far ** B[1])


def weight(t, params: LZParams):
    """``t**(1/p) l^A(t) ll^B(t)``, the multiplier used by the sup form."""
    t = np.asarray(t, dtype=float)
    w = np.power(t, 0.0 if params.p == INF else 1.0 / params.p) * broken_log(t, params.A)
    if params.B is not None:
        w = w * broken_loglog(t, params.B)
    return w


# ---------------------------------------------------------------------------
# log-space evaluation of g


def _log_g(terms: Sequence[Term], u: float, log_abs_u: float, shift: float) -> float:
    """``log(g(e**u) * e**(-shift*u))`` with ``u`` possibly infinite."""
    logs = []
    signs = []
    for tm in terms:
        sg = 1.0 if tm.c > 0 else -1.0
        base = math.log(abs(tm.c))
        if tm.kind == POW:
            d = tm.beta - shift
        elif tm.kind == CONST:
            d = -shift
        else:
            d = -shift
            if log_abs_u == -INF:
                continue
            base += log_abs_u
            sg *= 1.0 if u > 0 else -1.0
        lg = base if d == 0.0 else base + d * u
        if lg != lg:  # nan guard, should not trigger
            continue
        logs.append(lg)
        signs.append(sg)
    if not logs:
        return -INF
    top = max(logs)
    if top == -INF:
        return -INF
    if top == INF:
        return INF
    total = 0.0
    for s, lg in zip(signs, logs):
        total += s * math.exp(lg - top)
    if total <= 0.0:
        return -INF
    return top + math.log(total)


@dataclass
class _Region:
    """A piece of the ``u = log t`` line with a fixed term list."""

    lo: float  # may be -inf
    hi: float  # may be +inf
    terms: tuple


def _regions(g: PiecewiseExpr) -> list[_Region]:
    cuts = sorted(set([math.log(k) for k in g.knots] + [0.0]))
    out = []
    edges = [-INF] + cuts + [INF]
    for lo, hi in zip(edges, edges[1:]):
        if lo == hi:
            continue
        probe = hi - 1.0 if lo == -INF else (lo + 1.0 if hi == INF else 0.5 * (lo + hi))
        t = math.exp(probe) if probe < 700 else INF
        i = int(np.searchsorted(np.asarray(g.knots), t, side="right"))
        out.append(_Region(lo, hi, g.terms[i]))
    return out


def _log_weight_u(u: float, params: LZParams) -> float:
    if u < 0:
        w = 1.0 - u
        s = params.a0 * math.log(w) if params.a0 else 0.0
        if params.b0:
            s += params.b0 * math.log1p(math.log(w))
    else:
        w = 1.0 + u
        s = params.ainf * math.log(w) if params.ainf else 0.0
        if params.binf:
            s += params.binf * math.log1p(math.log(w))
    return s


def _inv_p(params: LZParams) -> float:
    return 0.0 if params.p == INF else 1.0 / params.p


# ---------------------------------------------------------------------------
# asymptotics


@dataclass(frozen=True)
class EndBehaviour:
    """``coef * t**e * L**m * (log L)**b`` with ``L = |log t|`` at one end."""

    coef: float
    e: float
    m: float
    b: float


def end_behaviour(terms: Sequence[Term], params: LZParams, at_zero: bool) -> EndBehaviour:
    """Leading form of ``t**(1/p) l^A ll^B g`` at ``0`` or ``inf``."""
    if not terms:
        return EndBehaviour(0.0, 0.0, 0.0, 0.0)
    asym = _dominant(terms, at_zero)
    e = _inv_p(params) + asym.power
    alpha = params.a0 if at_zero else params.ainf
    beta = params.b0 if at_zero else params.binf
    return EndBehaviour(asym.coef, e, alpha + asym.logpow, beta)


def _cmp0(x: float) -> int:
    return 0 if abs(x) < _ZERO else (1 if x > 0 else -1)


def _end_integrable(eb: EndBehaviour, q: float, at_zero: bool) -> bool:
    if eb.coef == 0.0:
        return True
    s = _cmp0(eb.e)
    if s != 0:
        return s > 0 if at_zero else s < 0
    m, b = q * eb.m, q * eb.b
    return m < -1 - _ZERO or (abs(m + 1) <= _ZERO and b < -1 - _ZERO)


def _end_bounded(eb: EndBehaviour, at_zero: bool) -> bool:
    if eb.coef == 0.0:
        return True
    s = _cmp0(eb.e)
    if s != 0:
        return s > 0 if at_zero else s < 0
    sm = _cmp0(eb.m)
    if sm != 0:
        return sm < 0
    return _cmp0(eb.b) <= 0


def _end_limit(eb: EndBehaviour, at_zero: bool) -> float:
    """Limit of the sup-form profile at the end (finite ends only)."""
    if eb.coef == 0.0 or not _end_bounded(eb, at_zero):
        return 0.0 if eb.coef == 0.0 else INF
    if _cmp0(eb.e) == 0 and _cmp0(eb.m) == 0 and _cmp0(eb.b) == 0:
        return max(eb.coef, 0.0)
    return 0.0


def expr_in_space(g: PiecewiseExpr, params: LZParams) -> bool:
    """Whether the nonincreasing expression ``g`` has finite functional."""
    first, last = g.terms[0], g.terms[-1]
    if params.q == INF:
        ok0 = _end_bounded(end_behaviour(first, params, True), True)
        ok1 = _end_bounded(end_behaviour(last, params, False), False)
    else:
        ok0 = _end_integrable(end_behaviour(first, params, True), params.q, True)
        ok1 = _end_integrable(end_behaviour(last, params, False), params.q, False)
    return ok0 and ok1


# ---------------------------------------------------------------------------
# evaluation


def _region_log_profile(region: _Region, params: LZParams, end: Optional[str]):
    """Return ``h(x)`` = log of ``t**(1/p) l^A ll^B g`` in the region variable.

    For bounded regions ``x = u``.  On the left end ``x = v`` with
    ``u = 1 - e**v``; on the right end ``u = e**v - 1``.  On the ends the
    dominant power of ``g`` is factored out so that the cancelling exponent
    is handled exactly.
    """
    ip = _inv_p(params)
    terms = region.terms
    if end is None:

        def h(u):
            lg = _log_g(terms, u, math.log(abs(u)) if u != 0 else -INF, 0.0)
            return ip * u + _log_weight_u(u, params) + lg

        return h
    at_zero = end == "left"
    asym = _dominant(terms, at_zero)
    shift = asym.power
    e = ip + shift
    e_zero = _cmp0(e) == 0
    alpha = params.a0 if at_zero else params.ainf
    bB = params.b0 if at_zero else params.binf

    def h(v):
        ev = math.exp(v) if v < 709.0 else INF
        if at_zero:
            u = 1.0 - ev
            log_abs_u = v + math.log1p(-math.exp(-v)) if v > 0 else (math.log(abs(u)) if u else -INF)
        else:
            u = ev - 1.0
            log_abs_u = v + math.log1p(-math.exp(-v)) if v > 0 else (math.log(abs(u)) if u else -INF)
        lg = _log_g(terms, u, log_abs_u, shift)
        lin = 0.0 if e_zero else e * u
        out = lin + lg + alpha * v
        if bB:
            out += bB * math.log1p(v)
        return out

    return h


def _quad(fun, a, b) -> float:
    val, _err = sp_integrate.quad(fun, a, b, **_QUAD_OPTS)
    return val


def expr_norm(g: PiecewiseExpr, params: LZParams) -> float:
    """Functional of an expression assumed nonnegative and nonincreasing.

    ``g`` plays the role of ``f*`` or ``f**`` directly; the variant flag
    of ``params`` is ignored here.
    """
    if not expr_in_space(g, params):
        return INF
    regions = [r for r in _regions(g) if r.terms]
    if not regions:
        return 0.0
    if params.q == INF:
        return _sup_norm(regions, params)
    q = params.q
    total = 0.0
    for r in regions:
        if r.lo == -INF:
            h = _region_log_profile(r, params, "left")
            v0 = math.log1p(-r.hi)
            total += _quad(lambda v: _safe_exp(q * h(v) + v), v0, INF)
        elif r.hi == INF:
            h = _region_log_profile(r, params, "right")
            v0 = math.log1p(r.lo)
            total += _quad(lambda v: _safe_exp(q * h(v) + v), v0, INF)
        else:
            h = _region_log_profile(r, params, None)
            total += _quad(lambda u: _safe_exp(q * h(u)), r.lo, r.hi)
    return total ** (1.0 / q)


def _safe_exp(x: float) -> float:
    if x == -INF or x < -745:
        return 0.0
    return math.exp(x)


def _maximize(h, lo: float, hi: float, n: int = 129) -> float:
    xs = np.linspace(lo, hi, n)
    vals = np.array([h(float(x)) for x in xs])
    i = int(np.argmax(vals))
    best = float(vals[i])
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, n - 1)])
    if b > a:
        res = sp_optimize.minimize_scalar(
            lambda x: -h(x), bounds=(a, b), method="bounded", options={"xatol": 1e-12}
        )
        if res.success:
            best = max(best, -float(res.fun))
    return best


def _sup_norm(regions: list[_Region], params: LZParams) -> float:
    best = -INF
    for r in regions:
        if r.lo == -INF:
            h = _region_log_profile(r, params, "left")
            v0 = math.log1p(-r.hi)
            eb = end_behaviour(r.terms, params, True)
            lim = _end_limit(eb, True)
            if lim == INF:
                return INF
            if lim > 0:
                best = max(best, math.log(lim))
            best = max(best, _maximize(h, v0, v0 + 8.0), _maximize(h, v0 + 8.0, v0 + 40.0))
        elif r.hi == INF:
            h = _region_log_profile(r, params, "right")
            v0 = math.log1p(r.lo)
            eb = end_behaviour(r.terms, params, False)
            lim = _end_limit(eb, False)
            if lim == INF:
                return INF
            if lim > 0:
                best = max(best, math.log(lim))
            best = max(best, _maximize(h, v0, v0 + 8.0), _maximize(h, v0 + 8.0, v0 + 40.0))
        else:
            h = _region_log_profile(r, params, None)
            best = max(best, _maximize(h, r.lo, r.hi))
    return _safe_exp(best) if best < 709 else INF


@dataclass(frozen=True)
class NormValue:
    """A functional value together with whether it is an exact r.i. norm."""

    value: float
    exact_norm: bool

    def __float__(self) -> float:
        return self.value

    @property
    def infinite(self) -> bool:
        return self.value == INF

    def to_json(self) -> dict:
        return {"value": format_number(self.value), "exact_norm": self.exact_norm}


def profile(f: StepFunction, params: LZParams) -> PiecewiseExpr:
    """``f*`` or ``f**`` according to the variant."""
    if params.variant == "doublestar":
        return doublestar(f)
    return PiecewiseExpr.from_step(rearrange(f))


def lz_norm(f: StepFunction, params: LZParams) -> NormValue:
    return NormValue(expr_norm(profile(f, params), params), params.is_exact_norm())


def lz_value(f: StepFunction, params: LZParams) -> float:
    return expr_norm(profile(f, params), params)


def fundamental_function(params: LZParams, t: float) -> float:
    """Functional of the indicator of ``(0, t)``."""
    return lz_value(StepFunction([t], [1.0]), params)


def associate_params(params: LZParams) -> LZParams:
    """Tabulated associate space.

    ``(p, q, A) -> (p', q', -A)`` for ``1 < p < inf``; ``(1, 1, A)`` and
    ``(inf, inf, A)`` swap with ``-A`` when the weights are monotone in the
    right direction.  Everything else raises :class:`NotInTable`.
    """
    if params.variant != "star" or params.has_loglog():
        raise NotInTable("only star-variant spaces without ll-weights are tabulated")
    neg = (-params.a0 + 0.0, -params.ainf + 0.0)
    p, q = params.p, params.q
    if 1.0 < p < INF:
        return LZParams(conjugate(p), conjugate(q), neg)
    if p == 1.0 and q == 1.0 and params.a0 >= 0 >= params.ainf:
        return LZParams(INF, INF, neg)
    if p == INF and q == INF and params.a0 <= 0 <= params.ainf:
        return LZParams(1.0, 1.0, neg)
    raise NotInTable(f"no tabulated associate for {params.describe()}")


def holder_defect(f: StepFunction, g: StepFunction, params: LZParams) -> float:
    """``||f||_X ||g||_X' - int f g`` (nonnegative whenever Hoelder applies)."""
    dual = associate_params(params)
    nf = lz_value(f, params)
    ng = lz_value(g, dual)
    if nf == 0.0 or ng == 0.0:
        prod = 0.0
    else:
        prod = nf * ng
    return prod - f.product_integral(g)
