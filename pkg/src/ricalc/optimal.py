"""Optimal range and domain functionals, existence conditions and lookups.

Conditions return ``True``/``False`` when decidable and ``None`` when the
associate space needed for the test is not tabulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath as mp
import numpy as np

from . import lzspaces as lz
from .lzspaces import INF, LZParams, NotInTable, associate_params, expr_in_space, expr_norm
from .operators import apply_Q, apply_R, apply_S, apply_S_alpha, power_tail
from .piecewise import CONST, LOG, POW, PiecewiseExpr, Term
from .stepfn import StepFunction, doublestar, rearrange

_REL = 1e-12


def _eq(a: float, b: float) -> bool:
    if a == INF or b == INF:
        return a == b
    return abs(a - b) <= _REL * max(1.0, abs(a), abs(b))


def _lt(a: float, b: float) -> bool:
    return a < b and not _eq(a, b)


@dataclass(frozen=True)
class ClassicalOperator:
    """``kind`` is one of ``M``, ``Mgamma``, ``H``, ``I``."""

    kind: str
    gamma: Optional[float] = None
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("M", "Mgamma", "H", "I"):
            raise ValueError(f"unknown operator {self.kind!r}")
        if self.kind in ("Mgamma", "I"):
            if self.gamma is None or self.n is None or not 0 < self.gamma < self.n:
                raise ValueError("need 0 < gamma < n")

    @property
    def ratio(self) -> float:
        """``gamma / n``."""
        return self.gamma / self.n

    @classmethod
    def parse(cls, name: str, gamma=None, n=None) -> "ClassicalOperator":
        aliases = {
            "m": "M",
            "maximal": "M",
            "mgamma": "Mgamma",
            "m_gamma": "Mgamma",
            "fractional": "Mgamma",
            "h": "H",
            "hilbert": "H",
            "i": "I",
            "i_gamma": "I",
            "igamma": "I",
            "riesz": "I",
        }
        kind = aliases.get(name.lower())
        if kind is None:
            raise ValueError(f"unknown operator {name!r}")
        if kind in ("Mgamma", "I"):
            return cls(kind, float(gamma), int(n))
        return cls(kind)


# ---------------------------------------------------------------------------
# test profiles


def psi_profile() -> PiecewiseExpr:
    """``log(1/t)`` on ``(0, 1)``, zero afterwards."""
    return PiecewiseExpr([1.0], [(Term(-1.0, LOG),), ()])


def eta_profile() -> PiecewiseExpr:
    """``1 - log t`` on ``(0, 1]``, ``1/t`` afterwards."""
    return PiecewiseExpr([1.0], [(Term(1.0, CONST), Term(-1.0, LOG)), (Term(1.0, POW, -1.0),)])


def xi_profile(alpha: float) -> PiecewiseExpr:
    """Two-piece profile equivalent to ``(t + 1)**(1/alpha - 1)``.

    It equals ``1`` on ``(0, 1)`` and ``t**(1/alpha - 1)`` afterwards; the
    ratio to the exact function lies in ``[2**(1/alpha - 1), 1]``, so the
    two have the same finiteness in every lattice norm.
    """
    return PiecewiseExpr([1.0], [(Term(1.0, CONST),), (Term(1.0, POW, 1.0 / alpha - 1.0),)])


def min_one_over_t() -> PiecewiseExpr:
    return PiecewiseExpr([1.0], [(Term(1.0, CONST),), (Term(1.0, POW, -1.0),)])


def _in_dual(profile: PiecewiseExpr, X: LZParams) -> Optional[bool]:
    try:
        dual = associate_params(X)
    except NotInTable:
        return None
    return expr_in_space(profile, dual)


def psi_condition(X: LZParams) -> Optional[bool]:
    return _in_dual(psi_profile(), X)


def eta_condition(X: LZParams) -> Optional[bool]:
    return _in_dual(eta_profile(), X)


def xi_condition(X: LZParams, alpha: float) -> Optional[bool]:
    """``xi_alpha`` lies in the associate of ``X``; use ``alpha = n/gamma``."""
    return _in_dual(xi_profile(alpha), X)


def maximal_domain_condition(Y: LZParams) -> bool:
    return expr_in_space(min_one_over_t(), Y)


def frac_domain_condition(Y: LZParams, gamma: float, n: int) -> bool:
    """``(1 + t)**(gamma/n - 1)`` lies in ``Y``."""
    return expr_in_space(xi_profile(n / gamma), Y)


def hilbert_domain_condition(Y: LZParams) -> bool:
    return expr_in_space(eta_profile(), Y)


def frac_fund_condition(X: LZParams, gamma: float, n: int) -> bool:
    """Whether ``phi_X(t) t**(-gamma/n)`` stays away from zero on ``[1, inf)``.

    For these spaces ``phi_X(t)`` behaves like ``t**(1/p) (1 + log t)**a_inf
    (1 + log(1 + log t))**b_inf`` for large ``t``.
    """
    inv_p = 0.0 if X.p == INF else 1.0 / X.p
    r = gamma / n
    if _lt(r, inv_p):
        return True
    if not _eq(r, inv_p):
        return False
    if X.ainf > 0:
        return True
    return X.ainf == 0 and X.binf >= 0


# ---------------------------------------------------------------------------
# range and domain functionals


def maximal_range_norm(f: StepFunction, X: LZParams) -> float:
    """``|| Q f* ||_{X'}``."""
    return expr_norm(apply_Q(rearrange(f)), associate_params(X))


def maximal_domain_norm(f: StepFunction, Y: LZParams) -> float:
    """``|| f** ||_Y``."""
    return expr_norm(doublestar(f), Y.with_(variant="star"))


def frac_range_norm_simple(f: StepFunction, X: LZParams, gamma: float, n: int) -> float:
    """``|| int_t^inf f*(s) s**(gamma/n - 1) ds ||_{X'}``."""
    return expr_norm(apply_R(rearrange(f), gamma / n), associate_params(X))


def hilbert_range_norm(f: StepFunction, X: LZParams) -> float:
    """``|| S f* ||_{X'}``."""
    return expr_norm(apply_S(rearrange(f)), associate_params(X))


def riesz_range_norm(f: StepFunction, X: LZParams, gamma: float, n: int) -> float:
    """``|| S_{n/gamma} f* ||_{X'}``."""
    return expr_norm(apply_S_alpha(rearrange(f), n / gamma), associate_params(X))


def _shift(g: StepFunction, b: float) -> StepFunction:
    if b <= 0 or g.is_zero():
        return g
    return StepFunction([b] + [b + x for x in g.breakpoints], [0.0] + list(g.values))


def _place(blocks: Sequence[tuple[float, float]], starts: Sequence[float]) -> StepFunction:
    """Step function with block ``k`` (height, width) starting at ``starts[k]``."""
    order = sorted(range(len(blocks)), key=lambda k: starts[k])
    bps: list[float] = []
    vals: list[float] = []
    cursor = 0.0
    for k in order:
        h, w = blocks[k]
        s = starts[k]
        if s < cursor - 1e-12 * max(1.0, cursor):
            raise ValueError("blocks overlap")
        if s > cursor:
            bps.append(s)
            vals.append(0.0)
        bps.append(s + w)
        vals.append(h)
        cursor = s + w
    return StepFunction(bps, vals)


@dataclass(frozen=True)
class SupEstimate:
    lower: float
    candidates: int
    simple: float


def frac_range_norm_sup_estimate(
    f: StepFunction, X: LZParams, gamma: float, n: int, budget: int = 200
) -> SupEstimate:
    """Certified lower bound for the supremum over rearrangements of ``f``.

    Every candidate ``h`` is equimeasurable with ``f``, so the best value
    found is a lower bound.  Candidates: ``f*`` itself, ``f*`` translated
    by ``r`` for a geometric range of ``r`` (this includes the half-line
    witness with ``r`` equal to the support size), then block-wise
    coordinate ascent.
    """
    dual = associate_params(X)
    r = gamma / n
    fs = rearrange(f)

    def value(h: StepFunction) -> float:
        return expr_norm(apply_R(h, r), dual)

    simple = value(fs)
    if fs.is_zero():
        return SupEstimate(0.0, 1, 0.0)
    best = simple
    tried = 1
    size = fs.support_measure
    best_shift = 0.0
    for k in range(-6, 41):
        if tried >= budget:
            break
        b = size * 2.0 ** (k / 2.0)
        v = value(_shift(fs, b))
        tried += 1
        if v > best:
            best, best_shift = v, b
        if v == INF:
            return SupEstimate(INF, tried, simple)
    blocks = [(v, b - a) for a, b, v in fs.segments()]
    starts = []
    acc = best_shift
    for _, w in blocks:
        starts.append(acc)
        acc += w
    improved = True
    while improved and tried < budget:
        improved = False
        for k in range(len(blocks)):
            if tried >= budget:
                break
            others = [(starts[j], starts[j] + blocks[j][1]) for j in range(len(blocks)) if j != k]
            w = blocks[k][1]
            far = max((e for _, e in others), default=0.0)
            options = [e for _, e in others] + [0.0]
            options += [far * 2.0**m for m in range(1, 6)] + [far + w * 4.0**m for m in range(1, 4)]
            for x in options:
                if tried >= budget:
                    break
                if any(x < e and x + w > s for s, e in others):
                    continue
                trial = list(starts)
                trial[k] = x
                v = value(_place(blocks, trial))
                tried += 1
                if v > best * (1 + 1e-12):
                    best, starts, improved = v, trial, True
    return SupEstimate(best, tried, simple)


# ---------------------------------------------------------------------------
# boundedness of the supremum operator


def t_certified(X: LZParams) -> bool:
    """Parameter sets for which the boundedness criterion is stated."""
    if X.has_loglog() or X.variant != "star":
        return False
    if 1.0 < X.p < INF:
        return True
    if X.p == 1.0:
        return X.q == 1.0 and X.a0 >= 0 >= X.ainf
    if X.q == INF:
        return X.a0 <= 0
    return X.a0 + 1.0 / X.q < 0


def T_boundedness_predicate(X: LZParams, alpha: float) -> Optional[bool]:
    """Whether ``t -> t**-alpha sup_{s>=t} s**alpha f*(s)`` is bounded on ``X``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not t_certified(X):
        return None
    crit = 1.0 / alpha
    if X.q < INF:
        return X.p >= 1 and _lt(X.p, crit)
    if _lt(X.p, crit):
        return True
    return _eq(X.p, crit) and X.a0 <= 0 <= X.ainf


def _log_head_integral(a: float, c0: float, cinf: float, log_tau: float) -> mp.mpf:
    """``log int_0^tau t**(a-1) l^{(c0, cinf)}(t) dt`` in high precision."""
    if a < 0:
        return mp.inf
    if log_tau <= 0:
        L = mp.mpf(-log_tau)
        if a == 0:
            if c0 >= -1:
                return mp.inf
            return (c0 + 1) * mp.log(1 + L) - mp.log(-c0 - 1)
        x = a * (1 + L)
        val = mp.gammainc(c0 + 1, x)
        return mp.log(val) + a * (1 + L) - (c0 + 1) * mp.log(a) - a * L
    L = mp.mpf(log_tau)
    head = _log_head_integral(a, c0, cinf, 0.0)
    if head == mp.inf:
        return mp.inf
    if a == 0:
        if cinf == -1:
            body = mp.log(1 + L)
        else:
            body = ((1 + L) ** (cinf + 1) - 1) / (cinf + 1)
        return mp.log(mp.exp(head) + body)
    # int_1^{1+L} e^{a(w-1)} w^cinf dw = e^{aL} int_0^L e^{-a z}(1 + L - z)^cinf dz
    pts = [mp.mpf(0)]
    step = 1 / mp.mpf(a)
    while pts[-1] + step < L:
        pts.append(pts[-1] + step)
        step *= 8
    pts.append(L)
    inner = mp.quad(lambda z: mp.exp(-a * z) * (1 + L - z) ** cinf, pts)
    log_body = a * L + mp.log(inner)
    return log_body + mp.log(1 + mp.exp(head - log_body))


def pes_log_ratio(X: LZParams, alpha: float, log_tau: float) -> mp.mpf:
    """Logarithm of the two-integral ratio that decides boundedness for ``q < inf``."""
    q = X.q
    inv_p = 0.0 if X.p == INF else 1.0 / X.p
    c0, cinf = X.a0 * q, X.ainf * q
    num = _log_head_integral(q * inv_p - q * alpha, c0, cinf, log_tau)
    den = _log_head_integral(q * inv_p, c0, cinf, log_tau)
    if den == mp.inf:
        return mp.mpf("nan")
    if num == mp.inf:
        return mp.inf
    return alpha * log_tau + (num - den) / q


def _log_l(u: float, A) -> float:
    return A[0] * math.log1p(-u) if u < 0 else A[1] * math.log1p(u)


def quasi_monotone_log_constant(X: LZParams, alpha: float, cap: float) -> float:
    """``log sup_t w(t) t**-alpha sup_{s>=t} s**alpha / w(s)`` on ``|log t| <= cap``.

    Here ``w(t) = t**(1/p) l^A(t)``; the supremum in ``s`` is taken over
    the same grid.
    """
    inv_p = 0.0 if X.p == INF else 1.0 / X.p
    e = inv_p - alpha
    mags = np.geomspace(1e-3, cap, 400)
    us = np.concatenate([-mags[::-1], [0.0], mags])
    g = np.array([-e * u - _log_l(u, X.A) for u in us])
    suffix = np.maximum.accumulate(g[::-1])[::-1]
    k = np.array([e * u + _log_l(u, X.A) for u in us]) + suffix
    return float(np.max(k))


@dataclass(frozen=True)
class NumericTVerdict:
    bounded: bool
    near_log_ratio: float
    far_log_ratio: float


def numeric_T_bounded(X: LZParams, alpha: float, near: float = 1e6, far: float = 1e12) -> NumericTVerdict:
    """Numerical boundedness test for the supremum operator on ``X``.

    For ``q < inf`` the two-integral ratio is evaluated for ``tau = e**(+-L)``
    with ``L`` up to ``near`` and up to ``far``; for ``q = inf`` the
    quasi-monotonicity constant is used instead.  The operator is declared
    unbounded when a value is infinite or the running maximum grows by
    more than a factor 1.5 between the two ranges.
    """
    growth = math.log(1.5)
    if X.q == INF:
        a = quasi_monotone_log_constant(X, alpha, near)
        b = quasi_monotone_log_constant(X, alpha, far)
        return NumericTVerdict(not (b - a > growth or not math.isfinite(b)), a, b)
    grid_near = [0.0] + np.geomspace(1e-3, near, 40).tolist()
    grid_far = np.geomspace(near, far, 13).tolist()[1:]

    def run_max(Ls):
        best = -mp.inf
        for L in Ls:
            for s in (-1.0, 1.0):
                v = pes_log_ratio(X, alpha, s * L)
                if v == mp.inf:
                    return math.inf
                best = max(best, v)
        return float(best)

    a = run_max(grid_near)
    if a == math.inf:
        return NumericTVerdict(False, a, a)
    b = max(a, run_max(grid_far))
    return NumericTVerdict(not (b - a > growth or not math.isfinite(b)), a, b)


# ---------------------------------------------------------------------------
# lookup tables


@dataclass(frozen=True)
class OptimalPartnerResult:
    kind: str  # "lz", "induced", "none", "untabulated"
    params: Optional[LZParams] = None
    norm_description: str = ""
    condition_name: str = ""
    condition_holds: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": None if self.params is None else self.params.to_json(),
            "norm_description": self.norm_description,
            "condition": {"name": self.condition_name, "holds": self.condition_holds},
        }


def _lz(p, q, A, B=None) -> LZParams:
    return LZParams(p, q, tuple(A), None if B is None else tuple(B))


def _minus1(A):
    return (A[0] - 1.0, A[1] - 1.0)


def _condition(op: ClassicalOperator, X: LZParams, direction: str) -> tuple[str, Optional[bool]]:
    if direction == "range":
        if op.kind == "M":
            return "psi in X'", psi_condition(X)
        if op.kind == "Mgamma":
            return "inf phi_X(t) t^(-gamma/n) > 0", frac_fund_condition(X, op.gamma, op.n)
        if op.kind == "H":
            return "eta in X'", eta_condition(X)
        return "xi_(n/gamma) in X'", xi_condition(X, op.n / op.gamma)
    if op.kind == "M":
        return "min(1, 1/t) in Y", maximal_domain_condition(X)
    if op.kind == "H":
        return "eta in Y", hilbert_domain_condition(X)
    return "(1+t)^(gamma/n-1) in Y", frac_domain_condition(X, op.gamma, op.n)


def _range_table(op: ClassicalOperator, X: LZParams):
    """Tabulated range partner or ``None``; returns (kind, params, text)."""
    p, q, (a0, ai) = X.p, X.q, X.A
    if op.kind == "M":
        if p == 1 and q == 1 and a0 >= 1 and ai < -1:
            return "lz", _lz(1, 1, _minus1(X.A)), ""
        if p == 1 and q == 1 and a0 >= 1 and -1 <= ai <= 0:
            return "induced", None, "Y' norm = sup_t l^(-A)(t) int_t^inf f*(s) ds/s"
        if 1 < p < INF:
            return "lz", X, ""
        if p == INF and q < INF and a0 + 1.0 / q < 0:
            return "lz", X, ""
        if p == INF and q == INF and a0 <= 0:
            return "lz", X, ""
        return None
    if op.kind == "Mgamma":
        crit = op.n / op.gamma
        if p == 1 and q == 1 and a0 >= 0 >= ai:
            if a0 == 0 and ai == 0:
                return "lz", _lz(op.n / (op.n - op.gamma), INF, (0, 0)), ""
            return "induced", None, "Y' norm = sup_t l^(-A)(t) int_t^inf f*(s) s^(gamma/n-1) ds"
        if 1 < p and _lt(p, crit):
            return "lz", _lz(op.n * p / (op.n - op.gamma * p), q, X.A), ""
        if _eq(p, crit):
            if q == INF and a0 <= 0 <= ai:
                return "lz", _lz(INF, INF, X.A), ""
            text = (
                "Y' norm = sup over h equimeasurable with f of "
                "|| int_t^inf h(s) s^(gamma/n-1) ds ||_{X'}"
            )
            if q < INF and ai >= 0:
                if a0 == 0 and ai == 0:
                    return "lz", _lz(INF, INF, (0, 0)), ""
                return "induced", None, text
            if q == INF and a0 > 0 and ai >= 0:
                return "induced", None, text
        return None
    if op.kind == "H":
        if p == 1 and q == 1 and a0 >= 1 and ai < 0:
            return "lz", _lz(1, 1, _minus1(X.A)), ""
        if 1 < p < INF:
            return "lz", X, ""
        text = "Y' norm = || int_t^inf f**(s) ds/s ||_{L^((1,q';-A-1))}"
        if p == INF and q == 1 and a0 < -1 and ai >= 0:
            return "induced", None, text
        if p == INF and 1 < q < INF and a0 + 1.0 / q < 0 and ai + 1.0 - 1.0 / q > 0:
            return "induced", None, text
        if p == INF and q == INF and a0 <= 0 and ai > 1:
            return "lz", _lz(INF, INF, _minus1(X.A)), ""
        return None
    # Riesz potential
    crit = op.n / op.gamma
    if p == 1 and q == 1 and a0 >= 0 >= ai:
        if a0 == 0 and ai == 0:
            return "lz", _lz(op.n / (op.n - op.gamma), INF, (0, 0)), ""
        return "induced", None, "Y' norm = sup_t l^(-A)(t) int_t^inf f**(s) s^(gamma/n-1) ds"
    if 1 < p and _lt(p, crit):
        return "lz", _lz(op.n * p / (op.n - op.gamma * p), q, X.A), ""
    if _eq(p, crit):
        iq = 1.0 / q if q < INF else 0.0
        iqp = 1.0 - iq  # 1/q'
        if a0 < iqp and ai > iqp:
            return "lz", _lz(INF, q, _minus1(X.A)), ""
        if q > 1 and _eq(a0, iqp) and ai > iqp:
            return "lz", _lz(INF, q, (-iq, ai - 1.0), (-1.0, 0.0)), ""
        if q == 1:
            if a0 < 0 and ai == 0:
                return "induced", None, "||f||_Y = ||f||_inf + || t^(-1) l^(-1)(t) f*(t) ||_{L^1(1,inf)}"
            if a0 == 0 and ai > 0:
                return "induced", None, "L^(inf,1;[-1,a_inf-1],[-1,0],[-1,0]) (three-level logarithm)"
            if a0 >= 0 and ai == 0:
                return "lz", _lz(INF, INF, (0, 0)), ""
            if a0 > 0 and ai > 0:
                return "induced", None, "||f||_Y = ||f||_inf + || t^(-1) l^(A-1)(t) f*(t) ||_{L^1(1,inf)} (endpoint mixed space)"
        if q > 1 and a0 > iqp and ai > iqp:
            return "induced", None, "||f||_Y = ||f||_inf + || t^(-1/q) l^(A-1)(t) f*(t) ||_{L^q(1,inf)}"
    return None


_DOMAIN_TEXT = {
    "M": "||f||_X = || f** ||_Y",
    "Mgamma": "||f||_X = || t^(gamma/n) f**(t) ||_Y",
    "H": "||f||_X = || S f* ||_Y",
    "I": "||f||_X = || S_(n/gamma) f* ||_Y",
}


def optimal_partner_lookup(op: ClassicalOperator, X: LZParams, direction: str = "range") -> OptimalPartnerResult:
    """Tabulated optimal partner; ``none`` only when the condition fails."""
    if direction not in ("range", "domain"):
        raise ValueError("direction is 'range' or 'domain'")
    name, holds = _condition(op, X, direction)
    if direction == "domain":
        if holds is False:
            return OptimalPartnerResult("none", None, "", name, holds)
        return OptimalPartnerResult("induced", None, _DOMAIN_TEXT[op.kind], name, holds)
    if X.variant == "star" and not X.has_loglog():
        hit = _range_table(op, X)
    else:
        hit = None
    if hit is not None:
        kind, params, text = hit
        if params is not None and not text:
            text = params.describe()
        return OptimalPartnerResult(kind, params, text, name, holds)
    if holds is False:
        return OptimalPartnerResult("none", None, "", name, holds)
    return OptimalPartnerResult("untabulated", None, "", name, holds)


# ---------------------------------------------------------------------------
# lemma-level checks


@dataclass(frozen=True)
class QuasiConcave:
    """Continuous piecewise-linear ``phi`` with ``phi(0) = 0``.

    ``knots`` are strictly increasing positive abscissae with values
    ``vals``; ``phi`` is linear between consecutive knots (and between 0
    and the first knot) and continues with slope ``tail_slope`` after the
    last knot.
    """

    knots: tuple
    vals: tuple
    tail_slope: float = 0.0

    def __post_init__(self):
        xs = (0.0,) + tuple(self.knots)
        ys = (0.0,) + tuple(self.vals)
        if len(self.knots) != len(self.vals) or not self.knots:
            raise ValueError("need matching nonempty knots and values")
        tol = 1e-12
        for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
            if x1 <= x0:
                raise ValueError("knots must increase")
            if y1 < y0 - tol * max(1.0, abs(y0)):
                raise ValueError("phi must be nondecreasing")
            slope = (y1 - y0) / (x1 - x0)
            if y0 - slope * x0 < -tol * max(1.0, abs(y0)):
                raise ValueError("phi(t)/t must be nonincreasing")
        if self.tail_slope < 0 or ys[-1] - self.tail_slope * xs[-1] < -tol * max(1.0, ys[-1]):
            raise ValueError("tail violates quasiconcavity")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        xs = np.concatenate([[0.0], self.knots])
        ys = np.concatenate([[0.0], self.vals])
        out = np.interp(t, xs, ys)
        beyond = t > xs[-1]
        return np.where(beyond, ys[-1] + self.tail_slope * (t - xs[-1]), out)

    @classmethod
    def min_of_lines(cls, lines: Sequence[tuple[float, float]], knots_hint: Sequence[float] = ()) -> "QuasiConcave":
        """``min_i (a_i t + b_i)`` with one line through the origin."""
        if not any(b == 0 for _, b in lines):
            raise ValueError("one line must pass through the origin")
        pts = set()
        for i, (a1, b1) in enumerate(lines):
            for a2, b2 in lines[i + 1 :]:
                if a1 != a2:
                    x = (b2 - b1) / (a1 - a2)
                    if 0 < x < math.inf:
                        pts.add(x)
        pts |= {float(k) for k in knots_hint if k > 0}
        pts = sorted(pts) or [1.0]

        def phi(x):
            return min(a * x + b for a, b in lines)

        last = pts[-1]
        tail = min(lines, key=lambda ab: ab[0] * (last * 2) + ab[1])[0]
        return cls(tuple(pts), tuple(phi(x) for x in pts), tail)


def _product_cells(phi: QuasiConcave, f: StepFunction):
    """Cells ``(a, b, phi(a) f, phi(b-) f)`` on which ``phi f`` is linear."""
    grid = sorted(set(phi.knots) | set(f.breakpoints))
    end = f.breakpoints[-1] if f.breakpoints else 0.0
    grid = [x for x in grid if x <= end]
    cells = []
    lo = 0.0
    for hi in grid:
        v = f.value_on(lo, hi)
        if v > 0:
            cells.append((lo, hi, v * float(phi(lo)), v * float(phi(hi))))
        lo = hi
    return cells


def _int_min_mu_tau(cells, tau: float) -> float:
    """``int_0^tau (phi f)*`` as ``int_0^inf min(mu(lam), tau) dlam``."""
    lams = sorted({0.0} | {c[2] for c in cells} | {c[3] for c in cells})

    def mu(lam):
        tot = 0.0
        for a, b, ya, yb in cells:
            if lam < ya:
                tot += b - a
            elif lam < yb:
                tot += (b - a) * (yb - lam) / (yb - ya)
        return tot

    total = 0.0
    for l0, l1 in zip(lams, lams[1:]):
        # mu is linear on (l0, l1); evaluate just inside the interval
        m0 = mu(l0)
        m1 = _mu_left(cells, l1)
        if m0 <= tau and m1 <= tau:
            total += 0.5 * (m0 + m1) * (l1 - l0)
        elif m0 >= tau and m1 >= tau:
            total += tau * (l1 - l0)
        else:
            x = l0 + (tau - m0) * (l1 - l0) / (m1 - m0)
            if m0 > tau:
                total += tau * (x - l0) + 0.5 * (tau + m1) * (l1 - x)
            else:
                total += 0.5 * (m0 + tau) * (x - l0) + tau * (l1 - x)
    return total


def _mu_left(cells, lam):
    tot = 0.0
    for a, b, ya, yb in cells:
        if lam <= ya:
            tot += b - a
        elif lam < yb:
            tot += (b - a) * (yb - lam) / (yb - ya)
    return tot


@dataclass(frozen=True)
class UnsupResult:
    lhs: float
    rhs: float
    passed: bool

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else INF
        return self.lhs / self.rhs


UNSUP_CONSTANT = 6.0


def lemma_unsup_check(phi: QuasiConcave, f: StepFunction, tau: float) -> UnsupResult:
    """Compare ``int_0^tau sup_{s>=t} phi(s) f(s) dt`` with ``int_0^tau (phi f)*``."""
    if any(v1 > v0 for v0, v1 in zip(f.values, f.values[1:])):
        raise ValueError("f must be nonincreasing")
    cells = _product_cells(phi, f)
    lhs = 0.0
    run = 0.0
    for a, b, _ya, yb in reversed(cells):
        run = max(run, yb)
        lhs += run * max(0.0, min(b, tau) - a)
    # the suffix maximum also covers zero-valued gaps before each cell
    if cells:
        gaps = []
        prev = 0.0
        for a, b, _ya, _yb in cells:
            if a > prev:
                gaps.append((prev, a))
            prev = b
        for a, b in gaps:
            right = [yb for (c0, _c1, _ya, yb) in cells if c0 >= b]
            lhs += max(right, default=0.0) * max(0.0, min(b, tau) - a)
    rhs = _int_min_mu_tau(cells, tau)
    passed = lhs <= UNSUP_CONSTANT * rhs * (1 + 1e-12) + 1e-300
    return UnsupResult(lhs, rhs, passed)


def lenka_ratio(a: Sequence[float], t: Sequence[float], beta: float, X: LZParams) -> tuple[float, float]:
    """Return ``(|| int_t^inf u/I ||_X, || v ||_X)`` for ``I(s) = s**beta``.

    ``u = sum a_i chi_(0, t_i)`` and ``v = sum a_i t_i**(1 - beta) chi_(0, t_i)``.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    u = _sum_of_heads(a, t)
    v = _sum_of_heads([ai * ti ** (1 - beta) for ai, ti in zip(a, t)], t)
    left = expr_norm(power_tail(u, -beta), X)
    right = lz.lz_value(v, X)
    return left, right


def _sum_of_heads(a: Sequence[float], t: Sequence[float]) -> StepFunction:
    pairs = sorted(zip(t, a))
    ts = [p[0] for p in pairs]
    suffix = np.cumsum([p[1] for p in pairs][::-1])[::-1]
    return StepFunction(ts, suffix.tolist()) if ts else StepFunction.zero()


@dataclass(frozen=True)
class RatioInterval:
    lo: float
    hi: float
    lo_doubled: float
    hi_doubled: float

    @property
    def drift(self) -> float:
        return max(
            abs(self.lo_doubled - self.lo) / self.lo if self.lo > 0 else INF,
            abs(self.hi_doubled - self.hi) / self.hi if self.hi > 0 else INF,
        )

    def stable(self, tol: float = 0.10) -> bool:
        return math.isfinite(self.hi_doubled) and self.lo > 0 and self.drift < tol


def ratio_interval(ratios: Sequence[float], half: int) -> RatioInterval:
    first = ratios[:half]
    return RatioInterval(min(first), max(first), min(ratios), max(ratios))


def lemma_lenka_check(instances, tol: float = 0.10) -> tuple[RatioInterval, bool]:
    """Ratio interval over instances ``(a, t, beta, X)`` and its stability.

    The first half of ``instances`` gives the base interval; the full list
    is the doubled corpus.
    """
    ratios = []
    for a, t, beta, X in instances:
        lhs, rhs = lenka_ratio(a, t, beta, X)
        ratios.append(lhs / rhs)
    iv = ratio_interval(ratios, len(ratios) // 2)
    return iv, iv.stable(tol)


def staircase(levels: int) -> StepFunction:
    """Step version of ``min(1, 1/s)`` on ``(0, 2**levels)``."""
    bps = [2.0**k for k in range(0, levels + 1)]
    vals = [1.0] + [2.0 ** (-k) for k in range(0, levels)]
    return StepFunction(bps, vals)


@dataclass
class LenkaReport:
    predicate: Optional[bool]
    corpus_ratios: list = field(default_factory=list)
    witness_ratios: list = field(default_factory=list)
    consistent: bool = True


def lenka_equivalence_check(X: LZParams, gamma: float, n: int, corpus, budget: int = 120) -> LenkaReport:
    """Compare the boundedness criterion with estimate/simple ratios.

    When the criterion holds the ratios must stay bounded along the
    staircase witnesses; when it fails they must keep growing.
    """
    pred = T_boundedness_predicate(X, gamma / n)
    rep = LenkaReport(pred)
    for f in corpus:
        est = frac_range_norm_sup_estimate(f, X, gamma, n, budget)
        rep.corpus_ratios.append(est.lower / est.simple if est.simple > 0 else 1.0)
    for k in (2, 4, 8, 16):
        est = frac_range_norm_sup_estimate(staircase(k), X, gamma, n, budget)
        rep.witness_ratios.append(est.lower / est.simple)
    w = rep.witness_ratios
    growing = all(b > a * 1.02 for a, b in zip(w, w[1:])) and w[-1] > 1.25 * w[0]
    bounded = all(math.isfinite(r) for r in rep.corpus_ratios + w) and not growing
    if pred is None:
        rep.consistent = True
    else:
        rep.consistent = bounded if pred else growing
    return rep
