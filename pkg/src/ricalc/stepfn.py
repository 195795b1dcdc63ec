"""Canonical nonnegative step functions on (0, inf) and their rearrangements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .piecewise import CONST, POW, PiecewiseExpr, Term


class StepFunction:
    """Nonnegative step function with compact support in ``[0, inf)``.

    ``values[i]`` is taken on ``(breakpoints[i-1], breakpoints[i])`` with an
    implicit left end ``0``.  Construction canonicalises: equal neighbours
    merge and trailing zeros are dropped, so the zero function has no
    breakpoints.  Point evaluation is right-continuous.
    """

    __slots__ = ("breakpoints", "values")

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float]):
        bps = [float(b) for b in breakpoints]
        vals = [float(v) for v in values]
        if len(bps) != len(vals):
            raise ValueError("breakpoints and values must have equal length")
        for b in bps:
            if not (b > 0 and math.isfinite(b)):
                raise ValueError("breakpoints must be finite and positive")
        if any(b1 <= b0 for b0, b1 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        for v in vals:
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError("values must be finite and nonnegative")
        mb: list[float] = []
        mv: list[float] = []
        for b, v in zip(bps, vals):
            if mv and mv[-1] == v:
                mb[-1] = b
            else:
                mb.append(b)
                mv.append(v)
        while mv and mv[-1] == 0.0:
            mb.pop()
            mv.pop()
        self.breakpoints = tuple(mb)
        self.values = tuple(mv)

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls) -> "StepFunction":
        return cls([], [])

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunction":
        """``height`` times the indicator of ``(a, b)``."""
        if not 0 <= a < b:
            raise ValueError("need 0 <= a < b")
        if a == 0:
            return cls([b], [height])
        return cls([a, b], [0.0, height])

    @classmethod
    def from_levels(cls, lengths: Sequence[float], values: Sequence[float]) -> "StepFunction":
        """Build from consecutive segment lengths starting at 0."""
        return cls(np.cumsum(lengths).tolist(), values)

    # inspection ---------------------------------------------------------
    def __repr__(self) -> str:
        return f"StepFunction({list(self.breakpoints)}, {list(self.values)})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StepFunction)
            and self.breakpoints == other.breakpoints
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.breakpoints, self.values))

    def is_zero(self) -> bool:
        return not self.values

    def segments(self):
        lo = 0.0
        for b, v in zip(self.breakpoints, self.values):
            yield lo, b, v
            lo = b

    def lengths(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.breakpoints]))

    @property
    def support_measure(self) -> float:
        return float(sum(b - a for a, b, v in self.segments() if v > 0))

    @property
    def sup(self) -> float:
        return max(self.values, default=0.0)

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        idx = np.searchsorted(np.asarray(self.breakpoints), t_arr, side="right")
        vals = np.concatenate([np.asarray(self.values, dtype=float), [0.0]])
        out = vals[idx]
        return float(out[0]) if scalar else out

    def value_on(self, a: float, b: float) -> float:
        """Constant value on an interval ``(a, b)`` lying inside one segment."""
        mid = 0.5 * (a + b) if b < math.inf else a + 1.0
        return self(mid)

    def integral(self) -> float:
        return float(np.dot(self.lengths(), self.values)) if self.values else 0.0

    # algebra ------------------------------------------------------------
    def _on_grid(self, grid: np.ndarray) -> np.ndarray:
        mids = np.concatenate([[0.0], grid[:-1]]) + 0.5 * np.diff(np.concatenate([[0.0], grid]))
        return self(mids)

    def _combine(self, other: "StepFunction", op) -> "StepFunction":
        grid = np.union1d(self.breakpoints, other.breakpoints)
        if grid.size == 0:
            return StepFunction.zero()
        return StepFunction(grid.tolist(), op(self._on_grid(grid), other._on_grid(grid)).tolist())

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, np.add)

    def maximum(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, np.maximum)

    def minimum(self, other: "StepFunction") -> "StepFunction":
        return self._combine(other, np.minimum)

    def scale(self, c: float) -> "StepFunction":
        if c < 0:
            raise ValueError("scale must be nonnegative")
        return StepFunction(self.breakpoints, [c * v for v in self.values])

    def product_integral(self, other: "StepFunction") -> float:
        """``integral f g`` over ``(0, inf)``."""
        grid = np.union1d(self.breakpoints, other.breakpoints)
        if grid.size == 0:
            return 0.0
        lens = np.diff(np.concatenate([[0.0], grid]))
        return float(np.sum(lens * self._on_grid(grid) * other._on_grid(grid)))

    def le(self, other: "StepFunction", atol: float = 0.0) -> bool:
        """Pointwise ``self <= other + atol`` almost everywhere."""
        grid = np.union1d(self.breakpoints, other.breakpoints)
        if grid.size == 0:
            return True
        return bool(np.all(self._on_grid(grid) <= other._on_grid(grid) + atol))

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @classmethod
    def from_json(cls, obj: dict) -> "StepFunction":
        return cls(obj["breakpoints"], obj["values"])


# ---------------------------------------------------------------------------
# rearrangement machinery


def rearrange(f: StepFunction) -> StepFunction:
    """Nonincreasing rearrangement ``f*``: levels sorted by height."""
    pairs = [(v, b - a) for a, b, v in f.segments() if v > 0]
    pairs.sort(key=lambda p: -p[0])
    if not pairs:
        return StepFunction.zero()
    lens = [p[1] for p in pairs]
    vals = [p[0] for p in pairs]
    return StepFunction(np.cumsum(lens).tolist(), vals)


def doublestar(f: StepFunction) -> PiecewiseExpr:
    """Maximal function of the rearrangement, ``t -> (1/t) int_0^t f*``.

    On the ``k``-th level of ``f*`` this is ``c_k + (C_{k-1} - c_k s_{k-1})/t``
    and after the support it is ``C_N / t``.
    """
    fs = rearrange(f)
    terms = []
    run = 0.0
    lo = 0.0
    for b, v in zip(fs.breakpoints, fs.values):
        terms.append((Term(v, CONST), Term(run - v * lo, POW, -1.0)))
        run += v * (b - lo)
        lo = b
    terms.append((Term(run, POW, -1.0),))
    return PiecewiseExpr(fs.breakpoints, terms)


def dilate(f: StepFunction, a: float) -> StepFunction:
    """``t -> f(a t)`` for ``a > 0``."""
    if not a > 0:
        raise ValueError("dilation factor must be positive")
    return StepFunction([b / a for b in f.breakpoints], f.values)


def distribution(f: StepFunction, lam: float) -> float:
    """Measure of ``{f > lam}``."""
    return float(sum(b - a for a, b, v in f.segments() if v > lam))


def integrate(g, a: float = 0.0, b: float = math.inf) -> float:
    """Integral of a step function or piecewise expression over ``(a, b)``."""
    if isinstance(g, StepFunction):
        return PiecewiseExpr.from_step(g).integrate(a, b)
    return g.integrate(a, b)


def partial_integrals(f: StepFunction, ts) -> np.ndarray:
    """``t -> int_0^t f*`` on an array of points."""
    fs = rearrange(f)
    ts = np.asarray(ts, dtype=float)
    if fs.is_zero():
        return np.zeros_like(ts)
    bps = np.asarray(fs.breakpoints)
    vals = np.asarray(fs.values)
    lo = np.concatenate([[0.0], bps[:-1]])
    cum = np.concatenate([[0.0], np.cumsum(vals * (bps - lo))])
    idx = np.searchsorted(bps, ts, side="right")
    out = np.empty_like(ts)
    inside = idx < len(bps)
    out[~inside] = cum[-1]
    j = idx[inside]
    out[inside] = cum[j] + vals[j] * (ts[inside] - lo[j])
    return out


@dataclass(frozen=True)
class HLPResult:
    holds: bool
    first_violation: Optional[float] = None


def hlp_compare(f: StepFunction, g: StepFunction, rtol: float = 1e-12) -> HLPResult:
    """Decide ``int_0^t f* <= int_0^t g*`` for all ``t``.

    Both sides are piecewise linear with kinks on the union of the two
    breakpoint grids, so it suffices to test there.
    """
    grid = np.union1d(rearrange(f).breakpoints, rearrange(g).breakpoints)
    if grid.size == 0:
        return HLPResult(True)
    lhs = partial_integrals(f, grid)
    rhs = partial_integrals(g, grid)
    bad = lhs > rhs + rtol * np.maximum(1.0, np.abs(rhs))
    if np.any(bad):
        return HLPResult(False, float(grid[np.argmax(bad)]))
    return HLPResult(True)
