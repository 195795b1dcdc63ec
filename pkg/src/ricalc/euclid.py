"""Direct one-dimensional operators on step functions of the real line.

The maximal functions are returned as :class:`LineMaxExpr`, a cellwise
maximum of closed-form branches.  Between consecutive breakpoints the best
interval containing ``x`` either has both ends at breakpoints (a constant),
or one end at ``x`` itself.  In the latter case the value is
``(D + c y) y**(gamma - 1)`` with ``y`` the distance from ``x`` to the
fixed end, which is monotone or has a single interior minimum, so its
superlevel sets are at most two intervals.  That makes the distribution
function, and hence the rearrangement, computable to root-finding accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize as sp_optimize
from scipy.special import gamma as gamma_fn

from . import _kernels
from .stepfn import StepFunction


class InfiniteRearrangement(ValueError):
    """The function does not decay, so its rearrangement is infinite."""


class LineStepFunction:
    """Nonnegative step function on the real line with compact support.

    ``knots`` has one more entry than ``values``; ``values[i]`` is taken on
    ``(knots[i], knots[i+1])``.  Zero end segments are trimmed and equal
    neighbours merged.
    """

    __slots__ = ("knots", "values")

    def __init__(self, knots: Sequence[float], values: Sequence[float]):
        ks = [float(k) for k in knots]
        vs = [float(v) for v in values]
        if vs and len(ks) != len(vs) + 1:
            raise ValueError("need len(knots) == len(values) + 1")
        if any(not math.isfinite(k) for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("knots must be finite and strictly increasing")
        if any(not (v >= 0 and math.isfinite(v)) for v in vs):
            raise ValueError("values must be finite and nonnegative")
        mk, mv = (ks[:1], []) if vs else ([], [])
        for k, v in zip(ks[1:], vs):
            if mv and mv[-1] == v:
                mk[-1] = k
            else:
                mk.append(k)
                mv.append(v)
        while mv and mv[0] == 0.0:
            mv.pop(0)
            mk.pop(0)
        while mv and mv[-1] == 0.0:
            mv.pop()
            mk.pop()
        if not mv:
            mk = []
        self.knots = tuple(mk)
        self.values = tuple(mv)

    @classmethod
    def zero(cls) -> "LineStepFunction":
        return cls([], [])

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "LineStepFunction":
        return cls([a, b], [height])

    @classmethod
    def from_step(cls, f: StepFunction, offset: float = 0.0) -> "LineStepFunction":
        if f.is_zero():
            return cls.zero()
        return cls([offset] + [offset + b for b in f.breakpoints], f.values)

    @classmethod
    def from_json(cls, obj: dict) -> "LineStepFunction":
        return cls.from_step(StepFunction.from_json(obj), float(obj.get("offset", 0.0)))

    def to_json(self) -> dict:
        if not self.values:
            return {"breakpoints": [], "values": [], "offset": 0.0}
        x0 = self.knots[0]
        return {
            "breakpoints": [k - x0 for k in self.knots[1:]],
            "values": list(self.values),
            "offset": x0,
        }

    def __repr__(self) -> str:
        return f"LineStepFunction({list(self.knots)}, {list(self.values)})"

    def is_zero(self) -> bool:
        return not self.values

    def shift(self, h: float) -> "LineStepFunction":
        return LineStepFunction([k + h for k in self.knots], self.values)

    def reflect(self) -> "LineStepFunction":
        """``x -> f(-x)``."""
        return LineStepFunction([-k for k in reversed(self.knots)], list(reversed(self.values)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if not self.values:
            return np.zeros_like(x) if x.ndim else 0.0
        idx = np.searchsorted(np.asarray(self.knots), x, side="right") - 1
        vals = np.concatenate([[0.0], self.values, [0.0]])
        out = vals[np.clip(idx + 1, 0, len(vals) - 1)]
        return out if x.ndim else float(out)

    def primitive(self) -> np.ndarray:
        """``F(knots[i]) = int_{knots[0]}^{knots[i]} f``."""
        if not self.values:
            return np.zeros(0)
        return np.concatenate([[0.0], np.cumsum(np.diff(self.knots) * np.asarray(self.values))])

    def mass(self) -> float:
        return float(self.primitive()[-1]) if self.values else 0.0

    def rearrange(self) -> StepFunction:
        """Decreasing rearrangement on ``(0, inf)``."""
        if not self.values:
            return StepFunction.zero()
        lens = np.diff(self.knots)
        f = StepFunction(np.cumsum(lens).tolist(), self.values)
        from .stepfn import rearrange

        return rearrange(f)

    def as_step(self) -> StepFunction:
        """The same levels read on ``(0, inf)`` (left end moved to 0)."""
        if not self.values:
            return StepFunction.zero()
        x0 = self.knots[0]
        return StepFunction([k - x0 for k in self.knots[1:]], self.values)


# ---------------------------------------------------------------------------
# maximal functions


@dataclass(frozen=True)
class Branch:
    """One candidate family of intervals on a cell.

    ``side == 'const'``: value ``D``.
    ``side == 'left'``: interval ``[x, pole]``, value ``(D + c y) y**(g-1)``
    with ``y = pole - x``.
    ``side == 'right'``: interval ``[pole, x]`` with ``y = x - pole``.
    """

    side: str
    D: float
    c: float
    pole: float = 0.0


def _branch_h(br: Branch, y: float, g1: float) -> float:
    if br.side == "const":
        return br.D
    if y == 0.0:
        return br.c if g1 == -1.0 else 0.0
    if y == math.inf:
        if g1 == -1.0:
            return br.c
        return math.inf if (br.c > 0 and g1 > -1.0) else 0.0
    try:
        scale = math.pow(y, g1)
    except OverflowError:  # subnormal y
        scale = math.inf
    return (br.D * scale if br.D else 0.0) + br.c * y ** (g1 + 1.0)


def _branch_y(br: Branch, x):
    return br.pole - x if br.side == "left" else x - br.pole


@dataclass(frozen=True)
class Cell:
    lo: float
    hi: float
    branches: tuple


class LineMaxExpr:
    """Cellwise maximum of closed-form branches on the real line."""

    def __init__(self, cells: Sequence[Cell], gamma: float):
        self.cells = tuple(cells)
        self.gamma = float(gamma)

    # evaluation ---------------------------------------------------------
    def _cell_index(self, x: float) -> int:
        for i, c in enumerate(self.cells):
            if c.lo <= x < c.hi or (c.hi == math.inf and x >= c.lo):
                return i
        return len(self.cells) - 1

    def value_at(self, x: float) -> float:
        if not self.cells:
            return 0.0
        cell = self.cells[self._cell_index(x)]
        g1 = self.gamma - 1.0
        best = 0.0
        for br in cell.branches:
            best = max(best, _branch_h(br, _branch_y(br, x), g1))
        return best

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return self.value_at(float(x))
        return np.array([self.value_at(float(v)) for v in x.ravel()]).reshape(x.shape)

    # distribution -------------------------------------------------------
    def _superlevel(self, br: Branch, lo: float, hi: float, lam: float) -> list[tuple[float, float]]:
        """Parts of ``(lo, hi)`` where the branch exceeds ``lam``."""
        g1 = self.gamma - 1.0
        if br.side == "const":
            return [(lo, hi)] if br.D > lam else []
        y0, y1 = sorted((_branch_y(br, lo), _branch_y(br, hi)))
        y0 = max(y0, 0.0)
        cuts = [y0]
        if self.gamma > 0 and br.D > 0 and br.c > 0:
            ys = (1.0 - self.gamma) * br.D / (self.gamma * br.c)
            if y0 < ys < y1:
                cuts.append(ys)
        cuts.append(y1)
        ivals = []
        for a, b in zip(cuts, cuts[1:]):
            ha, hb = _branch_h(br, a, g1), _branch_h(br, b, g1)
            if ha > lam and hb > lam:
                ivals.append((a, b))
            elif ha > lam or hb > lam:
                r = self._root(br, a, b, lam)
                ivals.append((a, r) if ha > lam else (r, b))
        out = []
        for a, b in ivals:
            if br.side == "left":
                out.append((br.pole - b, br.pole - a))
            else:
                out.append((br.pole + a, br.pole + b))
        return out

    def _root(self, br: Branch, a: float, b: float, lam: float) -> float:
        g = self.gamma
        if br.c == 0.0 or g == 0.0:
            # (D + c y) y**(g-1) = lam has closed forms in these two cases
            if g == 0.0:
                if lam == br.c:
                    return b if _branch_h(br, a, -1.0) > lam else a
                r = br.D / (lam - br.c)
            else:
                r = (br.D / lam) ** (1.0 / (1.0 - g))
            return min(max(r, a), b)
        g1 = g - 1.0
        hi = b
        if hi == math.inf:
            hi = max(a, 1.0)
            while _branch_h(br, hi, g1) <= lam if _branch_h(br, a, g1) > lam else _branch_h(br, hi, g1) > lam:
                hi *= 2.0
        lo = a if a > 0 else min(hi, 1.0) * 1e-300
        return sp_optimize.brentq(lambda y: _branch_h(br, y, g1) - lam, lo, hi, xtol=1e-15, rtol=1e-14)

    def distribution(self, lam: float) -> float:
        """Measure of ``{x : value(x) > lam}`` for ``lam > 0``."""
        if lam <= 0:
            return math.inf if self.cells else 0.0
        total = 0.0
        for cell in self.cells:
            pieces = []
            for br in cell.branches:
                pieces.extend(self._superlevel(br, cell.lo, cell.hi, lam))
            total += _union_length(pieces, cell.lo, cell.hi)
        return total

    def sup(self) -> float:
        g1 = self.gamma - 1.0
        best = 0.0
        for cell in self.cells:
            for br in cell.branches:
                if br.side == "const":
                    best = max(best, br.D)
                    continue
                ys = sorted((_branch_y(br, cell.lo), _branch_y(br, cell.hi)))
                for y in ys:
                    best = max(best, _branch_h(br, max(y, 0.0), g1))
        return best

    def rearrangement(self, t: float) -> float:
        """``inf {lam : distribution(lam) <= t}`` by bisection."""
        hi = self.sup()
        if hi == 0.0:
            return 0.0
        if self.distribution(hi) > t:
            return hi
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.distribution(mid) > t:
                lo = mid
            else:
                hi = mid
        return hi

    def to_json(self) -> dict:
        def fnum(x):
            return "inf" if x == math.inf else ("-inf" if x == -math.inf else x)

        return {
            "gamma": self.gamma,
            "cells": [
                {
                    "from": fnum(c.lo),
                    "to": fnum(c.hi),
                    "branches": [
                        {"side": b.side, "D": b.D, "c": b.c, "pole": b.pole} for b in c.branches
                    ],
                }
                for c in self.cells
            ],
        }


def _union_length(pieces, lo: float, hi: float) -> float:
    clipped = sorted((max(a, lo), min(b, hi)) for a, b in pieces if min(b, hi) > max(a, lo))
    total = 0.0
    cur_a = cur_b = None
    for a, b in clipped:
        if cur_b is None or a > cur_b:
            if cur_b is not None:
                total += cur_b - cur_a
            cur_a, cur_b = a, b
        else:
            cur_b = max(cur_b, b)
    if cur_b is not None:
        total += cur_b - cur_a
    return total


def _maximal_cells(f: LineStepFunction, gamma: float) -> list[Cell]:
    if f.is_zero():
        return []
    K = list(f.knots)
    F = f.primitive().tolist()
    g1 = gamma - 1.0
    n = len(K)
    cells = []
    # left ray: intervals [x, K[k]]
    cells.append(
        Cell(-math.inf, K[0], tuple(Branch("left", F[k], 0.0, K[k]) for k in range(1, n) if F[k] > 0))
    )
    for i in range(1, n):
        lo, hi = K[i - 1], K[i]
        c = f.values[i - 1]
        brs = []
        const = 0.0
        for j in range(0, i):
            for k in range(i, n):
                const = max(const, (F[k] - F[j]) * (K[k] - K[j]) ** g1)
        if const > 0:
            brs.append(Branch("const", const, 0.0))
        for k in range(i, n):
            D = (F[k] - F[i]) - c * (K[k] - K[i])
            brs.append(Branch("left", D, c, K[k]))
        for j in range(0, i):
            E = (F[i - 1] - F[j]) - c * (K[i - 1] - K[j])
            brs.append(Branch("right", E, c, K[j]))
        cells.append(Cell(lo, hi, tuple(brs)))
    total = F[-1]
    cells.append(
        Cell(
            K[-1],
            math.inf,
            tuple(Branch("right", total - F[j], 0.0, K[j]) for j in range(0, n - 1) if total - F[j] > 0),
        )
    )
    return cells


def maximal_function(f: LineStepFunction) -> LineMaxExpr:
    """Uncentred Hardy-Littlewood maximal function over intervals."""
    return LineMaxExpr(_maximal_cells(f, 0.0), 0.0)


def fractional_maximal_function(f: LineStepFunction, gamma: float) -> LineMaxExpr:
    """``sup |I|**(gamma - 1) int_I f`` over intervals ``I`` containing ``x``."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return LineMaxExpr(_maximal_cells(f, gamma), gamma)


def maximal_values(f: LineStepFunction, xs, gamma: float = 0.0) -> np.ndarray:
    """Direct evaluation by candidate enumeration (compiled when available)."""
    xs = np.asarray(xs, dtype=float)
    if f.is_zero():
        return np.zeros_like(xs)
    return _kernels.maxavg_eval(xs, np.asarray(f.knots), f.primitive(), gamma)


# ---------------------------------------------------------------------------
# singular integrals


def hilbert_transform(f: LineStepFunction, x):
    """Principal-value Hilbert transform.

    At a breakpoint the transform has a logarithmic singularity; the
    returned value is then the signed limit ``+-inf`` (sign of the jump
    from left to right value reversed).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if f.is_zero():
        out = np.zeros_like(xs)
    else:
        out = np.asarray(_kernels.hilbert_eval(xs, np.asarray(f.knots), np.asarray(f.values)))
        bad = np.isnan(out)
        if bad.any():
            vals = (0.0,) + f.values + (0.0,)
            for i in np.nonzero(bad)[0]:
                j = f.knots.index(float(xs[i]))
                jump = vals[j] - vals[j + 1]
                out[i] = math.copysign(math.inf, jump) if jump else 0.0
    return float(out[0]) if np.ndim(x) == 0 else out


def riesz_constant(gamma: float, n: int = 1) -> float:
    """Normalising constant of the Riesz kernel ``c |y|**(gamma - n)``."""
    return float(
        gamma_fn((n - gamma) / 2.0) / (math.pi ** (n / 2.0) * 2.0**gamma * gamma_fn(gamma / 2.0))
    )


def riesz_potential(f: LineStepFunction, gamma: float, x):
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if f.is_zero():
        out = np.zeros_like(xs)
    else:
        out = riesz_constant(gamma) * np.asarray(
            _kernels.riesz_eval(xs, np.asarray(f.knots), np.asarray(f.values), gamma)
        )
    return float(out[0]) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# numerical rearrangement


@dataclass(frozen=True)
class EmpiricalRearrangement:
    step: StepFunction
    resolution: float

    def __call__(self, t):
        return self.step(t)


def sample_grid(f: LineStepFunction, far: float = 1e4, per_unit: int = 400, near_decades: int = 10) -> np.ndarray:
    """Cell edges resolving ``f``'s breakpoints and its far field."""
    if f.is_zero():
        return np.array([-1.0, 1.0])
    K = np.asarray(f.knots)
    width = K[-1] - K[0]
    pts = [K, np.linspace(K[0], K[-1], max(2, int(per_unit * min(width, 50.0)) + 2))]
    scale = max(width, 1e-300)
    offs = scale * np.geomspace(10.0**-near_decades, 1.0, 40 * near_decades)
    for k in K:
        pts.append(k - offs)
        pts.append(k + offs)
    reach = far * max(width, 1.0)
    outward = np.geomspace(scale * 1e-3, reach, 800)
    pts.append(K[0] - outward)
    pts.append(K[-1] + outward)
    return np.unique(np.concatenate(pts))


def empirical_rearrangement(g: Callable, grid: np.ndarray, decay_check: bool = True) -> EmpiricalRearrangement:
    """Step approximation of ``g*`` from midpoint samples of ``|g|``.

    Each grid cell contributes its width at the midpoint value; sorting the
    cells by value gives the rearrangement of that piecewise-constant
    surrogate.  The reported resolution is the largest relative jump of
    ``g`` between neighbouring cells.
    """
    grid = np.asarray(grid, dtype=float)
    mids = 0.5 * (grid[1:] + grid[:-1])
    widths = np.diff(grid)
    vals = np.abs(np.asarray(g(mids), dtype=float))
    if not np.all(np.isfinite(vals)):
        raise ValueError("g must be finite at cell midpoints")
    top = vals.max(initial=0.0)
    if top == 0.0:
        return EmpiricalRearrangement(StepFunction.zero(), 0.0)
    if decay_check:
        edge = max(vals[0], vals[-1])
        if edge > 1e-2 * top:
            raise InfiniteRearrangement("g does not decay on the sampled range")
    order = np.argsort(-vals, kind="stable")
    lens = widths[order]
    levels = vals[order]
    keep = levels > 0
    cum = np.cumsum(lens[keep])
    # cells too thin to move the running length in floating point are dropped
    advance = np.diff(cum, prepend=0.0) > 0
    step = StepFunction(cum[advance].tolist(), levels[keep][advance].tolist())
    rel = np.abs(np.diff(vals)) / np.maximum(np.maximum(vals[1:], vals[:-1]), 1e-300)
    return EmpiricalRearrangement(step, float(rel.max(initial=0.0)))
