"""NumPy implementations of the line kernels (used when the extension is absent)."""

from __future__ import annotations

import math

import numpy as np


def maxavg_eval(xs, knots, cum, gamma, chunk=2048):
    xs = np.asarray(xs, dtype=float)
    if xs.size <= chunk:
        return _maxavg_block(xs, knots, cum, gamma)
    return np.concatenate(
        [_maxavg_block(xs[i : i + chunk], knots, cum, gamma) for i in range(0, xs.size, chunk)]
    )


def _maxavg_block(xs, knots, cum, gamma):
    """``sup (F(b) - F(a)) (b - a)**(gamma - 1)`` over ``a <= x <= b``.

    ``knots`` are the breakpoints of a step function on the line and ``cum``
    its primitive ``F`` at those knots (``cum[0] == 0``).  Candidate
    endpoints are the knots and ``x`` itself.  Masses are split at ``x``
    into a knot-to-knot part and the partial piece around ``x``, so short
    intervals ending at ``x`` keep full relative accuracy.
    """
    xs = np.asarray(xs, dtype=float)
    knots = np.asarray(knots, dtype=float)
    cum = np.asarray(cum, dtype=float)
    nk = knots.size
    if xs.size == 0:
        return np.zeros(0)
    s = np.searchsorted(knots, xs, side="right") - 1  # piece holding x, -1 .. nk-1
    dens = np.concatenate([[0.0], np.diff(cum) / np.diff(knots), [0.0]])[s + 1]
    inside = (s >= 0) & (s < nk - 1)
    lo = knots[np.clip(s, 0, nk - 1)]
    hi = knots[np.clip(s + 1, 0, nk - 1)]
    left_part = np.where(inside, dens * (xs - lo), 0.0)
    right_part = np.where(inside, dens * (hi - xs), 0.0)
    c_lo = np.where(s >= 0, cum[np.clip(s, 0, nk - 1)], 0.0)
    c_hi = np.where(s < nk - 1, cum[np.clip(s + 1, 0, nk - 1)], cum[-1])
    X = xs[:, None]
    # left endpoints: knots at or before x, then x itself (mass 0, length 0)
    lmask = np.concatenate([knots[None, :] <= X, np.ones((xs.size, 1), bool)], axis=1)
    lmass = np.concatenate([(c_lo[:, None] - cum[None, :]) + left_part[:, None], np.zeros((xs.size, 1))], axis=1)
    llen = np.concatenate([X - knots[None, :], np.zeros((xs.size, 1))], axis=1)
    # right endpoints: knots after x, then x itself
    rmask = np.concatenate([knots[None, :] > X, np.ones((xs.size, 1), bool)], axis=1)
    rmass = np.concatenate([(cum[None, :] - c_hi[:, None]) + right_part[:, None], np.zeros((xs.size, 1))], axis=1)
    rlen = np.concatenate([knots[None, :] - X, np.zeros((xs.size, 1))], axis=1)
    mass = lmass[:, :, None] + rmass[:, None, :]
    length = llen[:, :, None] + rlen[:, None, :]
    ok = lmask[:, :, None] & rmask[:, None, :] & (length > 0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        safe = np.where(ok, length, 1.0)
        # average first: mass * length**(gamma - 1) overflows for subnormal lengths
        val = np.where(ok, mass / safe * np.power(safe, gamma), 0.0)
    return val.reshape(xs.size, -1).max(axis=1)


def hilbert_eval(xs, knots, vals):
    """``(1/pi) sum_i v_i log|x - x_{i-1}| / |x - x_i|``; ``nan`` on knots."""
    xs = np.asarray(xs, dtype=float)[:, None]
    lo = np.asarray(knots[:-1], dtype=float)[None, :]
    hi = np.asarray(knots[1:], dtype=float)[None, :]
    v = np.asarray(vals, dtype=float)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (v * (np.log(np.abs(xs - lo)) - np.log(np.abs(xs - hi)))).sum(axis=1) / math.pi
    out[np.isin(xs[:, 0], knots)] = np.nan
    return out


def riesz_eval(xs, knots, vals, gamma):
    """``sum_i v_i int_{x_{i-1}}^{x_i} |x - y|**(gamma - 1) dy`` (no constant)."""
    xs = np.asarray(xs, dtype=float)[:, None]
    lo = np.asarray(knots[:-1], dtype=float)[None, :]
    hi = np.asarray(knots[1:], dtype=float)[None, :]
    v = np.asarray(vals, dtype=float)[None, :]
    dl = np.abs(xs - lo) ** gamma
    dh = np.abs(xs - hi) ** gamma
    inside = (xs > lo) & (xs < hi)
    seg = np.where(inside, dl + dh, np.abs(dh - dl)) / gamma
    return (v * seg).sum(axis=1)
