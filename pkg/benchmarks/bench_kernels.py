"""Compare the compiled line kernels with the NumPy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Each row reports the best
of several repeats and the largest absolute disagreement between backends.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from ricalc import _kernels
from ricalc._kernels import _fallback


def random_line(rng, pieces):
    knots = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 2.0, pieces))])
    vals = rng.uniform(0.0, 3.0, pieces)
    cum = np.concatenate([[0.0], np.cumsum(np.diff(knots) * vals)])
    return knots, vals, cum


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--pieces", type=int, nargs="+", default=[4, 16])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if _kernels.BACKEND != "cython":
        print("compiled extension not built; only the fallback is available")
        return 1
    from ricalc._kernels import _core

    rng = np.random.default_rng(0)
    print(f"{'kernel':<8} {'pieces':>6} {'points':>8} {'cython s':>10} {'numpy s':>10} {'speedup':>8} {'max diff':>10}")
    for pieces in args.pieces:
        knots, vals, cum = random_line(rng, pieces)
        for npts in args.points:
            xs = rng.uniform(knots[0] - 5.0, knots[-1] + 5.0, npts)
            cases = {
                "maxavg": (lambda m: m.maxavg_eval(xs, knots, cum, 0.3)),
                "hilbert": (lambda m: m.hilbert_eval(xs, knots, vals)),
                "riesz": (lambda m: m.riesz_eval(xs, knots, vals, 0.4)),
            }
            for name, call in cases.items():
                tc = min(timeit.repeat(lambda: call(_core), number=1, repeat=args.repeat))
                tp = min(timeit.repeat(lambda: call(_fallback), number=1, repeat=args.repeat))
                diff = float(np.nanmax(np.abs(np.asarray(call(_core)) - np.asarray(call(_fallback)))))
                print(f"{name:<8} {pieces:>6} {npts:>8} {tc:>10.4f} {tp:>10.4f} {tp / tc:>8.1f} {diff:>10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
