import os
import subprocess
import sys

import numpy as np
import pytest

from ricalc import _kernels
from ricalc._kernels import _fallback


def random_line(rng, pieces):
    knots = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 2.0, pieces))])
    vals = rng.uniform(0.0, 3.0, pieces)
    cum = np.concatenate([[0.0], np.cumsum(np.diff(knots) * vals)])
    return knots, vals, cum


@pytest.fixture(params=range(5))
def case(request):
    rng = np.random.default_rng(request.param)
    knots, vals, cum = random_line(rng, 1 + request.param * 3)
    xs = np.concatenate([rng.uniform(-10, 25, 500), knots[1:-1] + 1e-9])
    return knots, vals, cum, xs


@pytest.mark.parametrize("gamma", [0.0, 0.5])
def test_maxavg_backends_agree(case, gamma):
    knots, _, cum, xs = case
    np.testing.assert_allclose(_kernels.maxavg_eval(xs, knots, cum, gamma), _fallback.maxavg_eval(xs, knots, cum, gamma), rtol=1e-12)


def test_hilbert_backends_agree(case):
    knots, vals, _, xs = case
    np.testing.assert_allclose(_kernels.hilbert_eval(xs, knots, vals), _fallback.hilbert_eval(xs, knots, vals), rtol=1e-10, atol=1e-12)


def test_hilbert_nan_on_knots(case):
    knots, vals, _, _ = case
    assert np.all(np.isnan(_kernels.hilbert_eval(knots, knots, vals)))
    assert np.all(np.isnan(_fallback.hilbert_eval(knots, knots, vals)))


@pytest.mark.parametrize("gamma", [0.25, 0.75])
def test_riesz_backends_agree(case, gamma):
    knots, vals, _, xs = case
    xs = np.concatenate([xs, knots])
    np.testing.assert_allclose(_kernels.riesz_eval(xs, knots, vals, gamma), _fallback.riesz_eval(xs, knots, vals, gamma), rtol=1e-12)


def test_backend_name():
    assert _kernels.BACKEND in ("cython", "python")


def test_pure_switch_selects_fallback():
    env = dict(os.environ, RICALC_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from ricalc import _kernels; print(_kernels.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
