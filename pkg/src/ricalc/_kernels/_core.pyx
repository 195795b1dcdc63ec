# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled line kernels; same contracts as ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, pow, M_PI, NAN

cnp.import_array()


def maxavg_eval(xs, knots, cum, double gamma):
    cdef cnp.ndarray[double, ndim=1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] K = np.ascontiguousarray(knots, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] C = np.ascontiguousarray(cum, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0], nk = K.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(m, dtype=np.float64)
    cdef Py_ssize_t i, j, k, s
    cdef double x, best, dens, lpart, rpart, clo, chi, ml, mr, ll, rl, w, v
    for i in range(m):
        x = X[i]
        # piece s holds x; masses are split at x to avoid F(b) - F(x) cancellation
        s = -1
        while s + 1 < nk and K[s + 1] <= x:
            s += 1
        lpart = 0.0
        rpart = 0.0
        if 0 <= s < nk - 1:
            dens = (C[s + 1] - C[s]) / (K[s + 1] - K[s])
            lpart = dens * (x - K[s])
            rpart = dens * (K[s + 1] - x)
        clo = C[s] if s >= 0 else 0.0
        chi = C[s + 1] if s < nk - 1 else C[nk - 1]
        best = 0.0
        for j in range(-1, s + 1):
            if j < 0:
                ml = 0.0
                ll = 0.0
            else:
                ml = clo - C[j] + lpart
                ll = x - K[j]
            for k in range(s, nk):
                if k == s:
                    mr = 0.0
                    rl = 0.0
                else:
                    mr = C[k] - chi + rpart
                    rl = K[k] - x
                w = ll + rl
                if w > 0.0:
                    v = (ml + mr) / w * pow(w, gamma)
                    if v > best:
                        best = v
        out[i] = best
    return out


def hilbert_eval(xs, knots, vals):
    cdef cnp.ndarray[double, ndim=1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] K = np.ascontiguousarray(knots, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] V = np.ascontiguousarray(vals, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0], nv = V.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double x, acc, prev, cur, d
    for i in range(m):
        x = X[i]
        acc = 0.0
        # each knot's logarithm is shared by the two segments meeting there
        d = fabs(x - K[0])
        if d == 0.0:
            out[i] = NAN
            continue
        prev = log(d)
        for j in range(nv):
            d = fabs(x - K[j + 1])
            if d == 0.0:
                acc = NAN
                break
            cur = log(d)
            acc += V[j] * (prev - cur)
            prev = cur
        out[i] = acc / M_PI
    return out


def riesz_eval(xs, knots, vals, double gamma):
    cdef cnp.ndarray[double, ndim=1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] K = np.ascontiguousarray(knots, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] V = np.ascontiguousarray(vals, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0], nv = V.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double x, acc, dl, dh
    for i in range(m):
        x = X[i]
        acc = 0.0
        dl = pow(fabs(x - K[0]), gamma)
        for j in range(nv):
            dh = pow(fabs(x - K[j + 1]), gamma)
            if x > K[j] and x < K[j + 1]:
                acc += V[j] * (dl + dh)
            else:
                acc += V[j] * fabs(dh - dl)
            dl = dh
        out[i] = acc / gamma
    return out
