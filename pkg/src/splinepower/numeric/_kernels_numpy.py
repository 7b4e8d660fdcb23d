"""Vectorised numpy versions of the inner loops.

These also run on object arrays of mpmath numbers, which is how the
extended-precision path reuses them.
"""

import math

import numpy as np


def basis_matrix(knots, p, x):
    knots = np.asarray(knots)
    x = np.asarray(x)
    nb = knots.shape[0] - p - 1
    fk = knots.astype(float)
    spans = np.searchsorted(fk, x.astype(float), side="right") - 1
    spans = np.clip(spans, p, nb - 1)
    npts = x.shape[0]
    zero = x.dtype.type(0) if x.dtype != object else 0 * x[0]
    N = np.empty((npts, p + 1), dtype=x.dtype)
    N[:, 0] = 1
    left = np.empty((npts, p + 1), dtype=x.dtype)
    right = np.empty((npts, p + 1), dtype=x.dtype)
    for j in range(1, p + 1):
        left[:, j] = x - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - x
        saved = np.full(npts, zero, dtype=x.dtype)
        for r in range(j):
            temp = N[:, r] / (right[:, r + 1] + left[:, j - r])
            N[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        N[:, j] = saved
    out = np.zeros((npts, nb), dtype=x.dtype)
    rows = np.arange(npts)
    for j in range(p + 1):
        out[rows, spans - p + j] = N[:, j]
    return out


def source_values(cell_a, cell_w, cell_span, span_stop, span_end, span_mu,
                  X, SW, Lref, Dref, wpow, invfact):
    nf, nq = X.shape
    nd = Lref.shape[0]
    q = Dref.shape[1] - 1
    U = np.zeros((nf * nq, nf * nd), dtype=X.dtype)
    # shift[mm, m] = te^(mm-m) / (mm-m)! is built per cell below
    for c in range(nf):
        bc = cell_a[c] + cell_w[c]
        s = cell_span[c]
        c2 = span_stop[s]
        mu = span_mu[s]
        cols = slice(c * nd, (c + 1) * nd)
        U[c * nq:(c + 1) * nq, cols] = wpow[c, 0] * (Lref * SW[c][None, :]).T
        dm = Dref * wpow[c][None, :]
        if c2 > c + 1:
            t = (X[c + 1:c2] - bc).ravel()
            powers = _powers(t, q) * invfact[None, :]
            U[(c + 1) * nq:c2 * nq, cols] = np.dot(powers, dm.T) * SW[c + 1:c2].ravel()[:, None]
        if mu >= 0 and c2 < nf:
            te = span_end[s] - bc
            mmax = min(q, mu)
            tp = _powers(np.array([te], dtype=X.dtype), q)[0]
            shift = np.zeros((q + 1, mmax + 1), dtype=X.dtype)
            for m in range(mmax + 1):
                for mm in range(m, q + 1):
                    shift[mm, m] = tp[mm - m] * invfact[mm - m]
            J = np.dot(dm, shift)
            t = (X[c2:] - span_end[s]).ravel()
            powers = _powers(t, mmax) * invfact[None, :mmax + 1]
            U[c2 * nq:, cols] = np.dot(powers, J.T) * SW[c2:].ravel()[:, None]
    return U


def _powers(t, deg):
    out = np.empty((t.shape[0], deg + 1), dtype=t.dtype)
    out[:, 0] = 1
    for m in range(1, deg + 1):
        out[:, m] = out[:, m - 1] * t
    return out


def power_iteration(M, v0, rtol, maxit):
    v = v0 / (np.dot(v0, v0) ** 0.5)
    lam_old = 0.0
    lam = 0.0
    for it in range(maxit):
        y = np.dot(M, v)
        lam = np.dot(v, y)
        v = y / (np.dot(y, y) ** 0.5)
        if it > 0 and abs(lam - lam_old) <= rtol * abs(lam):
            return lam, v, it + 1, True
        lam_old = lam
    return lam, v, maxit, False

