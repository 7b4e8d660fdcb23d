"""Compiled inner loops; signatures mirror :mod:`._kernels_numpy` exactly."""

import numpy as np
from numba import njit


@njit(cache=True)
def _find_span(knots, p, nb, x):
    if x >= knots[nb]:
        return nb - 1
    lo, hi = p, nb
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if x < knots[mid]:
            hi = mid
        else:
            lo = mid
    return lo


@njit(cache=True)
def basis_matrix(knots, p, x):
    nb = knots.shape[0] - p - 1
    out = np.zeros((x.shape[0], nb))
    left = np.empty(p + 1)
    right = np.empty(p + 1)
    N = np.empty(p + 1)
    for r in range(x.shape[0]):
        xx = x[r]
        s = _find_span(knots, p, nb, xx)
        N[0] = 1.0
        for j in range(1, p + 1):
            left[j] = xx - knots[s + 1 - j]
            right[j] = knots[s + j] - xx
            saved = 0.0
            for rr in range(j):
                temp = N[rr] / (right[rr + 1] + left[j - rr])
                N[rr] = saved + right[rr + 1] * temp
                saved = left[j - rr] * temp
            N[j] = saved
        for j in range(p + 1):
            out[r, s - p + j] = N[j]
    return out


@njit(cache=True)
def source_values(cell_a, cell_w, cell_span, span_stop, span_end, span_mu,
                  X, SW, Lref, Dref, wpow, invfact):
    nf, nq = X.shape
    nd = Lref.shape[0]
    q = Dref.shape[1] - 1
    U = np.zeros((nf * nq, nf * nd))
    dm = np.empty(q + 1)
    J = np.empty(q + 1)
    for c in range(nf):
        bc = cell_a[c] + cell_w[c]
        s = cell_span[c]
        c2 = span_stop[s]
        mu = span_mu[s]
        for i in range(nd):
            col = c * nd + i
            for l in range(nq):
                U[c * nq + l, col] = wpow[c, 0] * Lref[i, l] * SW[c, l]
            for m in range(q + 1):
                dm[m] = wpow[c, m] * Dref[i, m]
            for cc in range(c + 1, c2):
                for l in range(nq):
                    t = X[cc, l] - bc
                    acc = 0.0
                    for m in range(q, -1, -1):
                        acc = acc * t + dm[m] * invfact[m]
                    U[cc * nq + l, col] = acc * SW[cc, l]
            if mu >= 0 and c2 < nf:
                te = span_end[s] - bc
                mmax = min(q, mu)
                for m in range(mmax + 1):
                    acc = 0.0
                    for mm in range(q, m - 1, -1):
                        acc = acc * te + dm[mm] * invfact[mm - m]
                    J[m] = acc
                xe = span_end[s]
                for cc in range(c2, nf):
                    for l in range(nq):
                        t = X[cc, l] - xe
                        acc = 0.0
                        for m in range(mmax, -1, -1):
                            acc = acc * t + J[m] * invfact[m]
                        U[cc * nq + l, col] = acc * SW[cc, l]
    return U


@njit(cache=True)
def power_iteration(M, v0, rtol, maxit):
    v = v0 / np.sqrt(np.dot(v0, v0))
    lam_old = 0.0
    lam = 0.0
    for it in range(maxit):
        y = np.dot(M, v)
        lam = np.dot(v, y)
        v = y / np.sqrt(np.dot(y, y))
        if it > 0 and abs(lam - lam_old) <= rtol * abs(lam):
            return lam, v, it + 1, True
        lam_old = lam
    return lam, v, maxit, False
