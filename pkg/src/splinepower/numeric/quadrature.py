"""Gauss-Legendre rules on [0, 1] in double or extended precision."""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

__all__ = ["gauss_legendre", "gauss_legendre_mp", "composite_rule"]


@lru_cache(maxsize=None)
def gauss_legendre(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]; exact for polynomials of degree 2*npts - 1."""
    if npts < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def _legendre_and_derivative(n: int, x):
    p0, p1 = mpmath.mpf(1), x
    if n == 0:
        return p0, mpmath.mpf(0)
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


@lru_cache(maxsize=None)
def _gauss_legendre_mp_cached(npts: int, dps: int):
    with mpmath.workdps(dps + 10):
        x0, _ = np.polynomial.legendre.leggauss(npts)
        nodes, weights = [], []
        for guess in x0:
            x = mpmath.mpf(float(guess))
            for _ in range(100):
                pn, dp = _legendre_and_derivative(npts, x)
                step = pn / dp
                x -= step
                if abs(step) < mpmath.mpf(10) ** (-(dps + 8)):
                    break
            _, dp = _legendre_and_derivative(npts, x)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append((x + 1) / 2)
            weights.append(w / 2)
    with mpmath.workdps(dps):
        return (
            np.array([+v for v in nodes], dtype=object),
            np.array([+v for v in weights], dtype=object),
        )


def gauss_legendre_mp(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1] as mpf object arrays at the current mp.dps."""
    if npts < 1:
        raise ValueError("need at least one node")
    return _gauss_legendre_mp_cached(npts, mpmath.mp.dps)


def composite_rule(breaks, npts: int, extended: bool = False):
    """Nodes of shape (cells, npts) and matching weights over consecutive breakpoints."""
    t, w = gauss_legendre_mp(npts) if extended else gauss_legendre(npts)
    breaks = np.asarray(breaks, dtype=object if extended else float)
    a, h = breaks[:-1], np.diff(breaks)
    return a[:, None] + h[:, None] * t[None, :], h[:, None] * w[None, :]
