"""Kernel dispatch between the numba and pure-numpy implementations.

The numba path is used when numba imports and ``SPLINEPOWER_DISABLE_NUMBA``
is unset (or ``0``).  Object-dtype (extended precision) inputs always take
the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_numpy

__all__ = ["backend", "use_numba", "basis_matrix", "source_values", "power_iteration"]


def _numba_requested() -> bool:
    return os.environ.get("SPLINEPOWER_DISABLE_NUMBA", "0").strip().lower() in ("", "0", "false", "no")


try:
    if not _numba_requested():
        raise ImportError("disabled by SPLINEPOWER_DISABLE_NUMBA")
    from . import _kernels_numba
except ImportError:  # numba missing or switched off
    _kernels_numba = None


def use_numba() -> bool:
    return _kernels_numba is not None


def backend() -> str:
    return "numba" if use_numba() else "numpy"


def _pick(name: str, *arrays):
    if _kernels_numba is not None and all(
        not isinstance(a, np.ndarray) or a.dtype != object for a in arrays
    ):
        return getattr(_kernels_numba, name)
    return getattr(_kernels_numpy, name)


def basis_matrix(knots: np.ndarray, p: int, x: np.ndarray) -> np.ndarray:
    """Values of every B-spline of degree ``p`` at the points ``x`` (rows)."""
    return _pick("basis_matrix", knots, x)(knots, p, x)


def source_values(cell_a, cell_w, cell_span, span_stop, span_end, span_mu,
                  X, SW, Lref, Dref, wpow, invfact):
    fn = _pick("source_values", X, Lref)
    return fn(cell_a, cell_w, cell_span, span_stop, span_end, span_mu,
              X, SW, Lref, Dref, wpow, invfact)


def power_iteration(M, v0, rtol: float, maxit: int):
    """Largest eigenvalue of symmetric PSD ``M``; returns (lam, v, iterations, converged)."""
    return _pick("power_iteration", M)(M, v0, rtol, maxit)
