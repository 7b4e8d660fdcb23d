"""Gram matrices, SPD solves and L2 projection onto spline spaces."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.linalg

from ..errors import IllConditionedWarning
from .bspline import BSplineBasis
from .quadrature import composite_rule
from ._precision import EXTENDED_DPS, to_array

__all__ = ["gram_matrix", "spd_solve", "l2_project", "ProjectionResult", "SolveReport"]


def _rule(basis: BSplineBasis, npts: int):
    breaks = to_array(basis.breaks, basis.extended)
    return composite_rule(breaks, npts, basis.extended)


def gram_matrix(space, extended: bool = False) -> np.ndarray:
    """Mass matrix of the B-spline basis, exact via p+1 Gauss nodes per knot span."""
    basis = space if isinstance(space, BSplineBasis) else BSplineBasis(space, extended)
    X, W = _rule(basis, basis.p + 1)
    B = basis.values(X.ravel())
    return (B * W.ravel()[:, None]).T @ B


@dataclass(frozen=True)
class SolveReport:
    relative_residual: float
    condition: float


def _bandwidth(G) -> int:
    rows, cols = np.nonzero(G.astype(float))
    return int(np.max(np.abs(rows - cols))) if rows.size else 0


def _cholesky_mp(G):
    """Lower Cholesky factor of a banded SPD object matrix."""
    n = G.shape[0]
    bw = _bandwidth(G)
    L = np.zeros((n, n), dtype=object)
    for j in range(n):
        lo = max(0, j - bw)
        s = G[j, j] - sum((L[j, t] ** 2 for t in range(lo, j)), mpmath.mpf(0))
        L[j, j] = mpmath.sqrt(s)
        for i in range(j + 1, min(n, j + bw + 1)):
            lo_i = max(0, i - bw)
            s = G[i, j] - sum((L[i, t] * L[j, t] for t in range(lo_i, j)), mpmath.mpf(0))
            L[i, j] = s / L[j, j]
    return L, bw


def _cho_solve_mp(factor, B):
    L, bw = factor
    n = L.shape[0]
    Y = np.array(B, dtype=object, copy=True)
    for i in range(n):
        lo = max(0, i - bw)
        Y[i] = (Y[i] - L[i, lo:i] @ Y[lo:i]) / L[i, i]
    for i in range(n - 1, -1, -1):
        hi = min(n, i + bw + 1)
        Y[i] = (Y[i] - L[i + 1:hi, i] @ Y[i + 1:hi]) / L[i, i]
    return Y


def spd_solve(G: np.ndarray, B: np.ndarray, refine: int = 2):
    """Cholesky solve of G X = B with iterative refinement.

    Returns the solution and a :class:`SolveReport` holding the relative
    residual of the final iterate and the 2-norm condition number of G.
    """
    extended = G.dtype == object
    if extended:
        L = _cholesky_mp(G)
        solve = lambda R: _cho_solve_mp(L, R)  # noqa: E731
    else:
        factor = scipy.linalg.cho_factor(G, lower=True)
        solve = lambda R: scipy.linalg.cho_solve(factor, R)  # noqa: E731
    X = solve(B)
    for _ in range(refine):
        X = X + solve(B - G @ X)
    resid = B - G @ X
    bnorm = float(np.max(np.abs(B.astype(float)))) if B.size else 0.0
    rel = float(np.max(np.abs(resid.astype(float)))) / bnorm if bnorm > 0 else 0.0
    cond = float(np.linalg.cond(G.astype(float)))
    return X, SolveReport(rel, cond)


@dataclass(frozen=True)
class ProjectionResult:
    coeffs: np.ndarray
    error_norm: float
    quadrature_exact: bool
    solve: SolveReport


def _evaluate(f, x, extended: bool):
    if extended:
        return np.array([f(v) for v in x], dtype=object)
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([f(v) for v in x], dtype=float)


def l2_project(space, f, oversample: int = 4, degree: int | None = None,
               extended: bool = False) -> ProjectionResult:
    """L2 projection of ``f`` onto ``space`` and the norm of the remainder.

    Integrals use ``oversample * (p+1)`` Gauss nodes per knot span.  If ``f``
    is declared a piecewise polynomial of ``degree``, ``quadrature_exact``
    reports whether that rule integrates every product exactly.
    """
    if extended:
        with mpmath.workdps(EXTENDED_DPS):
            return _l2_project(space, f, oversample, degree, True)
    return _l2_project(space, f, oversample, degree, False)


def _l2_project(space, f, oversample, degree, extended):
    basis = BSplineBasis(space, extended)
    p = basis.p
    npts = oversample * (p + 1)
    exact = True
    if degree is not None:
        exact = 2 * max(degree, p) <= 2 * npts - 1
        if not exact:
            warnings.warn(f"{npts}-point rule does not integrate degree {degree} data exactly",
                          RuntimeWarning, stacklevel=3)
    X, W = _rule(basis, npts)
    x, w = X.ravel(), W.ravel()
    B = basis.values(x)
    fx = _evaluate(f, x, extended)
    G = (B * w[:, None]).T @ B
    rhs = (B * w[:, None]).T @ fx
    coeffs, report = spd_solve(G, rhs[:, None])
    coeffs = coeffs[:, 0]
    r = fx - B @ coeffs
    err2 = np.dot(w, r * r)
    err = float(mpmath.sqrt(err2)) if extended else float(np.sqrt(err2))
    if report.relative_residual > 1e-8:
        warnings.warn(f"Gram solve residual {report.relative_residual:.2e}", IllConditionedWarning, stacklevel=3)
    return ProjectionResult(coeffs, err, exact, report)
