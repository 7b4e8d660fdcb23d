"""Spline numerics: B-splines, quadrature, projection and constant estimation."""

from .bspline import BSplineBasis, bspline_eval
from .estimate import ConstantEstimate, estimate_constant, estimate_constant_broken
from .kernels import backend
from .piecewise import PiecewisePolynomial
from .projection import ProjectionResult, gram_matrix, l2_project, spd_solve
from .quadrature import gauss_legendre

__all__ = [
    "BSplineBasis",
    "bspline_eval",
    "ConstantEstimate",
    "estimate_constant",
    "estimate_constant_broken",
    "backend",
    "PiecewisePolynomial",
    "ProjectionResult",
    "gram_matrix",
    "l2_project",
    "spd_solve",
    "gauss_legendre",
    "export_matrix",
]


def export_matrix(path, matrix, precision: int = 17) -> None:
    """Write a dense matrix as whitespace-separated text."""
    import numpy as np

    np.savetxt(path, np.asarray(matrix, dtype=float), fmt=f"%.{precision}e")
