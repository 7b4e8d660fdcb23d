"""B-spline bases built from the exact knot vectors of :mod:`splinepower.spaces`."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..spaces import BrokenSpec, SplineSpaceSpec, expanded_knots, knot_vector
from . import kernels
from ._precision import to_array

__all__ = ["BSplineBasis", "bspline_eval"]


class BSplineBasis:
    """Open-knot B-spline basis of a uniform or broken space.

    Attributes:
        space: the space descriptor
        p: degree
        knots: expanded knot vector (float64 or mpf object array)
        breaks: distinct knots as Fractions, including 0 and 1
    """

    def __init__(self, space: SplineSpaceSpec | BrokenSpec, extended: bool = False):
        self.space = space
        self.p = space.p
        self.extended = extended
        self.exact_knots = expanded_knots(space)
        self.knots = to_array(self.exact_knots, extended)
        self.breaks: list[Fraction] = [x for x, _ in knot_vector(space)]

    def __repr__(self):
        return f"BSplineBasis({self.space!r})"

    @property
    def size(self) -> int:
        return len(self.exact_knots) - self.p - 1

    def values(self, x) -> np.ndarray:
        """Matrix with one row per point and one column per basis function."""
        x = np.atleast_1d(np.asarray(x, dtype=object if self.extended else float))
        return kernels.basis_matrix(self.knots, self.p, x)

    def evaluate(self, coeffs, x) -> np.ndarray:
        return self.values(x) @ np.asarray(coeffs)


def bspline_eval(space: SplineSpaceSpec | BrokenSpec, index: int, x: float) -> float:
    """Value of the ``index``-th B-spline of ``space`` at ``x`` in [0, 1]."""
    basis = BSplineBasis(space)
    if not 0 <= index < basis.size:
        raise IndexError(f"basis index {index} outside [0, {basis.size})")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    return float(basis.values([x])[0, index])
