"""Discontinuous piecewise polynomials stored as local Legendre series."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import legendre_series as ls
from .quadrature import gauss_legendre

__all__ = ["PiecewisePolynomial"]


@dataclass(frozen=True)
class PiecewisePolynomial:
    """``coeffs[c][i]`` multiplies l_i((x - a_c) / w_c) on cell c = [a_c, a_{c+1}).

    ``mesh`` holds the breakpoints (Fractions or floats).  Because the local
    Legendre polynomials are orthogonal, the mass matrix of a cell is
    diag(w_c / (2i + 1)).
    """

    mesh: tuple
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != len(self.mesh) - 1:
            raise ValueError("need one coefficient list per cell")

    @classmethod
    def from_function(cls, mesh, degree: int, f) -> "PiecewisePolynomial":
        """Cellwise L2 projection of ``f`` onto degree-``degree`` polynomials."""
        t, w = gauss_legendre(degree + 1 + 4)
        out = []
        for a, b in zip(mesh[:-1], mesh[1:]):
            a, b = float(a), float(b)
            fx = np.asarray(f(a + (b - a) * t), dtype=float)
            row = []
            for i in range(degree + 1):
                li = ls.evaluate([0.0] * i + [1.0], t)
                row.append((2 * i + 1) * float(np.dot(w, fx * li)))
            out.append(tuple(row))
        return cls(tuple(mesh), tuple(out))

    @property
    def degrees(self) -> list[int]:
        return [len(c) - 1 for c in self.coeffs]

    def widths(self) -> list:
        return [b - a for a, b in zip(self.mesh[:-1], self.mesh[1:])]

    def cell_of(self, x) -> np.ndarray:
        edges = np.asarray([float(v) for v in self.mesh])
        idx = np.searchsorted(edges, np.asarray(x, dtype=float), side="right") - 1
        return np.clip(idx, 0, len(self.coeffs) - 1)

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        cells = self.cell_of(x)
        out = np.empty_like(x)
        for c in np.unique(cells):
            a, b = float(self.mesh[c]), float(self.mesh[c + 1])
            sel = cells == c
            out[sel] = ls.evaluate([float(v) for v in self.coeffs[c]], (x[sel] - a) / (b - a))
        return out

    def norm_squared(self):
        total = 0
        for w, c in zip(self.widths(), self.coeffs):
            total += sum(ci * ci * w * m for ci, m in zip(c, ls.mass_diagonal(len(c) - 1)))
        return total

    def norm(self) -> float:
        return float(self.norm_squared()) ** 0.5

    def __sub__(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        if tuple(self.mesh) != tuple(other.mesh):
            raise ValueError("meshes differ")
        out = []
        for a, b in zip(self.coeffs, other.coeffs):
            size = max(len(a), len(b))
            a = list(a) + [0] * (size - len(a))
            b = list(b) + [0] * (size - len(b))
            out.append(tuple(x - y for x, y in zip(a, b)))
        return PiecewisePolynomial(self.mesh, tuple(out))

    def antiderivative(self) -> "PiecewisePolynomial":
        """Continuous antiderivative vanishing at the left end; degree rises by one."""
        carry = 0 * self.coeffs[0][0]
        out = []
        for w, c in zip(self.widths(), self.coeffs):
            local = [w * v for v in ls.antiderivative(list(c))]
            local[0] = local[0] + carry
            carry = ls.endpoint_derivative(local, 0)
            out.append(tuple(local))
        return PiecewisePolynomial(self.mesh, tuple(out))

    def endpoint_values(self, cell: int, order: int = 0):
        """Left and right limits of the ``order``-th derivative on ``cell``."""
        w = self.mesh[cell + 1] - self.mesh[cell]
        c = list(self.coeffs[cell])
        scale = w ** (-order) if not isinstance(w, Fraction) else Fraction(1) / w ** order
        return (ls.endpoint_derivative(c, order, right=False) * scale,
                ls.endpoint_derivative(c, order) * scale)
