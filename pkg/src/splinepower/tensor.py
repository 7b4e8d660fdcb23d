"""Tensor-product spline spaces on the unit cube and their error bound.

The L2 projection onto V_1 (x) ... (x) V_d factors into univariate
projections acting along one axis at a time.  Each univariate factor is a
contraction, so the error of the full projection is bounded by the sum of
the directional errors C_i ||d_i^{q_i+1} f||.

Everything here works on dense tensor Gauss grids; d is capped at 4.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidSpaceError, LengthMismatch
from .numeric.bspline import BSplineBasis
from .numeric.projection import spd_solve
from .numeric.quadrature import composite_rule
from .spaces import SobolevTarget, SplineSpaceSpec

__all__ = [
    "MAX_DIMENSION",
    "OVERSAMPLE",
    "TensorSpec",
    "DirectionalProjector",
    "TrigTerm",
    "TrigProduct",
    "TensorReport",
    "tensor_bound",
    "upper_constants",
    "tensor_project",
    "tensor_project_2d",
    "tensor_report",
]

MAX_DIMENSION = 4
OVERSAMPLE = 4


@dataclass(frozen=True)
class TensorSpec:
    """One (space, Sobolev target) pair per coordinate direction."""

    directions: tuple

    def __post_init__(self):
        dirs = tuple((s, t if isinstance(t, SobolevTarget) else SobolevTarget(int(t)))
                     for s, t in self.directions)
        object.__setattr__(self, "directions", dirs)
        if not 1 <= len(dirs) <= MAX_DIMENSION:
            raise InvalidSpaceError(f"need 1 <= d <= {MAX_DIMENSION}, got d={len(dirs)}")
        for space, target in dirs:
            if not isinstance(space, SplineSpaceSpec):
                raise InvalidSpaceError(f"direction space must be a SplineSpaceSpec, got {space!r}")
            target.check_against(space)

    @classmethod
    def uniform(cls, specs: Sequence[SplineSpaceSpec], q: Sequence[int] | None = None) -> "TensorSpec":
        q = [s.p for s in specs] if q is None else list(q)
        return cls(tuple(zip(specs, q)))

    @property
    def d(self) -> int:
        return len(self.directions)

    @property
    def spaces(self) -> list[SplineSpaceSpec]:
        return [s for s, _ in self.directions]

    @property
    def orders(self) -> list[int]:
        return [t.order for _, t in self.directions]


def tensor_bound(spec: TensorSpec, constants: Sequence[float],
                 derivative_norms: Sequence[float]) -> float:
    """Sum of C_i * ||d_i^{q_i+1} f|| over the directions."""
    if len(constants) != spec.d or len(derivative_norms) != spec.d:
        raise LengthMismatch(
            f"d={spec.d} but got {len(constants)} constants and {len(derivative_norms)} norms"
        )
    return math.fsum(float(c) * float(g) for c, g in zip(constants, derivative_norms))


def upper_constants(spec: TensorSpec) -> list[float]:
    """Certified constants (n_i pi)^(-q_i-1) for every direction.

    They hold for any smoothness k since S^p_{k,n} contains the maximally
    smooth space on the same partition.
    """
    return [(s.n * math.pi) ** (-(q + 1)) for s, q in zip(spec.spaces, spec.orders)]


class DirectionalProjector:
    """Univariate L2 projection acting on Gauss-grid values along one axis.

    ``matrix`` maps the nodal values of f to the nodal values of its
    projection; in the weighted inner product it is an orthogonal projector.
    """

    def __init__(self, space: SplineSpaceSpec, oversample: int = OVERSAMPLE):
        self.space = space
        basis = BSplineBasis(space)
        npts = oversample * (space.p + 1)
        self.npts_per_span = npts
        X, W = composite_rule([float(b) for b in basis.breaks], npts)
        self.nodes, self.weights = X.ravel(), W.ravel()
        B = basis.values(self.nodes)
        BW = B.T * self.weights[None, :]
        G = BW @ B
        coeffs, self.solve = spd_solve(G, BW)
        self.matrix = B @ coeffs

    def exact_for_degree(self, degree: int) -> bool:
        """True when the rule integrates degree * p products exactly."""
        return degree + self.space.p <= 2 * self.npts_per_span - 1

    def apply(self, values: np.ndarray, axis: int) -> np.ndarray:
        moved = np.moveaxis(values, axis, 0)
        out = np.tensordot(self.matrix, moved, axes=(1, 0))
        return np.moveaxis(out, 0, axis)


def _weighted_norm(values: np.ndarray, weights: Sequence[np.ndarray]) -> float:
    w = weights[0]
    for wi in weights[1:]:
        w = np.multiply.outer(w, wi)
    return float(np.sqrt(np.sum(w * values * values)))


@dataclass(frozen=True)
class TensorProjection:
    error_norm: float
    f_norm: float
    quadrature_exact: bool
    grid_shape: tuple


def tensor_project(spaces: Sequence[SplineSpaceSpec], f: Callable, order: Sequence[int] | None = None,
                   degree: int | None = None, oversample: int = OVERSAMPLE) -> TensorProjection:
    """Project ``f(x_1, ..., x_d)`` onto the tensor space and return the L2 error.

    ``f`` receives broadcast coordinate arrays.  ``order`` fixes the sequence
    in which the directional factors are applied.  If ``f`` is declared a
    polynomial of ``degree`` in each variable, ``quadrature_exact`` reports
    whether the rule is exact for it.
    """
    if not 1 <= len(spaces) <= MAX_DIMENSION:
        raise InvalidSpaceError(f"need 1 <= d <= {MAX_DIMENSION}, got d={len(spaces)}")
    projectors = [DirectionalProjector(s, oversample) for s in spaces]
    grids = np.meshgrid(*[pr.nodes for pr in projectors], indexing="ij")
    F = np.asarray(f(*grids), dtype=float)
    F = np.broadcast_to(F, grids[0].shape).copy()
    PF = F
    for axis in (range(len(spaces)) if order is None else order):
        PF = projectors[axis].apply(PF, axis)
    weights = [pr.weights for pr in projectors]
    exact = degree is None or all(pr.exact_for_degree(degree) for pr in projectors)
    return TensorProjection(_weighted_norm(F - PF, weights), _weighted_norm(F, weights),
                            exact, F.shape)


def tensor_project_2d(specs: Sequence[SplineSpaceSpec], f: Callable, order=(0, 1),
                      degree: int | None = None) -> TensorProjection:
    if len(specs) != 2:
        raise InvalidSpaceError(f"expected two directions, got {len(specs)}")
    return tensor_project(specs, f, order, degree)


@dataclass(frozen=True)
class TrigTerm:
    """coeff * prod_i phi_i(x_i) with phi_i = cos(j_i pi x) or sin(j_i pi x)."""

    coeff: float
    freqs: tuple
    kinds: tuple  # "cos" or "sin" per direction

    def evaluate(self, *xs, derivative: Sequence[int] | None = None):
        derivative = derivative or (0,) * len(xs)
        out = self.coeff
        for x, j, kind, m in zip(xs, self.freqs, self.kinds, derivative):
            shift = 0.0 if kind == "cos" else -math.pi / 2
            w = j * math.pi
            if j == 0:
                factor = (np.cos(0 * x + shift) if m == 0 else 0 * x)
            else:
                factor = w ** m * np.cos(w * x + shift + m * math.pi / 2)
            out = out * factor
        return out


@dataclass(frozen=True)
class TrigProduct:
    """Sum of separable trigonometric terms on the unit cube."""

    terms: tuple

    @property
    def d(self) -> int:
        return len(self.terms[0].freqs)

    def __call__(self, *xs):
        return sum(t.evaluate(*xs) for t in self.terms)

    def partial(self, axis: int, order: int) -> Callable:
        der = tuple(order if i == axis else 0 for i in range(self.d))
        return lambda *xs: sum(t.evaluate(*xs, derivative=der) for t in self.terms)

    @classmethod
    def random(cls, rng: np.random.Generator, d: int = 2, terms: int = 3, max_freq: int = 4,
               separable: bool = False) -> "TrigProduct":
        """Random trigonometric polynomial; ``separable`` makes it depend on x_1 only."""
        out = []
        for _ in range(terms):
            freqs = tuple(int(rng.integers(0, max_freq + 1)) if (i == 0 or not separable) else 0
                          for i in range(d))
            kinds = tuple("cos" if (separable and i > 0) else str(rng.choice(["cos", "sin"]))
                          for i in range(d))
            out.append(TrigTerm(float(rng.normal()), freqs, kinds))
        return cls(tuple(out))


def _norm_on_grid(g: Callable, d: int, cells: int = 16, npts: int = 16) -> float:
    X, W = composite_rule(np.linspace(0.0, 1.0, cells + 1), npts)
    x, w = X.ravel(), W.ravel()
    grids = np.meshgrid(*([x] * d), indexing="ij")
    vals = np.broadcast_to(np.asarray(g(*grids), dtype=float), grids[0].shape)
    return _weighted_norm(vals, [w] * d)


@dataclass
class TensorReport:
    spaces: list
    orders: list
    error_norm: float
    bound: float
    constants: list
    derivative_norms: list
    holds: bool
    quadrature_exact: bool = True
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = {
            "spaces": [[s.p, s.k, s.n] for s in self.spaces],
            "orders": list(self.orders),
            "error_norm": repr(self.error_norm),
            "bound": repr(self.bound),
            "constants": [repr(c) for c in self.constants],
            "derivative_norms": [repr(g) for g in self.derivative_norms],
            "holds": self.holds,
            "quadrature_exact": self.quadrature_exact,
        }
        d.update(self.extra)
        return json.dumps(d, sort_keys=True)


def tensor_report(spec: TensorSpec, f: TrigProduct, constants: Sequence[float] | None = None) -> TensorReport:
    """Projection error of ``f`` next to the tensor bound with the given constants.

    The constants default to :func:`upper_constants`.
    """
    constants = upper_constants(spec) if constants is None else list(constants)
    proj = tensor_project(spec.spaces, f)
    norms = [_norm_on_grid(f.partial(i, q + 1), spec.d) for i, q in enumerate(spec.orders)]
    bound = tensor_bound(spec, constants, norms)
    return TensorReport(spec.spaces, spec.orders, proj.error_norm, bound, constants, norms,
                        proj.error_norm <= bound * (1 + 1e-10) + 1e-14, proj.quadrature_exact)
