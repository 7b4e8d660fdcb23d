"""Numerical estimation of the best constants C_{p,k,n,q}.

The constant is the norm of A = (I - P) K^{q+1}, where P is the L2
projection onto the spline space and K integrates from 0: every f in
H^{q+1} is a polynomial of degree <= q (reproduced by P) plus K^{q+1} g
with g = f^{(q+1)}.  The sup of ||A g|| / ||g|| is taken over g in
discontinuous piecewise polynomials of degree p+2 on a refined mesh.
Refining the mesh nests the trial spaces, so the estimates increase
towards the true constant.

To keep the residual free of cancellation, K^{q+1} g is split per knot
span into a span-local antiderivative plus truncated powers at the span
ends; only truncated powers of order <= the knot's continuity survive the
projection, all other parts lie in the spline space.  All pieces are then
small compared with ||g||, so the residual is computed to full relative
accuracy.

Functions in the fine space are represented by their values at Gauss
nodes scaled by the square roots of the weights.  With D+1 nodes per cell
this is an isometry for cellwise degree-D data, equivalent to the
orthonormal local Legendre coordinates.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from ..errors import IllConditionedWarning, InvalidSpaceError, NotConvergedWarning, PrecisionError
from ..spaces import BrokenSpec, SplineSpaceSpec, breakpoints_with_continuity, spec_to_record
from . import kernels
from . import legendre_series as ls
from ._precision import EXTENDED_DPS, sqrt, to_array
from .bspline import BSplineBasis
from .projection import spd_solve
from .quadrature import gauss_legendre, gauss_legendre_mp

__all__ = [
    "ConstantEstimate",
    "LevelResult",
    "estimate_constant",
    "estimate_constant_broken",
    "top_singular_value",
    "residual_operator",
    "DOUBLE_PRECISION_MAX_DEGREE",
]

DOUBLE_PRECISION_MAX_DEGREE = 10
TRIAL_EXTRA_DEGREE = 2
ILL_CONDITIONED_RESIDUAL = 1e-8
RAYLEIGH_TOL = 1e-10
MAX_POWER_ITERATIONS = 10_000


@dataclass
class ConstantEstimate:
    """Estimated best constant with its refinement history.

    ``refinement_trace`` lists (fine mesh factor, estimate) pairs; ``value``
    is the last entry and ``residual`` the last relative increment.
    """

    value: float
    p: int
    k: int
    n: int
    q: int
    refinement_trace: list = field(default_factory=list)
    converged: bool = False
    residual: float = math.inf
    tolerance: float = 1e-6
    condition: float = math.nan
    ill_conditioned: bool = False
    power_iterations: list = field(default_factory=list)
    power_converged: bool = True
    extended_precision: bool = False
    space: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = asdict(self)
        d["refinement_trace"] = [[f, repr(v)] for f, v in self.refinement_trace]
        for key in ("value", "residual", "condition", "tolerance"):
            d[key] = repr(d[key])
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ConstantEstimate":
        d = json.loads(text)
        d["refinement_trace"] = [(int(f), float(v)) for f, v in d["refinement_trace"]]
        for key in ("value", "residual", "condition", "tolerance"):
            d[key] = float(d[key])
        return cls(**d)


@dataclass(frozen=True)
class LevelResult:
    value: float
    condition: float
    solve_residual: float
    iterations: int
    power_converged: bool


def _fine_mesh(space, factor: int) -> list[Fraction]:
    n = space.n
    pts = {Fraction(j, n * factor) for j in range(n * factor + 1)}
    if isinstance(space, BrokenSpec):
        pts.update(space.breakpoints)
    return sorted(pts)


def _reference_data(q: int, d: int, nodes, extended: bool):
    """Values of K^{q+1} psi_i on the unit cell and its derivatives at t = 1.

    psi_i = sqrt(2i+1) l_i is the orthonormal Legendre basis of [0, 1].
    """
    nq = len(nodes)
    dtype = object if extended else float
    Lref = np.zeros((d + 1, nq), dtype=dtype)
    Dref = np.zeros((d + 1, q + 1), dtype=dtype)
    for i in range(d + 1):
        c = [Fraction(0)] * i + [Fraction(1)]
        for _ in range(q + 1):
            c = ls.antiderivative(c)
        norm = mpmath.sqrt(2 * i + 1) if extended else math.sqrt(2 * i + 1)
        cc = [(mpmath.mpf(v.numerator) / v.denominator) if extended else float(v) for v in c]
        Lref[i] = norm * ls.evaluate(cc, nodes)
        for m in range(q + 1):
            v = ls.endpoint_derivative(c, m)
            Dref[i, m] = norm * ((mpmath.mpf(v.numerator) / v.denominator) if extended else float(v))
    return Lref, Dref


def residual_operator(space, q: int, factor: int, extended: bool = False,
                      trial_degree: int | None = None):
    """Matrix of A = (I - P) K^{q+1} from trial coordinates to weighted nodal values.

    Returns ``(R, report)`` where ``report`` is the Gram solve report.
    """
    p = space.p
    d = p + TRIAL_EXTRA_DEGREE if trial_degree is None else trial_degree
    D = max(d + q + 1, p)
    nq = D + 1

    mesh = _fine_mesh(space, factor)
    spans = breakpoints_with_continuity(space)
    span_x = [x for x, _ in spans]
    cell_span = np.searchsorted(np.array([float(x) for x in span_x]),
                                np.array([float(a) for a in mesh[:-1]]), side="right") - 1
    cell_span = np.asarray(cell_span, dtype=np.int64)
    nspans = len(spans) - 1
    span_stop = np.searchsorted(cell_span, np.arange(nspans), side="right").astype(np.int64)
    span_end = to_array(span_x[1:], extended)
    span_mu = np.array([mu for _, mu in spans[1:]], dtype=np.int64)

    mesh_arr = to_array(mesh, extended)
    a = mesh_arr[:-1]
    w = mesh_arr[1:] - mesh_arr[:-1]
    tau, omega = gauss_legendre_mp(nq) if extended else gauss_legendre(nq)
    X = a[:, None] + w[:, None] * tau[None, :]
    SW = sqrt(w[:, None] * omega[None, :], extended)

    root_w = sqrt(w, extended)
    wpow = np.empty((len(w), q + 1), dtype=w.dtype)
    for m in range(q + 1):
        wpow[:, m] = w ** (q - m) * root_w
    if extended:
        invfact = np.array([mpmath.mpf(1) / math.factorial(m) for m in range(q + 1)], dtype=object)
    else:
        invfact = np.array([1.0 / math.factorial(m) for m in range(q + 1)])
    Lref, Dref = _reference_data(q, d, tau, extended)

    U = kernels.source_values(a, w, cell_span, span_stop, span_end, span_mu,
                              X, SW, Lref, Dref, wpow, invfact)
    basis = BSplineBasis(space, extended)
    E = basis.values(X.ravel()) * SW.ravel()[:, None]
    G = E.T @ E
    coeffs, report = spd_solve(G, E.T @ U)
    return U - E @ coeffs, report


def top_singular_value(space, q: int, factor: int, extended: bool = False,
                       rayleigh_tol: float = RAYLEIGH_TOL,
                       max_iterations: int = MAX_POWER_ITERATIONS) -> LevelResult:
    """Largest singular value of the discretised residual operator at one mesh factor."""
    R, report = residual_operator(space, q, factor, extended)
    M = R.T @ R
    v0 = np.ones(M.shape[0], dtype=M.dtype)
    lam, _, its, ok = kernels.power_iteration(M, v0, rayleigh_tol, max_iterations)
    value = float(mpmath.sqrt(lam)) if extended else math.sqrt(max(float(lam), 0.0))
    return LevelResult(value, report.condition, report.relative_residual, int(its), bool(ok))


def _run(space, q: int, tolerance: float, max_refine: int, extended_precision: bool,
         rayleigh_tol: float) -> ConstantEstimate:
    p = space.p
    if not 0 <= q <= p:
        raise InvalidSpaceError(f"need 0 <= q <= p, got p={p}, q={q}")
    if p > DOUBLE_PRECISION_MAX_DEGREE and not extended_precision:
        raise PrecisionError(
            f"p={p} > {DOUBLE_PRECISION_MAX_DEGREE} needs extended_precision=True"
        )
    if max_refine < 1:
        raise ValueError("max_refine must be >= 1")
    est = ConstantEstimate(
        value=math.nan, p=p, k=space.k, n=space.n, q=q, tolerance=tolerance,
        extended_precision=extended_precision, space=spec_to_record(space),
    )
    prev = None
    worst_solve = 0.0
    for level in range(max_refine):
        factor = 2 ** level
        if extended_precision:
            with mpmath.workdps(EXTENDED_DPS):
                res = top_singular_value(space, q, factor, True, rayleigh_tol)
        else:
            res = top_singular_value(space, q, factor, False, rayleigh_tol)
        est.refinement_trace.append((factor, res.value))
        est.power_iterations.append(res.iterations)
        est.power_converged = est.power_converged and res.power_converged
        est.condition = res.condition
        worst_solve = max(worst_solve, res.solve_residual)
        est.value = res.value
        if prev is not None:
            est.residual = abs(res.value - prev) / res.value if res.value > 0 else 0.0
            if est.residual < tolerance:
                est.converged = True
                break
        prev = res.value
    est.ill_conditioned = worst_solve > ILL_CONDITIONED_RESIDUAL
    if est.ill_conditioned:
        warnings.warn(f"Gram solve residual {worst_solve:.2e} for {space}", IllConditionedWarning,
                      stacklevel=3)
    if not est.converged:
        warnings.warn(
            f"estimate for {space}, q={q} not converged (increment {est.residual:.2e})",
            NotConvergedWarning, stacklevel=3,
        )
    return est


def estimate_constant(p: int, k: int, n: int, q: int | None = None, tolerance: float = 1e-6,
                      max_refine: int = 6, extended_precision: bool = False,
                      rayleigh_tol: float = RAYLEIGH_TOL) -> ConstantEstimate:
    """Estimate C_{p,k,n,q} (q defaults to p) by mesh refinement.

    Mesh factors 1, 2, 4, ... are tried up to ``2**(max_refine-1)``; the run
    stops once the relative increment drops below ``tolerance``.
    """
    space = SplineSpaceSpec(p, k, n)
    return _run(space, p if q is None else q, tolerance, max_refine, extended_precision, rayleigh_tol)


def estimate_constant_broken(spec: BrokenSpec, q: int | None = None, tolerance: float = 1e-6,
                             max_refine: int = 6, extended_precision: bool = False,
                             rayleigh_tol: float = RAYLEIGH_TOL) -> ConstantEstimate:
    """Estimate the broken-space constant against the piecewise norm over the breakpoints.

    The fine mesh always contains the breakpoints, and the trial functions
    are discontinuous there, which realises the piecewise norm.  Functions of
    the broken Sobolev space differ from H^{q+1} ones by an element of the
    enriched space, which the projection removes exactly.
    """
    q = spec.p if q is None else q
    if q != spec.p:
        raise InvalidSpaceError("broken estimates are defined for q = p only")
    return _run(spec, q, tolerance, max_refine, extended_precision, rayleigh_tol)
