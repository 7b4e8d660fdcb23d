import math
import os
import subprocess
import sys
import warnings
from fractions import Fraction

import numpy as np
import pytest
import scipy.interpolate
from numpy.polynomial import Legendre
from numpy.polynomial import Polynomial as NpPoly

from splinepower.bounds import bracket, broken_bracket
from splinepower.errors import InvalidSpaceError, NotConvergedWarning, PrecisionError
from splinepower.numeric import (
    BSplineBasis,
    ConstantEstimate,
    PiecewisePolynomial,
    bspline_eval,
    estimate_constant,
    estimate_constant_broken,
    export_matrix,
    gauss_legendre,
    gram_matrix,
    l2_project,
    spd_solve,
)
from splinepower.numeric import _kernels_numpy, kernels
from splinepower.numeric import legendre_series as ls
from splinepower.numeric.estimate import top_singular_value
from splinepower.polynomials import legendre
from splinepower.spaces import BrokenSpec, SplineSpaceSpec, expanded_knots

# --------------------------------------------------------------------- oracles


def monomial_distance(p, n):
    """Closed-form distance of x^{p+1} from S^p_{-1,n}."""
    return (math.factorial(p + 1) ** 2 / math.factorial(2 * p + 2)
            / math.sqrt(2 * p + 3) * n ** -(p + 1))


def global_legendre_constant(p, q, degree=40):
    """||(I - P_p) K^{q+1}|| on [0,1] over polynomials of ``degree`` (n = 1 oracle).

    Everything is done in shifted-Legendre coefficients; P_p drops the
    first p+1 coefficients and the L2 norm of l_j is 1/sqrt(2j+1).
    """
    cols = []
    for i in range(degree + 1):
        c = np.zeros(i + 1)
        c[i] = math.sqrt(2 * i + 1)
        f = Legendre(c, domain=[0, 1])
        for _ in range(q + 1):
            f = f.integ(lbnd=0)
        coef = np.zeros(degree + q + 3)
        coef[: len(f.coef)] = f.coef
        coef[: p + 1] = 0
        cols.append(coef / np.sqrt(2 * np.arange(len(coef)) + 1))
    return np.linalg.svd(np.array(cols).T, compute_uv=False)[0]


def naive_level_value(p, k, n, q, factor, trial_degree, nodes=14):
    """Top singular value on one fine mesh, assembled the obvious way.

    Global monomial pieces (numpy), scipy B-spline design matrix and a QR
    based projection; adequate in double for small p.
    """
    cells = n * factor
    mesh = np.linspace(0.0, 1.0, cells + 1)
    t, w = np.polynomial.legendre.leggauss(nodes)
    X = (mesh[:-1, None] + (mesh[1:] - mesh[:-1])[:, None] * (t[None, :] + 1) / 2)
    W = ((mesh[1:] - mesh[:-1])[:, None] * w[None, :] / 2).ravel()
    x = X.ravel()
    cols = []
    for c in range(cells):
        a, h = mesh[c], mesh[c + 1] - mesh[c]
        for i in range(trial_degree + 1):
            coef = np.zeros(i + 1)
            coef[i] = math.sqrt((2 * i + 1) / h)
            piece = Legendre(coef, domain=[a, mesh[c + 1]]).convert(kind=NpPoly)
            pieces = [NpPoly([0.0])] * cells
            pieces[c] = piece
            for _ in range(q + 1):
                acc, out = 0.0, []
                for j in range(cells):
                    F = pieces[j].integ(lbnd=mesh[j]) + acc
                    out.append(F)
                    acc = F(mesh[j + 1])
                pieces = out
            vals = np.concatenate([pieces[j](X[j]) for j in range(cells)])
            cols.append(vals)
    V = np.array(cols).T * np.sqrt(W)[:, None]
    knots = np.array([float(v) for v in expanded_knots(SplineSpaceSpec(p, k, n))])
    S = scipy.interpolate.BSpline.design_matrix(x, knots, p).toarray() * np.sqrt(W)[:, None]
    Q, _ = np.linalg.qr(S)
    R = V - Q @ (Q.T @ V)
    return np.linalg.svd(R, compute_uv=False)[0]


# --------------------------------------------------------------------- basics


@pytest.mark.parametrize("npts", [1, 3, 8])
def test_gauss_legendre_exact(npts):
    x, w = gauss_legendre(npts)
    for deg in range(2 * npts):
        assert math.isclose(np.dot(w, x ** deg), 1 / (deg + 1), rel_tol=1e-13)


@pytest.mark.parametrize("p,k,n", [(0, -1, 3), (2, 1, 4), (3, 0, 3), (4, 2, 2), (5, -1, 2)])
def test_bspline_against_scipy(p, k, n):
    spec = SplineSpaceSpec(p, k, n)
    x = np.linspace(0, 1, 57)
    knots = np.array([float(v) for v in expanded_knots(spec)])
    ref = scipy.interpolate.BSpline.design_matrix(x, knots, p).toarray()
    assert np.allclose(BSplineBasis(spec).values(x), ref, atol=1e-13)


def test_bspline_eval_errors():
    spec = SplineSpaceSpec(2, 1, 2)
    assert math.isclose(bspline_eval(spec, 0, 0.0), 1.0)
    with pytest.raises(IndexError):
        bspline_eval(spec, 4, 0.5)
    with pytest.raises(ValueError):
        bspline_eval(spec, 0, 1.5)


def test_gram_matrix_spd_and_total_mass():
    G = gram_matrix(SplineSpaceSpec(3, 1, 4))
    assert np.allclose(G, G.T)
    assert np.all(np.linalg.eigvalsh(G) > 0)
    assert math.isclose(G.sum(), 1.0, rel_tol=1e-13)


def test_spd_solve_refines(rng):
    A = rng.normal(size=(12, 12))
    G = A @ A.T + 12 * np.eye(12)
    B = rng.normal(size=(12, 3))
    X, rep = spd_solve(G, B)
    assert np.allclose(G @ X, B, atol=1e-12)
    assert rep.relative_residual < 1e-14 and rep.condition >= 1


def test_legendre_series_helpers():
    c = [Fraction(0), Fraction(0), Fraction(1)]
    anti = ls.antiderivative(c)
    exact = legendre(2).antiderivative()
    for t in (0.0, 0.3, 1.0):
        assert math.isclose(ls.evaluate([float(v) for v in anti], np.array([t]))[0], float(exact(t)),
                            abs_tol=1e-15)
    assert ls.endpoint_derivative(c, 1) == legendre(2).derivative()(1)
    assert ls.endpoint_derivative(c, 1, right=False) == legendre(2).derivative()(0)


def test_piecewise_polynomial():
    mesh = [0.0, 0.25, 0.5, 1.0]
    f = PiecewisePolynomial.from_function(mesh, 3, lambda x: x ** 3 - x)
    x = np.linspace(0, 1, 11)
    assert np.allclose(f(x), x ** 3 - x, atol=1e-13)
    assert math.isclose(f.norm_squared(), 8 / 105, rel_tol=1e-12)
    F = f.antiderivative()
    assert np.allclose(F(x), x ** 4 / 4 - x ** 2 / 2, atol=1e-13)
    assert (f - f).norm() < 1e-15


# ---------------------------------------------------------------- projections


@pytest.mark.parametrize("p,n", [(0, 1), (1, 3), (3, 2), (5, 4)])
def test_monomial_projection_error_double(p, n):
    res = l2_project(SplineSpaceSpec(p, -1, n), lambda x: x ** (p + 1), degree=p + 1)
    assert res.quadrature_exact
    assert math.isclose(res.error_norm, monomial_distance(p, n), rel_tol=1e-8)


def test_monomial_projection_error_extended():
    res = l2_project(SplineSpaceSpec(7, -1, 6), lambda x: x ** 8, degree=8, extended=True)
    assert math.isclose(res.error_norm, monomial_distance(7, 6), rel_tol=1e-12)


def test_projection_reproduces_space_members():
    spec = SplineSpaceSpec(3, 2, 4)
    basis = BSplineBasis(spec)
    coeffs = np.arange(basis.size, dtype=float) ** 2
    res = l2_project(spec, lambda x: basis.evaluate(coeffs, x))
    assert res.error_norm < 1e-12
    assert np.allclose(res.coeffs, coeffs, atol=1e-9)


def test_quadrature_flag():
    with pytest.warns(RuntimeWarning):
        res = l2_project(SplineSpaceSpec(1, 0, 2), lambda x: x ** 20, oversample=1, degree=20)
    assert not res.quadrature_exact


# ---------------------------------------------------------------- estimation


def test_poincare_constant():
    est = estimate_constant(0, -1, 1, 0)
    assert est.converged
    assert abs(est.value - 1 / math.pi) < 1e-8


@pytest.mark.parametrize("p", range(5))
def test_single_segment_against_global_legendre(p):
    est = estimate_constant(p, p - 1 if p else -1, 1, tolerance=1e-9, max_refine=8)
    ref = global_legendre_constant(p, p)
    assert math.isclose(est.value, ref, rel_tol=1e-7)


@pytest.mark.parametrize("p,q", [(2, 0), (3, 1), (4, 2)])
def test_single_segment_lower_order_against_global_legendre(p, q):
    est = estimate_constant(p, 0, 1, q, tolerance=1e-9, max_refine=8)
    assert math.isclose(est.value, global_legendre_constant(p, q), rel_tol=1e-7)


@pytest.mark.parametrize("p,k,n,q,factor", [(1, 0, 2, 1, 2), (2, 1, 3, 2, 1), (2, 0, 2, 1, 2), (0, -1, 3, 0, 2)])
def test_level_value_against_naive_assembly(p, k, n, q, factor):
    got = top_singular_value(SplineSpaceSpec(p, k, n), q, factor).value
    ref = naive_level_value(p, k, n, q, factor, trial_degree=p + 2)
    assert math.isclose(got, ref, rel_tol=1e-9)


@pytest.mark.parametrize("p,n", [(1, 2), (3, 3), (5, 2)])
def test_discontinuous_scaling_is_exact(p, n):
    a = estimate_constant(p, -1, n).value
    b = estimate_constant(p, -1, 2 * n).value
    assert math.isclose(a, b * 2 ** (p + 1), rel_tol=1e-6)


def test_scaling_for_piecewise_constants():
    assert math.isclose(estimate_constant(0, -1, 3).value * 3, 1 / math.pi, rel_tol=1e-6)


@pytest.mark.parametrize("p,k,n", [(2, -1, 3), (3, 0, 2), (4, 3, 5), (6, 5, 8)])
def test_bracketing(p, k, n):
    est = estimate_constant(p, k, n)
    assert est.converged
    assert bracket(p, k, n).contains(est.value, rtol=1e-6)


def test_maximally_smooth_upper_bound_all_orders():
    for q in range(4):
        est = estimate_constant(3, 2, 4, q)
        assert est.value <= (4 * math.pi) ** -(q + 1) * (1 + 1e-6)


def test_extended_matches_double():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotConvergedWarning)
        a = estimate_constant(2, 0, 3, max_refine=3)
        b = estimate_constant(2, 0, 3, max_refine=3, extended_precision=True)
    for (_, x), (_, y) in zip(a.refinement_trace, b.refinement_trace):
        assert math.isclose(x, y, rel_tol=1e-10)


def test_high_degree_requires_extended():
    with pytest.raises(PrecisionError):
        estimate_constant(11, 10, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotConvergedWarning)
        est = estimate_constant(11, 10, 1, extended_precision=True, max_refine=2)
    assert bracket(11, 10, 1).contains(est.value)


def test_not_converged_warning_and_json():
    with pytest.warns(NotConvergedWarning):
        est = estimate_constant(1, 0, 2, max_refine=1)
    assert not est.converged and len(est.refinement_trace) == 1
    back = ConstantEstimate.from_json(est.to_json())
    assert back.value == est.value and back.refinement_trace == est.refinement_trace


def test_invalid_order():
    with pytest.raises(InvalidSpaceError):
        estimate_constant(2, 1, 2, q=3)


def test_broken_estimate_bracketed():
    spec = BrokenSpec(SplineSpaceSpec(2, 1, 2), ((1, 3),), (0,))
    est = estimate_constant_broken(spec)
    assert est.converged
    assert broken_bracket(spec).contains(est.value, rtol=1e-6)
    # adding a breakpoint can only shrink the constant
    assert est.value <= estimate_constant(2, 1, 2).value * (1 + 1e-9)
    with pytest.raises(InvalidSpaceError):
        estimate_constant_broken(spec, q=1)


# ---------------------------------------------------------------- kernels


def test_power_iteration_against_eigvalsh(rng):
    A = rng.normal(size=(30, 20))
    M = A.T @ A
    ref = np.linalg.eigvalsh(M)[-1]
    lam, v, its, ok = kernels.power_iteration(M, np.ones(20), 1e-13, 100_000)
    assert ok and math.isclose(lam, ref, rel_tol=1e-10)
    lam2, *_ = _kernels_numpy.power_iteration(M, np.ones(20), 1e-13, 100_000)
    assert math.isclose(lam2, ref, rel_tol=1e-10)


@pytest.mark.skipif(not kernels.use_numba(), reason="numba kernels disabled")
def test_numba_and_numpy_kernels_agree(monkeypatch):
    from splinepower.numeric import _kernels_numba

    spec = SplineSpaceSpec(4, 2, 3)
    basis = BSplineBasis(spec)
    x = np.linspace(0, 1, 301)
    assert np.array_equal(_kernels_numba.basis_matrix(basis.knots, 4, x),
                          _kernels_numpy.basis_matrix(basis.knots, 4, x))
    a = top_singular_value(spec, 3, 4).value
    monkeypatch.setattr(kernels, "_kernels_numba", None)
    assert kernels.backend() == "numpy"
    b = top_singular_value(spec, 3, 4).value
    assert math.isclose(a, b, rel_tol=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, SPLINEPOWER_DISABLE_NUMBA="1")
    code = "from splinepower.numeric import backend, estimate_constant as e; print(backend(), e(0,-1,1).value)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, value = out.stdout.split()
    assert name == "numpy" and abs(float(value) - 1 / math.pi) < 1e-8


def test_export_matrix(tmp_path):
    path = tmp_path / "g.txt"
    G = gram_matrix(SplineSpaceSpec(2, 1, 2))
    export_matrix(path, G)
    assert np.allclose(np.loadtxt(path), G, rtol=1e-15)


# ---------------------------------------------------------------- invariants


def test_gram_examples():
    assert np.allclose(gram_matrix(SplineSpaceSpec(0, -1, 4)), np.eye(4) / 4, atol=1e-15)
    assert np.allclose(gram_matrix(SplineSpaceSpec(1, 0, 1)), [[1 / 3, 1 / 6], [1 / 6, 1 / 3]], atol=1e-15)
    G = gram_matrix(SplineSpaceSpec(3, 1, 3))
    knots = np.array([float(v) for v in expanded_knots(SplineSpaceSpec(3, 1, 3))])
    integrals = (knots[4:] - knots[:-4]) / 4  # integral of B_i is (t_{i+p+1} - t_i)/(p+1)
    assert np.allclose(G.sum(axis=1), integrals, atol=1e-14)


def test_quadratic_against_lines():
    res = l2_project(SplineSpaceSpec(1, -1, 1), lambda x: x ** 2)
    assert math.isclose(res.error_norm, 1 / (6 * math.sqrt(5)), rel_tol=1e-12)


def test_hat_and_derivative_jumps():
    assert math.isclose(bspline_eval(SplineSpaceSpec(1, 0, 2), 1, 0.5), 1.0)
    h = 1e-6

    def jumps(spec):
        b = BSplineBasis(spec)
        left = (b.values([0.5 - h]) - b.values([0.5 - 2 * h])) / h
        right = (b.values([0.5 + 2 * h]) - b.values([0.5 + h])) / h
        return np.abs(right - left).max()

    assert jumps(SplineSpaceSpec(2, 0, 2)) > 1.0
    assert jumps(SplineSpaceSpec(2, 1, 2)) < 1e-3


def test_projection_idempotent(rng):
    f = lambda x: np.sin(5 * x) * np.exp(x)  # noqa: E731
    for p in range(7):
        for k in {-1, 0, p - 1} & set(range(-1, p)):
            for n in (1, 3, 8):
                spec = SplineSpaceSpec(p, k, n)
                basis = BSplineBasis(spec)
                c = l2_project(spec, f).coeffs
                again = l2_project(spec, lambda x: basis.evaluate(c, x))
                assert again.error_norm <= 1e-12


def test_nested_spaces_and_monotone_traces():
    for p in (2, 3):
        for n in (2, 3):
            values = []
            for k in range(-1, p):
                est = estimate_constant(p, k, n)
                trace = [v for _, v in est.refinement_trace]
                assert all(b >= a * (1 - 1e-12) for a, b in zip(trace, trace[1:]))
                values.append(est.value)
            assert all(b >= a - 1e-6 * b for a, b in zip(values, values[1:]))


def test_broken_without_breakpoints_matches_uniform():
    a = estimate_constant_broken(BrokenSpec(SplineSpaceSpec(2, 1, 3)))
    b = estimate_constant(2, 1, 3)
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_smooth_scaling_only_asymptotic():
    # halving the mesh of a C^{p-1} space gains less than 2^{p+1} at small n,
    # and the gain tends to 2^{p+1} as n grows
    for p in (1, 2):
        ratios = [estimate_constant(p, p - 1, n).value / estimate_constant(p, p - 1, 2 * n).value
                  / 2 ** (p + 1) for n in (1, 2, 4, 8, 16)]
        assert all(r < 1 for r in ratios)
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] > 0.97
