import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splinepower.errors import DegreeCapExceeded, MissingOrders, ParityMismatch
from splinepower.polynomials import (
    ParityData,
    Polynomial,
    ep_reducer,
    factorial_ratio_bound_check,
    hermite_endpoint_interpolant,
    legendre,
    log_lower_coeff,
    parity_orders,
    stirling_check,
)

fractions = st.fractions(min_value=-10, max_value=10, max_denominator=50)


def test_arithmetic_and_calculus():
    x = Polynomial.x()
    f = 3 * x * x - x + Fraction(1, 2)
    assert f(Fraction(2)) == Fraction(21, 2)
    assert f.derivative() == 6 * x - 1
    assert f.antiderivative().derivative() == f
    assert f.integrate() == Fraction(1) - Fraction(1, 2) + Fraction(1, 2)
    assert (f - f).degree == -1
    assert f.monomial_list() == ["1/2", "-1", "3"]


def test_degree_cap():
    with pytest.raises(DegreeCapExceeded):
        Polynomial((1,) * 10, cap=5)
    with pytest.raises(DegreeCapExceeded):
        legendre(70)


@pytest.mark.parametrize("i", range(9))
def test_legendre_normalisation(i):
    li = legendre(i)
    assert li(1) == 1
    assert li(0) == (-1) ** i
    assert li.norm_squared() == Fraction(1, 2 * i + 1)


def test_legendre_orthogonal():
    for i in range(7):
        for j in range(i):
            assert legendre(i).inner(legendre(j)) == 0


def test_legendre_against_rodrigues():
    # l_i(x) = (1/i!) d^i/dx^i (x^2 - x)^i
    x = Polynomial.x()
    for i in range(7):
        base = Polynomial.constant(1)
        for _ in range(i):
            base = base * (x * x - x)
        assert base.derivative(i) * Fraction(1, math.factorial(i)) == legendre(i)


@pytest.mark.parametrize("p", range(12))
def test_log_lower_coeff_exact(p):
    exact = Fraction(math.factorial(p + 1), math.factorial(2 * p + 2))
    assert math.isclose(log_lower_coeff(p), math.log(exact) - 0.5 * math.log(2 * p + 3), rel_tol=1e-13)


def test_lower_coefficient_is_monomial_projection_error():
    # distance of x^{p+1} from P_p on [0,1] divided by (p+1)!
    for p in range(6):
        c = Fraction(math.factorial(p + 1), math.factorial(2 * p + 2))
        lead = legendre(p + 1).coeffs[-1]
        dist2 = legendre(p + 1).norm_squared() / lead ** 2
        assert math.isclose(float(dist2) / math.factorial(p + 1) ** 2,
                            math.exp(2 * log_lower_coeff(p)), rel_tol=1e-12)
        assert c ** 2 * math.factorial(p + 1) ** 2 / (2 * p + 3) == dist2


def test_inequalities():
    assert all(stirling_check(r) for r in range(1, 101))
    assert all(factorial_ratio_bound_check(p) for p in range(0, 101))
    with pytest.raises(ValueError):
        stirling_check(0)


def test_parity_orders():
    assert parity_orders(5) == [0, 2, 4]
    assert parity_orders(4) == [1, 3]
    assert parity_orders(0) == []


def _check_interpolant(p, g, left, right):
    assert g.degree <= p
    for s in parity_orders(p):
        assert g.derivative(s)(Fraction(0)) == left[s]
        assert g.derivative(s)(Fraction(1)) == right[s]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 9), st.data())
def test_hermite_interpolant_exact(p, data):
    orders = parity_orders(p)
    left = {s: data.draw(fractions) for s in orders}
    right = {s: data.draw(fractions) for s in orders}
    g = hermite_endpoint_interpolant(p, ParityData.for_degree(p, left, right))
    _check_interpolant(p, g, left, right)


def test_hermite_free_constant_for_even_degree():
    data = ParityData.for_degree(4, {1: 1, 3: 0}, {1: 2, 3: 5})
    g0 = hermite_endpoint_interpolant(4, data)
    g1 = hermite_endpoint_interpolant(4, data, c=Fraction(7))
    assert (g1 - g0) == Polynomial.constant(7)


def test_parity_errors():
    with pytest.raises(ParityMismatch):
        hermite_endpoint_interpolant(3, ParityData("odd-orders", {0: 1, 2: 0}, {0: 1, 2: 0}))
    with pytest.raises(ParityMismatch):
        hermite_endpoint_interpolant(3, ParityData.for_degree(3, {0: 1}, {0: 1}))
    with pytest.raises(MissingOrders):
        ep_reducer({0: (1, 2)}, 3)


def test_ep_reducer_removes_orders():
    # f = x^5 reduced in P_3: f - g has vanishing 0th and 2nd derivatives at both ends
    x = Polynomial.x()
    f = x * x * x * x * x
    ders = {s: (f.derivative(s)(0), f.derivative(s)(1)) for s in range(4)}
    g = ep_reducer(ders, 3)
    r = f - g
    for s in (0, 2):
        assert r.derivative(s)(0) == 0 and r.derivative(s)(1) == 0
