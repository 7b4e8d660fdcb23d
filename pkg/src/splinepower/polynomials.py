"""Polynomial algebra on [0, 1], shifted Legendre polynomials, factorial bounds
and endpoint Hermite interpolation.

Coefficients are kept in the monomial basis.  With the default exact mode
they are :class:`fractions.Fraction`; passing floats switches to float mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Number
from typing import Mapping, Sequence

import mpmath

from .errors import DegreeCapExceeded, MissingOrders, ParityMismatch

__all__ = [
    "DEGREE_CAP",
    "Polynomial",
    "ParityData",
    "legendre",
    "log_lower_coeff",
    "stirling_check",
    "factorial_ratio_bound_check",
    "hermite_endpoint_interpolant",
    "ep_reducer",
    "parity_orders",
]

DEGREE_CAP = 64

# Working precision for the extended-precision inequality checks.
_EXT_DPS = 60


def _trim(coeffs: Sequence) -> tuple:
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (Fraction(0),)


@dataclass(frozen=True)
class Polynomial:
    """A polynomial sum(c[i] * x**i) with ascending coefficients."""

    coeffs: tuple = field(default=(Fraction(0),))
    cap: int = DEGREE_CAP

    def __post_init__(self):
        c = _trim(
            Fraction(v) if isinstance(v, int) and not isinstance(v, bool) else v
            for v in self.coeffs
        )
        object.__setattr__(self, "coeffs", c)
        if len(c) - 1 > self.cap:
            raise DegreeCapExceeded(f"degree {len(c) - 1} exceeds cap {self.cap}")

    @classmethod
    def constant(cls, value) -> "Polynomial":
        return cls((value,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coeffs)

    def _wrap(self, coeffs) -> "Polynomial":
        return Polynomial(tuple(coeffs), self.cap)

    def __add__(self, other):
        if isinstance(other, Number):
            other = Polynomial.constant(other)
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        a = a + (0,) * (size - len(a))
        b = b + (0,) * (size - len(b))
        return self._wrap(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return self._wrap(c * other for c in self.coeffs)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return self._wrap(out)

    __rmul__ = __mul__

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self, order: int = 1) -> "Polynomial":
        c = list(self.coeffs)
        for _ in range(order):
            c = [i * c[i] for i in range(1, len(c))] or [Fraction(0)]
        return self._wrap(c)

    def antiderivative(self, order: int = 1) -> "Polynomial":
        """Repeated antiderivative vanishing at x = 0."""
        c = list(self.coeffs)
        for _ in range(order):
            c = [Fraction(0)] + [v / (i + 1) for i, v in enumerate(c)]
        return self._wrap(c)

    def integrate(self, a=Fraction(0), b=Fraction(1)):
        anti = self.antiderivative()
        return anti(b) - anti(a)

    def inner(self, other: "Polynomial", a=Fraction(0), b=Fraction(1)):
        """L2 inner product on [a, b]."""
        return (self * other).integrate(a, b)

    def norm_squared(self, a=Fraction(0), b=Fraction(1)):
        return self.inner(self, a, b)

    def to_float(self) -> "Polynomial":
        return self._wrap(float(c) for c in self.coeffs)

    def monomial_list(self) -> list[str]:
        """Exact coefficients as strings, e.g. ``['1', '-6', '6']``."""
        return [str(c) for c in self.coeffs]

    def decimal_string(self, digits: int = 12) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0 and self.degree >= 0:
                continue
            v = f"{float(c):.{digits}g}"
            terms.append(v if i == 0 else f"{v}*x^{i}" if i > 1 else f"{v}*x")
        return " + ".join(terms) if terms else "0"

    def __str__(self):
        return self.decimal_string()


@lru_cache(maxsize=None)
def _legendre_coeffs(i: int) -> tuple:
    # l_i(x) = sum_j (-1)^(i+j) C(i,j) C(i+j,j) x^j
    return tuple(
        Fraction((-1) ** (i + j) * math.comb(i, j) * math.comb(i + j, j))
        for j in range(i + 1)
    )


def legendre(i: int, cap: int = DEGREE_CAP) -> Polynomial:
    """Shifted Legendre polynomial of degree ``i`` on [0, 1], with l_i(1) = 1."""
    if i < 0:
        raise ValueError("degree must be nonnegative")
    if i > cap:
        raise DegreeCapExceeded(f"Legendre degree {i} exceeds cap {cap}")
    return Polynomial(_legendre_coeffs(i), cap)


def log_lower_coeff(p: int) -> float:
    """log((p+1)! / ((2p+2)! * sqrt(2p+3))) via log-gamma."""
    if p < 0:
        raise ValueError("p must be >= 0")
    return math.lgamma(p + 2) - math.lgamma(2 * p + 3) - 0.5 * math.log(2 * p + 3)


def stirling_check(r: int) -> bool:
    """Both sides of the Robbins bounds on r!, checked with 60 digits."""
    if r < 1:
        raise ValueError("r must be >= 1")
    with mpmath.workdps(_EXT_DPS):
        r_mp = mpmath.mpf(r)
        base = mpmath.sqrt(2 * mpmath.pi) * r_mp ** (r_mp + mpmath.mpf(1) / 2) * mpmath.exp(-r_mp)
        lower = base * mpmath.exp(1 / (12 * r_mp + 1))
        upper = base * mpmath.exp(1 / (12 * r_mp))
        fact = mpmath.mpf(math.factorial(r))
        return bool(lower <= fact <= upper)


def factorial_ratio_bound_check(p: int) -> bool:
    """(2p+2)!/(p+1)! <= (4/e)^(p+1) sqrt(2) (p+1)^(p+1), compared in logs."""
    if p < 0:
        raise ValueError("p must be >= 0")
    with mpmath.workdps(_EXT_DPS):
        s = p + 1
        lhs = mpmath.log(mpmath.mpf(math.factorial(2 * s))) - mpmath.log(math.factorial(s))
        rhs = s * (mpmath.log(4) - 1) + mpmath.log(2) / 2 + s * mpmath.log(s)
        return bool(lhs <= rhs)


def parity_orders(p: int) -> list[int]:
    """Derivative orders s < p with s + p odd."""
    return [s for s in range(p) if (s + p) % 2 == 1]


@dataclass(frozen=True)
class ParityData:
    """Endpoint derivative values for the interpolation problem of degree p.

    ``left[s]`` and ``right[s]`` are the prescribed values of the s-th
    derivative at 0 and 1.
    """

    parity: str  # "even-orders" or "odd-orders"
    left: Mapping[int, object]
    right: Mapping[int, object]

    @classmethod
    def for_degree(cls, p: int, left: Mapping, right: Mapping) -> "ParityData":
        return cls("even-orders" if p % 2 == 1 else "odd-orders", dict(left), dict(right))

    def constraint_count(self) -> int:
        return len(self.left) + len(self.right)


def _linear_interpolant(a0, b0) -> Polynomial:
    return Polynomial((a0, b0 - a0))


def _solve_odd(p: int, left: Mapping, right: Mapping) -> Polynomial:
    if p == 1:
        return _linear_interpolant(left[0], right[0])
    inner = _solve_odd(
        p - 2,
        {s - 2: left[s] for s in range(2, p, 2)},
        {s - 2: right[s] for s in range(2, p, 2)},
    )
    g = inner.antiderivative(2)
    # g + c*x + d fixes the two value constraints
    d = left[0] - g(0)
    c = right[0] - g(1) - d
    return g + Polynomial((d, c))


def hermite_endpoint_interpolant(p: int, data: ParityData, c=Fraction(0)) -> Polynomial:
    """Polynomial g of degree <= p matching endpoint derivatives of orders s + p odd.

    For odd p the orders are 0, 2, ..., p-1 and the solution is built by
    double integration of the degree p-2 solution plus a linear correction.
    For even p the orders are 1, 3, ..., p-1; the solution is ``c`` plus the
    antiderivative of the degree p-1 (odd) solution, and ``c`` is free.
    """
    orders = parity_orders(p)
    expected = "even-orders" if p % 2 == 1 else "odd-orders"
    if data.parity != expected:
        raise ParityMismatch(f"degree {p} needs {expected} data, got {data.parity}")
    if sorted(data.left) != orders or sorted(data.right) != orders:
        raise ParityMismatch(
            f"degree {p} needs orders {orders} at both ends, got "
            f"{sorted(data.left)} and {sorted(data.right)}"
        )
    if p == 0:
        return Polynomial.constant(c)
    if p % 2 == 1:
        return _solve_odd(p, data.left, data.right)
    inner = _solve_odd(
        p - 1,
        {s - 1: data.left[s] for s in orders},
        {s - 1: data.right[s] for s in orders},
    )
    return inner.antiderivative() + c


def ep_reducer(endpoint_derivatives: Mapping[int, tuple], p: int, c=Fraction(0)) -> Polynomial:
    """Polynomial g in P_p with f - g having vanishing derivatives of orders s + p odd.

    ``endpoint_derivatives[s] = (f^(s)(0), f^(s)(1))``; entries for other
    orders are ignored.
    """
    orders = parity_orders(p)
    missing = [s for s in orders if s not in endpoint_derivatives]
    if missing:
        raise MissingOrders(f"missing derivative orders {missing} for p={p}")
    data = ParityData.for_degree(
        p,
        {s: endpoint_derivatives[s][0] for s in orders},
        {s: endpoint_derivatives[s][1] for s in orders},
    )
    return hermite_endpoint_interpolant(p, data, c)
