"""Series in shifted Legendre polynomials l_i(t) on [0, 1], with l_i(1) = 1.

A coefficient vector ``c`` stands for sum(c[i] * l_i(t)).  Coefficients
may be Fractions (exact), floats or mpf values.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

__all__ = ["antiderivative", "evaluate", "endpoint_derivative", "mass_diagonal"]


def antiderivative(c):
    """Coefficients of the antiderivative vanishing at t = 0."""
    out = [0 * c[0] for _ in range(len(c) + 1)]
    for i, ci in enumerate(c):
        if ci == 0:
            continue
        if i == 0:
            # t = (l_0 + l_1) / 2
            out[0] += ci / 2
            out[1] += ci / 2
        else:
            f = ci / (2 * (2 * i + 1))
            out[i + 1] += f
            out[i - 1] -= f
    return out


def evaluate(c, t):
    """Evaluate the series at ``t`` (scalar or array) by the three-term recurrence."""
    t = np.asarray(t)
    x = 2 * t - 1
    p0 = np.ones_like(x)
    acc = c[0] * p0
    if len(c) == 1:
        return acc
    p1 = x
    acc = acc + c[1] * p1
    for j in range(2, len(c)):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        acc = acc + c[j] * p1
    return acc


def endpoint_derivative(c, m: int, right: bool = True):
    """m-th derivative of the series at t = 1 (or t = 0)."""
    total = 0 * c[0]
    for i, ci in enumerate(c):
        if i < m:
            continue
        val = Fraction(math.factorial(i + m), math.factorial(m) * math.factorial(i - m))
        if not right and (i + m) % 2 == 1:
            val = -val
        total = total + ci * (val if isinstance(ci, Fraction) else type(ci)(val.numerator) / val.denominator)
    return total


def mass_diagonal(degree: int):
    """Squared L2 norms of l_0..l_degree on [0, 1]."""
    return [Fraction(1, 2 * i + 1) for i in range(degree + 1)]
