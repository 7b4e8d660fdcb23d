"""Helpers that let one code path run in float64 or in mpmath object arrays."""

from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np

EXTENDED_DPS = 40


def to_array(values, extended: bool) -> np.ndarray:
    if extended:
        return np.array([mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction)
                         else mpmath.mpf(v) for v in values], dtype=object)
    return np.array([float(v) for v in values], dtype=float)


def sqrt(a, extended: bool):
    if extended:
        a = np.asarray(a, dtype=object)
        return np.vectorize(mpmath.sqrt, otypes=[object])(a) if a.ndim else mpmath.sqrt(a)
    return np.sqrt(a)


def scalar(v, extended: bool):
    if extended:
        if isinstance(v, Fraction):
            return mpmath.mpf(v.numerator) / v.denominator
        return mpmath.mpf(v)
    return float(v)


def to_float(a) -> np.ndarray:
    return np.asarray(a, dtype=object).astype(float) if np.asarray(a).dtype == object else np.asarray(a)
