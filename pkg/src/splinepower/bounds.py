"""Closed-form bounds on approximation constants and the smooth-vs-rough ratios.

Every quantity that can overflow is carried as a logarithm; the plain
value is produced by :func:`_safe_exp`, which switches to mpmath when the
exponent leaves the double range.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath

from .errors import DenominatorNonpositive, GammaOutOfRange, InvalidSpaceError, UnsupportedSegments
from .polynomials import log_lower_coeff
from .spaces import BrokenSpec, SplineSpaceSpec, matched_segments, matched_segments_lower_order

__all__ = [
    "Verdict",
    "BoundBracket",
    "RatioReport",
    "RATIO_PREFACTOR",
    "bracket",
    "broken_bracket",
    "ratio_base",
    "log_ratio_theta",
    "ratio_theta",
    "ratio_base_lower_order",
    "ratio_theta_lower_order",
    "lower_order_threshold",
    "ratio_base_broken",
    "ratio_theta_broken",
    "broken_threshold",
    "hyperbola_level_set",
    "theta_decreasing_threshold_dg",
    "verdict_fem",
    "verdict_dg",
    "ratio_report",
    "FEM_BASE_POINTS",
    "DG_BASE_POINTS",
    "certify_base_points",
    "closure_region",
    "region_grid",
    "RegionCell",
    "grid_to_csv",
    "grid_to_json",
]

RATIO_PREFACTOR = 4.0 / (math.e * math.pi)
_LOG_PREFACTOR = math.log(4.0) - 1.0 - math.log(math.pi)
_EXP_LIMIT = 700.0


class Verdict(str, enum.Enum):
    SMOOTH_BETTER = "SmoothBetter"
    INCONCLUSIVE = "Inconclusive"
    SAME_SPACE = "SameSpace"

    def __str__(self):
        return self.value


def _safe_exp(log_value: float) -> float:
    if abs(log_value) <= _EXP_LIMIT:
        return math.exp(log_value)
    with mpmath.workdps(30):
        return float(mpmath.exp(mpmath.mpf(log_value)))


def _check(p: int, k: int, n: int) -> None:
    SplineSpaceSpec(p, k, n)


@dataclass(frozen=True)
class BoundBracket:
    """Lower and upper bounds on C_{p,k,n}; logs are authoritative."""

    p: int
    k: int
    n: int
    log_lower: float
    log_upper: float

    @property
    def lower(self) -> float:
        return _safe_exp(self.log_lower)

    @property
    def upper(self) -> float:
        return _safe_exp(self.log_upper)

    def contains(self, value: float, rtol: float = 0.0) -> bool:
        return self.lower <= value <= self.upper * (1.0 + rtol)


def bracket(p: int, k: int, n: int) -> BoundBracket:
    """Lower bound from x^{p+1} against S^p_{-1,n}; upper bound (n pi)^{-p-1}.

    The lower bound does not depend on k.
    """
    _check(p, k, n)
    log_n = math.log(n)
    lower = log_lower_coeff(p) - (p + 1) * log_n
    upper = -(p + 1) * (log_n + math.log(math.pi))
    return BoundBracket(p, k, n, lower, upper)


def broken_bracket(spec: BrokenSpec) -> BoundBracket:
    """Bounds for the broken constant: lower uses n+T segments, upper is C_{p,k,n}'s."""
    b = bracket(spec.p, spec.k, spec.n)
    lower = log_lower_coeff(spec.p) - (spec.p + 1) * math.log(spec.n + spec.T)
    return BoundBracket(spec.p, spec.k, spec.n, lower, b.log_upper)


def ratio_base(p: int, k: int, n: int) -> float:
    _check(p, k, n)
    return RATIO_PREFACTOR * n * (p + 1) / ((p - k) * (n - 1) + 1)


def _log_theta(log_base: float, power: int, root_arg: int) -> float:
    return power * log_base + 0.5 * math.log(root_arg)


def log_ratio_theta(p: int, k: int, n: int) -> float:
    _check(p, k, n)
    log_b = _LOG_PREFACTOR + math.log(n * (p + 1)) - math.log((p - k) * (n - 1) + 1)
    return _log_theta(log_b, p + 1, 4 * p + 6)


def ratio_theta(p: int, k: int, n: int) -> float:
    """Upper bound on C_{p,p-1,m} / C_{p,k,n} at matched dimension."""
    return _safe_exp(log_ratio_theta(p, k, n))


def _lower_order_denominator(p: int, q: int, k: int, n: int) -> int:
    if not 0 <= q <= p:
        raise InvalidSpaceError(f"need 0 <= q <= p, got p={p}, q={q}")
    if not -1 <= k <= q - 1:
        raise InvalidSpaceError(f"need -1 <= k <= q-1, got q={q}, k={k}")
    den = (q - k) * (n - 1) + 1 + q - p
    if den <= 0:
        raise DenominatorNonpositive(f"(q-k)(n-1)+1+q-p = {den} <= 0")
    return den


def ratio_base_lower_order(p: int, q: int, k: int, n: int) -> float:
    den = _lower_order_denominator(p, q, k, n)
    return RATIO_PREFACTOR * n * (q + 1) / den


def ratio_theta_lower_order(p: int, q: int, k: int, n: int) -> float:
    """Ratio bound for smooth degree-p splines against S^q_{k,n} on H^{q+1}."""
    den = _lower_order_denominator(p, q, k, n)
    log_b = _LOG_PREFACTOR + math.log(n * (q + 1)) - math.log(den)
    return _safe_exp(_log_theta(log_b, q + 1, 4 * q + 6))


def lower_order_threshold(p: int, q: int, k: int, n_bar: int) -> float:
    """Smallest real n with n >= (p-k-1)/(q-k-1) * n_bar."""
    if not k < q - 1:
        raise InvalidSpaceError("threshold needs k < q-1")
    return (p - k - 1) / (q - k - 1) * n_bar


def _broken_denominator(spec: BrokenSpec) -> int:
    p, k, n = spec.p, spec.k, spec.n
    extra = sum(sg + s - p for sg, s in zip(spec.sigmas(), spec.smoothness_list))
    den = (p - k) * (n - 1) + 1 + extra
    if den <= 0:
        raise DenominatorNonpositive(f"broken ratio denominator {den} <= 0")
    return den


def ratio_base_broken(spec: BrokenSpec) -> float:
    den = _broken_denominator(spec)
    return RATIO_PREFACTOR * (spec.n + spec.T) * (spec.p + 1) / den


def ratio_theta_broken(spec: BrokenSpec) -> float:
    """Broken-space ratio bound; the square-root factor uses sqrt(4p+6)."""
    den = _broken_denominator(spec)
    p = spec.p
    log_b = _LOG_PREFACTOR + math.log((spec.n + spec.T) * (p + 1)) - math.log(den)
    return _safe_exp(_log_theta(log_b, p + 1, 4 * p + 6))


def broken_threshold(spec: BrokenSpec, n_bar: int) -> float:
    """Right-hand side of the segment-count condition for the broken comparison."""
    p, k, T = spec.p, spec.k, spec.T
    if not k < p - 1:
        raise InvalidSpaceError("threshold needs k < p-1")
    extra = sum(sg + s - p for sg, s in zip(spec.sigmas(), spec.smoothness_list))
    return (1 + (T * (p - k) - extra) / (p - k - 1)) * n_bar - T


class HyperbolaReport(NamedTuple):
    p_asymptote: float
    n_asymptote: float
    max_residual: float


def hyperbola_level_set(gamma: float, k: int, n_samples: int = 64) -> HyperbolaReport:
    """Asymptotes of the level set B_{p,k,n} = (4/(e pi)) gamma in the (n, p) plane.

    Also samples the level set (solving for p at given n) and reports the
    largest residual of the hyperbola equation over the samples.
    """
    if gamma <= 1:
        raise GammaOutOfRange(f"gamma must exceed 1, got {gamma}")
    p_star = (gamma * k + 1) / (gamma - 1)
    n_star = gamma / (gamma - 1)
    worst = 0.0
    for i in range(n_samples):
        n = n_star + 0.37 + 0.5 * i
        denom = n - gamma * (n - 1)
        if denom == 0:
            continue
        p = (gamma * (1 - k * (n - 1)) - n) / denom
        # sample must lie on the level set before the identity is checked
        b = n * (p + 1) / ((p - k) * (n - 1) + 1)
        assert math.isclose(b, gamma, rel_tol=1e-9, abs_tol=1e-12)
        res = (n - n_star) * (p - p_star) + gamma * (gamma - k - 2) / (gamma - 1) ** 2
        worst = max(worst, abs(res))
    return HyperbolaReport(p_star, n_star, worst)


def theta_decreasing_threshold_dg(n: int) -> float:
    """Degree above which Theta_{p,-1,n} is strictly decreasing in p (n = 2, 3 only)."""
    if n == 2:
        L = math.log(8 / math.pi)
        return (3 * L + math.sqrt(L * L + 8)) / (4 * (1 - L)) - 1
    if n == 3:
        L = math.log(6 / math.pi)
        return 0.5 * (1 + L) / (1 - L) - 1
    raise UnsupportedSegments(f"monotonicity threshold only known for n in {{2, 3}}, got {n}")


def verdict_fem(p: int, n: int) -> Verdict:
    """Smooth (k = p-1) against C^0 splines on the certified FEM region."""
    if p < 0 or n < 1:
        raise InvalidSpaceError(f"invalid (p, n) = ({p}, {n})")
    if n == 1 or p in (0, 1):
        return Verdict.SAME_SPACE
    if (
        (p == 3 and n >= 7)
        or (p in (4, 5) and n >= 4)
        or (6 <= p <= 37 and n >= 3)
        or (p >= 38 and n >= 2)
    ):
        return Verdict.SMOOTH_BETTER
    return Verdict.INCONCLUSIVE


def verdict_dg(p: int, n: int) -> Verdict:
    """Smooth (k = p-1) against discontinuous splines on the certified DG region."""
    if p < 0 or n < 1:
        raise InvalidSpaceError(f"invalid (p, n) = ({p}, {n})")
    if n == 1 or p == 0:
        return Verdict.SAME_SPACE
    if (n >= 3 and 1 <= p <= 17) or (n >= 2 and p >= 18):
        return Verdict.SMOOTH_BETTER
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True)
class RatioReport:
    p: int
    k: int
    n: int
    B: float
    Theta: float
    log_theta: float
    verdict: Verdict
    matched_m: int


def ratio_report(p: int, k: int, n: int) -> RatioReport:
    """B, Theta and the comparison verdict for one (p, k, n) point."""
    _check(p, k, n)
    log_t = log_ratio_theta(p, k, n)
    if k == p - 1 or n == 1 or p == 0:
        verdict = Verdict.SAME_SPACE
    elif log_t < 0:
        verdict = Verdict.SMOOTH_BETTER
    elif k == 0:
        verdict = verdict_fem(p, n)
    elif k == -1:
        verdict = verdict_dg(p, n)
    else:
        verdict = Verdict.INCONCLUSIVE
    return RatioReport(
        p, k, n, ratio_base(p, k, n), _safe_exp(log_t), log_t, verdict, matched_segments(p, k, n)
    )


# Points whose Theta is checked directly; everything else follows by monotonicity.
FEM_BASE_POINTS = ((38, 2), (6, 3), (4, 4), (3, 7))
DG_BASE_POINTS = ((1, 3), (2, 3), (22, 2), (18, 2), (19, 2), (20, 2), (21, 2))

_KIND_K = {"fem": 0, "dg": -1}


def _kind_k(kind: str) -> int:
    try:
        return _KIND_K[kind]
    except KeyError:
        raise ValueError(f"kind must be 'fem' or 'dg', got {kind!r}") from None


def certify_base_points(kind: str) -> dict[tuple[int, int], float]:
    """Theta at every base point of the comparison; all must be below 1."""
    k = _kind_k(kind)
    points = FEM_BASE_POINTS if kind == "fem" else DG_BASE_POINTS
    return {(p, n): ratio_theta(p, k, n) for p, n in points}


def _covers(kind: str, base: tuple[int, int], p: int, n: int) -> bool:
    bp, bn = base
    if n < bn or p < bp:
        return False
    if p == bp:
        return True  # decreasing in n at fixed p
    if kind == "fem":
        return True  # decreasing in p once Theta <= 1, for k >= 0
    # k = -1: monotone in p only where the DG threshold applies
    if bn in (2, 3):
        return bp >= theta_decreasing_threshold_dg(bn)
    return False


def closure_region(kind: str, p_max: int, n_max: int) -> dict[tuple[int, int], tuple[int, int]]:
    """Cells reached by monotonicity from certified base points, mapped to the base used."""
    k = _kind_k(kind)
    bases = [b for b, theta in certify_base_points(kind).items() if theta < 1]
    covered: dict[tuple[int, int], tuple[int, int]] = {}
    p_min = 1 if k == 0 else 0
    for p in range(p_min, p_max + 1):
        for n in range(1, n_max + 1):
            for base in bases:
                if _covers(kind, base, p, n):
                    covered[(p, n)] = base
                    break
    return covered


@dataclass(frozen=True)
class RegionCell:
    p: int
    n: int
    verdict: Verdict
    theta: float | None
    base_point: tuple[int, int] | None


def region_grid(kind: str, p_max: int, n_max: int) -> list[RegionCell]:
    """Verdicts on 0 <= p <= p_max, 1 <= n <= n_max in row-major (p, then n) order."""
    if p_max < 0 or n_max < 1:
        raise ValueError("need p_max >= 0 and n_max >= 1")
    k = _kind_k(kind)
    rule = verdict_fem if kind == "fem" else verdict_dg
    closure = closure_region(kind, p_max, n_max)
    cells = []
    for p in range(p_max + 1):
        for n in range(1, n_max + 1):
            verdict = rule(p, n)
            theta = None
            if verdict is not Verdict.SAME_SPACE:
                theta = ratio_theta(p, k, n)
            base = closure.get((p, n)) if verdict is Verdict.SMOOTH_BETTER else None
            cells.append(RegionCell(p, n, verdict, theta, base))
    return cells


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def _fmt_base(b) -> str:
    return "" if b is None else f"{b[0]}:{b[1]}"


def grid_to_csv(cells: list[RegionCell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "n", "verdict", "theta", "base_point"])
    for c in cells:
        w.writerow([c.p, c.n, c.verdict.value, _fmt(c.theta), _fmt_base(c.base_point)])
    return buf.getvalue()


def grid_to_json(cells: list[RegionCell]) -> str:
    """Verdict matrix indexed [p][n-1] plus per-cell detail."""
    p_max = max(c.p for c in cells)
    n_max = max(c.n for c in cells)
    matrix = [["" for _ in range(n_max)] for _ in range(p_max + 1)]
    for c in cells:
        matrix[c.p][c.n - 1] = c.verdict.value
    detail = [
        {
            "p": c.p,
            "n": c.n,
            "verdict": c.verdict.value,
            "theta": None if c.theta is None else repr(c.theta),
            "base_point": _fmt_base(c.base_point) or None,
        }
        for c in cells
    ]
    return json.dumps({"verdicts": matrix, "cells": detail}, indent=1, sort_keys=True)


def lower_order_report(p: int, q: int, k: int, n: int) -> dict:
    """Matched m and the ratio bound for a lower-order comparison."""
    m = matched_segments_lower_order(p, q, k, n)
    return {
        "p": p,
        "q": q,
        "k": k,
        "n": n,
        "m": m,
        "B": ratio_base_lower_order(p, q, k, n),
        "Theta": ratio_theta_lower_order(p, q, k, n),
    }
