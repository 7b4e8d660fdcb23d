"""Descriptors for uniform and broken spline spaces on [0, 1].

A uniform space S^p_{k,n} holds degree-p piecewise polynomials on the
``n`` equal segments of [0, 1] with ``k`` continuous derivatives at the
interior breakpoints (``k = -1`` allows jumps).  A broken space adds
extra breakpoints ``xi_i`` carrying their own smoothness ``s_i``.

All knots are exact :class:`fractions.Fraction` values so that the test
"does xi_i sit on the uniform grid" is decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import InvalidSpaceError, MInvalid

__all__ = [
    "SplineSpaceSpec",
    "BrokenSpec",
    "SobolevTarget",
    "MatchedBroken",
    "dimension",
    "matched_segments",
    "matched_segments_lower_order",
    "matched_segments_broken",
    "knot_vector",
    "spec_to_record",
    "spec_from_record",
]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (tuple, list)):
        num, den = value
        return Fraction(int(num), int(den))
    if isinstance(value, float):
        raise InvalidSpaceError(
            f"breakpoint {value!r} must be given as an exact rational, not a float"
        )
    return Fraction(value)


@dataclass(frozen=True)
class SplineSpaceSpec:
    """Degree ``p``, smoothness ``k`` and number of uniform segments ``n``."""

    p: int
    k: int
    n: int

    def __post_init__(self):
        if self.p < 0:
            raise InvalidSpaceError(f"degree must be >= 0, got p={self.p}")
        if not -1 <= self.k <= self.p - 1:
            raise InvalidSpaceError(
                f"smoothness must satisfy -1 <= k <= p-1, got p={self.p}, k={self.k}"
            )
        if self.n < 1:
            raise InvalidSpaceError(f"number of segments must be >= 1, got n={self.n}")

    @property
    def degree(self) -> int:
        return self.p

    @property
    def smoothness(self) -> int:
        return self.k

    @property
    def segments(self) -> int:
        return self.n

    def dimension(self) -> int:
        return (self.n - 1) * (self.p - self.k) + self.p + 1

    def uniform_knots(self) -> list[Fraction]:
        """Interior uniform breakpoints j/n, j = 1..n-1."""
        return [Fraction(j, self.n) for j in range(1, self.n)]


@dataclass(frozen=True)
class BrokenSpec:
    """A uniform base space enriched by breakpoints ``xi`` with smoothness ``s``."""

    base: SplineSpaceSpec
    breakpoints: tuple = field(default=())
    smoothness_list: tuple = field(default=())

    def __post_init__(self):
        xi = tuple(_as_fraction(x) for x in self.breakpoints)
        s = tuple(int(v) for v in self.smoothness_list)
        object.__setattr__(self, "breakpoints", xi)
        object.__setattr__(self, "smoothness_list", s)
        if len(xi) != len(s):
            raise InvalidSpaceError(
                f"{len(xi)} breakpoints but {len(s)} smoothness values"
            )
        for a, b in zip(xi, xi[1:]):
            if not a < b:
                raise InvalidSpaceError("breakpoints must be strictly increasing")
        for x in xi:
            if not 0 < x < 1:
                raise InvalidSpaceError(f"breakpoint {x} is not inside (0, 1)")
        p = self.base.p
        for v in s:
            if not -1 <= v <= p - 1:
                raise InvalidSpaceError(f"smoothness {v} outside [-1, p-1] for p={p}")

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def T(self) -> int:
        return len(self.breakpoints)

    def on_grid(self, i: int, n: int | None = None) -> bool:
        """True when breakpoint ``i`` coincides with an interior point j/n."""
        n = self.n if n is None else n
        x = self.breakpoints[i]
        return (x * n).denominator == 1

    def sigma(self, i: int) -> int:
        """Dimension increment contributed by breakpoint ``i``."""
        p, k, s = self.p, self.k, self.smoothness_list[i]
        if self.on_grid(i):
            return max(k - s, 0)
        return p - min(k, s)

    def sigmas(self) -> list[int]:
        return [self.sigma(i) for i in range(self.T)]

    def dimension(self) -> int:
        return self.base.dimension() + sum(self.sigmas())

    def with_base(self, base: SplineSpaceSpec) -> "BrokenSpec":
        return BrokenSpec(base, self.breakpoints, self.smoothness_list)


@dataclass(frozen=True)
class SobolevTarget:
    """Approximand regularity H^{q+1}."""

    order: int

    def __post_init__(self):
        if self.order < 0:
            raise InvalidSpaceError(f"Sobolev order must be >= 0, got q={self.order}")

    def check_against(self, space: SplineSpaceSpec) -> None:
        if self.order > space.p:
            raise InvalidSpaceError(
                f"q={self.order} exceeds the degree p={space.p} of the paired space"
            )


Space = Union[SplineSpaceSpec, BrokenSpec]


def dimension(space: Space) -> int:
    return space.dimension()


def matched_segments(p: int, k: int, n: int) -> int:
    """Segment count m with dim S^p_{p-1,m} == dim S^p_{k,n}."""
    spec = SplineSpaceSpec(p, k, n)
    m = (n - 1) * (p - k) + 1
    assert SplineSpaceSpec(p, p - 1, m).dimension() == spec.dimension()
    return m


def matched_segments_lower_order(p: int, q: int, k: int, n: int) -> int:
    """Segment count m with dim S^p_{p-1,m} == dim S^q_{k,n} for q <= p."""
    if not 0 <= q <= p:
        raise InvalidSpaceError(f"need 0 <= q <= p, got p={p}, q={q}")
    spec = SplineSpaceSpec(q, k, n)
    m = (q - k) * (n - 1) + 1 + q - p
    if m < 1:
        raise MInvalid(
            f"degree p={p} exceeds (q-k)(n-1)+q={(q - k) * (n - 1) + q}; m={m} < 1"
        )
    assert SplineSpaceSpec(p, p - 1, m).dimension() == spec.dimension()
    return m


class MatchedBroken(NamedTuple):
    """Matched segment count for a broken comparison.

    ``hits`` counts breakpoints landing on the interior m-grid; each hit
    lowers the smooth space's dimension by one below the rough one.
    """

    m: int
    hits: int
    smooth_dimension: int
    rough_dimension: int
    coincidence_rule: str


COINCIDENCE_RULE = "xi on fine grid: multiplicity p - min(k, s_i), merged with the single smooth knot"


def matched_segments_broken(spec: BrokenSpec) -> MatchedBroken:
    p, k, n = spec.p, spec.k, spec.n
    extra = sum(sg + s - p for sg, s in zip(spec.sigmas(), spec.smoothness_list))
    m = (n - 1) * (p - k) + 1 + extra
    if m < 1:
        raise MInvalid(f"matched segment count m={m} < 1")
    smooth = spec.with_base(SplineSpaceSpec(p, p - 1, m))
    hits = sum(1 for i in range(spec.T) if smooth.on_grid(i))
    rough_dim = spec.dimension()
    smooth_dim = smooth.dimension()
    assert smooth_dim == rough_dim - hits
    return MatchedBroken(m, hits, smooth_dim, rough_dim, COINCIDENCE_RULE)


def knot_vector(space: Space) -> list[tuple[Fraction, int]]:
    """Open knot vector on [0, 1] as (knot, multiplicity) pairs."""
    if isinstance(space, BrokenSpec):
        base, xi, s = space.base, space.breakpoints, space.smoothness_list
    else:
        base, xi, s = space, (), ()
    p, k = base.p, base.k
    mult: dict[Fraction, int] = {x: p - k for x in base.uniform_knots()}
    for x, si in zip(xi, s):
        mult[x] = max(mult.get(x, 0), p - min(k, si))
    inner = sorted(mult.items())
    return [(Fraction(0), p + 1), *inner, (Fraction(1), p + 1)]


def expanded_knots(space: Space) -> list[Fraction]:
    """Knot vector with each knot repeated by its multiplicity."""
    out: list[Fraction] = []
    for x, m in knot_vector(space):
        out.extend([x] * m)
    return out


def breakpoints_with_continuity(space: Space) -> list[tuple[Fraction, int]]:
    """Distinct knots including 0 and 1, each with its continuity order p - mult.

    Boundary knots report continuity -1.
    """
    p = space.p
    kv = knot_vector(space)
    out = [(kv[0][0], -1)]
    out.extend((x, p - m) for x, m in kv[1:-1])
    out.append((kv[-1][0], -1))
    return out


def spec_to_record(space: Space) -> dict:
    if isinstance(space, BrokenSpec):
        base = space.base
        xi = [[x.numerator, x.denominator] for x in space.breakpoints]
        s = list(space.smoothness_list)
    else:
        base, xi, s = space, [], []
    return {"p": base.p, "k": base.k, "n": base.n, "breakpoints": xi, "smoothness": s}


def spec_from_record(record: dict) -> Space:
    base = SplineSpaceSpec(int(record["p"]), int(record["k"]), int(record["n"]))
    xi: Iterable = record.get("breakpoints") or []
    s: Sequence = record.get("smoothness") or []
    if not xi and not s:
        return base
    return BrokenSpec(base, tuple(_as_fraction(tuple(x)) for x in xi), tuple(s))
