"""Approximation power of smooth versus rough spline spaces.

Closed-form bounds and ratios live in :mod:`splinepower.bounds`, numerical
constant estimates in :mod:`splinepower.numeric`.
"""

from .bounds import (
    BoundBracket,
    RatioReport,
    Verdict,
    bracket,
    ratio_base,
    ratio_report,
    ratio_theta,
    region_grid,
    verdict_dg,
    verdict_fem,
)
from .spaces import (
    BrokenSpec,
    SobolevTarget,
    SplineSpaceSpec,
    dimension,
    knot_vector,
    matched_segments,
    matched_segments_broken,
    matched_segments_lower_order,
)

__version__ = "0.1.0"
