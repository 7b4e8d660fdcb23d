"""Command-line front end.

Every command writes a deterministic CSV (12 significant digits) or JSON
(floats as repr strings) table to stdout or ``--out``.  ``reproduce`` checks
the certified ratio values and region grids and exits nonzero if any check
fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from decimal import ROUND_DOWN, Decimal
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath
import numpy as np

from . import bounds
from .errors import NotConvergedWarning, SplinePowerError
from .spaces import BrokenSpec, SplineSpaceSpec, matched_segments_broken

COMMANDS = ("bounds", "ratio", "region", "estimate", "broken", "tensor", "reproduce")

# Theta values certified in the comparison proofs, as 4-decimal truncated prefixes.
REFERENCE_PREFIXES = (
    ((38, 0, 2), "0.9851"),
    ((6, 0, 3), "0.7776"),
    ((4, 0, 4), "0.9114"),
    ((3, 0, 7), "0.9632"),
    ((1, -1, 3), "0.9990"),
    ((2, -1, 3), "0.8172"),
    ((18, -1, 2), "0.9639"),
    ((19, -1, 2), "0.9247"),
    ((20, -1, 2), "0.8862"),
    ((21, -1, 2), "0.8484"),
    ((22, -1, 2), "0.8115"),
)

FEM_GRID = (40, 8)
DG_GRID = (23, 7)
P2_MAX_N = 10 ** 6


# ---------------------------------------------------------------- formatting

def fmt(x) -> str:
    """Fixed 12-significant-digit rendering used in every CSV cell."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def jfmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def render(header: Sequence[str], rows: Iterable[Sequence], kind: str) -> str:
    rows = list(rows)
    if kind == "json":
        return json.dumps([{h: jfmt(v) for h, v in zip(header, r)} for r in rows],
                          indent=1, sort_keys=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def truncated_prefix(value: float, digits: int = 4) -> str:
    q = Decimal(1).scaleb(-digits)
    return str(Decimal(repr(value)).quantize(q, rounding=ROUND_DOWN))


# ---------------------------------------------------------------- parsing

def parse_range(text: str | None, default: Sequence[int] = ()) -> list[int]:
    """Comma-separated integers or inclusive ``a:b`` ranges, e.g. ``-1:2,5``.

    The token ``p-1`` is kept as the sentinel ``None`` (maximal smoothness).
    """
    if text is None or text == "":
        return list(default)
    out: list = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("p-1", "max"):
            out.append(None)
            continue
        head, sep, tail = tok.partition(":")
        if sep and head and tail:
            a, b = int(head), int(tail)
            out.extend(range(a, b + 1))
        else:
            out.append(int(tok))
    return out


def parse_xi(text: str | None) -> list[Fraction]:
    if not text:
        return []
    return [Fraction(tok.strip()) for tok in text.split(",")]


def parse_ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(tok) for tok in text.split(",")]


def threads() -> int:
    try:
        return max(1, int(os.environ.get("SPLINEPOWER_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-preserving map, fanned out over at most SPLINEPOWER_THREADS workers."""
    items = list(items)
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def triples(args, with_q: bool = False) -> list[tuple]:
    out = []
    for p in parse_range(args.p, [1]):
        for k in parse_range(args.k, [None]):
            kk = p - 1 if k is None else k
            if not -1 <= kk <= p - 1:
                continue
            for n in parse_range(args.n, [1]):
                if not with_q:
                    out.append((p, kk, n))
                    continue
                for q in parse_range(args.q, [None]):
                    qq = p if q is None else q
                    if 0 <= qq <= p:
                        out.append((p, kk, n, qq))
    return sorted(set(out))


# ---------------------------------------------------------------- commands

def cmd_bounds(args) -> tuple[str, int]:
    header = ["p", "k", "n", "lower", "upper", "log_lower", "log_upper"]
    rows = []
    for p, k, n in triples(args):
        b = bounds.bracket(p, k, n)
        rows.append([p, k, n, b.lower, b.upper, b.log_lower, b.log_upper])
    return render(header, rows, args.format), 0


def cmd_ratio(args) -> tuple[str, int]:
    header = ["p", "q", "k", "n", "m", "B", "Theta", "verdict", "status"]
    rows = []
    for p, k, n, q in triples(args, with_q=True):
        if q == p:
            r = bounds.ratio_report(p, k, n)
            rows.append([p, q, k, n, r.matched_m, r.B, r.Theta, r.verdict.value, "ok"])
            continue
        try:
            r = bounds.lower_order_report(p, q, k, n)
            rows.append([p, q, k, n, r["m"], r["B"], r["Theta"], "", "ok"])
        except SplinePowerError as exc:
            rows.append([p, q, k, n, None, None, None, "", type(exc).__name__])
    return render(header, rows, args.format), 0


def _region_rows(kind: str, p_max: int, n_max: int) -> list[list]:
    return [[kind, c.p, c.n, c.verdict.value, c.theta, bounds._fmt_base(c.base_point) or None]
            for c in bounds.region_grid(kind, p_max, n_max)]


REGION_HEADER = ["kind", "p", "n", "verdict", "theta", "base_point"]


def cmd_region(args) -> tuple[str, int]:
    ks = parse_range(args.k, [0, -1])
    rows = []
    for k in ks:
        kind = {0: "fem", -1: "dg"}.get(k)
        if kind is None:
            raise SystemExit(f"region grids exist for k=0 (fem) and k=-1 (dg), not k={k}")
        default = FEM_GRID if kind == "fem" else DG_GRID
        p_max = max(parse_range(args.p, [default[0]]))
        n_max = max(parse_range(args.n, [default[1]]))
        rows.extend(_region_rows(kind, p_max, n_max))
    return render(REGION_HEADER, rows, args.format), 0


ESTIMATE_HEADER = ["p", "k", "n", "q", "estimate", "lower", "upper", "converged",
                   "condition", "in_bracket", "status"]


def estimate_row(p: int, k: int, n: int, q: int, tolerance: float, max_refine: int,
                 extended: bool) -> list:
    """One estimate table row; failures become a status, never an exception."""
    from .numeric import estimate_constant

    upper = (n * math.pi) ** (-(q + 1))
    lower = bounds.bracket(p, k, n).lower if q == p else None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NotConvergedWarning)
            est = estimate_constant(p, k, n, q, tolerance=tolerance, max_refine=max_refine,
                                    extended_precision=extended)
    except SplinePowerError as exc:
        return [p, k, n, q, None, lower, upper, False, None, None, type(exc).__name__]
    inside = est.value <= upper * (1 + 1e-6) and (lower is None or est.value >= lower)
    if not inside:
        status = "bracket_violation"
    elif not est.converged:
        status = "not_converged"
    elif est.ill_conditioned:
        status = "ill_conditioned"
    else:
        status = "ok"
    return [p, k, n, q, est.value, lower, upper, est.converged, est.condition, inside, status]


def cmd_estimate(args) -> tuple[str, int]:
    items = triples(args, with_q=True)
    rows = parallel_map(
        lambda t: estimate_row(*t, args.tolerance, args.max_refine, args.extended_precision), items)
    return render(ESTIMATE_HEADER, rows, args.format), 0


def cmd_broken(args) -> tuple[str, int]:
    from .numeric import estimate_constant_broken

    xi, s = parse_xi(args.xi), parse_ints(args.s)
    header = ["p", "k", "n", "xi", "s", "sigmas", "dimension", "m", "hits", "Theta",
              "lower", "upper", "estimate", "converged", "in_bracket", "status"]
    rows = []
    for p, k, n in triples(args):
        spec = BrokenSpec(SplineSpaceSpec(p, k, n), tuple(xi), tuple(s))
        xi_txt = " ".join(str(x) for x in spec.breakpoints)
        s_txt = " ".join(str(v) for v in spec.smoothness_list)
        sig = " ".join(str(v) for v in spec.sigmas())
        br = bounds.broken_bracket(spec)
        try:
            mb = matched_segments_broken(spec)
            m, hits, theta = mb.m, mb.hits, bounds.ratio_theta_broken(spec)
        except SplinePowerError:
            m = hits = theta = None
        row = [p, k, n, xi_txt, s_txt, sig, spec.dimension(), m, hits, theta, br.lower, br.upper]
        if args.skip_estimate:
            rows.append(row + [None, None, None, "skipped"])
            continue
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NotConvergedWarning)
                est = estimate_constant_broken(spec, tolerance=args.tolerance,
                                               max_refine=args.max_refine,
                                               extended_precision=args.extended_precision)
            inside = br.contains(est.value, 1e-6)
            rows.append(row + [est.value, est.converged, inside,
                               "ok" if inside else "bracket_violation"])
        except SplinePowerError as exc:
            rows.append(row + [None, False, None, type(exc).__name__])
    return render(header, rows, args.format), 0


def cmd_tensor(args) -> tuple[str, int]:
    from .tensor import TensorSpec, TrigProduct, tensor_report

    ps = parse_range(args.p, [2, 2])
    ks = parse_range(args.k, [None] * len(ps))
    ns = parse_range(args.n, [2] * len(ps))
    qs = parse_range(args.q, [None] * len(ps))
    if not len(ps) == len(ks) == len(ns) == len(qs):
        raise SystemExit("tensor needs one --p/--k/--n/--q entry per direction")
    spaces = [SplineSpaceSpec(p, p - 1 if k is None else k, n) for p, k, n in zip(ps, ks, ns)]
    spec = TensorSpec.uniform(spaces, [p if q is None else q for p, q in zip(ps, qs)])
    rng = np.random.default_rng(args.seed)
    header = ["sample", "separable", "error", "bound", "holds"]
    rows = []
    for i in range(args.samples):
        sep = i % 2 == 0
        rep = tensor_report(spec, TrigProduct.random(rng, spec.d, separable=sep))
        rows.append([i, sep, rep.error_norm, rep.bound, rep.holds])
    failed = sum(1 for r in rows if not r[-1])
    return render(header, rows, args.format), 1 if failed else 0


# ---------------------------------------------------------------- reproduce

def reproduce_checks() -> list[list]:
    """Rows (section, item, value, expected, passed)."""
    rows = []
    for (p, k, n), prefix in REFERENCE_PREFIXES:
        theta = bounds.ratio_theta(p, k, n)
        rows.append(["theta", f"Theta_{p},{k},{n}", theta, prefix, truncated_prefix(theta) == prefix])

    ns = [2 ** j for j in range(1, 20)] + [P2_MAX_N]
    worst = min(bounds.ratio_theta(2, 0, n) for n in ns)
    rows.append(["p2", "min Theta_2,0,n over dyadic n<=1e6", worst, ">1", worst > 1])
    with mpmath.workdps(40):
        limit_mp = (6 / (mpmath.e * mpmath.pi)) ** 3 * mpmath.sqrt(14)
    limit = (6 / (math.e * math.pi)) ** 3 * math.sqrt(14)
    rows.append(["p2", "limit (6/(e pi))^3 sqrt(14)", limit, ">1",
                 limit > 1 and abs(limit - float(limit_mp)) < 1e-12])
    rows.append(["p2", "Theta_2,0,1e6 approaches limit", bounds.ratio_theta(2, 0, P2_MAX_N),
                 f"{limit:.12g}", abs(bounds.ratio_theta(2, 0, P2_MAX_N) - limit) < 1e-4])

    for kind, (p_max, n_max) in (("fem", FEM_GRID), ("dg", DG_GRID)):
        k = 0 if kind == "fem" else -1
        for base, theta in bounds.certify_base_points(kind).items():
            rows.append([f"base_{kind}", f"{base[0]}:{base[1]}", theta, "<1", theta < 1])
        cells = bounds.region_grid(kind, p_max, n_max)
        closure = bounds.closure_region(kind, p_max, n_max)
        blue = {(c.p, c.n) for c in cells if c.verdict is bounds.Verdict.SMOOTH_BETTER}
        below = {(c.p, c.n) for c in cells
                 if c.verdict is not bounds.Verdict.SAME_SPACE and bounds.log_ratio_theta(c.p, k, c.n) < 0}
        rows.append([f"region_{kind}", "SmoothBetter cells", float(len(blue)), "", True])
        rows.append([f"region_{kind}", "closure generates every SmoothBetter cell",
                     float(len(blue - set(closure))), "0", blue == set(closure)])
        rows.append([f"region_{kind}", "SmoothBetter equals Theta<1 set",
                     float(len(blue ^ below)), "0", blue == below])
    return rows


def cmd_reproduce(args) -> tuple[str, int]:
    rows = reproduce_checks()
    ok = all(r[-1] for r in rows)
    check_rows = [r[:-1] + ["pass" if r[-1] else "FAIL"] for r in rows]
    header = ["section", "item", "value", "expected", "status"]
    region = (_region_rows("fem", *FEM_GRID) + _region_rows("dg", *DG_GRID))
    if args.format == "json":
        doc = {
            "checks": [{h: jfmt(v) for h, v in zip(header, r)} for r in check_rows],
            "regions": [{h: jfmt(v) for h, v in zip(REGION_HEADER, r)} for r in region],
            "all_passed": ok,
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        text = render(header, check_rows, "csv") + "\n" + render(REGION_HEADER, region, "csv")
    return text, 0 if ok else 1


HANDLERS = {
    "bounds": cmd_bounds,
    "ratio": cmd_ratio,
    "region": cmd_region,
    "estimate": cmd_estimate,
    "broken": cmd_broken,
    "tensor": cmd_tensor,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="splinepower", description=__doc__.splitlines()[0])
    ap.add_argument("--command", choices=COMMANDS, required=True)
    ap.add_argument("--p", help="degree: value, list or a:b range")
    ap.add_argument("--k", help="smoothness: value, list, a:b range or p-1")
    ap.add_argument("--n", help="segments: value, list or a:b range")
    ap.add_argument("--q", help="Sobolev order minus one (defaults to p)")
    ap.add_argument("--xi", help="breakpoints as comma-separated num/den rationals")
    ap.add_argument("--s", help="breakpoint smoothness values, comma-separated")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--out", help="output file (default stdout)")
    ap.add_argument("--tolerance", type=float, default=1e-6)
    ap.add_argument("--max-refine", type=int, default=6)
    ap.add_argument("--extended-precision", action="store_true")
    ap.add_argument("--skip-estimate", action="store_true", help="broken: closed forms only")
    ap.add_argument("--samples", type=int, default=10, help="tensor: random test functions")
    ap.add_argument("--seed", type=int, default=0, help="tensor: RNG seed")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = HANDLERS[args.command](args)
    except SplinePowerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
