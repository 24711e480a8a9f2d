"""Command-line front end: parse families and profiles from JSON, run the
height/energy/duality machinery, and emit JSON or CSV reports.

Exit codes: 0 success (-inf is a value, not an error), 2 malformed input,
3 precondition violation, 4 positive divergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .adelic_curve.family import (
    AdelicFamily,
    ToricCompactifiedDivisor,
    canonical_fn,
)
from .adelic_curve.heights import (
    extended_height,
    global_height,
    nef_status,
    roof,
)
from .adelic_curve.places import LogLinear, Place, log_abs, support
from .convex_calculus.duality import DualFn
from .convex_calculus.energy import local_energy
from .convex_calculus.functions import AffinePiece, AlphaPiece, ConcaveFn
from .convex_calculus.measures import (
    Measure1D,
    PositiveDivergenceError,
    monge_ampere,
)
from .divisorial_core.cones import (
    Cell,
    Constraint,
    DivisorialSpace,
    SemilinearCone,
    d_b,
)
from .divisorial_core.completion import CompletionElement
from .divisorial_core.intersection import IntersectionMap, extend_intersection
from .divisorial_core.vectors import RationalVector

Number = Union[int, float, Fraction]

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_PRECONDITION = 3
EXIT_DIVERGENCE = 4

DEFAULT_GRID_POINTS = 513


class SchemaError(ValueError):
    """Input does not match the documented JSON schemas."""


# ---------------------------------------------------------------------------
# number and object codecs


def encode_number(x) -> Union[int, float, str]:
    """Rationals to exact 'p/q' strings (integers plain), floats to 12
    significant digits, -inf to the string '-inf'."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, int):
        return x
    f = float(x)
    if f == -math.inf:
        return "-inf"
    if f == math.inf:
        raise PositiveDivergenceError("positive infinity in output")
    return float(f"{f:.12g}")


def decode_number(value) -> Union[Fraction, float]:
    if isinstance(value, bool):
        raise SchemaError(f"expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        if value == "-inf":
            return -math.inf
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad rational literal {value!r}") from exc
    raise SchemaError(f"expected a number, got {value!r}")


def _decode_finite(value) -> Fraction:
    out = decode_number(value)
    if not isinstance(out, Fraction):
        out = Fraction(out)
    return out


def encode_log_linear(x: LogLinear) -> Dict[str, Union[int, float, str]]:
    return {str(p): encode_number(c) for p, c in sorted(x.coeffs.items())}


def encode_concave_fn(f: ConcaveFn) -> dict:
    pieces = []
    for lo, hi, piece in f.intervals():
        if isinstance(piece, AlphaPiece):
            kind = "alpha_singular"
            params = {
                "alpha": encode_number(piece.alpha),
                "slope": encode_number(piece.slope),
                "intercept": encode_number(piece.intercept),
            }
        else:
            kind = "affine"
            params = {
                "slope": encode_number(piece.slope),
                "intercept": encode_number(piece.intercept),
            }
        pieces.append(
            {
                "from": "-inf" if lo is None else encode_number(lo),
                "to": "+inf" if hi is None else encode_number(hi),
                "kind": kind,
                "params": params,
            }
        )
    return {
        "slope_neg": encode_number(f.slope_neg),
        "slope_pos": encode_number(f.slope_pos),
        "pieces": pieces,
    }


def decode_concave_fn(obj) -> ConcaveFn:
    if not isinstance(obj, dict):
        raise SchemaError("concave function must be a JSON object")
    for field in ("slope_neg", "slope_pos", "pieces"):
        if field not in obj:
            raise SchemaError(f"concave function is missing {field!r}")
    raw_pieces = obj["pieces"]
    if not isinstance(raw_pieces, list) or not raw_pieces:
        raise SchemaError("pieces must be a non-empty array")
    breakpoints: List[Fraction] = []
    pieces = []
    for i, entry in enumerate(raw_pieces):
        if not isinstance(entry, dict):
            raise SchemaError("each piece must be a JSON object")
        frm, to = entry.get("from"), entry.get("to")
        if i == 0 and frm != "-inf":
            raise SchemaError("first piece must start at '-inf'")
        if i == len(raw_pieces) - 1:
            if to != "+inf":
                raise SchemaError("last piece must end at '+inf'")
        else:
            breakpoints.append(_decode_finite(to))
        if i > 0 and _decode_finite(frm) != breakpoints[i - 1]:
            raise SchemaError(f"piece {i} does not start where piece {i-1} ends")
        params = entry.get("params")
        if not isinstance(params, dict):
            raise SchemaError("piece params must be a JSON object")
        kind = entry.get("kind")
        try:
            if kind == "affine":
                pieces.append(
                    AffinePiece(
                        decode_number(params["slope"]),
                        decode_number(params["intercept"]),
                    )
                )
            elif kind == "alpha_singular":
                pieces.append(
                    AlphaPiece(
                        decode_number(params["alpha"]),
                        decode_number(params["slope"]),
                        decode_number(params["intercept"]),
                    )
                )
            else:
                raise SchemaError(f"unknown piece kind {kind!r}")
        except KeyError as exc:
            raise SchemaError(f"piece params missing {exc}") from exc
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    try:
        fn = ConcaveFn(breakpoints, pieces)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    for field, computed in (("slope_neg", fn.slope_neg), ("slope_pos", fn.slope_pos)):
        declared = decode_number(obj[field])
        if float(declared) != float(computed):
            raise SchemaError(
                f"declared {field} {declared} does not match computed {computed}"
            )
    return fn


def decode_place(value) -> Place:
    if value == "inf":
        return Place.infinity()
    if isinstance(value, int) and not isinstance(value, bool):
        try:
            return Place.prime(value)
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    raise SchemaError(f"place must be 'inf' or a prime, got {value!r}")


def encode_place(place: Place) -> Union[int, str]:
    return "inf" if place.is_infinite else place.p


def encode_family(fam: AdelicFamily) -> dict:
    return {
        "divisor": {
            "a": encode_number(fam.divisor.a),
            "b": encode_number(fam.divisor.b),
        },
        "exceptions": [
            {"place": encode_place(place), "psi": encode_concave_fn(psi)}
            for place, psi in fam.exceptions.items()
        ],
    }


def decode_family(obj) -> AdelicFamily:
    if not isinstance(obj, dict):
        raise SchemaError("family must be a JSON object")
    divisor = obj.get("divisor")
    if not isinstance(divisor, dict) or "a" not in divisor or "b" not in divisor:
        raise SchemaError("family needs a divisor with fields a and b")
    try:
        div = ToricCompactifiedDivisor(
            _decode_finite(divisor["a"]), _decode_finite(divisor["b"])
        )
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    table = {}
    for entry in obj.get("exceptions", []):
        if not isinstance(entry, dict) or "place" not in entry or "psi" not in entry:
            raise SchemaError("each exception needs place and psi fields")
        place = decode_place(entry["place"])
        if place in table:
            raise SchemaError(f"duplicate exception at {place}")
        table[place] = decode_concave_fn(entry["psi"])
    strict = obj.get("strict", True)
    if not isinstance(strict, bool):
        raise SchemaError("strict must be a boolean")
    try:
        return AdelicFamily(div, table, strict=strict)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def _dual_endpoint(d: DualFn, m):
    try:
        return d.value_exact(m)
    except (TypeError, ValueError):
        return d(m)


def encode_dual_fn(d: DualFn) -> dict:
    left, right = _dual_endpoint(d, d.lo), _dual_endpoint(d, d.hi)
    edges = [d.lo] + list(d.breakpoints) + [d.hi]
    pieces = []
    for piece, lo, hi in zip(d.pieces, edges, edges[1:]):
        params = {
            "slope": encode_number(piece.slope),
            "intercept": encode_number(piece.intercept),
        }
        if piece.terms:
            params["terms"] = [
                {
                    "coeff": encode_number(t.coeff),
                    "exponent": encode_number(t.exponent),
                    "center": encode_number(t.center),
                }
                for t in piece.terms
            ]
        pieces.append(
            {
                "from": encode_number(lo),
                "to": encode_number(hi),
                "kind": "power" if piece.terms else "affine",
                "params": params,
            }
        )
    return {
        "lo": encode_number(d.lo),
        "hi": encode_number(d.hi),
        "endpoints": [encode_number(left), encode_number(right)],
        "pieces": pieces,
    }


def encode_measure(mu: Measure1D) -> dict:
    return {
        "atoms": [
            {"at": encode_number(u), "mass": encode_number(m)} for u, m in mu.atoms
        ],
        "densities": [
            {
                "from": "-inf" if p.lo is None else encode_number(p.lo),
                "to": encode_number(p.hi),
                "coeff": encode_number(p.coeff),
                "exponent": encode_number(p.exponent),
            }
            for p in mu.densities
        ],
        "total_mass": encode_number(mu.total_mass),
    }


# ---------------------------------------------------------------------------
# input plumbing


def load_input(raw: Optional[str]):
    """Accept a filesystem path or inline JSON text."""
    if raw is None:
        raise SchemaError("this command requires --input")
    text = raw
    if not raw.lstrip().startswith(("{", "[")) and os.path.exists(raw):
        with open(raw, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"input is not valid JSON: {exc}") from exc


def parse_grid(spec: str) -> Tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise SchemaError("grid must look like lo:hi:count")
    try:
        lo = float(decode_number(parts[0]))
        hi = float(decode_number(parts[1]))
        count = int(parts[2])
    except (SchemaError, ValueError) as exc:
        raise SchemaError(f"bad grid {spec!r}") from exc
    if not (lo < hi) or count < 2:
        raise SchemaError("grid needs lo < hi and at least two points")
    return lo, hi, count


def grid_points(lo: float, hi: float, count: int) -> List[float]:
    step = (hi - lo) / (count - 1)
    pts = [lo + i * step for i in range(count)]
    pts[-1] = hi
    return pts


# ---------------------------------------------------------------------------
# command handlers


def cmd_height(args) -> dict:
    fam = decode_family(load_input(args.input))
    theta = roof(fam)
    status = nef_status(fam)
    return {
        "height": encode_number(global_height(fam)),
        "roof": encode_dual_fn(theta.dual),
        "status": status.status,
        "mu_min_asy": encode_number(status.mu_min_asy),
    }


def cmd_energy(args) -> dict:
    obj = load_input(args.input)
    if not isinstance(obj, dict) or "reference" not in obj or "singular" not in obj:
        raise SchemaError("energy input needs reference and singular families")
    ref = decode_family(obj["reference"])
    sing = decode_family(obj["singular"])
    if ref.divisor != sing.divisor:
        raise ValueError("families must share the divisor")
    per_place = []
    total = 0.0
    for place in sorted(set(ref.places()) | set(sing.places())):
        psi, phi = ref.psi_at(place), sing.psi_at(place)
        if psi == phi:
            continue
        try:
            term = local_energy(psi, phi, tol=args.tol)
        except PositiveDivergenceError:
            raise
        except ValueError as exc:
            raise type(exc)(f"at {place}: {exc}") from exc
        per_place.append({"place": encode_place(place), "energy": encode_number(term)})
        if term != -math.inf and total != -math.inf:
            total += term
        else:
            total = -math.inf
    return {"energy": encode_number(total), "per_place": per_place}


def cmd_dual(args) -> dict:
    from .convex_calculus.duality import legendre_dual

    fn = decode_concave_fn(load_input(args.input))
    dual = legendre_dual(fn)
    if args.grid:
        lo, hi, count = parse_grid(args.grid)
    else:
        lo, hi, count = float(dual.lo), float(dual.hi), DEFAULT_GRID_POINTS
    samples = []
    if dual.is_degenerate():
        samples.append([encode_number(float(dual.lo)), encode_number(dual(dual.lo))])
    else:
        for m in grid_points(lo, hi, count):
            samples.append([encode_number(m), encode_number(dual(m))])
    payload = encode_dual_fn(dual)
    payload["samples"] = samples
    return payload


def cmd_ma(args) -> dict:
    fn = decode_concave_fn(load_input(args.input))
    return encode_measure(monge_ampere(fn))


def cmd_nef_check(args) -> dict:
    fam = decode_family(load_input(args.input))
    status = nef_status(fam)
    return {
        "status": status.status,
        "mu_min_asy": None
        if status.mu_min_asy is None
        else encode_number(status.mu_min_asy),
    }


def cmd_product_formula(args) -> dict:
    q = _decode_finite(args.rational)
    if q == 0:
        raise ValueError("the product formula needs a nonzero rational")
    contributions = []
    total = LogLinear.zero()
    for place in support(q) + [Place.infinity()]:
        term = log_abs(q, place)
        total = total + term
        contributions.append(
            {"place": encode_place(place), "log_abs": encode_log_linear(term)}
        )
    return {
        "q": encode_number(q),
        "contributions": contributions,
        "total": encode_log_linear(total),
        "result": "0 (exact)" if total.is_zero() else "nonzero",
    }


def alpha_profile(alpha: Fraction) -> ConcaveFn:
    return ConcaveFn([0], [AlphaPiece(alpha, 1, 0), AffinePiece(0, 1 / alpha)])


def cmd_example_alpha(args) -> dict:
    alpha = _decode_finite(args.alpha)
    if not 0 < alpha < 1:
        raise SchemaError("alpha must lie strictly between 0 and 1")
    divisor = ToricCompactifiedDivisor(0, 1)
    singular = AdelicFamily(divisor, {Place.infinity(): alpha_profile(alpha)})
    reference = AdelicFamily(divisor)
    if alpha < Fraction(1, 2):
        closed = (2 - 3 * alpha) / (alpha * (2 * alpha - 1))
    else:
        closed = -math.inf
    roof_route = global_height(singular)
    energy_route = extended_height(reference, singular, tol=args.tol)
    if roof_route == -math.inf and energy_route == -math.inf:
        gap = 0.0
    else:
        gap = abs(float(roof_route) - float(energy_route))
    return {
        "closed_form": encode_number(closed),
        "roof_route": encode_number(roof_route),
        "energy_route": encode_number(energy_route),
        "gap": encode_number(gap),
    }


def _format_cell(v) -> str:
    if isinstance(v, float):
        if v == -math.inf:
            return "-inf"
        return f"{v:.12g}"
    return str(v)


def cmd_plot(args) -> List[List[str]]:
    fam = decode_family(load_input(args.input))
    if args.grid:
        lo, hi, count = parse_grid(args.grid)
    else:
        lo, hi, count = -10.0, 10.0, DEFAULT_GRID_POINTS
    rows = [["series", "x", "y"]]
    series = [("psi:canonical", canonical_fn(fam.divisor))]
    series += [
        (f"psi:{encode_place(place)}", psi) for place, psi in fam.exceptions.items()
    ]
    for label, fn in series:
        for u in grid_points(lo, hi, count):
            rows.append([label, _format_cell(u), _format_cell(fn(u))])
    theta = roof(fam)
    d_lo, d_hi = float(theta.dual.lo), float(theta.dual.hi)
    if d_lo < d_hi:
        for m in grid_points(d_lo, d_hi, count):
            rows.append(["roof", _format_cell(m), _format_cell(theta(m))])
    else:
        rows.append(["roof", _format_cell(d_lo), _format_cell(theta(d_lo))])
    return rows


def cmd_core_demo(args) -> dict:
    F = Fraction
    V = RationalVector
    quadrant = SemilinearCone.from_halfspaces(((1, 0), (0, 1)), 2)
    space = DivisorialSpace(2, quadrant)
    gauge = V([1, 1])
    chebyshev = d_b(space, gauge, V([F(1, 3), F(-1, 6)]), V([0, 0]))
    capped = d_b(space, gauge, V([5, 0]), V([0, 0]))

    open_half = Cell((Constraint((1, 0), strict=True),))
    axis = Cell((Constraint((1, 0)), Constraint((-1, 0)), Constraint((0, 1))))
    half_open = SemilinearCone([open_half, axis], 2)
    degenerate_space = DivisorialSpace(2, half_open)
    degenerate = d_b(degenerate_space, V([1, 0]), V([0, 1]), V([0, 0]))
    probe = V([0, -1])

    pairing = IntersectionMap(space, 2, {(0, 1): 1})
    modulus = lambda e: int(1 / Fraction(e)) + 1  # noqa: E731
    x = CompletionElement(space, gauge, lambda n: V([1, F(1, n + 1)]), modulus)
    y = CompletionElement(space, gauge, lambda n: V([F(1, n + 1), 1]), modulus)
    eps = F(1, 10**6)
    value = extend_intersection(pairing, [x, y], eps, gauge)

    return {
        "order_metric": {
            "chebyshev_example": encode_number(chebyshev),
            "capped_at_one": encode_number(capped),
            "degenerate_direction": encode_number(degenerate),
        },
        "closure": {
            "probe": [0, -1],
            "in_cone": half_open.contains(probe),
            "in_closure": half_open.closure().contains(probe),
        },
        "extension": {
            "eps": encode_number(eps),
            "value": encode_number(value),
            "limit": 1,
        },
    }


# ---------------------------------------------------------------------------
# output + entry point


def render(payload, fmt: str) -> str:
    if isinstance(payload, list):  # CSV rows
        return "\n".join(",".join(row) for row in payload) + "\n"
    if fmt == "csv":
        rows = [["key", "value"]]
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                cell = json.dumps(value, separators=(",", ":"))
            else:
                cell = _format_cell(value)
            rows.append([key, '"' + cell.replace('"', '""') + '"'])
        return "\n".join(",".join(row) for row in rows) + "\n"
    return json.dumps(payload, indent=2) + "\n"


def write_output(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_tol() -> float:
    raw = os.environ.get("ADELIC_HEIGHTS_TOL", "1e-9")
    try:
        return float(raw)
    except ValueError as exc:
        raise SchemaError(f"ADELIC_HEIGHTS_TOL is not a number: {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adelic-heights",
        description="Heights, energies, and dual profiles of adelic "
        "families on the projective line.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", help="path to a JSON file, or inline JSON")
        p.add_argument("--tol", type=float, default=None, help="tolerance")
        p.add_argument(
            "--format", choices=("json", "csv"), default="json", dest="fmt"
        )
        p.add_argument("--out", help="write output to this path")

    p = sub.add_parser("height", help="global height, roof, and nef status")
    common(p)
    p = sub.add_parser("energy", help="relative energy of two families")
    common(p)
    p = sub.add_parser("dual", help="concave conjugate with samples")
    common(p)
    p.add_argument("--grid", help="sample grid lo:hi:count")
    p = sub.add_parser("ma", help="second-derivative measure of a profile")
    common(p)
    p = sub.add_parser("nef-check", help="positivity classification")
    common(p)
    p = sub.add_parser("product-formula", help="exact cancellation certificate")
    p.add_argument("rational", help="nonzero rational, e.g. 12/5")
    common(p, needs_input=False)
    p = sub.add_parser("example-alpha", help="singular family worked example")
    p.add_argument("--alpha", required=True, help="exponent in (0, 1)")
    common(p, needs_input=False)
    p = sub.add_parser("plot", help="CSV samples of profiles and the roof")
    common(p)
    p.add_argument("--grid", help="profile grid lo:hi:count")
    p = sub.add_parser("core-demo", help="order-metric and extension examples")
    common(p, needs_input=False)
    return parser


HANDLERS = {
    "height": cmd_height,
    "energy": cmd_energy,
    "dual": cmd_dual,
    "ma": cmd_ma,
    "nef-check": cmd_nef_check,
    "product-formula": cmd_product_formula,
    "example-alpha": cmd_example_alpha,
    "plot": cmd_plot,
    "core-demo": cmd_core_demo,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.tol is None:
            args.tol = _default_tol()
        if not args.tol > 0:
            raise SchemaError("tolerance must be positive")
        payload = HANDLERS[args.command](args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except PositiveDivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    write_output(render(payload, args.fmt), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
