"""Command-line front end.

Every command prints one JSON envelope on stdout:

    {"command": ..., "inputs": ..., "results": ..., "warnings": [...],
     "version": ...}

with keys sorted, so identical invocations produce identical bytes.
Exact rationals are rendered as strings ("1/6") next to float values;
non-finite floats become the sentinel strings "inf", "-inf", "nan".
The experiment command can emit CSV instead with ``--format csv``.

Exit codes: 0 success, 2 malformed input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import warnings
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from math import isfinite

from . import __version__
from .arch import mahler_quadrature, mahler_univariate
from .equidist import (
    ARCH,
    ExperimentReport,
    family_autissier,
    family_power_shift,
    run_experiment,
)
from .heights import EscapeRateError, canonical_height, weil_height
from .padic import LocalValue, empirical_integral_padic, newton_polygon, root_valuations
from .poly import (
    IntPoly,
    ParseError,
    detect_variables,
    format_univariate,
    parse_poly,
    parse_univariate,
)
from .roots import RootFindingError

_POWER_SHIFT = re.compile(r"^T\^n([+-]\d+)$")


def _jsonable(obj):
    """Recursive conversion to JSON-encodable values with exact rationals
    as strings and non-finite floats as sentinel strings."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        if isfinite(obj):
            return obj
        if obj != obj:
            return "nan"
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, LocalValue):
        return {
            "coefficient_of_log_p": str(obj.coefficient_of_log_p),
            "p": obj.p,
            "float": float(obj),
        }
    if isinstance(obj, IntPoly):
        return format_univariate(obj.coeffs, "T")
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _render(command: str, inputs: dict, compute) -> str:
    """Run a computation with warning capture and wrap it in the envelope."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results = compute()
    envelope = {
        "command": command,
        "inputs": inputs,
        "results": results,
        "warnings": [str(w.message) for w in caught],
        "version": __version__,
    }
    return json.dumps(_jsonable(envelope), sort_keys=True)


def _parse_univariate_auto(text: str) -> IntPoly:
    names = detect_variables(text)
    if len(names) > 1:
        raise ParseError(f"expected one variable, found {names}", 0)
    return parse_univariate(text, names[0] if names else "T")


def _local_value_dict(lv: LocalValue) -> dict:
    return {
        "coefficient_of_log_p": lv.coefficient_of_log_p,
        "p": lv.p,
        "float": float(lv),
    }


# -- commands ---------------------------------------------------------------


def cmd_mahler(args) -> str:
    text = args.poly
    inputs = {"poly": text, "grid": args.grid}

    def compute():
        names = detect_variables(text)
        if len(names) <= 1:
            P = _parse_univariate_auto(text)
            out = {"log_mahler": mahler_univariate(P), "degree": P.degree}
            if args.grid is not None:
                q = mahler_quadrature(P, args.grid)
                out["quadrature"] = q
            return out
        F = parse_poly(text, names)
        q = mahler_quadrature(F, args.grid if args.grid is not None else 4096)
        return {
            "log_mahler": q.estimate,
            "error_estimate": q.error_estimate,
            "nodes_dropped": q.nodes_dropped,
            "grid": q.grid,
            "variables": names,
        }

    return _render("mahler", inputs, compute)


def cmd_height(args) -> str:
    text = args.poly

    def compute():
        P = _parse_univariate_auto(text)
        h = weil_height(P)
        return {
            "total": h.total,
            "arch": h.arch,
            "finite": list(h.finite),
            "unattributed": h.unattributed,
            "degree": h.degree,
            "places_complete": h.places_complete,
        }

    return _render("height", {"poly": text}, compute)


def cmd_canonical_height(args) -> str:
    inputs = {"poly": args.poly, "c": args.c}

    def compute():
        c = Fraction(args.c)
        P = _parse_univariate_auto(args.poly)
        return {"canonical_height": canonical_height(c, P), "degree": P.degree}

    return _render("canonical-height", inputs, compute)


def cmd_newton_polygon(args) -> str:
    inputs = {"poly": args.poly, "p": args.p}

    def compute():
        P = _parse_univariate_auto(args.poly)
        hull = newton_polygon(P, args.p)
        return {
            "p": hull.p,
            "points": [[i, v] for i, v in hull.points],
            "vertices": [[i, v] for i, v in hull.vertices],
            "segments": [
                {"slope": s, "slope_float": float(s), "width": w}
                for s, w in hull.segments
            ],
            "root_valuations": [
                {"valuation": v, "valuation_float": float(v), "count": w}
                for v, w in root_valuations(hull)
            ],
        }

    return _render("newton-polygon", inputs, compute)


def cmd_local_integral(args) -> str:
    inputs = {"poly": args.poly, "at": args.at, "p": args.p}

    def compute():
        P = _parse_univariate_auto(args.poly)
        lv = empirical_integral_padic(P, Fraction(args.at), args.p)
        return _local_value_dict(lv)

    return _render("local-integral", inputs, compute)


def _build_family(args):
    if args.name == "autissier":
        if args.family is not None:
            raise ValueError("--family only applies to the generic experiment")
        return family_autissier(), "T-2", "arch,3"
    if args.family is None:
        raise ValueError("the generic experiment needs --family, e.g. 'T^n-2'")
    compact = args.family.replace(" ", "")
    match = _POWER_SHIFT.match(compact)
    if not match:
        raise ValueError(
            f"unsupported family {args.family!r}; expected the form 'T^n-a'"
        )
    return family_power_shift(-int(match.group(1))), "T-1", "arch"


def _parse_places(text: str):
    places = []
    for token in text.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token in ("arch", "inf", "oo", "infinity"):
            places.append(ARCH)
        else:
            places.append(int(token))
    if not places:
        raise ValueError("at least one place is required")
    return tuple(places)


def _experiment_csv(report: ExperimentReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["n", "degree", "height"]
    for place in report.places:
        tag = "arch" if place == ARCH else f"p{place}"
        header += [f"empirical_{tag}", f"equilibrium_{tag}"]
    header += ["gap", "predicted_limit"]
    writer.writerow(header)
    for row in report.rows:
        cells = [row.n, row.degree, repr(row.height)]
        for emp, eq in zip(row.empirical, row.equilibrium):
            cells.append("" if emp is None else repr(float(emp)))
            cells.append(repr(float(eq)))
        cells.append("" if row.gap is None else repr(row.gap))
        cells.append(repr(report.predicted_limit))
        writer.writerow(cells)
    return buffer.getvalue().rstrip("\n")


def cmd_experiment(args) -> str:
    inputs = {
        "name": args.name,
        "family": args.family,
        "divisor": args.divisor,
        "places": args.places,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "truncate": args.truncate,
        "format": args.format,
    }
    family, default_divisor, default_places = _build_family(args)
    divisor = _parse_univariate_auto(args.divisor or default_divisor)
    places = _parse_places(args.places or default_places)
    ns = range(args.n_min, args.n_max + 1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = run_experiment(
            family, divisor, places, ns,
            truncation=args.truncate, threads=args.threads,
        )
    if args.format == "csv":
        return _experiment_csv(report)
    results = {
        "family": report.family,
        "divisor": report.divisor,
        "places": list(report.places),
        "predicted_limit": report.predicted_limit,
        "truncation": report.truncation,
        "rows": [
            {
                "n": row.n,
                "degree": row.degree,
                "height": row.height,
                "empirical": list(row.empirical),
                "equilibrium": list(row.equilibrium),
                "gap": row.gap,
                "arch_audit": row.arch_audit,
                "flags": list(row.flags),
            }
            for row in report.rows
        ],
    }
    envelope = {
        "command": "experiment",
        "inputs": inputs,
        "results": results,
        "warnings": [str(w.message) for w in caught],
        "version": __version__,
    }
    return json.dumps(_jsonable(envelope), sort_keys=True)


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mahlerheights",
        description="Mahler measures, heights and equidistribution experiments "
        "for integer polynomials.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mahler = sub.add_parser("mahler", help="log Mahler measure")
    mahler.add_argument("poly", help="polynomial expression, e.g. 'T^2-T-1'")
    mahler.add_argument("--grid", type=int, default=None,
                        help="quadrature nodes per axis (power of two)")
    mahler.set_defaults(handler=cmd_mahler)

    height = sub.add_parser("height", help="Weil height with local breakdown")
    height.add_argument("poly")
    height.set_defaults(handler=cmd_height)

    canonical = sub.add_parser(
        "canonical-height", help="canonical height for z^2 + c"
    )
    canonical.add_argument("poly", help="defining polynomial of the point")
    canonical.add_argument("-c", required=True,
                           help="parameter c as an exact rational, e.g. -1/2")
    canonical.set_defaults(handler=cmd_canonical_height)

    hull = sub.add_parser("newton-polygon", help="p-adic Newton polygon")
    hull.add_argument("poly")
    hull.add_argument("-p", type=int, required=True)
    hull.set_defaults(handler=cmd_newton_polygon)

    local = sub.add_parser(
        "local-integral",
        help="exact p-adic empirical integral against a divisor point",
    )
    local.add_argument("poly")
    local.add_argument("--at", required=True,
                       help="rational divisor point, e.g. 2 or 3/4")
    local.add_argument("-p", type=int, required=True)
    local.set_defaults(handler=cmd_local_integral)

    experiment = sub.add_parser(
        "experiment", help="equidistribution experiment over a point family"
    )
    experiment.add_argument("name", choices=("autissier", "equidist"))
    experiment.add_argument("--family", default=None,
                            help="generic family, e.g. 'T^n-2'")
    experiment.add_argument("--divisor", default=None,
                            help="divisor polynomial (default depends on family)")
    experiment.add_argument("--places", default=None,
                            help="comma-separated: arch, primes (e.g. 'arch,3')")
    experiment.add_argument("--n-min", type=int, default=1)
    experiment.add_argument("--n-max", type=int, required=True)
    experiment.add_argument("--truncate", type=float, default=None,
                            help="truncation level for near-divisor orbits")
    experiment.add_argument("--format", choices=("json", "csv"), default="json")
    experiment.add_argument("--threads", type=int, default=None,
                            help="row-level parallelism cap "
                            "(default: MAHLERHEIGHTS_THREADS or cpu count)")
    experiment.set_defaults(handler=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        output = args.handler(args)
    except (ParseError, ValueError, TypeError, ZeroDivisionError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except (RootFindingError, EscapeRateError, ArithmeticError, OverflowError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 3
    print(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
