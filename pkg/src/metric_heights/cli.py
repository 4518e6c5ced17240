"""Command line interface: ``metric-heights {mahler,tmetric,envelope}``.

Exit codes: 0 success, 2 input error, 3 numeric failure, 4 search budget
exceeded. Infinite ``t`` is written as ``null`` in JSON and ``inf`` in CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

from .algebraic import DEFAULT_TOL, ConvergenceError, IntPolynomial, mahler_measure
from .envelope import ZERO_TOL, lower_envelope
from .rational import parse_rational, weil_height
from .search import (
    CandidateSet,
    SearchBudgetExceeded,
    SpanError,
    divisor_candidate_set,
    rational_divisor_candidate_set,
    tmetric_profile,
)
from .validation import DEFAULT_T_COUNT, DEFAULT_T_HI, DEFAULT_T_LO, check_vectors, make_t_grid

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_BUDGET = 4


class InputError(Exception):
    pass


def _t_json(t: float):
    return None if math.isinf(t) else t


def _t_csv(t: float) -> str:
    return "inf" if math.isinf(t) else repr(t)


def _parse_t(text: str) -> float:
    text = text.strip()
    if text.lower() in ("inf", "infinity", "oo"):
        return math.inf
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError(f"t must be positive, got {text}")
    return val


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _grid(args) -> list[float]:
    try:
        grid = make_t_grid(args.t_lo, args.t_hi, args.t_count, args.t_log)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if getattr(args, "with_inf", False) and not math.isinf(grid[-1]):
        grid.append(math.inf)
    return grid


# -- mahler -------------------------------------------------------------------


def cmd_mahler(args) -> int:
    text = args.value.strip()
    if args.tol < 1e-13:
        raise InputError("tolerance must be >= 1e-13")
    if "," in text:
        try:
            poly = IntPolynomial.parse(text)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        res = mahler_measure(poly, args.tol)
        report = {
            "input": text,
            "kind": "polynomial",
            "degree": res.degree,
            "m": res.value,
            "h": res.weil_height,
            "error": res.error,
            "roots": [
                {"re": z.real, "im": z.imag, "error": e}
                for z, e in zip(res.roots.roots, res.roots.errors)
            ],
            "warnings": list(res.warnings),
        }
    else:
        try:
            q = parse_rational(text)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        h = weil_height(q)
        report = {"input": text, "kind": "rational", "degree": 1, "m": h, "h": h,
                  "error": 0.0, "roots": [], "warnings": []}

    if args.format == "csv":
        out = _csv_text(["input", "kind", "degree", "m", "h", "error"],
                        [[report[k] for k in ("input", "kind", "degree", "m", "h", "error")]])
    else:
        out = json.dumps(report, indent=2) + "\n"
    _emit(out, args.out)
    return EXIT_OK


# -- tmetric ------------------------------------------------------------------


def _read_candidates(source: str, alpha) -> CandidateSet:
    if source == "divisors":
        if alpha.denominator == 1:
            return divisor_candidate_set(alpha.numerator)
        return rational_divisor_candidate_set(alpha)
    if source.startswith("@"):
        try:
            with open(source[1:], encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read candidate file: {exc}") from None
        tokens = [tok for line in raw.splitlines() if not line.lstrip().startswith("#")
                  for tok in line.replace(",", " ").split()]
    else:
        tokens = source.replace(",", " ").split()
    if not tokens:
        raise InputError("empty candidate list")
    try:
        return CandidateSet(parse_rational(tok) for tok in tokens)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _profile_report(alpha, S, grid, budget):
    profile = tmetric_profile(alpha, S, grid, budget)
    lo = min(t for t in grid)
    env = lower_envelope(profile.witnesses, min(lo, DEFAULT_T_LO), math.inf)
    rows = [
        {
            "t": _t_json(r.t),
            "value": r.value,
            "witness_id": r.witness_id,
            "witness": str(r.result.witness),
            "label": "restricted",
        }
        for r in profile.rows
    ]
    return profile, {
        "alpha": str(alpha),
        "label": "restricted",
        "candidates": len(S),
        "rows": rows,
        "witnesses": [w.tolist() for w in profile.witnesses],
        "envelope": env.to_dict(),
    }


def cmd_tmetric(args) -> int:
    try:
        alpha = parse_rational(args.value)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    S = _read_candidates(args.candidates, alpha)
    grid = _grid(args)
    profile, report = _profile_report(alpha, S, grid, None)
    if args.format == "csv":
        out = _csv_text(
            ["t", "value", "witness_id", "witness", "label"],
            [[_t_csv(r.t), repr(r.value), r.witness_id, str(r.result.witness), "restricted"]
             for r in profile.rows],
        )
    else:
        out = json.dumps(report, indent=2) + "\n"
    _emit(out, args.out)
    return EXIT_OK


# -- envelope -----------------------------------------------------------------


def read_vectors(path: str):
    """Vectors from a text file (one comma-separated vector per line) or envelope JSON."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read vectors file: {exc}") from None
    if raw.lstrip().startswith("{"):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON: {exc}") from None
        vectors = data.get("vectors") or [p["vector"] for p in data.get("pieces", [])]
    else:
        vectors = []
        for line in raw.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vectors.append([float(tok) for tok in line.split(",") if tok.strip()])
            except ValueError:
                raise InputError(f"cannot parse vector line {line!r}") from None
    if not vectors:
        raise InputError("vectors file is empty")
    try:
        return check_vectors(vectors)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_envelope(args) -> int:
    if args.tol < 1e-13:
        raise InputError("tolerance must be >= 1e-13")
    vecs = read_vectors(args.vectors)
    hi = args.t_hi if args.t_hi is not None else math.inf
    if not 0 < args.t_lo < hi:
        raise InputError("need 0 < t-lo < t-hi")
    env = lower_envelope(vecs, args.t_lo, hi, args.tol)
    sample_hi = hi if math.isfinite(hi) else max(DEFAULT_T_HI, 2 * args.t_lo)
    samples = []
    if args.format == "csv" or args.samples:
        for t in make_t_grid(args.t_lo, sample_hi, args.t_count, args.t_log):
            samples.append((t, env.value(t), env.piece_index(t)))
    if args.format == "csv":
        out = _csv_text(["t", "value", "piece_index"], [[repr(t), repr(v), k] for t, v, k in samples])
    else:
        report = env.to_dict()
        report["filter_rounds"] = env.filter_rounds
        report["tangencies"] = list(env.tangencies)
        if args.samples:
            report["samples"] = [[t, v, k] for t, v, k in samples]
        out = json.dumps(report, indent=2) + "\n"
    _emit(out, args.out)
    return EXIT_OK


# -- wiring -------------------------------------------------------------------


def _add_grid(p, hi_default=DEFAULT_T_HI):
    p.add_argument("--t-lo", type=_parse_t, default=DEFAULT_T_LO)
    p.add_argument("--t-hi", type=_parse_t, default=hi_default,
                   help="upper end of the t range; 'inf' is allowed")
    p.add_argument("--t-count", type=int, default=DEFAULT_T_COUNT)
    p.add_argument("--t-log", action=argparse.BooleanOptionalAction, default=True,
                   help="log-spaced grid (default) or linear with --no-t-log")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metric-heights",
        description="Mahler measures, restricted t-metric heights and norm envelopes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH")

    p = sub.add_parser("mahler", parents=[common],
                       help="Mahler measure of a polynomial '-1,-1,1' or a rational '3/2'")
    p.add_argument("value")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_mahler)

    p = sub.add_parser("tmetric", parents=[common],
                       help="restricted t-metric values of a rational over a t grid")
    p.add_argument("value")
    p.add_argument("--candidates", default="divisors",
                   help="'divisors', '@FILE' or a comma-separated list of rationals")
    p.add_argument("--with-inf", action="store_true", help="append t = infinity to the grid")
    _add_grid(p)
    p.set_defaults(func=cmd_tmetric)

    p = sub.add_parser("envelope", parents=[common],
                       help="lower envelope of norm curves from a vectors file")
    p.add_argument("vectors")
    p.add_argument("--samples", action="store_true", help="include (t, value, piece) samples in JSON")
    p.add_argument("--tol", type=float, default=ZERO_TOL)
    _add_grid(p, hi_default=None)
    p.set_defaults(func=cmd_envelope)
    return parser


_NEGATIVE_VALUE = re.compile(r"^-\d[\d,/ -]*$")


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # a leading space stops argparse reading "-1,-1,1" as an option; values are stripped later
    argv = [" " + a if _NEGATIVE_VALUE.match(a) else a for a in argv]
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SearchBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.incumbent is not None:
            inc = exc.incumbent
            print(json.dumps({"incumbent": {"t": _t_json(inc.t), "value": inc.value,
                                            "witness": str(inc.witness)}}), file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
