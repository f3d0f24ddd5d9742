"""Command line entry point.

Output layout: one metadata line ``# {json}`` followed by the record body.
Tables are CSV (or JSON lines with ``--format json``); violation witnesses
are JSON objects, written as ``# violation {...}`` lines in CSV mode.

Exit codes: 0 pass, 1 property violation, 2 usage error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import __version__
from .bias import bias_spectrum, lower_bias_family_mean, moment_lhs, moment_rhs
from .errors import DomainError, ResourceLimitError
from .extremal import check_all_subsets, check_lex_equality, check_sampled_subsets
from .gd import GdTable, gd_digit_expansion, mixed_radix_value
from .gf import FieldSpec
from .monomials import check_count_bounds, check_ratio_props, count_monomials
from .rm_matrix import build_matrix, lex_minimal_set, rank_mod_p
from .subadd import check_subadditivity, check_transforms, enumerate_v, sample_v

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
REL_TOL = 1e-9


def int_list(text: str) -> list[int]:
    """Parse ``"3"``, ``"1,4,7"`` or an inclusive range ``"0..8"`` (mixable)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty integer list")
    return out


def float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None


def positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def non_negative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _plain(v: Any) -> Any:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


class Output:
    """Collects tables, scalars and witnesses; rendered once the run is finished."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.parts: list[str] = []
        self.violations: list[dict] = []

    def table(self, rows: list[dict], name: str | None = None) -> None:
        if name and self.parts:
            self.parts.append(f"# table: {name}\n")
        if self.fmt == "json":
            self.parts.extend(json.dumps(_plain(r), sort_keys=False) + "\n" for r in rows)
            return
        if not rows:
            return
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(_plain(r) for r in rows)
        self.parts.append(buf.getvalue())

    def lines(self, lines: list[str]) -> None:
        self.parts.extend(line + "\n" for line in lines)

    def violation(self, witness: dict) -> None:
        self.violations.append(witness)

    def body(self) -> str:
        out = "".join(self.parts)
        for w in self.violations:
            text = json.dumps(_plain(w))
            out += f"# violation {text}\n" if self.fmt == "csv" else json.dumps({"violation": _plain(w)}) + "\n"
        return out


# --- commands -----------------------------------------------------------------


def cmd_count_monomials(args, out: Output) -> None:
    rows = []
    for d in args.d:
        for n in args.n:
            row = {"p": args.p, "d": d, "n": n, "count": count_monomials(args.p, d, n)}
            if 0 <= d <= n:
                rep = check_count_bounds(args.p, d, n)
                row.update(lower=rep.lower, upper=rep.upper, bounds_ok=rep.passed)
                if not rep.passed:
                    out.violation({"kind": "count_bounds", **row})
            else:
                row.update(lower="", upper="", bounds_ok="")
            rows.append(row)
    out.table(rows)


def cmd_gd(args, out: Output) -> None:
    value = GdTable(args.q).gd(args.d, args.m)
    if out.fmt == "csv":
        out.lines([str(value)])
    else:
        out.table([{"q": args.q, "d": args.d, "m": args.m, "value": value}])


def cmd_gd_scan(args, out: Output) -> None:
    table = GdTable(args.q)
    rows = []
    for d in args.d:
        for m in args.m:
            value = table.gd(d, m)
            rows.append({"q": args.q, "d": d, "m": m, "value": value})
            if args.verify and m >= 1:
                alt = (gd_digit_expansion(table, d, m), mixed_radix_value(table, d, m))
                if alt != (value, value):
                    out.violation({"kind": "gd_routes", "q": args.q, "d": d, "m": m,
                                   "value": value, "digit_expansion": alt[0], "mixed_radix": alt[1]})
    out.table(rows)


def cmd_rank(args, out: Output) -> None:
    spec = FieldSpec(args.p)
    if args.rows is not None:
        rows = args.rows
    else:
        rows = lex_minimal_set(args.lex if args.lex is not None else spec.p**args.n, spec, args.n)
    mat = build_matrix(spec, args.n, args.d, rows, max_cells=args.max_cells)
    rank = rank_mod_p(mat)
    m = len(mat.rows)
    record = {"p": args.p, "n": args.n, "d": args.d, "rows": m,
              "columns": len(mat.columns), "rank": rank}
    is_lex = mat.rows == tuple(range(m))
    if is_lex:
        g = GdTable(args.p).gd(args.d, m)
        record["g_d"] = g
        if rank != g:
            out.violation({"kind": "lex_equality", **record})
    out.table([record])
    if args.dump:
        with open(args.dump, "w", newline="") as fh:
            mat.to_csv(fh)


def cmd_extremal(args, out: Output) -> None:
    rows = []
    for d in args.d:
        if args.exhaustive:
            rep = check_all_subsets(args.p, args.n, d, max_cells=args.max_cells)
        elif args.samples is not None:
            rep = check_sampled_subsets(args.p, args.n, d, args.samples, args.seed,
                                        threads=args.threads, max_cells=args.max_cells)
        else:
            rep = check_lex_equality(args.p, args.n, d, max_cells=args.max_cells)
        rows.extend({"d": d, **r} for r in rep.records())
        for v in rep.violations:
            out.violation(v)
    out.table(rows)


def cmd_subadd(args, out: Output) -> None:
    if args.d_min > args.d_max:
        raise DomainError("--d-min must not exceed --d-max")
    degrees = range(args.d_min, args.d_max + 1)
    table = GdTable(args.q)
    direct = check_subadditivity(args.q, args.norm_cap, degrees, table, pair_cap=args.pair_cap)
    rows = [{"check": "subadditivity", "q": args.q, "norm_cap": args.norm_cap,
             "vectors": direct.vectors, "pairs": direct.pairs,
             "steps": "", "max_path": "", "violations": len(direct.violations)}]
    for v in direct.violations:
        out.violation(v)
    if args.transforms or args.trace or args.samples is not None:
        if args.samples is not None:
            vectors = sample_v(args.q, args.norm_cap, args.samples, args.seed)
        else:
            vectors = enumerate_v(args.q, args.norm_cap)
        traces: list[str] = []
        sink = (lambda rec: traces.append(json.dumps(rec))) if args.trace else None
        rep = check_transforms(args.q, vectors, degrees, table, trace=sink)
        rows.append({"check": "transforms", "q": args.q, "norm_cap": args.norm_cap,
                     "vectors": rep.vectors, "pairs": "",
                     "steps": ";".join(f"{k}={v}" for k, v in rep.steps.items()),
                     "max_path": rep.max_path_length, "violations": len(rep.violations)})
        for v in rep.violations:
            out.violation(v)
        if args.trace:
            out.lines(traces)
            out.parts.append("# table: summary\n")
    out.table(rows)


def cmd_bias_spectrum(args, out: Output) -> None:
    samples = None if args.exhaustive else args.samples
    if samples is None and not args.exhaustive:
        raise DomainError("choose --exhaustive or --samples K")
    spectrum = bias_spectrum(args.p, args.n, args.d, args.j, samples=samples, seed=args.seed,
                             threads=args.threads, max_cells=args.max_cells)
    rows = [{"magnitude_key": k, "magnitude": round(float(k) ** 0.5, 12), "multiplicity": c}
            for k, c in spectrum.sorted_items()]
    out.table(rows, "spectrum")
    if args.tau:
        out.table([{"tau": t, "tail_fraction": spectrum.tail(t), "tail_float": float(spectrum.tail(t))}
                   for t in args.tau], "tail")


def _close(a: Fraction | float, b: Fraction | float) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(float(a) - float(b)) <= REL_TOL * max(abs(float(a)), abs(float(b)), 1e-300)


def cmd_moment(args, out: Output) -> None:
    lhs = moment_lhs(args.p, args.n, args.d, args.j, args.t,
                     threads=args.threads, max_cells=args.max_cells)
    rhs = moment_rhs(args.p, args.n, args.d, args.t, max_cells=args.max_cells)
    equal = _close(lhs, rhs)
    record = {"p": args.p, "n": args.n, "d": args.d, "j": args.j, "t": args.t,
              "lhs": lhs, "rhs": rhs, "exact": isinstance(lhs, Fraction), "equal": equal}
    out.table([record])
    if not equal:
        out.violation({"kind": "moment_identity", **record})


def cmd_lower_bias(args, out: Output) -> None:
    rep = lower_bias_family_mean(args.p, args.n, args.d, args.j,
                                 threads=args.threads, max_cells=args.max_cells)
    record = {"p": args.p, "n": args.n, "d": args.d, "j": args.j, "ell": rep.ell,
              "family_size": rep.family_size, "mean_bias_re": rep.mean.real,
              "mean_bias_im": rep.mean.imag,
              "mean_exact": rep.mean_exact if rep.mean_exact is not None else "",
              "predicted": rep.predicted, "error": rep.error}
    out.table([record])
    if rep.error > REL_TOL:
        out.violation({"kind": "lower_bias_mean", **record})


def cmd_ratio(args, out: Output) -> None:
    rows = []
    for d in args.d:
        for n in args.n:
            if not 1 <= d <= n:
                continue
            rep = check_ratio_props(args.p, d, n)
            row = {"p": args.p, "d": d, "n": n, "ratio": rep.ratio, "ratio_float": float(rep.ratio),
                   "in_window": rep.passed, "n_shrunk": rep.n_shrunk,
                   "shrink_ratio": rep.shrink_ratio, "shrink_float": float(rep.shrink_ratio)}
            rows.append(row)
            if not rep.passed:
                out.violation({"kind": "ratio_window", **row})
    if not rows:
        raise DomainError("no (d, n) pair with 1 <= d <= n")
    out.table(rows)


# --- parser -------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = parser.add_argument_group("global options")
    g.add_argument("--seed", type=non_negative_int, default=dflt(0), help="master RNG seed")
    g.add_argument("--threads", type=positive_int, default=dflt(1), help="worker threads")
    g.add_argument("--format", choices=("csv", "json"), default=dflt(None), help="record format")
    g.add_argument("--max-cells", type=positive_int, default=dflt(None),
                   help="cap on matrix cells or enumerated (polynomial, point) pairs")
    g.add_argument("--out", default=dflt(None), help="write output to this file")



def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmbias", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, fn: Callable, help_: str, default_fmt: str = "csv") -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_, description=help_)
        _global_flags(p, suppress=True)
        p.set_defaults(func=fn, default_format=default_fmt)
        return p

    p = add("count-monomials", cmd_count_monomials, "count monomials and check the binomial bounds")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--d", type=int_list, required=True)
    p.add_argument("--n", type=int_list, required=True)

    p = add("gd", cmd_gd, "evaluate g_{d,q}(m)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=non_negative_int, required=True)

    p = add("gd-scan", cmd_gd_scan, "tabulate g_{d,q} over degree and size lists")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int_list, required=True)
    p.add_argument("--m", type=int_list, required=True)
    p.add_argument("--verify", action="store_true", help="cross-check against the digit expansion")

    p = add("rank", cmd_rank, "rank of a truncated generator matrix")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=non_negative_int, required=True)
    p.add_argument("--d", type=non_negative_int, required=True)
    rows = p.add_mutually_exclusive_group()
    rows.add_argument("--lex", type=positive_int, help="use the m lex-smallest points")
    rows.add_argument("--rows", type=int_list, help="explicit point codes")
    p.add_argument("--dump", help="write the matrix as CSV to this path")

    p = add("extremal-check", cmd_extremal, "check rank(M_S) >= g_d(|S|)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=non_negative_int, required=True)
    p.add_argument("--d", type=int_list, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=non_negative_int)

    p = add("subadd-check", cmd_subadd, "check sub-additivity of g over bounded-norm vectors")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--norm-cap", type=non_negative_int, required=True)
    p.add_argument("--d-min", type=int, default=-1)
    p.add_argument("--d-max", type=int, default=12)
    p.add_argument("--pair-cap", type=non_negative_int, default=500)
    p.add_argument("--transforms", action="store_true", help="also follow every vector to its fixed point")
    p.add_argument("--samples", type=positive_int, help="check transforms on this many sampled vectors")
    p.add_argument("--trace", action="store_true", help="emit per-step JSON traces (implies --transforms)")

    p = add("bias-spectrum", cmd_bias_spectrum, "histogram of |bias_j|^2 over polynomials")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=non_negative_int, required=True)
    p.add_argument("--d", type=non_negative_int, required=True)
    p.add_argument("--j", type=int, default=1)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=positive_int)
    p.add_argument("--tau", type=float_list, default=[])

    p = add("moment-check", cmd_moment, "compare both sides of the moment identity", "json")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=non_negative_int, required=True)
    p.add_argument("--d", type=non_negative_int, required=True)
    p.add_argument("--t", type=non_negative_int, required=True)
    p.add_argument("--j", type=int, default=1)

    p = add("lower-bias-check", cmd_lower_bias, "mean bias of the split-variable family", "json")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=positive_int, required=True)
    p.add_argument("--d", type=positive_int, required=True)
    p.add_argument("--j", type=int, default=1)

    p = add("ratio-report", cmd_ratio, "monomial count ratios across degrees and variable counts")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--d", type=int_list, required=True)
    p.add_argument("--n", type=int_list, required=True)
    return parser


def _metadata(args: argparse.Namespace) -> str:
    config = {k: v for k, v in vars(args).items() if k not in ("func", "default_format")}
    meta = {"tool": "rmbias", "version": __version__, "command": args.command,
            "config": config, "seed": args.seed,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return "# " + json.dumps(meta) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    args.format = args.format or args.default_format
    out = Output(args.format)
    code = EXIT_OK
    try:
        args.func(args, out)
    except DomainError as exc:
        print(f"rmbias: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"rmbias: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    if out.violations:
        code = EXIT_VIOLATION
        print(f"rmbias: {len(out.violations)} violation(s)", file=sys.stderr)
    text = _metadata(args) + out.body()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def record_body(text: str) -> str:
    """Output with the metadata line removed, for determinism comparisons."""
    return text.split("\n", 1)[1] if text.startswith("# ") else text


if __name__ == "__main__":
    sys.exit(main())
