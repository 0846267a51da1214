"""Command-line entry point: ``primspf <command> ...``.

Matrix sets are read in a plain text format: a header line ``n m``
followed by ``m`` blocks of ``n`` lines of ``n`` characters over
``{0, 1}``, blocks separated by blank lines.  Lines starting with ``#``
are ignored.  Wherever a file is expected, ``-`` reads stdin and
``example:ID`` loads a built-in example.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 cap overflow, 4 input not
primitive where a primitive set is required.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .approx import ApproxConfig, DegenerateFitError, estimate, evaluate_against_bounds
from .automata import (
    aut_of,
    eppstein,
    exponent_bfs,
    exponent_bounds,
    is_irreducible,
    is_synchronizing,
    reset_threshold_exact,
    sg_diameter,
)
from .boolmat import BinaryMatrix, MatrixSet
from .errors import CapExceededError, NotPrimitiveError, NotSynchronizingError
from .families import EXAMPLE_IDS, FamilySpec, generate, builtin_example
from .spf import check_stagnation_theorems, spf_k, spf_kbar, spf_keq

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CAP, EXIT_NOT_PRIMITIVE = 0, 1, 2, 3, 4


class ParseError(ValueError):
    """Malformed matrix-set text."""


def parse_matrix_set(text: str) -> MatrixSet:
    lines = [ln.strip() for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    while lines and not lines[0]:
        lines.pop(0)
    if not lines:
        raise ParseError("empty input")
    head = lines[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise ParseError(f"header must be 'n m', got {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    if n < 1 or m < 1:
        raise ParseError("n and m must be positive")
    blocks: list[list[str]] = [[]]
    for ln in lines[1:]:
        if not ln:
            if blocks[-1]:
                blocks.append([])
            continue
        blocks[-1].append(ln)
    if not blocks[-1]:
        blocks.pop()
    if len(blocks) != m:
        raise ParseError(f"expected {m} matrices, found {len(blocks)}")
    mats = []
    for b, block in enumerate(blocks):
        if len(block) != n:
            raise ParseError(f"matrix {b + 1} has {len(block)} rows, expected {n}")
        for ln in block:
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise ParseError(f"matrix {b + 1}: bad row {ln!r}")
        mats.append(BinaryMatrix.from_strings(block))
    return MatrixSet.of(mats)


def serialize_matrix_set(M: MatrixSet) -> str:
    blocks = ["\n".join(A.to_strings()) for A in M]
    return f"{M.n} {M.m}\n" + "\n\n".join(blocks) + "\n"


def load(source: str) -> MatrixSet:
    if source.startswith("example:"):
        try:
            return builtin_example(source.split(":", 1)[1])
        except KeyError as exc:
            raise ParseError(exc.args[0]) from None
    if source == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {source}: {exc.strerror}") from None
    return parse_matrix_set(text)


def _frac(x: Optional[Fraction]) -> str:
    return "" if x is None else str(x)


def _dec(x: Optional[Fraction]) -> str:
    return "" if x is None else f"{float(x):.10f}"


def _emit(report: dict, as_json: bool, out) -> None:
    if as_json:
        json.dump(report, out, indent=2, default=str)
        out.write("\n")
    else:
        for k, v in report.items():
            out.write(f"{k}: {v}\n")


def cmd_check(args, out) -> int:
    M = load(args.input)
    report = {"n": M.n, "m": M.m, "nz": M.is_nz(), "irreducible": is_irreducible(M)}
    wit = exponent_bfs(M, args.cap) if report["nz"] else None
    report["primitive"] = wit is not None
    report["exponent"] = wit.exp if wit else None
    report["witness"] = " ".join(str(a + 1) for a in wit.word) if wit else None
    _emit(report, args.json, out)
    return EXIT_OK


def _series_rows(M: MatrixSet, modes: Sequence[str], t_max: Optional[int], prune: bool, cap):
    fns = {"K": spf_k, "Kbar": spf_kbar, "Keq": spf_keq}
    series = {}
    for mode in modes:
        series[mode] = fns[mode](M, t_max, prune=prune, cap=cap)
    horizon = max(len(s) for s in series.values())
    if t_max is None:
        # align modes on the longest computed horizon
        series = {mode: (s if len(s) == horizon else fns[mode](M, horizon - 1, prune=prune, cap=cap))
                  for mode, s in series.items()}
    return series, horizon


def cmd_spf(args, out) -> int:
    M = load(args.input)
    if not M.is_nz():
        raise ParseError("the SPF needs a set of NZ matrices")
    modes = {"k": ["K"], "kbar": ["Kbar"], "keq": ["Keq"], "all": ["K", "Kbar", "Keq"]}[args.mode]
    series, horizon = _series_rows(M, modes, args.t_max, not args.no_prune, args.layer_cap)
    meta = {
        "version": __version__,
        "set": args.input,
        "n": M.n,
        "m": M.m,
        "pruning": "off" if args.no_prune else "on",
        "truncated": any(s.truncated for s in series.values()),
    }
    reasons = sorted({s.reason for s in series.values() if s.truncated})
    if reasons:
        meta["reason"] = "; ".join(reasons)
    rows = []
    for t in range(horizon):
        row = {"t": t}
        for mode, s in series.items():
            v = s.values[t] if t < len(s) else None
            nxt = s.values[t + 1] if t + 1 < len(s) else None
            row[mode] = _frac(v)
            row[f"{mode}_dec"] = _dec(v)
            row[f"{mode}_stagnant"] = "" if nxt is None or v is None else int(v == nxt)
        rows.append(row)
    if args.json:
        json.dump({"meta": meta, "rows": rows}, out, indent=2, default=str)
        out.write("\n")
    else:
        for k, v in meta.items():
            out.write(f"# {k}={v}\n")
        w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


def cmd_approx(args, out) -> int:
    M = load(args.input)
    bounds = exponent_bounds(M)
    K = spf_k(M, cap=args.layer_cap)
    config = ApproxConfig(args.method, args.tprime)
    if K.first_one() is None and not K.truncated:
        raise NotPrimitiveError("K never reaches 1")
    try:
        res = estimate(K, config)
    except DegenerateFitError as exc:
        _emit({"method": args.method, "error": str(exc)}, args.json, out)
        return EXIT_OK
    verdict = evaluate_against_bounds(M, res, bounds=bounds)
    report = {
        "method": res.method,
        "l0": res.l0,
        "tprime": res.tprime,
        "schedule": f"{args.tprime} (natural log, ceiling)" if not str(args.tprime).isdigit() else args.tprime,
        "slope": str(res.slope),
        "intercept": str(res.intercept),
        "estimate": str(res.estimate),
        "estimate_dec": _dec(res.estimate),
        "lower_diameter": verdict.lower,
        "upper_eppstein": verdict.upper,
        "above_lower": verdict.above_lower,
        "below_upper": verdict.below_upper,
        "exponent": K.first_one(),
    }
    _emit(report, args.json, out)
    return EXIT_OK


def cmd_automata(args, out) -> int:
    M = load(args.input)
    if args.transpose:
        M = M.transpose()
    dfa = aut_of(M, args.aut_cap)
    report = {"states": dfa.n, "letters": len(dfa.letters)}
    if args.op == "sync":
        report["synchronizing"] = is_synchronizing(dfa)
    elif args.op == "rt":
        res = reset_threshold_exact(dfa, args.state_cap)
        report["synchronizing"] = res.synchronizing
        report["rt"] = res.rt
    elif args.op == "eppstein":
        res = eppstein(dfa)
        report["eppstein"] = res.rt
        report["word"] = " ".join(map(str, res.witness_word))
    else:
        report["diameter"] = sg_diameter(dfa)
    if args.json:
        _emit(report, True, out)
    else:
        key = {"sync": "synchronizing", "eppstein": "eppstein", "diameter": "diameter"}.get(args.op, "rt")
        out.write(f"{report[key]}\n")
    return EXIT_OK


_FAMILIES = {"cerny-nz": "cerny_nz", "mn": "mn_family", "perturbed": "perturbed_permutation",
             "uniform": "uniform_nz", "example": "example"}


def cmd_gen(args, out) -> int:
    spec = FamilySpec(_FAMILIES[args.family], n=args.n, m=args.m, seed=args.seed, example_id=args.id)
    try:
        M = generate(spec)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc.args[0])) from None
    out.write(f"# family={args.family} n={args.n} m={args.m} seed={args.seed}\n")
    out.write(serialize_matrix_set(M))
    return EXIT_OK


def cmd_corpus(args, out) -> int:
    if args.family not in ("perturbed", "uniform"):
        raise UsageError("corpus runs over the perturbed or uniform families")
    fields = ["seed", "n", "m", "primitive", "exp", "rt", "rt_T", "epp_upper", "diameter",
              "r1", "r2", "r1_within", "r2_within", "kbar_bounds_ok"]
    rows = []
    for seed in range(args.seed, args.seed + args.count):
        spec = FamilySpec(_FAMILIES[args.family], n=args.n, m=args.m, seed=seed)
        M = generate(spec)
        row = dict.fromkeys(fields, "")
        row.update(seed=seed, n=M.n, m=M.m)
        K = spf_k(M, cap=args.layer_cap)
        exp = K.first_one()
        row["primitive"] = int(exp is not None)
        if exp is not None:
            b = exponent_bounds(M)
            row.update(exp=exp, rt=b.rt if b.rt is not None else "", rt_T=b.rt_transpose if b.rt_transpose is not None else "",
                       epp_upper=b.upper, diameter=b.diameter)
            for method in ("r1", "r2"):
                try:
                    res = estimate(K, ApproxConfig(method, args.tprime))
                    v = evaluate_against_bounds(M, res, bounds=b)
                    row[method] = _dec(res.estimate)
                    row[f"{method}_within"] = int(v.within)
                except (DegenerateFitError, ValueError):
                    pass
            checks = check_stagnation_theorems(M, spf_kbar(M, cap=args.layer_cap), primitive=True)
            row["kbar_bounds_ok"] = int(all(c.holds for c in checks))
        rows.append(row)
    prim = [r for r in rows if r["primitive"] == 1]
    out.write(f"# version={__version__} family={args.family} n={args.n} m={args.m} "
              f"count={args.count} seed={args.seed} tprime={args.tprime}\n")
    if prim:
        for method in ("r1", "r2"):
            ok = [r for r in prim if r[f"{method}_within"] == 1]
            out.write(f"# {method}_within_bounds={len(ok)}/{len(prim)}\n")
        out.write(f"# primitive={len(prim)}/{len(rows)}\n")
    w = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return EXIT_OK


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="primspf", description="Primitivity, exponents and synchronizing probability functions of binary matrix sets.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(sp):
        sp.add_argument("input", help="matrix-set file, '-' for stdin, or example:ID")
        sp.add_argument("--json", action="store_true", help="emit JSON instead of text/CSV")
        return sp

    sp = with_input(sub.add_parser("check", help="NZ, irreducibility, primitivity and exponent"))
    sp.add_argument("--cap", type=int, default=None, help="BFS node cap (PRIMSPF_LAYER_CAP)")
    sp.set_defaults(func=cmd_check)

    sp = with_input(sub.add_parser("spf", help="SPF series as CSV"))
    sp.add_argument("--t-max", type=int, default=None)
    sp.add_argument("--mode", choices=["k", "kbar", "keq", "all"], default="all")
    sp.add_argument("--no-prune", action="store_true")
    sp.add_argument("--layer-cap", type=int, default=None)
    sp.set_defaults(func=cmd_spf)

    sp = with_input(sub.add_parser("approx", help="r1/r2 exponent estimate with bounds"))
    sp.add_argument("--method", choices=["r1", "r2"], default="r1")
    sp.add_argument("--tprime", default="2log", help="integer, or log / 1.5log / 2log")
    sp.add_argument("--layer-cap", type=int, default=None)
    sp.set_defaults(func=cmd_approx)

    sp = with_input(sub.add_parser("automata", help="operations on Aut(M)"))
    sp.add_argument("--op", choices=["rt", "eppstein", "diameter", "sync"], default="rt")
    sp.add_argument("--transpose", action="store_true", help="use Aut(M^T)")
    sp.add_argument("--state-cap", type=int, default=None)
    sp.add_argument("--aut-cap", type=int, default=None)
    sp.set_defaults(func=cmd_automata)

    sp = sub.add_parser("gen", help="generate a matrix set")
    sp.add_argument("--family", choices=sorted(_FAMILIES), required=True)
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--id", default=None, help=f"example id: {', '.join(EXAMPLE_IDS)}")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("corpus", help="run the estimators over a seeded random corpus")
    sp.add_argument("--family", choices=["perturbed", "uniform"], default="perturbed")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tprime", default="2log")
    sp.add_argument("--layer-cap", type=int, default=None)
    sp.set_defaults(func=cmd_corpus)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"primspf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"primspf: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceededError as exc:
        print(f"primspf: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (NotPrimitiveError, NotSynchronizingError) as exc:
        print(f"primspf: {exc}", file=sys.stderr)
        return EXIT_NOT_PRIMITIVE


def run(argv: Sequence[str]) -> tuple[int, str]:
    """Run the CLI in-process and capture stdout (used by the tests)."""
    buf = io.StringIO()
    try:
        code = main(list(argv), out=buf)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
