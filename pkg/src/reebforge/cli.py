"""Command-line front end.

Exit codes: 0 pass, 1 a check failed, 2 bad input, 3 retries exhausted.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .complex import builtin, is_orientable
from .construct import SCHEMES, build_pl_reeb
from .errors import (
    DimensionNot3,
    ExtremaNotGraphs,
    ChiMismatch,
    ReebForgeError,
    RetriesExhausted,
)
from .homology import Q, Z2, coefficient, duality_betti_check, homology
from .io import atomic_write, format_csv, read_plf, read_scx, read_semialg, read_subcomplex, write_plf, write_scx
from .report import build_report, emit
from .verify import heegaard_bound, verify_reeb

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3
BUILTIN_PREFIX = "builtin:"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _complex(src: str):
    if src.startswith(BUILTIN_PREFIX):
        return builtin(src[len(BUILTIN_PREFIX):])
    return read_scx(src)


def _sub(src: str, parent):
    from .complex import Subcomplex

    if src.startswith(BUILTIN_PREFIX):
        return Subcomplex(parent, builtin(src[len(BUILTIN_PREFIX):]))
    return read_subcomplex(src, parent)


def _finish(args, command, arguments, inputs, result, passed) -> int:
    rep = build_report(command, arguments, inputs, result, passed)
    emit(rep, args.report, sys.stdout)
    return EXIT_PASS if passed else EXIT_FAIL


# subcommands --------------------------------------------------------------------------


def cmd_homology(args) -> int:
    c = _complex(args.complex)
    prof = homology(c, coefficient(args.coeff), reduced=args.reduced)
    result = prof.as_dict()
    result["f_vector"] = list(c.f_vector())
    return _finish(args, "homology", {"coeff": prof.coefficients, "reduced": args.reduced},
                   {"complex": args.complex}, result, True)


def _duality_block(m, x0, x1):
    out = {Z2: duality_betti_check(m, x0, x1, Z2).as_dict()}
    if is_orientable(m):
        out[Q] = duality_betti_check(m, x0, x1, Q).as_dict()
    return out


def cmd_reeb_build(args) -> int:
    m = _complex(args.complex)
    x = _sub(args.subcomplex, m)
    arguments = {"max_retries": args.max_retries, "scheme": args.scheme}
    inputs = {"complex": args.complex, "subcomplex": args.subcomplex}
    try:
        build = build_pl_reeb(m, x, max_retries=args.max_retries, scheme=args.scheme)
    except RetriesExhausted as exc:
        rec = exc.candidate.record
        result = {"error": "RetriesExhausted", "history": rec.history, "verify": exc.report.as_dict()}
        emit(build_report("reeb-build", arguments, inputs, result, False), args.report, sys.stdout)
        print(f"reebforge: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    rec = build.record
    mm = rec.subdivision.subdivided
    rep = rec.report
    x0c = build.f.preimage(0)
    x1c = build.f.preimage(1)
    result = {
        "rounds": rec.rounds,
        "attempts": rec.attempts,
        "history": rec.history,
        "subdivided_f_vector": list(mm.f_vector()),
        "verify": rep.as_dict(),
        "duality": _duality_block(mm, x0c, x1c),
    }
    if mm.dimension == 3:
        try:
            result["heegaard"] = heegaard_bound(mm, rep).as_dict()
        except (DimensionNot3, ExtremaNotGraphs, ChiMismatch) as exc:
            result["heegaard"] = {"skipped": str(exc)}
    if args.out_prefix:
        prefix = Path(args.out_prefix)
        scx = prefix.with_name(prefix.name + ".scx")
        write_scx(scx, mm, header="second derived subdivision" if rec.rounds == 2 else f"{rec.rounds}-fold subdivision")
        write_scx(prefix.with_name(prefix.name + ".x0.scx"), x0c)
        write_plf(prefix.with_name(prefix.name + ".plf"), build.f, domain_name=scx.name)
        result["artifacts"] = [scx.name, prefix.name + ".x0.scx", prefix.name + ".plf"]
    passed = rep.is_reeb and all(d["pass"] for d in result["duality"].values())
    return _finish(args, "reeb-build", arguments, inputs, result, passed)


def cmd_verify(args) -> int:
    m = _complex(args.complex)
    f = read_plf(args.plf, m)
    exp = _sub(args.expected_x0, m) if args.expected_x0 else None
    rep = verify_reeb(m, f, expected_x0=exp)
    result = rep.as_dict(per_vertex=args.per_vertex)
    if rep.is_reeb:
        result["duality"] = _duality_block(m, f.preimage(0), f.preimage(1))
    inputs = {"complex": args.complex, "plf": args.plf, "expected_x0": args.expected_x0}
    return _finish(args, "verify", {"per_vertex": args.per_vertex}, inputs, result, rep.is_reeb)


def cmd_duality(args) -> int:
    m = _complex(args.complex)
    x0 = _sub(args.x0, m).complex
    x1 = _sub(args.x1, m).complex
    rep = duality_betti_check(m, x0, x1, coefficient(args.coeff))
    inputs = {"complex": args.complex, "x0": args.x0, "x1": args.x1}
    return _finish(args, "duality", {"coeff": rep.coefficients}, inputs, rep.as_dict(), rep.passed)


def cmd_flatfn(args) -> int:
    from .flatfn import eval_gamma, make_flat, parse_c_spec, sequence_conditions, table, verify_flat_bounds

    c = parse_c_spec(args.ck, args.K)
    ff = make_flat(c, args.K)
    conds = sequence_conditions(ff)
    checks = [verify_flat_bounds(ff, k, args.samples).as_dict() for k in (args.check or [])]
    result = {
        "K": ff.K,
        "c": [str(x) for x in ff.c],
        "a": [str(x) for x in ff.a],
        "tail": str(ff.tail),
        "A": str(ff.A),
        "sequence_conditions": conds,
        "gamma_0": eval_gamma(ff, 0.0),
        "gamma_1": eval_gamma(ff, 1.0),
        "checks": checks,
    }
    if args.csv:
        order = args.order
        header = ["t"] + [f"gamma_{j}" for j in range(order + 1)]
        atomic_write(args.csv, format_csv(header, table(ff, order, args.table_samples)))
        result["csv"] = Path(args.csv).name
    passed = all(conds.values()) and result["gamma_1"] > 0 and all(ch["pass"] for ch in checks)
    arguments = {"ck": args.ck, "K": args.K, "check": list(args.check or []), "samples": args.samples}
    return _finish(args, "flatfn", arguments, {}, result, passed)


def cmd_semialg(args) -> int:
    from .semialg import sample_table, verify_reeb_numeric

    spec = read_semialg(args.spec)
    rep = verify_reeb_numeric(spec, args.delta, args.grid, args.threshold)
    result = rep.as_dict()
    if args.csv:
        tab = sample_table(spec, args.grid)
        header = [f"x{i + 1}" for i in range(spec.n)] + ["f", "proj_grad_norm"]
        atomic_write(args.csv, format_csv(header, tab.rows()))
        result["csv"] = Path(args.csv).name
    arguments = {"delta": args.delta, "grid": args.grid or spec.resolution, "threshold": args.threshold}
    return _finish(args, "semialg", arguments, {"spec": args.spec}, result, rep.passed)


def cmd_builtin(args) -> int:
    c = builtin(args.name)
    if args.out:
        write_scx(args.out, c, header=f"builtin {args.name}")
    else:
        sys.stdout.write(f"# builtin {args.name}\n" + "\n".join(" ".join(map(str, s)) for s in c.maximal_simplices) + "\n")
    return EXIT_PASS


# parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="PATH", help="write the JSON report here instead of stdout")

    p = _Parser(prog="reebforge", description="Reeb-function constructions and checks.")
    p.add_argument("--version", action="version", version=f"reebforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    h = sub.add_parser("homology", parents=[common], help="Betti numbers and torsion")
    h.add_argument("complex", help=".scx file or builtin:NAME")
    h.add_argument("--coeff", default="q", help="q, z2 or z (default q)")
    h.add_argument("--reduced", action="store_true")
    h.set_defaults(func=cmd_homology)

    b = sub.add_parser("reeb-build", parents=[common], help="construct a PL Reeb function with zero set X")
    b.add_argument("complex")
    b.add_argument("subcomplex")
    b.add_argument("--max-retries", type=int, default=3)
    b.add_argument("--scheme", choices=SCHEMES, default="harmonic")
    b.add_argument("--out-prefix", help="write PREFIX.scx, PREFIX.x0.scx and PREFIX.plf")
    b.set_defaults(func=cmd_reeb_build)

    v = sub.add_parser("verify", parents=[common], help="check a stored PL map")
    v.add_argument("complex")
    v.add_argument("plf")
    v.add_argument("expected_x0", nargs="?")
    v.add_argument("--per-vertex", action="store_true", help="include every vertex classification")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("duality", parents=[common], help="Betti inequality for prescribed extrema")
    d.add_argument("complex")
    d.add_argument("x0")
    d.add_argument("x1")
    d.add_argument("--coeff", default="z2", choices=["q", "z2"])
    d.set_defaults(func=cmd_duality)

    f = sub.add_parser("flatfn", parents=[common], help="build and check a flat function")
    f.add_argument("--ck", default="2^-k/k", help="2^-k, 2^-k/k or a comma list c_0,...,c_K")
    f.add_argument("--K", type=int, default=8)
    f.add_argument("--check", type=int, action="append", help="verify the bound for this k (repeatable)")
    f.add_argument("--samples", type=int, default=200)
    f.add_argument("--csv", help="write a (t, gamma, gamma', ...) table")
    f.add_argument("--order", type=int, default=3, help="highest derivative in the CSV table")
    f.add_argument("--table-samples", type=int, default=200)
    f.set_defaults(func=cmd_flatfn)

    s = sub.add_parser("semialg", parents=[common], help="sample-check a semialgebraic Reeb function")
    s.add_argument("spec")
    s.add_argument("--delta", type=float, default=0.01)
    s.add_argument("--grid", type=int, help="sampler resolution (default from the spec file)")
    s.add_argument("--threshold", type=float, default=1e-8)
    s.add_argument("--csv", help="write (point, f, projected gradient norm) rows")
    s.set_defaults(func=cmd_semialg)

    bi = sub.add_parser("builtin", help="print a built-in complex as .scx")
    bi.add_argument("name")
    bi.add_argument("--out")
    bi.set_defaults(func=cmd_builtin)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RetriesExhausted as exc:
        print(f"reebforge: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ReebForgeError as exc:
        print(f"reebforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
