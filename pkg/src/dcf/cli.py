"""Command-line entry point ``dcf``.

Exit codes: 0 success or verdict yes, 1 verdict no, 2 usage error,
3 a guaranteed object was not found (the reproduction bundle goes to stderr).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import generators
from .bipartite import build_bipartite_rep, fact1_reduce, mark_m0
from .cyclable import NoCycleReport, find_w_cycle, theorem5_factor
from .digraph import CycleFactorCertificate, Digraph, Partition, VertexSet, validate_certificate
from .errors import BudgetExceeded, DcfError, ParseError, PreconditionError, TheoremViolation
from .factor import NoFactorReport, solve_w_cycle_factor
from .io import cycles_dot, emit_certificate, format_digraph, parse_digraph_file, parse_w_file
from .oracle import oracle_cyclable, oracle_factor_exists
from .sweep import POLICIES, TARGETS, SweepConfig, run_sweep

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2, 3


def _load(args: argparse.Namespace) -> tuple[Digraph, VertexSet]:
    D = parse_digraph_file(args.graph)
    W = parse_w_file(args.w, D.n) if args.w else VertexSet(range(D.n))
    return D, W


def _parts(args: argparse.Namespace, W: VertexSet) -> Partition:
    if not args.parts:
        raise PreconditionError("--parts is required")
    return Partition.parse(args.parts, total=len(W))


def _dump_bipartite(args: argparse.Namespace, D: Digraph, W: VertexSet) -> None:
    if args.dump_bipartite:
        sys.stderr.write(fact1_reduce(mark_m0(build_bipartite_rep(D), W)).dump())


def cmd_solve(args: argparse.Namespace) -> int:
    D, W = _load(args)
    parts = _parts(args, W)
    _dump_bipartite(args, D, W)
    result = solve_w_cycle_factor(D, W, parts, mode=args.mode, budget=args.budget)
    if isinstance(result, NoFactorReport):
        sys.stderr.write(f"no factor: {result.reason}\n")
        if result.oracle_verdict is not None:
            sys.stderr.write(f"oracle: {result.oracle_verdict}\n")
        sys.stderr.write(result.state_dump)
        return EXIT_NO
    sys.stdout.write(emit_certificate(D, W, parts, result, args.format))
    return EXIT_OK


def cmd_cyclable(args: argparse.Namespace) -> int:
    D, W = _load(args)
    _dump_bipartite(args, D, W)
    result = find_w_cycle(D, W, mode=args.mode, budget=args.budget)
    if isinstance(result, NoCycleReport):
        sys.stderr.write(f"not cyclable: {result.reason}; missing {list(result.missing)}\n")
        if result.oracle_verdict is not None:
            sys.stderr.write(f"oracle: {result.oracle_verdict}\n")
        return EXIT_NO
    if args.format == "dot":
        sys.stdout.write(cycles_dot(D.n, W, [result]))
    else:
        sys.stdout.write(" ".join(map(str, result)) + "\n")
    return EXIT_OK


def cmd_t5(args: argparse.Namespace) -> int:
    D, W = _load(args)
    parts = _parts(args, W)
    cert = theorem5_factor(D, W, parts)
    sys.stdout.write(emit_certificate(D, W, parts, cert, args.format))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    if args.family == "d1":
        D = generators.gen_d1(args.k)
    elif args.family == "d2":
        D = generators.gen_d2(args.k)
    elif args.family == "kbipsym":
        D = generators.gen_complete_bipartite_sym(args.a, args.b)
    else:
        if args.n is None:
            raise PreconditionError("gen random needs --n")
        D = generators.gen_random(args.n, args.p, args.seed)
    sys.stdout.write(format_digraph(D))
    return EXIT_OK


def _read_certificate(path: str) -> CycleFactorCertificate:
    try:
        data = json.loads(Path(path).read_text())
        cycles = [tuple(int(v) for v in c["vertices"]) for c in data["cycles"]]
        counts = tuple(int(c["w_count"]) for c in data["cycles"])
    except (ValueError, KeyError, TypeError) as exc:
        raise PreconditionError(f"malformed certificate {path}: {exc}") from exc
    return CycleFactorCertificate(tuple(cycles), counts)


def cmd_verify(args: argparse.Namespace) -> int:
    D, W = _load(args)
    if args.oracle:
        if args.parts:
            verdict = oracle_factor_exists(D, W, _parts(args, W), budget=args.budget)
            if verdict.yes:
                sys.stdout.write(emit_certificate(D, W, _parts(args, W), verdict.certificate, "json"))
        else:
            verdict = oracle_cyclable(D, W, budget=args.budget)
            if verdict.yes:
                sys.stdout.write(" ".join(map(str, verdict.cycle)) + "\n")
        sys.stderr.write(f"oracle: {verdict.status.value} ({verdict.nodes} nodes)\n")
        return EXIT_OK if verdict.yes else EXIT_NO
    if not args.certificate:
        raise PreconditionError("verify needs a certificate file or --oracle")
    report = validate_certificate(D, W, _parts(args, W), _read_certificate(args.certificate))
    sys.stdout.write(str(report) + "\n")
    return EXIT_OK if report else EXIT_NO


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = SweepConfig(
        target=args.target,
        n_values=_n_values(args.n),
        mode=args.mode,
        seed=args.seed,
        count=args.count,
        policy=args.policy,
        oracle_max_n=args.oracle_max_n,
        huge=args.huge,
        budget=args.budget,
        out_dir=args.out_dir,
    )
    summary = run_sweep(cfg)
    sys.stdout.write("\n".join(summary.lines()) + "\n")
    if args.target != "conjecture8" and (summary.failures or summary.oracle_disagreements):
        return EXIT_VIOLATION
    return EXIT_OK


def _n_values(text: str) -> list[int]:
    out: list[int] = []
    try:
        for tok in text.split(","):
            if "-" in tok:
                lo, hi = tok.split("-")
                out += range(int(lo), int(hi) + 1)
            else:
                out.append(int(tok))
    except ValueError as exc:
        raise PreconditionError(f"malformed n list {text!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcf", description="Disjoint cycles through prescribed vertices.")
    parser.add_argument("--trace-moves", action="store_true", help="log every applied rewrite move to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def instance(p: argparse.ArgumentParser, parts: bool) -> None:
        p.add_argument("graph", help="edge-list file")
        p.add_argument("--w", help="file of W vertex ids (default: all vertices)")
        if parts:
            p.add_argument("--parts", help="comma-separated W-counts, e.g. 3,4")
        p.add_argument("--dump-bipartite", action="store_true", help="print the marked bipartite representation")

    p = sub.add_parser("solve", help="find a W-cycle-factor")
    instance(p, True)
    p.add_argument("--mode", choices=("guaranteed", "best_effort"), default="guaranteed")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--budget", type=int, default=10_000)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("cyclable", help="find a cycle through all of W")
    instance(p, False)
    p.add_argument("--mode", choices=("guaranteed", "best_effort"), default="guaranteed")
    p.add_argument("--format", choices=("text", "dot"), default="text")
    p.add_argument("--budget", type=int, default=200_000)
    p.set_defaults(func=cmd_cyclable)

    p = sub.add_parser("t5-factor", help="greedy W-cycle-factor for hosts with n >= 2|W|")
    instance(p, True)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_t5)

    p = sub.add_parser("gen", help="write a generated digraph")
    p.add_argument("family", choices=("d1", "d2", "kbipsym", "random"))
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--a", type=int, default=2)
    p.add_argument("--b", type=int, default=3)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check a certificate, or ask the brute-force oracle")
    instance(p, True)
    p.add_argument("--cert", dest="certificate", help="certificate JSON to validate")
    p.add_argument("--oracle", action="store_true", help="decide existence by exhaustive search")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run a hypothesis sweep")
    p.add_argument("--target", choices=TARGETS, required=True)
    p.add_argument("--n", required=True, help="orders, e.g. 4 or 5-8 or 5,7")
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=POLICIES, default="all")
    p.add_argument("--oracle-max-n", type=int, default=8)
    p.add_argument("--huge", action="store_true", help="allow exhaustive enumeration at n = 5")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--out-dir", help="directory for counterexample edge lists")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trace_moves:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        log = logging.getLogger("dcf.moves")
        log.addHandler(handler)
        log.setLevel(logging.INFO)
    try:
        return args.func(args)
    except TheoremViolation as exc:
        sys.stderr.write(f"dcf: internal contradiction: {exc}\n")
        sys.stderr.write(json.dumps(exc.bundle, default=list) + "\n")
        return EXIT_VIOLATION
    except (PreconditionError, ParseError, OSError) as exc:
        sys.stderr.write(f"dcf: {exc}\n")
        return EXIT_USAGE
    except (BudgetExceeded, DcfError) as exc:
        sys.stderr.write(f"dcf: {exc}\n")
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
