"""Command-line entry point: ``digsplit <subcommand> ...``.

Exit codes: 0 pass/found, 1 property failure/no split, 2 usage error,
3 node budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .digraph import DigraphFormatError, emit_digraph, max_out_degree, min_out_degree, parse_digraph
from .expander import (
    ExpanderParams,
    ExpanderSearchFailed,
    check_property_ii,
    emit_bipartite,
    generate_verified,
    parse_bipartite,
)
from .gadgets import (
    TowerParams,
    audit,
    emit_origin,
    split_neighborhood_gadget,
    tower_gadget,
)
from .generators import complete_digraph, directed_cycle, paley_tournament, random_digraph_min_outdeg
from .solver import SplitSpec, exists_split, exists_split_bruteforce

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read_digraph(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_digraph(text)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_report(args, report: experiments.ExperimentReport) -> int:
    if args.out:
        Path(args.out).write_text(report.to_jsonl())
    if args.json:
        sys.stdout.write(report.to_jsonl())
    else:
        print(f"{report.command}: {report.verdict}")
        print(json.dumps(report.summary, indent=2, sort_keys=True))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_gen(args) -> int:
    if args.family == "complete":
        D = complete_digraph(_need(args.n, "--n"))
    elif args.family == "cycle":
        D = directed_cycle(_need(args.n, "--n"))
    elif args.family == "paley":
        D = paley_tournament(_need(args.p, "--p"))
    else:
        D = random_digraph_min_outdeg(_need(args.n, "--n"), _need(args.delta, "--delta"), args.seed)
    stats = {"n": D.n, "m": D.m, "min_out_degree": min_out_degree(D), "max_out_degree": max_out_degree(D)}
    _write(args.out, emit_digraph(D))
    line = json.dumps(stats) if args.json else " ".join(f"{k}={v}" for k, v in stats.items())
    print(line, file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def cmd_expander(args) -> int:
    if args.check:
        G = parse_bipartite(Path(args.check).read_text())
        if args.cap is not None:
            params = ExpanderParams.with_cap(G.n, G.k, args.cap)
        else:
            params = ExpanderParams.for_lemma(G.n, G.k)
        verdict = check_property_ii(G, params)
        out = {"n": G.n, "k": G.k, "x_cap": params.x_cap, "holds": verdict.holds}
        if verdict.witness:
            out["X"], out["Y"] = list(verdict.witness[0]), list(verdict.witness[1])
        print(json.dumps(out) if args.json else " ".join(f"{k}={v}" for k, v in out.items()))
        return EXIT_OK if verdict.holds else EXIT_FAIL
    n, k = _need(args.n, "--n"), _need(args.k, "--k")
    try:
        V = generate_verified(n, k, args.seed, args.max_tries)
    except ExpanderSearchFailed as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAIL
    if args.emit:
        _write(args.emit, emit_bipartite(V.graph))
    out = {"n": n, "k": k, "x_cap": V.params.x_cap, "seed": V.seed, "tries": V.tries, "holds": True}
    print(json.dumps(out) if args.json else " ".join(f"{k}={v}" for k, v in out.items()))
    return EXIT_OK


def cmd_gadget(args) -> int:
    if args.kind == "split":
        base = _read_digraph(args.base) if args.base else complete_digraph(args.f * args.f + 1)
        om = split_neighborhood_gadget(base, args.f)
    else:
        tp = TowerParams.build(args.s, args.k, args.seed, layer_size_override=args.layer_size)
        base = _read_digraph(args.base) if args.base else complete_digraph(tp.d + 1)
        om = tower_gadget(base, tp)
    if args.emit_gadget:
        _write(args.emit_gadget, emit_digraph(om.gadget))
    if args.emit_origin:
        _write(args.emit_origin, emit_origin(om))
    checks = audit(om)
    out = {
        "kind": args.kind,
        "base_n": base.n,
        "gadget_n": om.gadget.n,
        "gadget_m": om.gadget.m,
        "min_out_degree": min_out_degree(om.gadget),
        "certified": om.certified,
        "audit": checks,
    }
    if om.tower is not None:
        out["d"] = om.tower.d
    print(json.dumps(out, sort_keys=True) if args.json else json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def cmd_solve(args) -> int:
    D = _read_digraph(args.input)
    spec = SplitSpec(args.s, args.t)
    if args.brute_force:
        result = exists_split_bruteforce(D, spec)
    else:
        result = exists_split(D, spec, budget=args.budget)
    if args.json:
        print(json.dumps(result.to_json()))
    else:
        print(f"outcome={result.outcome} nodes={result.nodes}")
        if result.witness:
            print("A:", " ".join(map(str, result.witness.A)))
            print("B:", " ".join(map(str, result.witness.B)))
    return {"found": EXIT_OK, "none": EXIT_FAIL, "budget": EXIT_BUDGET}[result.outcome]


def cmd_lemma_sweep(args) -> int:
    return _emit_report(args, experiments.lemma_sweep(args.n, args.k, args.trials, args.seed))


def cmd_claim_fuzz(args) -> int:
    base = _read_digraph(args.base) if args.base else None
    report = experiments.claim_fuzz(
        args.kind,
        args.trials,
        args.seed,
        base=base,
        f=args.f,
        s=args.s,
        k=args.k,
        tower_seed=args.tower_seed,
        layer_size_override=args.layer_size,
        exhaustive=args.exhaustive,
        threads=args.threads,
    )
    return _emit_report(args, report)


def cmd_bounds(args) -> int:
    row = experiments.bounds_table(args.f2b2, args.s, args.t, args.mode, args.k)
    if args.json:
        print(json.dumps(row, sort_keys=True))
    else:
        for key, value in row.items():
            if key != "notes":
                print(f"{key:>16}  {value}")
        for note in row["notes"]:
            print(f"{'note':>16}  {note}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    base = _read_digraph(args.base)
    report = experiments.pipeline(
        args.kind,
        base,
        seed=args.seed,
        f=args.f2b2,
        k=args.k,
        s=args.s,
        mode=args.mode,
        budget=args.budget,
        layer_size_override=args.layer_size,
    )
    code = _emit_report(args, report)
    if code == EXIT_OK and report.summary["outcome"] == "budget":
        return EXIT_BUDGET
    return code


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--budget", type=int, default=None, help="solver node budget")

    parser = argparse.ArgumentParser(prog="digsplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a digraph family")
    p.add_argument("family", choices=["complete", "cycle", "paley", "random"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("expander", parents=[common], help="sample or check a verified k-out expander")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--max-tries", type=int, default=20)
    p.add_argument("--emit")
    p.add_argument("--check")
    p.add_argument("--cap", type=int, help="check up to this |X| instead of floor(eps n)")
    p.set_defaults(func=cmd_expander)

    p = sub.add_parser("gadget", parents=[common], help="build the splitter or tower gadget")
    p.add_argument("--kind", choices=["split", "tower"], required=True)
    p.add_argument("--f", type=int, default=2)
    p.add_argument("--s", type=int, default=4)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--base")
    p.add_argument("--layer-size", type=int, help="override d (marks the gadget uncertified)")
    p.add_argument("--emit-gadget")
    p.add_argument("--emit-origin")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("solve", parents=[common], help="decide (s,t)-splittability")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--brute-force", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("lemma-sweep", parents=[common], help="empirical success rate of the expander lemma")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lemma_sweep)

    p = sub.add_parser("claim-fuzz", parents=[common], help="runtime check of a lifting claim")
    p.add_argument("--kind", choices=["a", "b"], required=True)
    p.add_argument("--base")
    p.add_argument("--f", type=int, default=2)
    p.add_argument("--s", type=int, default=4)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--tower-seed", type=int, default=0)
    p.add_argument("--layer-size", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_claim_fuzz)

    p = sub.add_parser("bounds", parents=[common], help="closed-form bound table")
    p.add_argument("--f2b2", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--mode", choices=["both", "one"], default="both")
    p.add_argument("--k", type=int, help="hypothetical F(3,b(3)); defaults to f2b2^2")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("pipeline", parents=[common], help="gadget, solve, project, verify")
    p.add_argument("--kind", choices=["split", "tower"], default="split")
    p.add_argument("--base", required=True)
    p.add_argument("--f2b2", type=int, default=2)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--s", type=int, default=4)
    p.add_argument("--mode", choices=["both", "one"], default="both")
    p.add_argument("--layer-size", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "pipeline" and args.budget is None:
        args.budget = 10_000
    try:
        return args.func(args)
    except (UsageError, DigraphFormatError, ValueError, FileNotFoundError) as exc:
        print(f"digsplit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
