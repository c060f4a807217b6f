"""Command-line front end: ``arbest <subcommand> ...``.

Exit codes: 0 success, 1 invariant violation, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

from arbest.bench import emit_csv, query_scaling_report, read_csv, run_record
from arbest.estimate import estimate_arboricity
from arbest.exact import (
    GraphTooLarge,
    LayerConstants,
    arboricity_bruteforce,
    degeneracy,
    dense_core,
    exact_layering,
)
from arbest.generators import FAMILIES, GraphFamilySpec, generate
from arbest.graph import EdgeListError, QueryOracle, read_edge_list, write_edge_list
from arbest.peeling import COEFFICIENT_NAMES, PeelConfig, peel
from arbest.streaming import EdgeStream, stream_estimate

EXIT_VIOLATION, EXIT_USAGE, EXIT_IO = 1, 2, 3


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _coeff(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    if key in ("L", "ell"):
        return key, int(value)
    if key not in COEFFICIENT_NAMES:
        raise argparse.ArgumentTypeError(f"unknown coefficient {key!r}; known: L, ell, {', '.join(COEFFICIENT_NAMES)}")
    try:
        return key, Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad value for {key}: {value!r}") from None


def _config(args, n: int, alpha=1) -> PeelConfig:
    build = PeelConfig.paper if args.mode == "paper" else PeelConfig.scaled
    cfg = build(n, alpha, **dict(args.coeff or []))
    for problem in cfg.problems():
        print(f"warning: {problem}", file=sys.stderr)
    return cfg


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("paper", "scaled"), default="scaled")
    p.add_argument("--coeff", type=_coeff, action="append", metavar="KEY=VALUE",
                   help="override a coefficient, L or ell (repeatable)")
    p.add_argument("--seed", type=int, default=0)


def _family_params(args) -> list[dict]:
    """One parameter dict per grid point; list-valued flags span the grid."""
    fam = args.family
    base = {}
    if fam == "layered":
        for k in ("alpha", "rho", "depth", "top"):
            v = getattr(args, k)
            if v is not None:
                base[k] = v
        return [base]
    if args.n is None:
        raise UsageError(f"--n is required for family {fam}")
    base["n"] = args.n
    if fam == "forest":
        return [dict(base, trees=t) for t in (args.trees or [1])]
    if fam == "clique-plus-isolated":
        if not args.s:
            raise UsageError("--s is required for clique-plus-isolated")
        return [dict(base, s=s) for s in args.s]
    if fam == "planted-core":
        if not args.beta:
            raise UsageError("--beta is required for planted-core")
        return [dict(base, beta=b) for b in args.beta]
    if not args.m:
        raise UsageError("--m is required for uniform-random")
    return [dict(base, m=m) for m in args.m]


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=_int_list, help="clique size(s)")
    p.add_argument("--trees", type=_int_list)
    p.add_argument("--beta", type=_int_list, help="core degree(s)")
    p.add_argument("--m", type=_int_list, help="edge count(s)")
    p.add_argument("--alpha", type=int, help="layered: up-degree")
    p.add_argument("--rho", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--top", type=int)


def cmd_gen(args) -> int:
    params = _family_params(args)
    if len(params) != 1:
        raise UsageError("gen takes a single parameter value per flag")
    g = generate(GraphFamilySpec(args.family, params[0], args.seed))
    write_edge_list(g, args.out)
    print(f"wrote {args.out}: n={g.n} m={g.m}")
    return 0


def cmd_estimate(args) -> int:
    g = read_edge_list(args.input)
    if g.n < 2:
        raise UsageError("estimation needs at least 2 vertices")
    rep = estimate_arboricity(g, g.n, _config(args, g.n), seed=args.seed)
    print(f"alpha_hat={rep.alpha_hat}")
    print(f"queries={rep.total_queries}")
    print(f"trace={rep.verdict_trace()}")
    if rep.aborted:
        print("aborted=true")
    return 0


def cmd_peel(args) -> int:
    g = read_edge_list(args.input)
    cfg = _config(args, g.n, Fraction(args.alpha))
    d = peel(QueryOracle(g, seed=args.seed), cfg)
    print(f"verdict={d.verdict.value} reason={d.reason.value}")
    print(f"queries={d.queries_used} t={cfg.t} budget={cfg.budget_int}")
    print("survivors=" + ",".join(str(c) for c in d.survivor_counts))
    return 0


def cmd_stream_estimate(args) -> int:
    stream = EdgeStream(args.input)
    est = stream_estimate(stream, _config(args, stream.n), args.alpha, seed=args.seed)
    print(f"alpha_hat={est.alpha_hat}")
    print(f"passes={est.passes}")
    print(f"queries={est.total_queries}")
    print(f"peak_space={est.peak_space}")
    print(f"trace={est.verdict_trace()}")
    return 0


def cmd_exact(args) -> int:
    g = read_edge_list(args.input)
    d = degeneracy(g)
    try:
        print(f"arboricity {arboricity_bruteforce(g, max_n=args.max_n)}")
    except GraphTooLarge:
        print(f"arboricity between {math.ceil(d / 2)} and {d} (n={g.n} too large for enumeration)")
    print(f"degeneracy {d}")
    return 0


def cmd_degeneracy(args) -> int:
    print(degeneracy(read_edge_list(args.input)))
    return 0


def cmd_layering(args) -> int:
    g = read_edge_list(args.input)
    consts = LayerConstants.paper(g.n) if args.lambda0 is None else LayerConstants.of(args.lambda0, args.slack)
    lay = exact_layering(g, Fraction(args.alpha), consts)
    for i, layer in enumerate(lay.layers):
        print(f"L_{i}: {len(layer)}")
    print(f"unassigned: {len(lay.unassigned)}")
    return 0


def cmd_core(args) -> int:
    core = dense_core(read_edge_list(args.input), args.beta).core
    print(f"size {len(core)}")
    if core:
        print(" ".join(map(str, sorted(core))))
    return 0


def cmd_bench(args) -> int:
    records = []
    mode = "streaming" if args.engine == "stream" else "in-memory"
    for params in _family_params(args):
        for k in range(args.trials):
            spec = GraphFamilySpec(args.family, params, args.seed + k)
            g = generate(spec)
            records.append(run_record(spec, _config(args, g.n), mode, graph=g))
    emit_csv(records, args.out, append=args.append)
    print(f"wrote {len(records)} records to {args.out}")
    if args.report:
        print(query_scaling_report(read_csv(args.out)).table())
    return 0


def cmd_verify(args) -> int:
    from arbest.verify import CHECKS, run_suite

    names = None
    if args.only:
        names = set(args.only.split(","))
        unknown = names - {c.name for c in CHECKS}
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(sorted(unknown))}")
    results = run_suite(names)
    failed = [k for k, v in results.items() if v]
    print(f"{len(results) - len(failed)}/{len(results)} invariants hold")
    return EXIT_VIOLATION if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arbest", description="Sublinear arboricity estimation and baselines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    _add_family_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("estimate", help="estimate arboricity by guess halving")
    p.add_argument("--input", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("peel", help="one Peel run at a fixed guess")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", type=Fraction, required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_peel)

    p = sub.add_parser("stream-estimate", help="estimate over a multi-pass edge stream")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", type=int, default=1, help="smallest guess of the ladder")
    _add_config_flags(p)
    p.set_defaults(func=cmd_stream_estimate)

    p = sub.add_parser("exact", help="exact arboricity and degeneracy")
    p.add_argument("--input", required=True)
    p.add_argument("--max-n", type=int, default=16)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("degeneracy")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_degeneracy)

    p = sub.add_parser("layering", help="exact layering at a given alpha")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", type=Fraction, required=True)
    p.add_argument("--lambda0", type=Fraction, help="L_0 degree coefficient (default 100*L^2)")
    p.add_argument("--slack", type=Fraction, default=Fraction(3))
    p.set_defaults(func=cmd_layering)

    p = sub.add_parser("core", help="dense core at threshold beta")
    p.add_argument("--input", required=True)
    p.add_argument("--beta", type=int, required=True)
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("bench", help="sweep a family grid and write CSV records")
    _add_family_flags(p)
    _add_config_flags(p)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--engine", choices=("memory", "stream"), default="memory")
    p.add_argument("--out", required=True)
    p.add_argument("--append", action="store_true")
    p.add_argument("--report", action="store_true", help="print the query-scaling table")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--only", help="comma-separated check names")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"arbest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, EdgeListError) as exc:
        print(f"arbest: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"arbest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
