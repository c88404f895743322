"""``robspan`` command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 casualty-set builder ran out of retries.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import adversary
from .geometry import InputError, ParseError, read_graph, read_vertex_set, write_graph, write_vertex_set
from .iterated import PRESETS
from .line import RetriesExhausted
from .metrics import (
    DEFAULT_EXACT_CAP,
    DELETION,
    MODES,
    RobustnessCertificate,
    certify,
    magnification_bruteforce,
    minimal_splus,
)
from .registry import CONSTRUCTIONS, BuildParams, Built, build
from .sweep import SweepConfig, run_sweep, sweep_csv

EXIT_OK, EXIT_USAGE, EXIT_UNVERIFIED, EXIT_RETRIES = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which we reserve
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _params(args) -> BuildParams:
    return BuildParams(
        preset=args.preset, epsilon=args.epsilon, k0=args.k0, t=args.t,
        dim=args.dim, k_prime=args.k_prime, retries=args.retries,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sidecar(path: str, data: dict) -> None:
    Path(path).write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _report_failure(cert: RobustnessCertificate) -> None:
    v = cert.violation
    if v is not None:
        print(f"violation: u={v.u} v={v.v} stretch={v.stretch:.12g}", file=sys.stderr)
    else:
        print("verification failed", file=sys.stderr)


def _rebuild(args, points_graph) -> Built:
    """Rebuild the named construction and check it matches the graph file."""
    points, G = points_graph
    n = len(points)
    side = None
    if args.construction == "grid":
        side = args.side
    built = build(args.construction, n, _params(args), args.seed, side=side)
    if built.graph.edge_set() != G.edge_set() or len(built.points) != n:
        raise UsageError(
            f"graph file is not the {args.construction} construction for these flags "
            "(pass the same --seed/--preset/--t used at build time)"
        )
    return built


# --- commands ----------------------------------------------------------------


def cmd_build(args) -> int:
    built = build(args.construction, args.n, _params(args), args.seed, side=args.side, audit=args.audit)
    G = built.graph
    p = built.params
    report = {
        "construction": built.name,
        "n": built.n,
        "dim": built.points.dim,
        "edges": G.m,
        "max_degree": G.max_degree(),
        "seed": args.seed,
        "params": {"preset": p.preset, "epsilon": p.epsilon, "k0": p.k0, "t": p.t, "k_prime": p.k_prime},
        **built.info,
    }
    if args.out:
        write_graph(args.out, built.points, G)
        _sidecar(args.out + ".json", report)
        if built.name == "robust-dd":
            Path(args.out + ".csv").write_text(built.report.to_csv())
    else:
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _certificate(args, points_graph, S) -> RobustnessCertificate:
    points, G = points_graph
    if args.producer == "oracle":
        return minimal_splus(G, S, args.t, args.mode, args.exact_cap)
    if args.producer == "file":
        if not args.splus:
            raise UsageError("--producer file needs --splus")
        S_plus = read_vertex_set(args.splus, len(points))
        return certify(G, S, S_plus, args.t, args.mode, seed=args.seed)
    built = _rebuild(args, points_graph)
    cert = built.splus(S, args.seed)
    if cert is None:
        raise UsageError(f"{args.construction} has no constructive casualty set for |S|={len(S)}")
    return cert


def cmd_certify(args) -> int:
    pg = read_graph(args.graph)
    S = read_vertex_set(args.S, len(pg[0]))
    try:
        cert = _certificate(args, pg, S)
    except RetriesExhausted as exc:
        if exc.best is not None:
            _emit(exc.best.to_text(), args.out)
        print(str(exc), file=sys.stderr)
        return EXIT_RETRIES
    _emit(cert.to_text(), args.out)
    if not cert.verified:
        _report_failure(cert)
        return EXIT_UNVERIFIED
    return EXIT_OK


def cmd_oracle(args) -> int:
    args.producer = "oracle"
    return cmd_certify(args)


def cmd_attack(args) -> int:
    _, G = read_graph(args.graph)
    spec = adversary.AttackSpec(args.kind, args.k, args.i, args.t, args.c, args.seed)
    outcome = adversary.run_attack(G, spec)
    if outcome.refused:
        print(f"refused: {outcome.reason}", file=sys.stderr)
        return EXIT_OK
    if args.out:
        write_vertex_set(args.out, outcome.S)
    else:
        sys.stdout.write("".join(f"{v}\n" for v in outcome.S))
    return EXIT_OK


def cmd_probe(args) -> int:
    pg = read_graph(args.graph)
    _, G = pg
    specs = []
    for kind in args.kinds:
        for k in args.ks:
            for trial in range(args.trials):
                specs.append(adversary.AttackSpec(kind, k, args.i, args.t, args.c, args.seed + trial))
    builder = None
    if args.construction:
        built = _rebuild(args, pg)

        def builder(G_, S, seed):
            cert = built.splus(S, seed)
            if cert is None:
                raise InputError("no constructive casualty set")
            return cert
    F = _params(args).function() if args.census else None
    rep = adversary.probe(G, args.t, specs, builder, args.exact_cap, F)
    _emit(rep.to_csv(), args.out)
    return EXIT_OK


def cmd_census(args) -> int:
    _, G = read_graph(args.graph)
    rows = adversary.census(G, _params(args).function(), args.t, args.threshold)
    _emit(adversary.census_csv(rows), args.out)
    return EXIT_OK


def cmd_magnification(args) -> int:
    _, G = read_graph(args.graph)
    h = magnification_bruteforce(G, args.s_max)
    _emit("s,min_neighborhood\n" + "".join(f"{s},{v}\n" for s, v in sorted(h.items())), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig(
        args.construction, args.ns, args.ks, args.trials, args.seed, _params(args),
        args.oracle_cap, args.exact_cap, args.out,
    )
    rows = run_sweep(cfg)
    _emit(sweep_csv(cfg, rows), args.out)
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")


def _build_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=PRESETS, default="kpow")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--k0", type=float, default=None)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--side", type=int, default=None)
    p.add_argument("--k-prime", type=int, default=1, help="fault tolerance of the ft construction")
    p.add_argument("--retries", type=int, default=64)


def _oracle_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=MODES, default=DELETION)
    p.add_argument("--exact-cap", type=int, default=DEFAULT_EXACT_CAP)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robspan", description="Robust geometric spanner toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build a construction and write graph + sidecar report")
    p.add_argument("construction", choices=CONSTRUCTIONS)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=float, default=4.0)
    p.add_argument("--audit", action="store_true", help="measure the stretch of the result")
    _build_flags(p)
    _common(p)
    p.set_defaults(func=cmd_build)

    for name, func, helptext in (
        ("certify", cmd_certify, "produce and verify a casualty set for a failure set"),
        ("oracle", cmd_oracle, "minimal casualty set via the exact oracle"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("graph")
        p.add_argument("S", help="file with one failed vertex index per line")
        p.add_argument("--t", type=float, default=None,
                       help="target stretch (default 1); with --producer builder, the build parameter (default 4)")
        if name == "certify":
            p.add_argument("--producer", choices=("builder", "oracle", "file"), default="oracle")
            p.add_argument("--splus", help="casualty set to check (with --producer file)")
        p.add_argument("--construction", choices=CONSTRUCTIONS, default=None,
                       help="construction that produced the graph (needed by --producer builder)")
        _oracle_flags(p)
        _build_flags(p)
        _common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("attack", help="generate a failure set")
    p.add_argument("graph")
    p.add_argument("--kind", choices=adversary.KINDS, default="random")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--i", type=int, default=None, help="1-based centre rank for interval attacks")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("probe", help="run attacks against a graph, builder and oracle")
    p.add_argument("graph")
    p.add_argument("--kinds", nargs="+", choices=adversary.KINDS, default=["random"])
    p.add_argument("--ks", type=_int_list, default=[1])
    p.add_argument("--i", type=int, default=None)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--construction", choices=CONSTRUCTIONS, default=None)
    p.add_argument("--census", action="store_true", help="append the edge-length census")
    _oracle_flags(p)
    _build_flags(p)
    _common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("sweep", help="experiment table over n, k and trials")
    p.add_argument("construction", choices=CONSTRUCTIONS)
    p.add_argument("--n", dest="ns", type=_int_list, required=True, help="comma-separated sizes")
    p.add_argument("--k", dest="ks", type=_int_list, required=True, help="comma-separated failure counts")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--t", type=float, default=4.0)
    p.add_argument("--oracle-cap", type=int, default=64)
    _oracle_flags(p)
    _build_flags(p)
    _common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("census", help="edge counts per iterate length class")
    p.add_argument("graph")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.25, help="flag classes below threshold * n edges")
    _build_flags(p)
    _common(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("magnification", help="exact minimum neighbourhood sizes (small graphs)")
    p.add_argument("graph")
    p.add_argument("--s-max", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_magnification)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    if args.command in ("certify", "oracle") and args.t is None:
        args.t = 4.0 if getattr(args, "producer", None) == "builder" else 1.0
    if getattr(args, "producer", None) == "builder" and args.construction is None:
        print("robspan: --producer builder needs --construction", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (InputError, ParseError, UsageError) as exc:
        print(f"robspan: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
