"""Command-line front end.

Subcommands: gen, build, query, relabel, verify, bench, stats. Exit codes:
0 success, 1 verification failure, 2 bad flags (argparse), 3 absent label,
4 malformed input file, 5 other library error, 6 I/O error.
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import (
    CorruptOracleFile,
    Disconnected,
    DuplicateEdge,
    EmbeddingInconsistent,
    EulerViolation,
    LabelAbsent,
    MalformedLine,
    PladoError,
    VerificationFailed,
)
from .graph import PlanarGraph, gen_grid, gen_planar, parse_graph, serialize_graph
from .index import MODE_BINARY, MODE_BITVECTOR
from .oracle import Oracle, OracleConfig
from .portals import THREE_STRETCH_EPS
from .shortest_paths import sssp, weighted_eccentricity

BENCH_HEADER = "n,m,labels,eps,rho,mode,queries,max_stretch,mean_stretch,mean_portals,entries,ms"

_FORMAT_ERRORS = (
    MalformedLine,
    DuplicateEdge,
    Disconnected,
    EmbeddingInconsistent,
    EulerViolation,
    CorruptOracleFile,
)


def _parse_eps(args) -> Fraction:
    if getattr(args, "three_stretch", False):
        if getattr(args, "eps", None) is not None:
            raise argparse.ArgumentTypeError("--eps and --three-stretch conflict")
        return THREE_STRETCH_EPS
    if getattr(args, "eps", None) is None:
        raise argparse.ArgumentTypeError("one of --eps or --three-stretch is required")
    return Fraction(args.eps)


def _load_graph(path: str) -> PlanarGraph:
    with open(path, "rb") as fh:
        return parse_graph(fh.read())


def _cmd_gen(args) -> int:
    if args.n is not None:
        g = gen_planar(args.n, args.density, (args.wmin, args.wmax),
                       args.labels, args.seed)
    else:
        if args.rows is None or args.cols is None:
            raise argparse.ArgumentTypeError("need --rows/--cols or --n")
        g = gen_grid(args.rows, args.cols, (args.wmin, args.wmax),
                     args.labels, args.seed)
    text = serialize_graph(g)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(f"generated n={g.n} m={g.m} labels={g.num_labels}", file=sys.stderr)
    return 0


def _cmd_build(args) -> int:
    g = _load_graph(args.graph)
    config = OracleConfig(
        eps=_parse_eps(args),
        range_mode=args.range_mode,
        leaf_max=args.leaf_max,
        root_override=args.root,
    )
    t0 = time.perf_counter()
    o = Oracle.build(g, config)
    dt = time.perf_counter() - t0
    o.save(args.output)
    rep = o.stats()
    print(f"built oracle: n={g.n} m={g.m} labels={g.num_labels}")
    print(f"  root={o.spt.root} levels(rho)={o.rho} "
          f"weighted_ecc={weighted_eccentricity(g, o.spt.root)}")
    print(f"  pieces={rep.pieces} depth={o.rgd.depth} "
          f"portal_entries={rep.portal_entries} label_entries={rep.label_entries}")
    print(f"  eps={o.config.eps} mode={o.config.range_mode} "
          f"leaf_max={o.config.leaf_max} build_s={dt:.3f}")
    return 0


def _cmd_query(args) -> int:
    o = Oracle.load(args.oracle)
    res = o.query(args.vertex, args.label)
    print(f"d={res.d} witness={res.witness}")
    if args.stats:
        s = res.stats
        print(f"pieces={s.pieces_visited} portals={s.portals_examined} "
              f"bsearch_steps={s.binary_search_steps} rmq_calls={s.rmq_calls}")
    return 0


def _cmd_relabel(args) -> int:
    o = Oracle.load(args.oracle)
    report = o.change_label(args.vertex, args.label)
    o.save(args.output or args.oracle)
    print(f"relabeled vertex {report.vertex}: {report.old_label} -> "
          f"{report.new_label}, structures_touched={report.structures_touched}")
    return 0


def _check_same_real_edges(g: PlanarGraph, og: PlanarGraph) -> None:
    def real(gr):
        return sorted(
            (min(e.u, e.v), max(e.u, e.v), e.length)
            for e in gr.edges
            if not e.artificial
        )

    if g.n != og.n or real(g) != real(og):
        raise VerificationFailed("graph file does not match the oracle's graph")


def _cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    o = Oracle.load(args.oracle)
    _check_same_real_edges(g, o.graph)
    labels = o.graph.labels  # relabels live in the oracle
    present = [lam for lam in range(o.graph.num_labels)
               if int(o.label_counts[lam]) > 0]
    pairs = [(u, lam) for u in range(g.n) for lam in present]
    if args.sample is not None and args.sample < len(pairs):
        rng = random.Random(args.seed)
        pairs = rng.sample(pairs, args.sample)
    p, q = o.config.eps.numerator, o.config.eps.denominator
    worst = Fraction(1)
    dist_cache: dict[int, np.ndarray] = {}
    for u, lam in pairs:
        if u not in dist_cache:
            dist_cache[u] = sssp(g, u)[0].dist
        dist = dist_cache[u]
        holders = np.flatnonzero(labels == lam)
        delta = int(dist[holders].min())
        res = o.query(u, lam, mode=MODE_BINARY)
        res_bv = o.query(u, lam, mode=MODE_BITVECTOR)
        if (res.d, res.witness) != (res_bv.d, res_bv.witness):
            raise VerificationFailed(
                f"mode mismatch at (u={u}, lam={lam}): "
                f"binary {(res.d, res.witness)} != bitvector {(res_bv.d, res_bv.witness)}"
            )
        if labels[res.witness] != lam or int(dist[res.witness]) > res.d:
            raise VerificationFailed(
                f"bad witness at (u={u}, lam={lam}): d={res.d} witness={res.witness}"
            )
        if res.d < delta or q * res.d > (q + p) * delta:
            raise VerificationFailed(
                f"stretch violated at (u={u}, lam={lam}): d={res.d} delta={delta}"
            )
        if delta > 0:
            worst = max(worst, Fraction(res.d, delta))
    print(f"verified {len(pairs)} queries, worst stretch = {float(worst):.6f} "
          f"({worst}), bound = {1 + o.config.eps}")
    return 0


def _bench_one(side: int, eps: Fraction, mode: str, args, out) -> None:
    g = gen_grid(side, side, (args.wmin, args.wmax), args.labels, args.seed)
    config = OracleConfig(eps=eps, range_mode=mode)
    o = Oracle.build(g, config)
    rng = random.Random(args.seed + side)
    present = [lam for lam in range(g.num_labels) if (g.labels == lam).any()]
    queries = [
        (rng.randrange(g.n), present[rng.randrange(len(present))])
        for _ in range(args.queries)
    ]
    dist_cache: dict[int, np.ndarray] = {}
    stretches: list[Fraction] = []
    portals = 0
    t0 = time.perf_counter()
    results = [o.query(u, lam) for u, lam in queries]
    ms = (time.perf_counter() - t0) * 1000.0
    for (u, lam), res in zip(queries, results):
        if u not in dist_cache:
            dist_cache[u] = sssp(g, u)[0].dist
        delta = int(dist_cache[u][np.flatnonzero(o.graph.labels == lam)].min())
        stretches.append(Fraction(res.d, delta) if delta else Fraction(1))
        portals += res.stats.portals_examined
    rep = o.stats()
    row = [
        g.n, g.m, g.num_labels, str(eps), o.rho, mode, len(queries),
        f"{float(max(stretches)):.6f}",
        f"{float(sum(stretches) / len(stretches)):.6f}",
        f"{portals / len(queries):.3f}",
        rep.label_entries,
        f"{ms:.3f}",
    ]
    out.write(",".join(str(x) for x in row) + "\n")


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    if args.three_stretch:
        eps_list = [THREE_STRETCH_EPS]
    else:
        eps_list = [Fraction(s) for s in (args.eps or "1/4").split(",")]
    modes = args.modes.split(",")
    sys.stdout.write(BENCH_HEADER + "\n")
    for n in sizes:
        side = int(round(n**0.5))
        if side * side != n:
            raise argparse.ArgumentTypeError(f"bench size {n} is not a square")
        for eps in eps_list:
            for mode in modes:
                _bench_one(side, eps, mode, args, sys.stdout)
    return 0


def _cmd_stats(args) -> int:
    o = Oracle.load(args.oracle)
    rep = o.stats()
    print(f"n={o.graph.n} m={o.graph.real_edge_count()} "
          f"labels={o.graph.num_labels} eps={o.config.eps} rho={o.rho}")
    for name in ("portal_entries", "label_entries", "contributor_pairs",
                 "rmq_cells", "bitvector_words", "leaf_table_cells", "pieces"):
        print(f"{name}={getattr(rep, name)}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="plado",
        description="(1+eps)-stretch vertex-to-label distance oracle for planar graphs",
    )
    ap.add_argument("--version", action="version", version=f"plado {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a PLGRAPH file")
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--n", type=int, help="planar mode: vertex count target")
    g.add_argument("--density", type=float, default=1.0)
    g.add_argument("--labels", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--wmin", type=int, default=1)
    g.add_argument("--wmax", type=int, default=100)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=_cmd_gen)

    b = sub.add_parser("build", help="build and save an oracle")
    b.add_argument("-g", "--graph", required=True)
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--eps", help="exact rational, e.g. 1/2")
    b.add_argument("--three-stretch", action="store_true")
    b.add_argument("--range-mode", choices=[MODE_BINARY, MODE_BITVECTOR],
                   default=MODE_BINARY)
    b.add_argument("--leaf-max", type=int, default=1)
    b.add_argument("--root", type=int, help="skip center search, use this root")
    b.set_defaults(func=_cmd_build)

    q = sub.add_parser("query", help="answer one vertex-label query")
    q.add_argument("-O", "--oracle", required=True)
    q.add_argument("-u", "--vertex", type=int, required=True)
    q.add_argument("-l", "--label", type=int, required=True)
    q.add_argument("--stats", action="store_true")
    q.set_defaults(func=_cmd_query)

    r = sub.add_parser("relabel", help="change one vertex's label in an oracle file")
    r.add_argument("-O", "--oracle", required=True)
    r.add_argument("-v", "--vertex", type=int, required=True)
    r.add_argument("-l", "--label", type=int, required=True)
    r.add_argument("-o", "--output", help="write here instead of in place")
    r.set_defaults(func=_cmd_relabel)

    v = sub.add_parser("verify", help="sweep queries against the exact oracle")
    v.add_argument("-g", "--graph", required=True)
    v.add_argument("-O", "--oracle", required=True)
    v.add_argument("--sample", type=int, help="check this many random pairs")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=_cmd_verify)

    be = sub.add_parser("bench", help="benchmark grid oracles, CSV on stdout")
    be.add_argument("--sizes", default="64,256,1024")
    be.add_argument("--eps", help="comma-separated rationals, default 1/4")
    be.add_argument("--three-stretch", action="store_true")
    be.add_argument("--modes", default=MODE_BINARY)
    be.add_argument("--labels", type=int, default=5)
    be.add_argument("--queries", type=int, default=200)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--wmin", type=int, default=1)
    be.add_argument("--wmax", type=int, default=100)
    be.set_defaults(func=_cmd_bench)

    s = sub.add_parser("stats", help="print an oracle's space accounting")
    s.add_argument("-O", "--oracle", required=True)
    s.set_defaults(func=_cmd_stats)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except argparse.ArgumentTypeError as exc:
        print(f"bad flags: {exc}", file=sys.stderr)
        return 2
    except LabelAbsent as exc:
        print(f"label absent: {exc}", file=sys.stderr)
        return 3
    except _FORMAT_ERRORS as exc:
        print(f"bad input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except PladoError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 6


if __name__ == "__main__":
    sys.exit(main())
