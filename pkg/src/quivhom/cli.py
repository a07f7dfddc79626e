"""Command-line front end.

Exit codes: 0 on success, 1 on any domain or schema error (a machine-readable
error object goes to stderr), 2 when a homotopy membership came back
undecided.  Outputs are deterministic for fixed inputs; the only randomized
mode is `cluster-explore --paths`, pinned by `--rng`.

The environment variable HQ_SEARCH_BOUND caps the generated-homotopy search
whenever a homotopy document gives no explicit search_bound.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib.resources import files

from . import serialize as ser
from .cluster import (NotHomogeneous, explore_laurent, f_polynomial, g_vector,
                      initial_seed, is_principal, mutate_path, seed_mutate)
from .coverings import (CoveringOracle, build_regular_cover,
                        check_global_bounded, covering_violation, orbit_mutate)
from .mutation import init_tracked, mutate
from .poly import NotDivisible, RationalFn
from .quiver import Quiver, exchange_matrix, quiver_equal_fixed_vertices
from .surfaces import (COLOR_II, TaggedTriangulation, Triangulation, flip,
                       flip_graph, triangulation_quiver, verify_flip_mutation)
from .walks import (DecisionUnknown, FullOracle, GeneratedOracle,
                    TrivialOracle, word_walk)


class UsageError(Exception):
    """Bad flags or flag combinations; argparse errors funnel here."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: not valid JSON ({e})")


def _write_text(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_error(kind: str, message: str, pointer=None):
    err = {"type": kind, "message": message}
    if pointer is not None:
        err["pointer"] = pointer
    print(json.dumps({"error": err}, sort_keys=True), file=sys.stderr)


def _parse_seq(text: str):
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise UsageError(f"--seq wants comma-separated vertices, got {text!r}")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"--seq wants comma-separated vertices, got {text!r}")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_mutate(args):
    q = ser.quiver_from_json(_load(args.quiver))
    oracle = ser.homotopy_from_json(_load(args.homotopy), q)
    if (args.at is None) == (args.seq is None):
        raise UsageError("pass exactly one of --at or --seq")
    directions = _parse_seq(args.seq) if args.seq is not None else [args.at]
    t = init_tracked(q, oracle)
    for k in directions:
        t = mutate(t, k)
    _write_text(ser.dumps_canonical(ser.tracked_to_json(t)), args.out)
    if args.dot:
        _write_text(ser.quiver_to_dot(t.current), args.dot)
    return 0


def _checked_covering(doc):
    c = ser.covering_from_json(doc)
    violation = covering_violation(c)
    if violation:
        raise ValueError(f"not a covering: {violation}")
    return c


def _cmd_orbit_mutate(args):
    c = _checked_covering(_load(args.cover))
    out = orbit_mutate(c, args.at)
    _write_text(ser.dumps_canonical(ser.covering_to_json(out)), args.out)
    return 0


def _cmd_check_global(args):
    c = _checked_covering(_load(args.cover))
    ok, witness = check_global_bounded(c, args.depth)
    doc = {"depth": args.depth, "ok": ok,
           "witness": None if witness is None else list(witness)}
    _write_text(ser.dumps_canonical(doc), args.out)
    return 0


def _require_arc(tt: TaggedTriangulation, k: int):
    if k not in tt.triangulation.arcs:
        raise ValueError(f"no arc {k} in the triangulation")


def _cmd_flip(args):
    tt = ser.triangulation_from_json(_load(args.tri))
    _require_arc(tt, args.at)
    _write_text(ser.dumps_canonical(ser.triangulation_to_json(flip(tt, args.at))),
                args.out)
    return 0


def _cmd_flip_graph(args):
    tt = ser.triangulation_from_json(_load(args.tri))
    fg = flip_graph(tt, max_nodes=args.max_nodes)
    doc = {"nodes": len(fg.nodes), "edges": [list(e) for e in fg.edges],
           "degrees": fg.degrees()}
    _write_text(ser.dumps_canonical(doc), args.out)
    if args.dot:
        _write_text(ser.flip_graph_to_dot(fg), args.dot)
    return 0


def _cmd_verify_flip_mutation(args):
    tt = ser.triangulation_from_json(_load(args.tri))
    if args.at is not None:
        _require_arc(tt, args.at)
        arcs = [args.at]
    else:
        arcs = list(tt.triangulation.arcs)
    results = {str(k): verify_flip_mutation(tt, k) for k in arcs}
    doc = {"results": results, "all": all(results.values())}
    _write_text(ser.dumps_canonical(doc), args.out)
    return 0


def _laurent_entry_json(s0, entry, names):
    doc = {"path": list(entry.path), "vertex": entry.vertex,
           "laurent": entry.laurent, "nonnegative": entry.nonnegative}
    if names is not None:
        s = mutate_path(s0, entry.path)
        try:
            doc["g_vector"] = list(g_vector(s, entry.vertex))
        except NotHomogeneous:
            doc["g_vector"] = None
        try:
            doc["f_polynomial"] = ser.poly_to_string(
                f_polynomial(s0, entry.path, entry.vertex), names)
        except NotDivisible:
            doc["f_polynomial"] = None
    return doc


def _cmd_cluster_explore(args):
    s0 = ser.seed_from_json(_load(args.seed))
    report = explore_laurent(s0, args.depth, paths=args.paths, rng=args.rng)
    names = ser.seed_variable_names(s0) if is_principal(s0) else None
    doc = {"depth": args.depth,
           "mode": "exhaustive" if args.paths is None else "random",
           "entries": [_laurent_entry_json(s0, e, names) for e in report.entries],
           "undecided": [list(p) for p in report.undecided],
           "all_laurent": report.all_laurent(),
           "all_nonnegative": report.all_nonnegative()}
    if args.paths is not None:
        doc["paths"] = args.paths
        doc["rng"] = args.rng
    _write_text(ser.dumps_canonical(doc), args.report)
    return 2 if report.undecided else 0


def _cmd_export(args):
    q = ser.quiver_from_json(_load(args.quiver))
    if args.format == "dot":
        _write_text(ser.quiver_to_dot(q), args.out)
    else:
        _write_text(ser.dumps_canonical(ser.quiver_to_json(q)), args.out)
    return 0


# ---------------------------------------------------------------------------
# repro targets: each builder recomputes a worked example from scratch and is
# compared against the committed golden file


def _repro_fig1():
    """Both mutations at vertex 1 of the directed triangle: under the trivial
    homotopy the new 2-cycle survives; under the 3-cycle closure it is cut."""
    q = Quiver.from_pairs(3, [(2, 0), (1, 2), (0, 1)], labels=["a", "b", "c"])
    trivial = mutate(init_tracked(q, TrivialOracle(q)), 1)
    cyclic = mutate(init_tracked(q, GeneratedOracle(q, [word_walk(q, "a b c")])), 1)
    return {"quiver": ser.quiver_to_json(q),
            "trivial": ser.tracked_to_json(trivial),
            "cyclic": ser.tracked_to_json(cyclic)}


def _repro_markov_homotopies():
    """Deleted-2-cycle counts per mutation direction on the doubled 3-cycle,
    for the four nested homotopies H1 (trivial) through H4."""
    q = Quiver.from_pairs(3, [(0, 1), (0, 1), (1, 2), (1, 2), (2, 0), (2, 0)],
                          labels=["a1", "a2", "b1", "b2", "g1", "g2"])
    words = {"H1": [], "H2": ["g1 b1 a1", "g2 b1 a1"],
             "H3": ["g1 b1 a1", "g2 b1 a2"], "H4": ["g1 b1 a1", "g2 b2 a2"]}
    deleted = {}
    for name, gens in words.items():
        oracle = (TrivialOracle(q) if not gens
                  else GeneratedOracle(q, [word_walk(q, w) for w in gens]))
        t = init_tracked(q, oracle)
        deleted[name] = [len(mutate(t, k).deletions) for k in range(q.n)]
    return {"quiver": ser.quiver_to_json(q), "generators": words,
            "deleted": deleted}


def _repro_pentagon():
    """Five alternating mutations of the one-arrow seed swap the two cluster
    variables; ten return the initial seed exactly."""
    q = Quiver.from_pairs(2, [(0, 1)], labels="a")
    s0 = initial_seed(q, FullOracle(q))
    names = ser.seed_variable_names(s0)
    s = s0
    steps = []
    for k in (0, 1, 0, 1, 0):
        s = seed_mutate(s, k)
        steps.append({"at": k, "cluster": [ser.rational_to_string(x, names)
                                           for x in s.cluster]})
    swapped = s.cluster == (RationalFn.variable(2, 1), RationalFn.variable(2, 0))
    for k in (1, 0, 1, 0, 1):
        s = seed_mutate(s, k)
    identity = (s.cluster == s0.cluster and s.coeffs == s0.coeffs
                and quiver_equal_fixed_vertices(s.tracked.current, q))
    return {"quiver": ser.quiver_to_json(q), "steps": steps,
            "swapped_after_five": swapped, "identity_after_ten": identity}


def _repro_klein_laurent():
    """Exhaustive depth-3 exploration of the seed whose homotopy comes from
    the rank-4 regular cover of the three-vertex quiver with all 2-cycles:
    every mutated variable is a Laurent polynomial with positive terms."""
    base = Quiver.from_pairs(3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)],
                             labels="abcdef")
    cover = build_regular_cover(base, {1: (1, 0, 3, 2), 2: (2, 3, 0, 1),
                                       3: (1, 0, 3, 2), 5: (2, 3, 0, 1)})
    seed = initial_seed(base, CoveringOracle(cover))
    report = explore_laurent(seed, 3)
    return {"seed": ser.seed_to_json(seed), "depth": 3,
            "entries": [{"path": list(e.path), "vertex": e.vertex,
                         "laurent": e.laurent, "nonnegative": e.nonnegative}
                        for e in report.entries],
            "all_laurent": report.all_laurent(),
            "all_nonnegative": report.all_nonnegative()}


def _repro_torus_quiver():
    """The quiver of the once-punctured torus triangulation: three vertices
    with doubled arrows all around."""
    t = Triangulation(
        arcs=[1, 2, 3], boundary=[],
        ends={1: ("P", "P"), 2: ("P", "P"), 3: ("P", "P")},
        triangles=[[(1, 0), (2, 0), (3, 0)], [(3, 1), (1, 1), (2, 1)]],
        punctures={"P": COLOR_II})
    tq = triangulation_quiver(t)
    return {"triangulation": ser.triangulation_to_json(TaggedTriangulation(t)),
            "quiver": ser.quiver_to_json(tq.quiver),
            "exchange": exchange_matrix(tq.quiver)}


_REPRO = {
    "fig1": _repro_fig1,
    "markov-homotopies": _repro_markov_homotopies,
    "pentagon": _repro_pentagon,
    "klein-laurent": _repro_klein_laurent,
    "torus-quiver": _repro_torus_quiver,
}


def _golden(target: str):
    name = target.replace("-", "_") + ".json"
    return json.loads((files("quivhom") / "golden" / name).read_text("utf-8"))


def _canon(x):
    """Structural form: arrow arrays compare as sets, everything else in
    document order."""
    if isinstance(x, dict):
        return {k: (sorted(json.dumps(e, sort_keys=True) for e in v)
                    if k == "arrows" and isinstance(v, list) else _canon(v))
                for k, v in x.items()}
    if isinstance(x, list):
        return [_canon(e) for e in x]
    return x


def _cmd_repro(args):
    doc = _REPRO[args.target]()
    _write_text(ser.dumps_canonical(doc), args.out)
    if _canon(doc) != _canon(_golden(args.target)):
        raise ValueError(f"{args.target}: recomputed result differs from the "
                         "golden file")
    return 0


# ---------------------------------------------------------------------------
# parser and entry point


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="quivhom",
        description="quiver mutation with homotopies: mutate, flip, explore",
        epilog="vertices and arcs are the 0-based labels of the input files; "
               "HQ_SEARCH_BOUND caps homotopy searches without an explicit "
               "search_bound")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("mutate", help="mutate a quiver with homotopy")
    p.add_argument("--quiver", required=True, metavar="FILE")
    p.add_argument("--homotopy", required=True, metavar="FILE")
    p.add_argument("--at", type=int, metavar="K", help="mutate at one vertex")
    p.add_argument("--seq", metavar="K1,K2,...", help="mutate along a sequence")
    p.add_argument("--out", metavar="FILE", help="result JSON (default stdout)")
    p.add_argument("--dot", metavar="FILE", help="also write the result as DOT")
    p.set_defaults(func=_cmd_mutate)

    p = sub.add_parser("orbit-mutate", help="mutate a covering over a fiber")
    p.add_argument("--cover", required=True, metavar="FILE")
    p.add_argument("--at", type=int, required=True, metavar="K",
                   help="base vertex")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_orbit_mutate)

    p = sub.add_parser("check-global",
                       help="test weak admissibility under all short sequences")
    p.add_argument("--cover", required=True, metavar="FILE")
    p.add_argument("--depth", type=int, required=True, metavar="D")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_check_global)

    p = sub.add_parser("flip", help="flip one arc of a triangulation")
    p.add_argument("--tri", required=True, metavar="FILE")
    p.add_argument("--at", type=int, required=True, metavar="ARC")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_flip)

    p = sub.add_parser("flip-graph", help="enumerate triangulations by flips")
    p.add_argument("--tri", required=True, metavar="FILE")
    p.add_argument("--max-nodes", type=int, default=2000, metavar="N")
    p.add_argument("--dot", metavar="FILE", help="write the graph as DOT")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_flip_graph)

    p = sub.add_parser("verify-flip-mutation",
                       help="check flips against homotopy mutation")
    p.add_argument("--tri", required=True, metavar="FILE")
    p.add_argument("--at", type=int, metavar="ARC",
                   help="one arc (default: all)")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_verify_flip_mutation)

    p = sub.add_parser("cluster-explore",
                       help="mutate a seed along paths and report Laurentness")
    p.add_argument("--seed", required=True, metavar="FILE")
    p.add_argument("--depth", type=int, required=True, metavar="D")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--paths", type=int, metavar="N",
                      help="N random paths instead of all of them")
    mode.add_argument("--exhaustive", action="store_true",
                      help="all non-stuttering paths (the default)")
    p.add_argument("--rng", type=int, default=0, metavar="SEED",
                   help="random-path generator seed (default 0)")
    p.add_argument("--report", metavar="FILE", help="report JSON (default stdout)")
    p.set_defaults(func=_cmd_cluster_explore)

    p = sub.add_parser("export", help="re-serialize a quiver as JSON or DOT")
    p.add_argument("--quiver", required=True, metavar="FILE")
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("repro",
                       help="recompute a worked example and diff against its "
                            "golden file")
    p.add_argument("target", choices=sorted(_REPRO))
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_repro)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        _emit_error("usage", str(e))
        return 1
    except ser.SchemaError as e:
        _emit_error("schema", str(e), pointer=e.pointer)
        return 1
    except DecisionUnknown as e:
        _emit_error("undecided", str(e))
        return 2
    except (ValueError, KeyError, ArithmeticError, RuntimeError, OSError) as e:
        _emit_error("domain", str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
