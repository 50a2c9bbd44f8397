"""Command-line front end.

Exit codes: 0 success / equivalent / Duplicator wins, 1 distinguished /
Spoiler wins / check failed, 2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile
from pathlib import Path

from . import automorphisms
from .cfi import VARIANTS, TWO_PAIR, CfiGraph, build_cfi, normalize_twist, recover_base
from .equivalence import bijective_game_decide, ck_equivalent, pk_game_decide, wl_refine
from .errors import (BoundExceeded, BudgetExceeded, CfiwscError, SizeLimitExceeded)
from .export import dimacs_text, dreadnaut_text
from .gluing import extract_cfi, glue
from .joins import cfi_omega, color_class_join, join_from_meta, join_meta
from .manifest import InstanceManifest, record, sha256_file
from .multipede import (BipartiteBase, build_multipede, is_k_meager, is_k_scattered, is_odd,
                        sample_bipartite, sample_odd_meager, scattered_set)
from .pipeline import StepFailure, load_spec, resolve_base, run_pipeline
from .structures import ColoredGraph, RelStructure
from .wsc import BruteForceReady, CfiReady, gurevich_canonize, threshold_via_wsc

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- io helpers ------------------------------------------------------------------


def _read_doc(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}")


def _read_structure(path) -> tuple[RelStructure, dict]:
    doc = _read_doc(path)
    return RelStructure.from_json(doc), doc


def _read_cfi(path) -> CfiGraph:
    s, doc = _read_structure(path)
    if "cfi" not in doc:
        raise UsageError(f"{path} carries no CFI construction data (make it with `cfi gen`)")
    g = ColoredGraph(s.n, s.relations, s.colors, s.indiv) if s.is_binary_graph else s
    return CfiGraph.from_meta(g, doc["cfi"])


def _emit_text(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_structure(s: RelStructure, args, extra: dict | None = None) -> None:
    fmt = args.format
    if fmt == "dimacs":
        text = dimacs_text(s)
    elif fmt == "dreadnaut":
        text = dreadnaut_text(s)
    else:
        text = s.dumps(extra)
    _emit_text(text, args)


def _emit_report(doc: dict, args) -> None:
    _emit_text(json.dumps(doc, sort_keys=True) + "\n", args)


def _manifest(args, construction: str, params: dict, parents: dict | None = None) -> None:
    if args.out:
        record(args.out, construction, params, args.seed, args.argv, parents, os.getcwd())


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(x) for x in text.split(",") if x.strip()]


def parse_twist(base: ColoredGraph, text: str) -> tuple[int, ...]:
    """``all-zero``, ``odd``, a 0/1 string over the sorted edges, ``0x..`` (bit i = edge i)
    or an edge list ``u-v,u-v`` naming the twisted edges."""
    edges = base.edges
    if text in ("all-zero", "even", "0"):
        return tuple(0 for _ in edges)
    if text in ("odd", "1") and len(edges) != 1:
        return normalize_twist(base, 1)
    if text.lower().startswith("0x"):
        val = int(text, 16)
        if val >> len(edges):
            raise UsageError(f"hex twist {text} has bits beyond the {len(edges)} base edges")
        return tuple((val >> i) & 1 for i in range(len(edges)))
    if re.fullmatch(r"[01]+", text):
        return normalize_twist(base, text)
    if re.fullmatch(r"\d+-\d+(,\d+-\d+)*", text):
        marked = set()
        for item in text.split(","):
            u, v = (int(x) for x in item.split("-"))
            e = (min(u, v), max(u, v))
            if e not in edges:
                raise UsageError(f"{u}-{v} is not a base edge")
            marked.add(e)
        return tuple(int(e in marked) for e in edges)
    raise UsageError(f"cannot parse twist {text!r}")


def _load_base(spec: str):
    """A base graph, or a join (if the file carries join data)."""
    if Path(spec).exists():
        s, doc = _read_structure(spec)
        g = ColoredGraph(s.n, s.relations, s.colors, s.indiv)
        return join_from_meta(g, doc["join"]) if "join" in doc else g
    try:
        return resolve_base(spec)
    except FileNotFoundError:
        raise UsageError(f"base {spec!r} is neither a file nor a known name (K<n>, C<n>, prism)")


def _parents(**paths) -> dict:
    return {k: v for k, v in paths.items() if v and Path(v).exists()}


def _check_bytes(args, estimate: int) -> None:
    if args.budget_bytes is not None and estimate > args.budget_bytes:
        raise BudgetExceeded(f"estimated {estimate} bytes exceed --budget-bytes {args.budget_bytes}")


# -- commands ----------------------------------------------------------------------


def cmd_cfi_gen(args) -> int:
    base = _load_base(args.base)
    g = base.graph if hasattr(base, "join_vertices") else base
    twist = parse_twist(g, args.twist)
    c = build_cfi(base, twist, args.variant)
    _emit_structure(c.graph, args, {"cfi": c.meta()})
    _manifest(args, "cfi", {"base": args.base, "twist": "".join(map(str, twist)),
                            "variant": args.variant}, _parents(base=args.base))
    return EXIT_OK


def cmd_cfi_recover(args) -> int:
    s, _ = _read_structure(args.inp)
    rb = recover_base(s)
    if args.format == "json":
        origin = [[x, list(o) if isinstance(o, tuple) else o] for x, o in sorted(rb.origin.items())]
        _emit_text(rb.base.dumps({"orig": [list(e) for e in rb.orig], "origin": origin}), args)
    else:
        _emit_structure(rb.base, args)
    return EXIT_OK


def cmd_join_build(args) -> int:
    graphs = []
    for p in args.inputs:
        s, _ = _read_structure(p)
        graphs.append(ColoredGraph(s.n, s.relations, s.colors, s.indiv))
    j = color_class_join(graphs)
    _emit_structure(j.graph, args, {"join": join_meta(j)})
    _manifest(args, "join", {"inputs": list(args.inputs)},
              {f"input{i}": p for i, p in enumerate(args.inputs)})
    return EXIT_OK


def cmd_join_omega(args) -> int:
    base = _load_base(args.base)
    j = cfi_omega(base, args.g, args.k)
    _emit_structure(j.graph, args, {"join": join_meta(j)})
    _manifest(args, "cfi-omega", {"base": args.base, "g": args.g, "k": args.k},
              _parents(base=args.base))
    return EXIT_OK


def cmd_multipede_sample(args) -> int:
    seed = 0 if args.seed is None else args.seed
    if args.odd_meager is not None:
        b, used = sample_odd_meager(args.n, args.epsilon, args.odd_meager, seed)
    else:
        b, used = sample_bipartite(args.n, args.epsilon, seed), seed
    if args.emit == "multipede":
        _emit_structure(build_multipede(b).structure, args, {"segments": b.n_segments})
    else:
        _emit_structure(b.to_structure(), args)
    _manifest(args, "multipede", {"n": args.n, "epsilon": args.epsilon, "seed_used": used,
                                  "odd_meager": args.odd_meager, "emit": args.emit})
    return EXIT_OK


def cmd_multipede_check(args) -> int:
    s, _ = _read_structure(args.inp)
    b = BipartiteBase.from_structure(s)
    report: dict = {"segments": b.n_segments, "constraints": len(b.constraints)}
    ok = True
    if args.odd:
        report["odd"] = is_odd(b)
        ok &= report["odd"]
    if args.meager is not None:
        report["meager"] = {"k": args.meager,
                            "holds": is_k_meager(b, args.meager, bound=None if args.exact else 24)}
        ok &= report["meager"]["holds"]
    if args.scattered is not None:
        if args.segments:
            segs = _int_list(args.segments)
            holds = is_k_scattered(b, segs, args.scattered)
            report["scattered"] = {"k": args.scattered, "segments": segs, "holds": holds}
        else:
            sc = scattered_set(b, args.scattered, args.target)
            holds = sc.complete
            report["scattered"] = {"k": args.scattered, "segments": list(sc.segments),
                                   "holds": holds}
        ok &= holds
    report["pass"] = bool(ok)
    _emit_report(report, args)
    return EXIT_OK if ok else EXIT_NO


def cmd_glue_build(args) -> int:
    s, _ = _read_structure(args.multipede)
    b = BipartiteBase.from_structure(s)
    c = _read_cfi(args.cfi)
    g = glue(build_multipede(b), _int_list(args.segments), c)
    _emit_structure(g.structure, args, {"glued_segments": list(g.segments)})
    _manifest(args, "gluing", {"segments": list(g.segments)},
              _parents(multipede=args.multipede, cfi=args.cfi))
    return EXIT_OK


def cmd_glue_extract(args) -> int:
    s, _ = _read_structure(args.inp)
    _emit_structure(extract_cfi(s), args)
    return EXIT_OK


def cmd_eq_wl(args) -> int:
    s, _ = _read_structure(args.inp)
    _check_bytes(args, 8 * 4 * max(s.n, 1) ** args.dim)
    col = wl_refine(s, args.dim)
    doc = {"dim": args.dim, "rounds": col.rounds, "classes": len(col.histogram),
           "histogram": sorted(col.histogram.values())}
    if args.dim == 1:
        doc["colors"] = [int(x) for x in col.colors]
    _emit_report(doc, args)
    return EXIT_OK


def cmd_eq_ck(args) -> int:
    a, _ = _read_structure(args.a)
    b, _ = _read_structure(args.b)
    _check_bytes(args, 8 * 4 * max(a.n + b.n, 1) ** (args.k - 1))
    eq = ck_equivalent(a, b, args.k)
    _emit_report({"k": args.k, "equivalent": eq}, args)
    return EXIT_OK if eq else EXIT_NO


def cmd_eq_game(args) -> int:
    if args.pk:
        a, b = _read_cfi(args.a), _read_cfi(args.b)
        if a.join is None or b.join is None:
            raise UsageError("--pk needs CFI graphs built over a join (`cfi gen --base join.json`)")
        _check_bytes(args, 2 * max(a.graph.n, 1) ** (2 * args.k))
        v = pk_game_decide(a, b, args.k)
    else:
        a, _ = _read_structure(args.a)
        b, _ = _read_structure(args.b)
        _check_bytes(args, 2 * max(a.n, 1) ** (2 * args.k))
        v = bijective_game_decide(a, _int_list(args.pins_a), b, _int_list(args.pins_b), args.k,
                                  max_positions=args.budget_positions)
    _emit_report({"k": args.k, "winner": v.winner, "pk": bool(args.pk)}, args)
    return EXIT_NO if v.spoiler_wins else EXIT_OK


def cmd_wsc_canonize(args) -> int:
    s, _ = _read_structure(args.inp)
    ready = CfiReady() if args.oracle == "cfi" else BruteForceReady()
    canon = gurevich_canonize(s, ready)
    _emit_structure(canon, args)
    return EXIT_OK


def cmd_wsc_threshold(args) -> int:
    s, _ = _read_structure(args.inp)
    g = ColoredGraph(s.n, s.relations, s.colors, s.indiv)
    out = threshold_via_wsc(g)
    _emit_report({"verdict": out.verdict, "rounds": len(out.log)}, args)
    return EXIT_OK if out.value else EXIT_NO


def cmd_export(args) -> int:
    s, _ = _read_structure(args.inp)
    text = dimacs_text(s) if args.target == "dimacs" else dreadnaut_text(s)
    _emit_text(text, args)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    try:
        spec = load_spec(args.spec)
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.spec}")
    report = run_pipeline(spec, jobs=args.jobs)
    _emit_report(report, args)
    return EXIT_OK if report["pass"] else EXIT_NO


def replay(manifest_file) -> tuple[bool, str, str]:
    """Re-run the recorded command into a scratch file; compare output hashes."""
    m = InstanceManifest.load_doc(_read_doc(manifest_file))
    argv = list(m.command)
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "replay.out")
        if "--out" in argv:
            argv[argv.index("--out") + 1] = out
        else:
            argv += ["--out", out]
        cwd = os.getcwd()
        try:
            if m.cwd:
                os.chdir(m.cwd)
            code = main(argv)
        finally:
            os.chdir(cwd)
        if code != EXIT_OK or not os.path.exists(out):
            return False, m.output_sha256, ""
        got = sha256_file(out)
    return got == m.output_sha256, m.output_sha256, got


def cmd_verify_manifest(args) -> int:
    path = args.manifest or (str(args.inp) + ".manifest.json" if args.inp else None)
    if path is None:
        raise UsageError("give --manifest or --in")
    ok, want, got = replay(path)
    _emit_report({"manifest": str(path), "expected": want, "actual": got, "match": ok}, args)
    return EXIT_OK if ok else EXIT_NO


# -- parser ------------------------------------------------------------------------


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="PRNG seed (recorded in manifests)")
    p.add_argument("--budget-nodes", type=int, default=None, help="search-node limit for exact searches")
    p.add_argument("--budget-bytes", type=int, default=None, help="memory limit for WL and game tables")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "dimacs", "dreadnaut"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfiwsc", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True)

    def sub(group_parsers, name, func, help_):
        p = group_parsers.add_parser(name, help=help_)
        _shared(p)
        p.set_defaults(func=func)
        return p

    cfi = top.add_parser("cfi", help="CFI graphs").add_subparsers(dest="cmd", required=True)
    p = sub(cfi, "gen", cmd_cfi_gen, "build CFI(G, f)")
    p.add_argument("--base", required=True, help="file, join file, or K<n>/C<n>/prism[:mono]")
    p.add_argument("--twist", default="all-zero")
    p.add_argument("--variant", choices=VARIANTS, default=TWO_PAIR)
    p = sub(cfi, "recover", cmd_cfi_recover, "recover the base graph of a CFI graph")
    p.add_argument("--in", dest="inp", required=True)

    join = top.add_parser("join", help="color class joins").add_subparsers(dest="cmd", required=True)
    p = sub(join, "build", cmd_join_build, "join connected graphs with equal class counts")
    p.add_argument("--inputs", nargs="+", required=True)
    p = sub(join, "cfi-omega", cmd_join_omega, "join of CFI(G,0), CFI(G,g), CFI(G,1) copies")
    p.add_argument("--base", required=True)
    p.add_argument("--g", type=int, choices=(0, 1), required=True)
    p.add_argument("--k", type=int, default=1)

    mp = top.add_parser("multipede", help="multipede bases").add_subparsers(dest="cmd", required=True)
    p = sub(mp, "sample", cmd_multipede_sample, "sample a random bipartite base")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--odd-meager", type=int, default=None, metavar="K",
                   help="rejection-sample until odd and K-meager")
    p.add_argument("--emit", choices=("base", "multipede"), default="base")
    p = sub(mp, "check", cmd_multipede_check, "check oddness, meagerness, scatteredness")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--odd", action="store_true")
    p.add_argument("--meager", type=int, default=None, metavar="K")
    p.add_argument("--exact", action="store_true", help="exact meagerness without size bound")
    p.add_argument("--scattered", type=int, default=None, metavar="K")
    p.add_argument("--segments", default=None, help="segments to test for scatteredness")
    p.add_argument("--target", type=int, default=2, help="size of the greedy scattered set")

    gl = top.add_parser("glue", help="multipede-CFI gluings").add_subparsers(dest="cmd", required=True)
    p = sub(gl, "build", cmd_glue_build, "glue a single-pair CFI graph into a multipede")
    p.add_argument("--multipede", required=True, help="base file (relation C)")
    p.add_argument("--cfi", required=True, help="single-pair CFI file from `cfi gen`")
    p.add_argument("--segments", required=True, help="comma-separated segments, one per base edge")
    p = sub(gl, "extract", cmd_glue_extract, "extract the CFI graph from a gluing")
    p.add_argument("--in", dest="inp", required=True)

    eq = top.add_parser("eq", help="equivalence oracles").add_subparsers(dest="cmd", required=True)
    p = sub(eq, "wl", cmd_eq_wl, "stable d-dimensional WL coloring")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--dim", type=int, default=1)
    p = sub(eq, "ck", cmd_eq_ck, "C^k equivalence")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", type=int, required=True)
    p = sub(eq, "game", cmd_eq_game, "bijective k-pebble game")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pins-a", default=None)
    p.add_argument("--pins-b", default=None)
    p.add_argument("--pk", action="store_true", help="allow one P-move (CFI graphs over joins)")
    p.add_argument("--budget-positions", type=int, default=None)

    ws = top.add_parser("wsc", help="witnessed symmetric choice").add_subparsers(dest="cmd", required=True)
    p = sub(ws, "canonize", cmd_wsc_canonize, "canonize by witnessed choices")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--oracle", choices=("brute", "cfi"), default="brute")
    p = sub(ws, "threshold", cmd_wsc_threshold, "threshold-graph test")
    p.add_argument("--in", dest="inp", required=True)

    ex = top.add_parser("export", help="export a colored graph").add_subparsers(dest="target", required=True)
    for target in ("dimacs", "dreadnaut"):
        p = sub(ex, target, cmd_export, f"write {target} input")
        p.add_argument("--in", dest="inp", required=True)

    p = top.add_parser("pipeline", help="run a JSON check pipeline")
    _shared(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_pipeline)

    p = top.add_parser("verify-manifest", help="replay a manifest and compare hashes")
    _shared(p)
    p.add_argument("--manifest", default=None)
    p.add_argument("--in", dest="inp", default=None)
    p.set_defaults(func=cmd_verify_manifest)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    old = automorphisms.DEFAULT_BUDGET_NODES
    automorphisms.DEFAULT_BUDGET_NODES = args.budget_nodes
    try:
        return args.func(args)
    except (SizeLimitExceeded, BudgetExceeded, BoundExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except StepFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NO
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CfiwscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO
    finally:
        automorphisms.DEFAULT_BUDGET_NODES = old


if __name__ == "__main__":
    sys.exit(main())
