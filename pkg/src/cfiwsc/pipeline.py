"""Declarative check pipelines.

A spec is JSON of the form ``{"steps": [{"id": ..., "op": ..., "params": {...}}]}``.
Each op builds its instances, checks one property and returns
``(passed, details)``; the report lists the steps in spec order.
"""

from __future__ import annotations

import json
import re
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable

from .automorphisms import is_asymmetric, isomorphic
from .cfi import (TWO_PAIR, all_twists, build_cfi, complete_graph, cycle_graph,
                  normalize_twist, parity, prism_graph)
from .equivalence import ck_equivalent
from .errors import CfiwscError
from .multipede import build_multipede, is_odd, sample_bipartite
from .structures import ColoredGraph, load
from .wsc import BruteForceReady, CfiReady, gurevich_canonize


class StepFailure(CfiwscError):
    def __init__(self, step_id: str, cause: BaseException):
        super().__init__(f"step {step_id!r} failed: {cause}")
        self.step_id = step_id
        self.cause = cause


def resolve_base(spec) -> ColoredGraph:
    """A base graph from a name (``K4``, ``C5``, ``prism``; ``:mono`` drops colors),
    an inline JSON structure, or a path to one."""
    if isinstance(spec, dict):
        return ColoredGraph.from_json(spec)
    text = str(spec)
    name, _, opt = text.partition(":")
    ordered = opt != "mono"
    m = re.fullmatch(r"([KC])(\d+)", name)
    if m:
        n = int(m.group(2))
        return complete_graph(n, ordered) if m.group(1) == "K" else cycle_graph(n, ordered)
    if name == "prism":
        return prism_graph(ordered)
    s = load(text)
    return ColoredGraph(s.n, s.relations, s.colors, s.indiv)


def _twists(base, spec) -> list[tuple[int, ...]]:
    if spec in (None, "all"):
        return all_twists(base)
    return [normalize_twist(base, f) for f in spec]


def op_cfi_parity_suite(params: dict) -> tuple[bool, dict]:
    """CFI(G, 0) is isomorphic to CFI(G, f) exactly for even twists f."""
    base = resolve_base(params["base"])
    variant = params.get("variant", TWO_PAIR)
    ref = build_cfi(base, 0, variant).graph
    verdicts = []
    for f in _twists(base, params.get("twists")):
        iso = isomorphic(ref, build_cfi(base, f, variant).graph) is not None
        verdicts.append({"twist": "".join(map(str, f)), "isomorphic": iso,
                         "expected": parity(f) == 0})
    ok = all(v["isomorphic"] == v["expected"] for v in verdicts)
    return ok, {"base_edges": len(base.edges), "verdicts": verdicts}


def op_ck_equivalence(params: dict) -> tuple[bool, dict]:
    """Counting-logic equivalence of two CFI graphs against an expected answer."""
    base = resolve_base(params["base"])
    f, g = params.get("twists", [0, 1])
    k = int(params["k"])
    got = ck_equivalent(build_cfi(base, f).graph, build_cfi(base, g).graph, k)
    expect = params.get("expect")
    return (expect is None or got == bool(expect)), {"equivalent": got, "k": k}


def op_canonize_cfi(params: dict) -> tuple[bool, dict]:
    """Canons of CFI graphs coincide exactly when the twist parities do."""
    base = resolve_base(params["base"])
    ready = CfiReady() if params.get("oracle", "cfi") == "cfi" else BruteForceReady()
    canons = {}
    for f in _twists(base, params.get("twists")):
        c = gurevich_canonize(build_cfi(base, f).graph, ready)
        canons["".join(map(str, f))] = (parity(f), c.key())
    keys = {p: {k for q, k in canons.values() if q == p} for p in (0, 1)}
    ok = all(len(v) <= 1 for v in keys.values()) and not (keys[0] & keys[1])
    return ok, {"twists": len(canons), "distinct_canons": len({k for _, k in canons.values()})}


def op_multipede_asymmetry(params: dict) -> tuple[bool, dict]:
    """Multipedes over sampled odd bases have no non-trivial automorphism."""
    n, eps = int(params["n"]), float(params["epsilon"])
    seed, count = int(params.get("seed", 0)), int(params.get("count", 1))
    found = []
    s = seed
    while len(found) < count and s < seed + 1000:
        b = sample_bipartite(n, eps, s)
        if is_odd(b):
            m = build_multipede(b)
            found.append({"seed": s, "asymmetric": is_asymmetric(m.structure, bound=None)})
        s += 1
    ok = len(found) == count and all(x["asymmetric"] for x in found)
    return ok, {"instances": found}


OPS: dict[str, Callable[[dict], tuple[bool, dict]]] = {
    "cfi-parity-suite": op_cfi_parity_suite,
    "ck-equivalence": op_ck_equivalence,
    "canonize-cfi": op_canonize_cfi,
    "multipede-asymmetry": op_multipede_asymmetry,
}


def _run_step(step: dict) -> dict:
    sid = str(step.get("id", step["op"]))
    t = time.perf_counter()
    try:
        ok, details = OPS[step["op"]](step.get("params", {}))
    except Exception as exc:  # reported with the step id
        raise StepFailure(sid, exc) from exc
    return {"id": sid, "op": step["op"], "pass": bool(ok), "details": details,
            "timing_s": round(time.perf_counter() - t, 6)}


def run_pipeline(spec: dict, *, jobs: int = 1) -> dict:
    """Run every step; ``jobs > 1`` runs independent steps in worker processes."""
    steps = list(spec.get("steps", []))
    for i, st in enumerate(steps):
        if st.get("op") not in OPS:
            raise ValueError(f"step {st.get('id', i)!r}: unknown op {st.get('op')!r}; "
                             f"known ops: {', '.join(sorted(OPS))}")
    if jobs > 1 and len(steps) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_step, steps))
    else:
        results = [_run_step(st) for st in steps]
    return {"steps": results, "pass": all(r["pass"] for r in results)}


def load_spec(path) -> dict:
    return json.loads(Path(path).read_text())


def without_timings(report: dict) -> dict:
    """The report minus wall-clock fields, for determinism comparisons."""
    return {**report, "steps": [{k: v for k, v in st.items() if k != "timing_s"}
                                for st in report["steps"]]}
