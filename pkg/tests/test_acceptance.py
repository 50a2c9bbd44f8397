"""Acceptance criteria 1-10, each checked exactly and reported as one PASS/FAIL line."""

import json
import random
from itertools import combinations

import pytest

from cfiwsc.automorphisms import automorphisms, canonical_form, isomorphic, orbits
from cfiwsc.cfi import (SINGLE_PAIR, all_twists, build_cfi, complete_graph, cycle_graph, parity,
                        prism_graph)
from cfiwsc.cli import main, replay
from cfiwsc.equivalence import bijective_game_decide, ck_equivalent
from cfiwsc.gluing import classify_fixed_segments, extract_cfi, glue
from cfiwsc.joins import cfi_omega
from cfiwsc.multipede import (BipartiteBase, build_multipede, closure, is_k_meager, is_odd,
                              is_odd_bruteforce, sample_bipartite, scattered_set)
from cfiwsc.structures import ColoredGraph, identity
from cfiwsc.wsc import BruteForceReady, gurevich_canonize, order_k_orbits, threshold_via_wsc

import lemma_checks as lc
from conftest import random_graph, random_perm, report_criterion
from corpus import corpus


# -- 1: CFI parity law ---------------------------------------------------------------


def small_bases():
    """Connected graphs with n <= 6, |E| <= 6 and minimum degree 2, one per isomorphism class."""
    seen, out = set(), []
    for n in range(3, 7):
        pairs = list(combinations(range(n), 2))
        for m in range(n, 7):
            for edges in combinations(pairs, m):
                deg = [0] * n
                for a, b in edges:
                    deg[a] += 1
                    deg[b] += 1
                if min(deg) < 2:
                    continue
                g = ColoredGraph.from_edges(n, edges)
                if not g.is_connected():
                    continue
                key = canonical_form(g)
                if key not in seen:
                    seen.add(key)
                    out.append(ColoredGraph.from_edges(n, edges, [[v] for v in range(n)]))
    return out


def twist_classes(base):
    """Isomorphism classes of CFI(base, f) over all twists, by comparison with class representatives."""
    reps, cls = [], {}
    for f in all_twists(base):
        g = build_cfi(base, f).graph
        for i, (_, r) in enumerate(reps):
            if isomorphic(g, r) is not None:
                cls[f] = i
                break
        else:
            cls[f] = len(reps)
            reps.append((f, g))
    return cls


def test_criterion_1_cfi_parity_law():
    bases = small_bases()
    rng = random.Random(1)
    pairs = direct = 0
    ok = len(bases) >= 8
    for base in bases:
        cls = twist_classes(base)
        twists = list(cls)
        for f in twists:
            for g in twists:
                pairs += 1
                ok &= (cls[f] == cls[g]) == (parity(f) == parity(g))
        # double entry: direct isomorphism tests on sampled pairs
        for _ in range(40):
            f, g = rng.choice(twists), rng.choice(twists)
            direct += 1
            iso = isomorphic(build_cfi(base, f).graph, build_cfi(base, g).graph) is not None
            ok &= iso == (parity(f) == parity(g))
    report_criterion(1, ok, f"{len(bases)} bases, {pairs} twist pairs, {direct} direct checks")
    assert ok


# -- 2: two-parity CFI graphs are C^k-equivalent below the treewidth -------------------


def test_criterion_2_cfi_equivalence_instances():
    c3, k4 = cycle_graph(3), complete_graph(4)
    a3, b3 = build_cfi(c3, 0).graph, build_cfi(c3, 1).graph
    a4, b4 = build_cfi(k4, 0).graph, build_cfi(k4, 1).graph
    checks = [ck_equivalent(a3, b3, 2), ck_equivalent(a4, b4, 3),
              isomorphic(a3, b3) is None, isomorphic(a4, b4) is None]
    ok = all(checks)
    report_criterion(2, ok, "C3 at k=2, K4 at k=3, both pairs non-isomorphic")
    assert ok


# -- 3: game and logic agree ------------------------------------------------------------


def test_criterion_3_game_logic_agreement():
    cs = corpus()
    assert len(cs) >= 30 and max(s.n for s in cs) <= 8
    mismatches, pairs, dup = [], 0, 0
    for k in (2, 3):
        for i, j in combinations(range(len(cs)), 2):
            a, b = cs[i], cs[j]
            spoiler = bijective_game_decide(a, (), b, (), k).spoiler_wins
            eq = ck_equivalent(a, b, k)
            pairs += 1
            dup += not spoiler
            if spoiler == eq:
                mismatches.append((k, i, j))
        for a in cs:
            pairs += 1
            if bijective_game_decide(a, (), a, (), k).spoiler_wins or not ck_equivalent(a, a, k):
                mismatches.append((k, "self"))
    ok = not mismatches
    report_criterion(3, ok, f"{len(cs)} structures, {pairs} pairs, {dup} non-trivial Duplicator wins")
    assert ok, mismatches[:5]


# -- 4: odd bases give asymmetric multipedes ---------------------------------------------


def test_criterion_4_multipede_asymmetry():
    asym = []
    for n, eps, seeds in [(12, 0.8, range(40)), (16, 0.7, range(40))]:
        found = 0
        for s in seeds:
            b = sample_bipartite(n, eps, s)
            if not is_odd(b):
                continue
            m = build_multipede(b).structure
            asym.append(automorphisms(m, bound=None) == [identity(m.n)])
            found += 1
            if found == 4:
                break
    rng = random.Random(4)
    agree, odd_count = 0, 0
    for t in range(150):
        n = rng.randint(4, 16)
        b = sample_bipartite(n, rng.choice([0.6, 0.8, 0.9, 0.95]), 1000 + t)
        odd_count += is_odd(b)
        agree += is_odd(b) == is_odd_bruteforce(b)
    ok = len(asym) >= 5 and all(asym) and agree == 150 and 0 < odd_count < 150
    report_criterion(4, ok, f"{sum(asym)}/{len(asym)} asymmetric, rank test agrees on {agree}/150 "
                            f"bases ({odd_count} odd)")
    assert ok


# -- 5: closure battery ------------------------------------------------------------------

LEMMA_SEEDS = (2, 11, 19)


def verified_bases():
    out = []
    for s in LEMMA_SEEDS:
        b = sample_bipartite(30, 0.3, s)
        # the printed density and the strict density that bounds closures
        assert is_k_meager(b, 4, bound=None)
        assert is_k_meager(b, 4, bound=None, ratio=0.5, max_size=9)
        out.append(b)
    return out


def test_criterion_5_closure_battery():
    bases = verified_bases()
    rng = random.Random(5)
    k = 2
    fails = {name: 0 for name in "size a b c d e".split()}
    exhaustive = 0
    nontrivial = 0
    for b in bases:
        for r in range(5):
            for x in combinations(range(b.n_segments), r):
                exhaustive += 1
                c = closure(b, x)
                nontrivial += len(c) > len(x)
                fails["size"] += len(c) > 2 * len(x)
        for _ in range(1000):
            x = rng.sample(range(b.n_segments), rng.randint(0, 8))
            fails["a"] += not lc.component_split(b, x)
            y = closure(b, rng.sample(range(b.n_segments), rng.randint(0, 4)))
            far = lc.far_segments(b, y)
            if far:
                fails["b"] += not lc.singleton_far_segment(b, y, rng.choice(far))
            xs = lc.random_scattered(b, 6 * k, rng)
            ys = rng.sample(range(b.n_segments), rng.randint(0, k))
            if rng.random() < 0.5 and xs:
                # let Y overlap the scattered set
                ys = list(set(ys[:-1]) | {rng.choice(xs)})
            fails["c"] += not lc.few_lose_singleton(b, xs, ys)
            fails["d"] += not lc.distance_partition(b, xs, ys)
            fails["e"] += not lc.new_vertices_bound(b, xs, ys)
    ok = not any(fails.values()) and nontrivial > 0
    report_criterion(5, ok, f"{len(bases)} bases, {exhaustive} exhaustive sets "
                            f"({nontrivial} with growing closure), 1000 draws per lemma per base, "
                            f"failures {fails}")
    assert ok


# -- 6: gluing roundtrip and asymmetry -----------------------------------------------------

GLUE_SEEDS = (7, 11, 14)


def test_criterion_6_gluing_roundtrip():
    ok, roundtrips, asym = True, 0, 0
    for h in (complete_graph(4), prism_graph()):
        refs = {f: build_cfi(h, f, SINGLE_PAIR) for f in (0, 1)}
        for s in GLUE_SEEDS:
            b = sample_bipartite(12, 0.8, s)
            assert is_odd(b)
            m = build_multipede(b)
            x = sorted(random.Random(s).sample(range(12), len(h.edges)))
            for f, c in refs.items():
                g = glue(m, x, c)
                e = extract_cfi(g)
                roundtrips += 1
                ok &= isomorphic(e, c.graph) is not None
                ok &= isomorphic(e, refs[1 - f].graph) is None
                if g.structure.n <= 40:
                    asym += 1
                    ok &= automorphisms(g.structure) == [identity(g.structure.n)]
    ok &= asym >= 6
    report_criterion(6, ok, f"{roundtrips} roundtrips, {asym} asymmetric gluings with universe <= 40")
    assert ok


# -- 7: fixed segments ---------------------------------------------------------------------


def test_criterion_7_fixed_segment_bound():
    k, r = 3, 3
    rng = random.Random(7)
    draws, ok, worst = 0, True, 0.0
    for s in (2, 8, 11):
        b = sample_bipartite(30, 0.3, s)
        assert is_k_meager(b, 2 * k, bound=None)
        assert is_k_meager(b, 2 * k, bound=None, ratio=0.5, max_size=4 * k + 1)
        x = scattered_set(b, 6 * k, 6)
        assert x.complete
        g = glue(build_multipede(b), x.segments, build_cfi(complete_graph(4), rng.randrange(2),
                                                            SINGLE_PAIR))
        nf = g.multipede.structure.n
        near = [v for v in range(nf) if lc.distance_to_set(b, v // 2, x.segments) <= 4]
        gadgets = list(range(nf, g.structure.n))
        for _ in range(334):
            size = rng.randint(1, k)
            pool = range(g.structure.n) if rng.random() < 0.5 else near + gadgets
            pins = rng.sample(list(pool), size)
            fs = classify_fixed_segments(g, pins)
            total = len(fs.total)
            worst = max(worst, total / size)
            ok &= total <= r * size
            draws += 1
    report_criterion(7, ok, f"{draws} pin tuples, worst ratio {worst:.2f} <= {r}")
    assert ok


# -- 8: WSC threshold engine ---------------------------------------------------------------


def threshold_by_forbidden_subgraphs(g):
    """Threshold graphs are exactly those without induced 2K2, P4 or C4."""
    nb = [set(x) for x in g.neighbors]
    for quad in combinations(range(g.n), 4):
        degs = sorted(len(nb[v] & set(quad)) for v in quad)
        edges = sum(degs) // 2
        if edges == 2 and degs == [1, 1, 1, 1]:
            return False
        if edges == 3 and degs == [1, 1, 2, 2]:
            return False
        if edges == 4 and degs == [2, 2, 2, 2]:
            return False
    return True


def all_graphs(n):
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield ColoredGraph.from_edges(n, [p for i, p in enumerate(pairs) if mask >> i & 1])


def test_criterion_8_wsc_threshold():
    ok, count, rejected = True, 0, 0
    graphs = [g for n in range(1, 6) for g in all_graphs(n)]
    rng = random.Random(8)
    for _ in range(10_000):
        graphs.append(random_graph(rng.choice([6, 7]), rng.random(), rng))
    for g in graphs:
        out = threshold_via_wsc(g)
        rejected += not out.accepted
        ok &= out.accepted and out.value == threshold_by_forbidden_subgraphs(g)
        count += 1
    sample = rng.sample(graphs, 100)
    for g in sample:
        want = threshold_via_wsc(g).verdict
        h = g.relabel(random_perm(g.n, rng))
        ok &= threshold_via_wsc(h).verdict == want
        ok &= threshold_via_wsc(g, pick="max").verdict == want
        ok &= threshold_via_wsc(h, pick="random", seed=rng.randrange(10 ** 6)).verdict == want
    report_criterion(8, ok, f"{count} graphs, {rejected} rejected runs, 100-instance invariance sample")
    assert ok


# -- 9: canonization -----------------------------------------------------------------------


def canon_corpus():
    c3, k4 = cycle_graph(3), complete_graph(4)
    out = [build_cfi(c3, f).graph for f in all_twists(c3)]
    out += [build_cfi(k4, f).graph for f in all_twists(k4)]
    out.append(cfi_omega(c3, 0, 1).graph)
    rng = random.Random(9)
    for _ in range(10):
        out.append(random_graph(rng.randint(5, 9), 0.4, rng, classes=2))
    return out


@pytest.mark.slow
def test_criterion_9_canonization():
    ready = BruteForceReady()
    cs = canon_corpus()
    canons = [gurevich_canonize(s, ready) for s in cs]
    ok = True
    for s, c in zip(cs, canons):
        ok &= c.indiv == tuple(range(s.n))
        ok &= isomorphic(c.without_indiv(), s) is not None
    pairs = 0
    for i, j in combinations(range(len(cs)), 2):
        if cs[i].n != cs[j].n:
            ok &= canons[i] != canons[j]
            continue
        pairs += 1
        ok &= (canons[i] == canons[j]) == (isomorphic(cs[i], cs[j]) is not None)
    orbit_checks = 0
    for s in cs:
        ok &= {frozenset(v for (v,) in c) for c in order_k_orbits(s, 1, ready)} == set(orbits(s, 1))
        ok &= {frozenset(c) for c in order_k_orbits(s, 2, ready)} == set(orbits(s, 2))
        orbit_checks += 2
    report_criterion(9, ok, f"{len(cs)} structures, {pairs} same-size pairs, {orbit_checks} orbit orders")
    assert ok


# -- 10: manifests replay ------------------------------------------------------------------


def test_criterion_10_reproducibility(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    commands = [
        ["cfi", "gen", "--base", "K4", "--twist", "odd", "--out", "k4.json"],
        ["cfi", "gen", "--base", "prism", "--twist", "0x5", "--variant", "single-pair", "--out", "p.json"],
        ["cfi", "gen", "--base", "C5", "--variant", "relational", "--out", "c5.json"],
        ["cfi", "gen", "--base", "K4", "--variant", "single-pair", "--out", "k4s.json"],
        ["cfi", "gen", "--base", "K4", "--format", "dimacs", "--out", "k4.dimacs"],
        ["multipede", "sample", "--n", "12", "--epsilon", "0.8", "--seed", "7", "--out", "b.json"],
        ["multipede", "sample", "--n", "14", "--epsilon", "0.7", "--seed", "1", "--odd-meager", "2",
         "--out", "bm.json"],
        ["multipede", "sample", "--n", "10", "--epsilon", "0.9", "--seed", "3", "--emit", "multipede",
         "--out", "mp.json"],
        ["join", "cfi-omega", "--base", "C3", "--g", "1", "--out", "omega.json"],
        ["glue", "build", "--multipede", "b.json", "--cfi", "k4s.json", "--segments", "0,2,4,6,8,10",
         "--out", "glued.json"],
    ]
    ok, n = True, 0
    for argv in commands:
        assert main(argv) == 0
        out = argv[argv.index("--out") + 1]
        manifest = tmp_path / f"{out}.manifest.json"
        doc = json.loads(manifest.read_text())
        same, want, got = replay(manifest)
        ok &= same and doc["output_sha256"] == want == got
        n += 1
    report_criterion(10, ok, f"{n} generator commands replayed byte-identically")
    assert ok
