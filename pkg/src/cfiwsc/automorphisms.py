"""Exact isomorphism, automorphism and orbit computation.

The search individualizes one vertex at a time and refines the vertex
labelling to an equitable partition after each step, so only
color-compatible images are ever tried.  Automorphism groups are returned
as generating sets found level by level along one search path; orbits are
closures under those generators.  Everything is exponential in the worst
case and intended as a ground-truth oracle at desk scale.
"""

from __future__ import annotations

from collections import Counter
from itertools import product
from typing import Iterable, Sequence

from .errors import SizeLimitExceeded
from .structures import Permutation, RelStructure, compose, identity, inverse

DEFAULT_BOUND = 64
# node budget applied to searches called without an explicit one (set by the CLI)
DEFAULT_BUDGET_NODES: int | None = None

Labels = list[int]


def _check_bound(s: RelStructure, bound: int | None) -> None:
    b = DEFAULT_BOUND if bound is None else bound
    if s.n > b:
        raise SizeLimitExceeded(f"universe of size {s.n} exceeds the exact-search bound {b}")


def _initial_keys(s: RelStructure) -> list[tuple[int, int]]:
    col, pos = s.color_of, s.indiv_pos
    return [(col[v], pos[v]) for v in range(s.n)]


def _rank(keys_per_side: Sequence[Sequence]) -> list[Labels]:
    uniq = sorted(set(k for keys in keys_per_side for k in keys))
    idx = {k: i for i, k in enumerate(uniq)}
    return [[idx[k] for k in keys] for keys in keys_per_side]


def _signatures(s: RelStructure, lab: Labels) -> list:
    if s.is_binary_graph:
        nb = s.neighbors
        return [(lab[v], tuple(sorted(lab[u] for u in nb[v]))) for v in range(s.n)]
    inc = s.incidence
    return [
        (lab[v], tuple(sorted((ri, p, tuple(lab[x] for x in t)) for ri, p, t in inc[v])))
        for v in range(s.n)
    ]


def refine(structs: Sequence[RelStructure], labels: Sequence[Labels]) -> list[Labels] | None:
    """Jointly refine labellings of several structures to the coarsest equitable one.

    Labels are re-ranked over all sides together, so equal labels mean the
    same refinement class.  Returns None as soon as the label histograms of
    the sides differ (only meaningful when comparing two structures).
    """
    labels = [list(l) for l in labels]
    count = len(set(x for l in labels for x in l))
    while True:
        sigs = [_signatures(s, l) for s, l in zip(structs, labels)]
        labels = _rank(sigs)
        if len(labels) > 1:
            h0 = Counter(labels[0])
            if any(Counter(l) != h0 for l in labels[1:]):
                return None
        new_count = len(set(x for l in labels for x in l))
        if new_count == count:
            return labels
        count = new_count


def equitable_labels(s: RelStructure) -> Labels:
    """Isomorphism-invariant vertex labels of the coarsest equitable refinement."""
    return refine((s,), _rank([_initial_keys(s)]))[0]


def _individualize(lab: Labels, v: int) -> Labels:
    out = [2 * x for x in lab]
    out[v] += 1
    return out


def _target_cell(lab: Labels) -> list[int] | None:
    cnt = Counter(lab)
    cands = [c for c, m in cnt.items() if m > 1]
    if not cands:
        return None
    c = min(cands)
    return [v for v, x in enumerate(lab) if x == c]


def is_isomorphism(s: RelStructure, t: RelStructure, perm: Sequence[int]) -> bool:
    """Check that ``perm`` maps ``s`` onto ``t`` exactly."""
    if s.n != t.n or sorted(perm) != list(range(s.n)):
        return False
    if set(s.relations) != set(t.relations):
        return False
    for name, r in s.relations.items():
        rt = t.relations[name]
        if r.arity != rt.arity or len(r.tuples) != len(rt.tuples):
            return False
        for tup in r.tuples:
            if tuple(perm[x] for x in tup) not in rt.tuples:
                return False
    if len(s.colors) != len(t.colors):
        return False
    for ca, cb in zip(s.colors, t.colors):
        if sorted(perm[v] for v in ca) != list(cb):
            return False
    return tuple(perm[v] for v in s.indiv) == t.indiv


def is_automorphism(s: RelStructure, perm: Sequence[int]) -> bool:
    return is_isomorphism(s, s, perm)


def _compatible(s: RelStructure, t: RelStructure) -> bool:
    if s.n != t.n or len(s.indiv) != len(t.indiv):
        return False
    if {k: r.arity for k, r in s.relations.items()} != {k: r.arity for k, r in t.relations.items()}:
        return False
    if any(len(s.relations[k].tuples) != len(t.relations[k].tuples) for k in s.relations):
        return False
    return [len(c) for c in s.colors] == [len(c) for c in t.colors]


class _Budget:
    def __init__(self, nodes: int | None):
        self.left = nodes if nodes is not None else DEFAULT_BUDGET_NODES

    def tick(self) -> None:
        if self.left is not None:
            self.left -= 1
            if self.left < 0:
                raise SizeLimitExceeded("search node budget exhausted")


def _search(s: RelStructure, t: RelStructure, ls: Labels, lt: Labels,
            budget: _Budget) -> Permutation | None:
    """Depth-first search for an isomorphism compatible with equitable labellings."""
    budget.tick()
    cell = _target_cell(ls)
    if cell is None:
        where = {x: w for w, x in enumerate(lt)}
        perm = tuple(where[x] for x in ls)
        return perm if is_isomorphism(s, t, perm) else None
    v = cell[0]
    c = ls[v]
    ls2 = _individualize(ls, v)
    for w in (u for u, x in enumerate(lt) if x == c):
        res = refine((s, t), (ls2, _individualize(lt, w)))
        if res is None:
            continue
        found = _search(s, t, res[0], res[1], budget)
        if found is not None:
            return found
    return None


def isomorphic(s: RelStructure, t: RelStructure, *, bound: int | None = None,
               budget_nodes: int | None = None) -> Permutation | None:
    """Return an isomorphism ``s -> t`` (as image array) or None.

    Colors are matched class index to class index and the individualization
    position by position.
    """
    _check_bound(s, bound)
    _check_bound(t, bound)
    if not _compatible(s, t):
        return None
    init = _rank([_initial_keys(s), _initial_keys(t)])
    res = refine((s, t), init)
    if res is None:
        return None
    return _search(s, t, res[0], res[1], _Budget(budget_nodes))


def _orbit_of(v: int, gens: Sequence[Permutation]) -> set[int]:
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def automorphism_generators(s: RelStructure, *, bound: int | None = None,
                            budget_nodes: int | None = None) -> list[Permutation]:
    """A generating set of Aut(s), individualized vertices fixed pointwise.

    Generators are found bottom-up along the leftmost search path: at each
    level one automorphism is searched for every point of the target cell
    that is not yet in the orbit generated so far.
    """
    _check_bound(s, bound)
    budget = _Budget(budget_nodes)
    lab = refine((s,), _rank([_initial_keys(s)]))[0]
    levels = []
    while True:
        cell = _target_cell(lab)
        if cell is None:
            break
        v = cell[0]
        levels.append((lab, cell, v))
        lab = refine((s,), [_individualize(lab, v)])[0]
    gens: list[Permutation] = []
    for lab, cell, v in reversed(levels):
        orbit = _orbit_of(v, gens)
        lv = _individualize(lab, v)
        for w in cell:
            if w in orbit:
                continue
            res = refine((s, s), (lv, _individualize(lab, w)))
            if res is None:
                continue
            perm = _search(s, s, res[0], res[1], budget)
            if perm is not None:
                gens.append(perm)
                orbit = _orbit_of(v, gens)
    return gens


def group_elements(gens: Sequence[Permutation], n: int, limit: int | None = None) -> list[Permutation]:
    """All elements of the group generated by ``gens`` (BFS closure), sorted."""
    e = identity(n)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = compose(g, p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if limit is not None and len(seen) > limit:
                        raise SizeLimitExceeded(f"automorphism group larger than {limit}")
        frontier = nxt
    return sorted(seen)


def automorphisms(s: RelStructure, *, bound: int | None = None,
                  limit: int | None = 1_000_000) -> list[Permutation]:
    """Every automorphism of ``s`` fixing the individualization pointwise."""
    return group_elements(automorphism_generators(s, bound=bound), s.n, limit)


def orbits(s: RelStructure, k: int = 1, *, bound: int | None = None,
           gens: Sequence[Permutation] | None = None) -> list[frozenset]:
    """The k-orbits of ``s`` as a sorted list of frozensets.

    For ``k == 1`` the members are vertices, otherwise k-tuples.
    """
    if gens is None:
        gens = automorphism_generators(s, bound=bound)
    if k == 1:
        parent = list(range(s.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in gens:
            for x in range(s.n):
                a, b = find(x), find(g[x])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, list[int]] = {}
        for x in range(s.n):
            groups.setdefault(find(x), []).append(x)
        return sorted((frozenset(g) for g in groups.values()), key=min)
    seen: set = set()
    out = []
    for tup in product(range(s.n), repeat=k):
        if tup in seen:
            continue
        orb = {tup}
        stack = [tup]
        while stack:
            x = stack.pop()
            for g in gens:
                y = tuple(g[a] for a in x)
                if y not in orb:
                    orb.add(y)
                    stack.append(y)
        seen |= orb
        out.append(frozenset(orb))
    return out


def is_asymmetric(s: RelStructure, *, bound: int | None = None) -> bool:
    return not automorphism_generators(s, bound=bound)


def canonical_labeling(s: RelStructure, *, bound: int | None = None,
                       budget_nodes: int | None = None) -> tuple[Permutation, RelStructure]:
    """Exhaustive canonical labelling: minimum relabelled encoding over all leaves.

    Subtrees equivalent under automorphisms already found (those fixing the
    current prefix pointwise) are skipped.  Returns the labelling and the
    canonical form ``s.relabel(labelling)``.
    """
    _check_bound(s, bound)
    budget = _Budget(budget_nodes)
    best: list = [None, None]
    auts: list[Permutation] = []

    def leaf(lab: Labels):
        perm = tuple(lab)
        key = s.relabel(perm).key()
        if best[0] is None or key < best[0]:
            best[0], best[1] = key, perm
        elif key == best[0]:
            auts.append(compose(inverse(best[1]), perm))

    def rec(lab: Labels, prefix: tuple[int, ...]):
        budget.tick()
        cell = _target_cell(lab)
        if cell is None:
            leaf(_rank([lab])[0])
            return
        explored: list[int] = []
        for w in cell:
            if explored:
                fixing = [g for g in auts if all(g[x] == x for x in prefix)]
                if fixing and any(w in _orbit_of(u, fixing) for u in explored):
                    continue
            rec(refine((s,), [_individualize(lab, w)])[0], prefix + (w,))
            explored.append(w)

    lab0 = refine((s,), _rank([_initial_keys(s)]))[0]
    rec(lab0, ())
    perm = best[1]
    return perm, s.relabel(perm)


def canonical_form(s: RelStructure, **kw) -> RelStructure:
    return canonical_labeling(s, **kw)[1]


def tuple_orbit_map(orbs: Iterable[frozenset]) -> dict:
    """Map each element to the index of its orbit."""
    return {x: i for i, o in enumerate(orbs) for x in o}
