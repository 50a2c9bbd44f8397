"""CFI gadgets and CFI graphs over colored base graphs.

Three variants are built:

* ``two-pair``: one edge-vertex pair per directed base edge, pairs across a
  base edge joined by the twisted matching.
* ``relational``: as two-pair, but each gadget is a d-ary relation over its
  edge vertices instead of gadget vertices.
* ``single-pair``: the cross matching of two-pair contracted, leaving one
  pair per undirected base edge (the form used for gluing).

Vertex colors come from the base colors: an edge vertex with origin
``(u, v)`` gets the packed pair ``(color(u), color(v))`` (sorted for
single-pair), a gadget vertex gets ``color(u)``; all edge-vertex classes come
before the gadget classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    ArityBoundExceeded,
    CycleRemainsError,
    DisconnectedBaseError,
    NotAPathError,
    NotCfiShapedError,
    WrongVariant,
)
from .structures import ColoredGraph, Permutation, RelStructure

TWO_PAIR = "two-pair"
RELATIONAL = "relational"
SINGLE_PAIR = "single-pair"
VARIANTS = (TWO_PAIR, RELATIONAL, SINGLE_PAIR)
MAX_RELATION_ARITY = 8


class GadgetOrigin(NamedTuple):
    vertex: int
    bits: tuple[int, ...]


class EdgeOrigin(NamedTuple):
    edge: tuple[int, int]
    index: int


def even_vectors(d: int) -> list[tuple[int, ...]]:
    """All vectors of F2^d with even weight, in lexicographic order."""
    return [b for b in product((0, 1), repeat=d) if sum(b) % 2 == 0]


# -- twists ---------------------------------------------------------------


def _base_edges(base) -> tuple[tuple[int, int], ...]:
    return _graph_of(base).edges


def normalize_twist(base, f) -> tuple[int, ...]:
    """Twist as a bit tuple aligned with the base's sorted edge list.

    Accepts an int ``p`` (the parity representative: 1 on the first edge iff
    ``p`` is odd), a bit sequence, a mapping from edges, or a
    string of ``0``/``1`` characters.
    """
    edges = _base_edges(base)
    if isinstance(f, str):
        f = [int(ch) for ch in f]
    if isinstance(f, int):
        return tuple([f % 2] + [0] * (len(edges) - 1)) if edges else ()
    if isinstance(f, Mapping):
        bits = []
        for u, v in edges:
            val = f.get((u, v), f.get((v, u), 0))
            bits.append(int(val) % 2)
        return tuple(bits)
    bits = tuple(int(x) % 2 for x in f)
    if len(bits) != len(edges):
        raise ValueError(f"twist has {len(bits)} bits but base has {len(edges)} edges")
    return bits


def parity(f) -> int:
    """Sum of the twist values over GF(2)."""
    if isinstance(f, CfiGraph):
        f = f.twist
    if isinstance(f, Mapping):
        f = f.values()
    return sum(int(x) for x in f) % 2


def twist_with_parity(base, p: int) -> tuple[int, ...]:
    """The twist that is 1 on the first edge iff ``p`` is odd, 0 elsewhere."""
    m = len(_base_edges(base))
    return tuple([p % 2] + [0] * (m - 1)) if m else ()


def all_twists(base) -> list[tuple[int, ...]]:
    return list(product((0, 1), repeat=len(_base_edges(base))))


# -- data -------------------------------------------------------------------


def _graph_of(base) -> ColoredGraph:
    return base.graph if hasattr(base, "join_vertices") else base


@dataclass(frozen=True, eq=False)
class CfiGraph:
    """A CFI graph together with its construction data."""

    graph: RelStructure
    base: ColoredGraph
    variant: str
    origin: tuple
    twist: tuple[int, ...]
    join: object = None

    @cached_property
    def vertex_of(self) -> dict:
        """Inverse of ``origin``."""
        return {o: v for v, o in enumerate(self.origin)}

    @cached_property
    def gadget_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, o in enumerate(self.origin) if isinstance(o, GadgetOrigin))

    @cached_property
    def edge_vertices(self) -> tuple[int, ...]:
        return tuple(v for v, o in enumerate(self.origin) if isinstance(o, EdgeOrigin))

    def pair(self, edge: tuple[int, int]) -> tuple[int, int]:
        return (self.vertex_of[EdgeOrigin(edge, 0)], self.vertex_of[EdgeOrigin(edge, 1)])

    def base_vertex(self, v: int) -> int:
        o = self.origin[v]
        return o.vertex if isinstance(o, GadgetOrigin) else o.edge[0]

    def twist_map(self) -> dict[tuple[int, int], int]:
        return dict(zip(self.base.edges, self.twist))

    def meta(self) -> dict:
        """JSON-ready construction data."""
        doc = {
            "variant": self.variant,
            "base": self.base.to_json(),
            "twist": "".join(map(str, self.twist)),
            "origin": [
                ["g", o.vertex, list(o.bits)] if isinstance(o, GadgetOrigin)
                else ["e", list(o.edge), o.index]
                for o in self.origin
            ],
        }
        if self.join is not None:
            from .joins import join_meta

            doc["join"] = join_meta(self.join)
        return doc

    @classmethod
    def from_meta(cls, graph: RelStructure, meta: Mapping) -> "CfiGraph":
        origin = tuple(
            GadgetOrigin(o[1], tuple(o[2])) if o[0] == "g" else EdgeOrigin(tuple(o[1]), o[2])
            for o in meta["origin"]
        )
        base = ColoredGraph.from_json(meta["base"])
        twist = tuple(int(ch) for ch in meta["twist"])
        join = None
        if "join" in meta:
            from .joins import join_from_meta

            join = join_from_meta(base, meta["join"])
        return cls(graph, base, meta["variant"], origin, twist, join)


# -- construction -----------------------------------------------------------


def build_gadget(d: int, variant: str = TWO_PAIR) -> RelStructure:
    """The degree-``d`` gadget alone, each edge-vertex pair in its own color.

    Edge vertex ``a_ij`` has id ``2*i + j``; gadget vertices follow.
    """
    if d < 1:
        raise ValueError("gadget degree must be at least 1")
    colors = [[2 * i, 2 * i + 1] for i in range(d)]
    vecs = even_vectors(d)
    if variant == RELATIONAL:
        if d > MAX_RELATION_ARITY:
            raise ArityBoundExceeded(f"relational gadget of degree {d} > {MAX_RELATION_ARITY}")
        tuples = {tuple(2 * i + b[i] for i in range(d)) for b in vecs}
        return RelStructure(2 * d, {"G": (d, tuples)}, colors)
    if variant not in (TWO_PAIR, SINGLE_PAIR):
        raise ValueError(f"unknown variant {variant}")
    edges = []
    for j, b in enumerate(vecs):
        g = 2 * d + j
        edges += [(g, 2 * i + b[i]) for i in range(d)]
    colors.append(list(range(2 * d, 2 * d + len(vecs))))
    return ColoredGraph.from_edges(2 * d + len(vecs), edges, colors)


def _class_list(keys: Sequence) -> list[list[int]]:
    classes: dict = {}
    for v, k in enumerate(keys):
        classes.setdefault(k, []).append(v)
    return [classes[k] for k in sorted(classes)]


def build_cfi(base, f=0, variant: str = TWO_PAIR) -> CfiGraph:
    """Construct CFI(base, f) in the requested variant."""
    join = base if hasattr(base, "join_vertices") else None
    g = _graph_of(base)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant}")
    if not g.is_connected():
        raise DisconnectedBaseError("CFI base must be connected")
    if any(g.degree(u) < 1 for u in range(g.n)):
        raise DisconnectedBaseError("every base vertex needs degree at least 1")
    twist = normalize_twist(g, f)
    tw = dict(zip(g.edges, twist))
    col = g.color_of
    nbrs = g.neighbors
    origin: list = []
    keys: list = []
    vid: dict = {}

    def add(o, key):
        vid[o] = len(origin)
        origin.append(o)
        keys.append(key)

    if variant == SINGLE_PAIR:
        for u, v in g.edges:
            for k in (0, 1):
                add(EdgeOrigin((u, v), k), (0, min(col[u], col[v]), max(col[u], col[v])))
    else:
        for u in range(g.n):
            for v in nbrs[u]:
                for k in (0, 1):
                    add(EdgeOrigin((u, v), k), (0, col[u], col[v]))
    if variant != RELATIONAL:
        for u in range(g.n):
            for b in even_vectors(len(nbrs[u])):
                add(GadgetOrigin(u, b), (1, col[u]))

    edges = []
    rels: dict[str, tuple[int, set]] = {}
    if variant == SINGLE_PAIR:
        for u in range(g.n):
            for b in even_vectors(len(nbrs[u])):
                x = vid[GadgetOrigin(u, b)]
                for i, w in enumerate(nbrs[u]):
                    if u < w:
                        edges.append((x, vid[EdgeOrigin((u, w), b[i])]))
                    else:
                        e = (w, u)
                        edges.append((x, vid[EdgeOrigin(e, (b[i] + tw[e]) % 2)]))
    else:
        for u, v in g.edges:
            for k in (0, 1):
                edges.append((vid[EdgeOrigin((u, v), k)], vid[EdgeOrigin((v, u), (k + tw[(u, v)]) % 2)]))
        for u in range(g.n):
            d = len(nbrs[u])
            for b in even_vectors(d):
                ends = [vid[EdgeOrigin((u, w), b[i])] for i, w in enumerate(nbrs[u])]
                if variant == TWO_PAIR:
                    x = vid[GadgetOrigin(u, b)]
                    edges += [(x, y) for y in ends]
                else:
                    if d > MAX_RELATION_ARITY:
                        raise ArityBoundExceeded(f"gadget degree {d} > {MAX_RELATION_ARITY}")
                    rels.setdefault(f"G{d}", (d, set()))[1].add(tuple(ends))

    n = len(origin)
    colors = _class_list(keys)
    if variant == RELATIONAL:
        e = set()
        for a, b in edges:
            e.add((a, b))
            e.add((b, a))
        rels["E"] = (2, e)
        graph: RelStructure = RelStructure(n, rels, colors)
    else:
        graph = ColoredGraph.from_edges(n, edges, colors)
    return CfiGraph(graph, g, variant, tuple(origin), twist, join)


# -- twist algebra ----------------------------------------------------------


def path_twist_iso(c: CfiGraph, path: Sequence[int]) -> tuple[CfiGraph, Permutation]:
    """Move twists along a base path.

    Every internal path vertex flips the two edge-vertex pairs it uses; a
    closed path also flips at its start.  The result is CFI(G, g') with g'
    differing from the twist exactly on the first and last path edge, and
    the permutation maps ``c.graph`` onto the new graph.
    """
    if c.variant != TWO_PAIR:
        raise WrongVariant("path isomorphisms are implemented for the two-pair variant")
    path = list(path)
    g = c.base
    if len(path) < 2:
        raise NotAPathError("a path needs at least two vertices")
    for a, b in zip(path, path[1:]):
        if b not in g.neighbors[a]:
            raise NotAPathError(f"{a} and {b} are not adjacent in the base")
    flips: set[tuple[int, int]] = set()

    def toggle(e):
        flips.symmetric_difference_update({e})

    closed = len(path) > 2 and path[0] == path[-1]
    last = len(path) - 1
    for i in range(1, last):
        toggle((path[i], path[i - 1]))
        toggle((path[i], path[i + 1]))
    if closed:
        toggle((path[0], path[1]))
        toggle((path[-1], path[-2]))
    new_twist = []
    for (u, v), val in zip(g.edges, c.twist):
        new_twist.append((val + ((u, v) in flips) + ((v, u) in flips)) % 2)
    target = build_cfi(c.join if c.join is not None else g, tuple(new_twist), TWO_PAIR)
    perm = [0] * c.graph.n
    nbrs = g.neighbors
    for v, o in enumerate(c.origin):
        if isinstance(o, EdgeOrigin):
            img = EdgeOrigin(o.edge, (o.index + (o.edge in flips)) % 2)
        else:
            bits = tuple((b + ((o.vertex, w) in flips)) % 2 for b, w in zip(o.bits, nbrs[o.vertex]))
            img = GadgetOrigin(o.vertex, bits)
        perm[v] = target.vertex_of[img]
    return target, tuple(perm)


# -- base recovery ------------------------------------------------------------


class RecoveredBase(NamedTuple):
    base: ColoredGraph
    orig: list[tuple[int, int]]
    origin: dict


def _bfs(nbrs, src: int, depth: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    for d in range(1, depth + 1):
        nxt = []
        for x in frontier:
            for y in nbrs[x]:
                if y not in dist:
                    dist[y] = d
                    nxt.append(y)
        frontier = nxt
    return dist


def is_gadget_vertex(g: ColoredGraph, u: int) -> bool:
    """Every neighbor has two further neighbors of different colors."""
    nbrs, col = g.neighbors, g.color_of
    if not nbrs[u]:
        return False
    for v in nbrs[u]:
        cols = {col[w] for w in nbrs[v] if w != u}
        if len(cols) < 2:
            return False
    return True


def recover_base(g: RelStructure) -> RecoveredBase:
    """Recover the base graph of a two-pair CFI graph by distances.

    Gadget vertices at distance 2 or 4 share their origin, distance 3 or 5
    means adjacent origins.  Individualized vertices are translated into
    the list of individualized directed base edges; an individualized
    gadget vertex stands for all its incident edge vertices.
    """
    if not g.is_binary_graph:
        raise NotCfiShapedError("base recovery needs a colored graph")
    nbrs, col = g.neighbors, g.color_of
    gadget = [u for u in range(g.n) if is_gadget_vertex(g, u)]
    if not gadget:
        raise NotCfiShapedError("no vertex satisfies the gadget-vertex predicate")
    gset = set(gadget)
    dist = {u: _bfs(nbrs, u, 5) for u in gadget}
    parent = {u: u for u in gadget}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for u in gadget:
        for v, d in dist[u].items():
            if v in gset and d in (2, 4):
                a, b = find(u), find(v)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for u in gadget:
        groups.setdefault(find(u), []).append(u)
    classes = sorted(groups.values(), key=min)
    which = {u: i for i, cls in enumerate(classes) for u in cls}
    for cls in classes:
        if len({col[u] for u in cls}) != 1:
            raise NotCfiShapedError("gadget class mixes colors")
        for u in cls:
            for v in cls:
                if u != v and dist[u].get(v) not in (2, 4):
                    raise NotCfiShapedError("gadget classes are not consistent")
    edges = set()
    for u in gadget:
        for v, d in dist[u].items():
            if v in gset and d in (3, 5) and which[u] != which[v]:
                edges.add(tuple(sorted((which[u], which[v]))))
    m = len(classes)
    bcol = [col[cls[0]] for cls in classes]
    colors = _class_list(bcol)
    base = ColoredGraph.from_edges(m, edges, colors)

    origin: dict[int, object] = {u: which[u] for u in gadget}
    for x in range(g.n):
        if x in gset:
            continue
        own = {which[y] for y in nbrs[x] if y in gset}
        others = [y for y in nbrs[x] if y not in gset]
        if len(own) != 1 or len(others) != 1:
            raise NotCfiShapedError(f"vertex {x} is neither gadget nor edge vertex")
        far = {which[y] for y in nbrs[others[0]] if y in gset}
        if len(far) != 1:
            raise NotCfiShapedError(f"edge vertex {x} has no unique partner gadget")
        origin[x] = (next(iter(own)), next(iter(far)))
    orig: list[tuple[int, int]] = []
    for x in g.indiv:
        o = origin[x]
        new = [o] if isinstance(o, tuple) else sorted(origin[y] for y in nbrs[x])
        for e in new:
            if e not in orig:
                orig.append(e)
    return RecoveredBase(base, orig, origin)


# -- edge-vertex-pair orders ---------------------------------------------------


def _find_cycle(n: int, edges: Iterable[tuple[int, int]]) -> list[int] | None:
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for u, v in sorted(edges):
        a, b = find(u), find(v)
        if a == b:
            prev = {u: None}
            stack = [u]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in prev:
                        prev[y] = x
                        stack.append(y)
            path = [v]
            while path[-1] != u:
                path.append(prev[path[-1]])
            return path + [v]
        parent[max(a, b)] = min(a, b)
        adj[u].append(v)
        adj[v].append(u)
    return None


def pair_order(nbrs, base: ColoredGraph, edge_origin: Mapping[int, tuple[int, int]],
               gadget_base: Mapping[int, int], seed: Sequence[int]) -> frozenset:
    """Propagate an edge-vertex-pair order from individualized vertices.

    ``edge_origin`` maps edge vertices to directed base edges and
    ``gadget_base`` maps gadget vertices to base vertices.
    """
    pairs: dict[tuple[int, int], list[int]] = {}
    for x, e in edge_origin.items():
        pairs.setdefault(e, []).append(x)
    cross = {}
    for x, e in edge_origin.items():
        (y,) = [y for y in nbrs[x] if y in edge_origin]
        cross[x] = y
    rank: dict[int, int] = {}
    for pos, x in enumerate(seed):
        ends = [x] if x in edge_origin else [y for y in nbrs[x] if y in edge_origin]
        for y in ends:
            rank.setdefault(y, pos)
    chosen: dict[tuple[int, int], int] = {}
    ordered = set()
    for u, v in base.edges:
        cands = [x for x in pairs[(u, v)] + pairs[(v, u)] if x in rank]
        if not cands:
            continue
        x = min(cands, key=lambda y: rank[y])
        chosen[edge_origin[x]] = x
        chosen[edge_origin[cross[x]]] = cross[x]
        ordered.add((u, v))
    rest = [e for e in base.edges if e not in ordered]
    cyc = _find_cycle(base.n, rest)
    if cyc is not None:
        raise CycleRemainsError(cyc)
    gadgets_at: dict[int, list[int]] = {}
    for y, u in gadget_base.items():
        gadgets_at.setdefault(u, []).append(y)
    bn = base.neighbors
    while len(chosen) < len(pairs):
        derived: dict[tuple[int, int], int] = {}
        for u in range(base.n):
            open_ = [w for w in bn[u] if (u, w) not in chosen]
            if len(open_) != 1:
                continue
            fixed = {chosen[(u, w)] for w in bn[u] if (u, w) in chosen}
            (y,) = [y for y in gadgets_at[u] if fixed <= set(nbrs[y])]
            (x,) = [x for x in nbrs[y] if edge_origin.get(x) == (u, open_[0])]
            derived[(u, open_[0])] = x
        if not derived:
            raise NotCfiShapedError("pair-order propagation stalled")
        for e, x in derived.items():
            chosen[e] = x
        for e, x in derived.items():
            back = (e[1], e[0])
            if back not in chosen:
                chosen[back] = cross[x]
    return frozenset(chosen.values())


def edge_pair_order(c: CfiGraph, seed: Sequence[int] | None = None) -> frozenset:
    """One vertex per edge-vertex pair, forced by the individualization ``seed``.

    Defaults to the graph's own individualization.  Raises
    :class:`CycleRemainsError` if the individualized base edges leave a cycle.
    """
    if c.variant != TWO_PAIR:
        raise WrongVariant("edge-vertex-pair orders need the two-pair variant")
    seed = c.graph.indiv if seed is None else tuple(seed)
    edge_origin = {v: o.edge for v, o in enumerate(c.origin) if isinstance(o, EdgeOrigin)}
    gadget_base = {v: o.vertex for v, o in enumerate(c.origin) if isinstance(o, GadgetOrigin)}
    return pair_order(c.graph.neighbors, c.base, edge_origin, gadget_base, seed)


def base_graph(n: int, edges, colors=None) -> ColoredGraph:
    return ColoredGraph.from_edges(n, edges, colors)


def complete_graph(n: int, ordered: bool = True) -> ColoredGraph:
    """K_n; with ``ordered`` each vertex gets its own color."""
    edges = [(a, b) for a in range(n) for b in range(a + 1, n)]
    return ColoredGraph.from_edges(n, edges, [[v] for v in range(n)] if ordered else None)


def cycle_graph(n: int, ordered: bool = True) -> ColoredGraph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return ColoredGraph.from_edges(n, edges, [[v] for v in range(n)] if ordered else None)


def prism_graph(ordered: bool = True) -> ColoredGraph:
    """The triangular prism: two triangles joined by a perfect matching."""
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
    return ColoredGraph.from_edges(6, edges, [[v] for v in range(6)] if ordered else None)
