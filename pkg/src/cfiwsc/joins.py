"""Color class joins, CFI^ω and pebbled-part individualizations."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice, permutations
from typing import Iterator, NamedTuple, Sequence

from .cfi import TWO_PAIR, CfiGraph, EdgeOrigin, GadgetOrigin, build_cfi
from .errors import ClassCountMismatch, DisconnectedPartError
from .structures import ColoredGraph


class Part(NamedTuple):
    index: int
    vertices: frozenset
    source: int


@dataclass(frozen=True, eq=False)
class JoinedGraph:
    """A color class join with its part bookkeeping."""

    graph: ColoredGraph
    parts: tuple[Part, ...]
    join_vertices: tuple[int, ...]

    def part_of(self, v: int) -> int | None:
        for p in self.parts:
            if v in p.vertices:
                return p.index
        return None


def join_meta(j: JoinedGraph) -> dict:
    """JSON-ready part bookkeeping of a join."""
    return {
        "parts": [[p.index, sorted(p.vertices), p.source] for p in j.parts],
        "join_vertices": list(j.join_vertices),
    }


def join_from_meta(graph: ColoredGraph, meta: dict) -> JoinedGraph:
    parts = tuple(Part(i, frozenset(vs), src) for i, vs, src in meta["parts"])
    return JoinedGraph(graph, parts, tuple(meta["join_vertices"]))


def color_class_join(gs: Sequence[ColoredGraph], *, connected: bool = True) -> JoinedGraph:
    """Disjoint union plus one join vertex per color class.

    Part class ``i`` of every part is merged into class ``i``; join vertex
    ``i`` is adjacent to exactly that class and sits in its own singleton
    class after all part classes.  ``connected=False`` admits disconnected
    parts (even CFI graphs over cycles).
    """
    if not gs:
        raise ValueError("need at least one part")
    c = len(gs[0].colors)
    for g in gs:
        if len(g.colors) != c:
            raise ClassCountMismatch("all parts need the same number of color classes")
        if connected and not g.is_connected():
            raise DisconnectedPartError("parts of a join must be connected")
    edges = []
    classes: list[list[int]] = [[] for _ in range(2 * c)]
    parts = []
    off = 0
    for idx, g in enumerate(gs):
        edges += [(a + off, b + off) for a, b in g.edges]
        for i, cls in enumerate(g.colors):
            classes[i] += [v + off for v in cls]
        parts.append(Part(idx, frozenset(range(off, off + g.n)), idx))
        off += g.n
    join = tuple(range(off, off + c))
    for i, j in enumerate(join):
        classes[c + i] = [j]
        edges += [(j, v) for v in classes[i]]
    graph = ColoredGraph.from_edges(off + c, edges, classes)
    return JoinedGraph(graph, tuple(parts), join)


def cfi_omega(base: ColoredGraph, g: int, k: int = 1) -> JoinedGraph:
    """Join of ``k`` copies each of CFI(base,0), CFI(base,g) and CFI(base,1).

    Parts need not be connected: over a cycle the even CFI graph splits in two.
    """
    if k < 1:
        raise ValueError("multiplicity must be at least 1")
    graphs = []
    for p in (0, g, 1):
        graphs += [build_cfi(base, p, TWO_PAIR).graph] * k
    return color_class_join(graphs, connected=False)


def cfi_part_map(c: CfiGraph) -> list[int | None]:
    """Part index of every CFI vertex; None for vertices of join origin.

    A vertex belongs to a part if it originates from a base vertex or base
    edge inside that part; edges to join vertices count as join origin.
    """
    j = c.join
    if j is None:
        raise ValueError("CFI graph was not built over a JoinedGraph")
    out: list[int | None] = []
    for o in c.origin:
        if isinstance(o, GadgetOrigin):
            out.append(j.part_of(o.vertex))
        else:
            assert isinstance(o, EdgeOrigin)
            a, b = j.part_of(o.edge[0]), j.part_of(o.edge[1])
            out.append(a if a == b else None)
    return out


def pebbled_part_vertices(c: CfiGraph, pins: Sequence[int]) -> list[int]:
    """Join-origin vertices plus every vertex of a part containing a pin."""
    pm = cfi_part_map(c)
    pebbled = {pm[v] for v in pins if pm[v] is not None}
    return [v for v, p in enumerate(pm) if p is None or p in pebbled]


def pebbled_part_individualizations(c: CfiGraph, pins: Sequence[int],
                                    limit: int | None = None) -> Iterator[tuple[int, ...]]:
    """All orderings of the pebbled-part vertices, lexicographically.

    With ``limit`` only the first ``limit`` orderings are produced.
    """
    it = permutations(pebbled_part_vertices(c, pins))
    return it if limit is None else islice(it, limit)
