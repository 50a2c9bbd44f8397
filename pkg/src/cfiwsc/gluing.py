"""Gluing a single-pair CFI graph into a multipede, and extracting it again.

The i-th edge-vertex pair of the CFI graph (base edges in sorted order) is
identified with the feet of the i-th segment of X, index 0 with foot
``2w`` and index 1 with foot ``2w + 1``.  CFI edges become triples
``(u, v, v)`` of the single ternary relation ``R``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .cfi import SINGLE_PAIR, CfiGraph, EdgeOrigin, GadgetOrigin
from .errors import SizeMismatch, WrongVariant
from .multipede import Multipede, closure
from .structures import ColoredGraph, RelStructure


@dataclass(frozen=True, eq=False)
class Gluing:
    structure: RelStructure
    multipede: Multipede
    cfi: CfiGraph
    segments: tuple[int, ...]
    cfi_origin: tuple  # per vertex: CFI origin or None for unglued feet

    def segment_of(self, v: int) -> int | None:
        """Segment of a foot, None for gadget vertices."""
        return v // 2 if v < self.multipede.structure.n else None


def glue(m: Multipede, x: Sequence[int], c: CfiGraph) -> Gluing:
    if c.variant != SINGLE_PAIR:
        raise WrongVariant("gluing needs the single-pair CFI variant")
    x = tuple(int(w) for w in x)
    edges = c.base.edges
    if len(x) != len(edges):
        raise SizeMismatch(f"{len(x)} segments for {len(edges)} base edges")
    if len(set(x)) != len(x) or any(w < 0 or w >= m.base.n_segments for w in x):
        raise SizeMismatch("glued segments must be distinct segments of the multipede")
    nf = m.structure.n
    seg_of_edge = dict(zip(edges, x))
    new_id = [0] * c.graph.n
    gadgets = c.gadget_vertices
    gid = {v: nf + i for i, v in enumerate(gadgets)}
    for v, o in enumerate(c.origin):
        if isinstance(o, EdgeOrigin):
            new_id[v] = 2 * seg_of_edge[o.edge] + o.index
        else:
            new_id[v] = gid[v]
    n = nf + len(gadgets)
    triples = set(m.structure.relations["R"].tuples)
    for a, b in c.graph.relations["E"].tuples:
        triples.add((new_id[a], new_id[b], new_id[b]))
    colors = [list(cls) for cls in m.structure.colors]
    for cls in c.graph.colors:
        g = [gid[v] for v in cls if v in gid]
        if g:
            colors.append(g)
    origin: list = [None] * n
    for v, o in enumerate(c.origin):
        origin[new_id[v]] = o
    s = RelStructure(n, {"R": (3, triples)}, colors)
    return Gluing(s, m, c, x, tuple(origin))


def cfi_vertices(s: RelStructure) -> list[int]:
    """Vertices occurring in a triple of the form (x, y, y) or (y, x, x)."""
    out = set()
    for a, b, c in s.relations["R"].tuples:
        if b == c and a != b:
            out.add(a)
            out.add(b)
    return sorted(out)


def extract_cfi(s: RelStructure | Gluing) -> ColoredGraph:
    """The CFI graph hidden in a gluing, relabelled in increasing vertex order."""
    if isinstance(s, Gluing):
        s = s.structure
    vs = cfi_vertices(s)
    pos = {v: i for i, v in enumerate(vs)}
    edges = {(pos[a], pos[b]) for a, b, c in s.relations["R"].tuples if b == c and a != b}
    colors = [[pos[v] for v in cls if v in pos] for cls in s.colors]
    colors = [cls for cls in colors if cls]
    return ColoredGraph.from_edges(len(vs), edges, colors)


class FixedSegments(NamedTuple):
    directly: frozenset
    closure: frozenset
    gadget: frozenset

    @property
    def total(self) -> frozenset:
        return self.directly | self.closure | self.gadget


def classify_fixed_segments(g: Gluing, pins: Sequence[int]) -> FixedSegments:
    """Segments fixed by pinning ``pins``, split by reason."""
    nf = g.multipede.structure.n
    direct = frozenset(v // 2 for v in pins if v < nf)
    clos = frozenset(closure(g.multipede.base, direct)) - direct
    touched = set()
    for v in pins:
        o = g.cfi_origin[v]
        if v >= nf and isinstance(o, GadgetOrigin):
            touched.add(o.vertex)
    gad = frozenset(w for e, w in zip(g.cfi.base.edges, g.segments) if touched & set(e))
    return FixedSegments(direct, clos, gad)
