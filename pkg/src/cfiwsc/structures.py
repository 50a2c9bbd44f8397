"""Finite relational structures and colored graphs.

A structure has a universe ``0..n-1``, named relations, an ordered list of
color classes (the class index is the color) and an ordered
individualization.  Everything here is immutable; operations return new
structures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import DuplicateVertexError, NonGraphInput

Permutation = tuple[int, ...]


class Relation(NamedTuple):
    arity: int
    tuples: frozenset


def _norm_relations(relations) -> dict[str, Relation]:
    out = {}
    for name in sorted(relations):
        val = relations[name]
        if isinstance(val, Relation):
            arity, tuples = val
        else:
            arity, tuples = val
        out[name] = Relation(int(arity), frozenset(tuple(int(x) for x in t) for t in tuples))
    return out


@dataclass(frozen=True, eq=False)
class RelStructure:
    """A finite relational structure with colors and an individualization."""

    n: int
    relations: Mapping[str, Relation] = field(default_factory=dict)
    colors: tuple = None  # type: ignore[assignment]
    indiv: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", _norm_relations(self.relations))
        if self.colors is None:
            colors = (tuple(range(self.n)),) if self.n else ()
        else:
            colors = tuple(tuple(sorted(int(v) for v in c)) for c in self.colors)
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "indiv", tuple(int(v) for v in self.indiv))
        self._validate()

    def _validate(self) -> None:
        n = self.n
        for name, (arity, tuples) in self.relations.items():
            for t in tuples:
                if len(t) != arity:
                    raise ValueError(f"relation {name}: tuple {t} has wrong arity")
                if any(x < 0 or x >= n for x in t):
                    raise ValueError(f"relation {name}: tuple {t} out of range")
        seen = [c for cls in self.colors for c in cls]
        if sorted(seen) != list(range(n)):
            raise ValueError("color classes must partition the universe")
        if any(len(c) == 0 for c in self.colors):
            raise ValueError("empty color class")
        if len(set(self.indiv)) != len(self.indiv):
            raise DuplicateVertexError(f"individualization repeats a vertex: {self.indiv}")
        if any(v < 0 or v >= n for v in self.indiv):
            raise ValueError("individualized vertex out of range")

    # -- comparison -------------------------------------------------------

    def key(self) -> tuple:
        """A total, comparable encoding; equal keys mean equal structures."""
        rels = tuple(
            (name, r.arity, tuple(sorted(r.tuples))) for name, r in self.relations.items()
        )
        return (self.n, self.colors, rels, self.indiv)

    def __eq__(self, other):
        if not isinstance(other, RelStructure):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        rels = ", ".join(f"{k}/{r.arity}:{len(r.tuples)}" for k, r in self.relations.items())
        return (
            f"{type(self).__name__}(n={self.n}, relations=[{rels}], "
            f"classes={len(self.colors)}, indiv={list(self.indiv)})"
        )

    # -- derived data -----------------------------------------------------

    @cached_property
    def color_of(self) -> tuple[int, ...]:
        col = [0] * self.n
        for i, cls in enumerate(self.colors):
            for v in cls:
                col[v] = i
        return tuple(col)

    @cached_property
    def indiv_pos(self) -> tuple[int, ...]:
        """Position in the individualization plus one, or 0."""
        pos = [0] * self.n
        for i, v in enumerate(self.indiv):
            pos[v] = i + 1
        return tuple(pos)

    @cached_property
    def incidence(self) -> tuple:
        """Per vertex, the list of ``(relation index, position, tuple)`` occurrences."""
        inc: list[list] = [[] for _ in range(self.n)]
        for ri, (_, rel) in enumerate(self.relations.items()):
            for t in sorted(rel.tuples):
                for p, x in enumerate(t):
                    inc[x].append((ri, p, t))
        return tuple(tuple(x) for x in inc)

    @cached_property
    def is_binary_graph(self) -> bool:
        """True if the only relation is a symmetric irreflexive ``E``."""
        if set(self.relations) != {"E"}:
            return False
        rel = self.relations["E"]
        if rel.arity != 2:
            return False
        return all(a != b and (b, a) in rel.tuples for a, b in rel.tuples)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        if not self.is_binary_graph:
            raise NonGraphInput("neighbors are only defined for colored graphs")
        nb: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.relations["E"].tuples:
            nb[a].append(b)
        return tuple(tuple(sorted(x)) for x in nb)

    # -- transformations --------------------------------------------------

    def _replace(self, **kw) -> "RelStructure":
        args = dict(n=self.n, relations=self.relations, colors=self.colors, indiv=self.indiv)
        args.update(kw)
        return type(self)(**args)

    def relabel(self, perm: Sequence[int]) -> "RelStructure":
        """Return the image of the structure under ``v -> perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("not a permutation of the universe")
        rels = {
            name: (r.arity, {tuple(perm[x] for x in t) for t in r.tuples})
            for name, r in self.relations.items()
        }
        colors = [[perm[v] for v in c] for c in self.colors]
        return self._replace(relations=rels, colors=colors, indiv=[perm[v] for v in self.indiv])

    def individualize(self, vs: Iterable[int]) -> "RelStructure":
        vs = [int(v) for v in vs]
        if not vs:
            return self
        if len(set(vs)) != len(vs) or set(vs) & set(self.indiv):
            raise DuplicateVertexError(f"cannot individualize {vs}: repeated vertex")
        if any(v < 0 or v >= self.n for v in vs):
            raise ValueError("individualized vertex out of range")
        # relations and colors are unchanged, so skip revalidation and keep
        # the indiv-independent caches
        new = object.__new__(type(self))
        for name in ("n", "relations", "colors"):
            object.__setattr__(new, name, getattr(self, name))
        object.__setattr__(new, "indiv", self.indiv + tuple(vs))
        for name in ("color_of", "incidence", "is_binary_graph", "neighbors"):
            if name in self.__dict__:
                new.__dict__[name] = self.__dict__[name]
        return new

    def without_indiv(self) -> "RelStructure":
        return self._replace(indiv=())

    def reduct(self, names: Iterable[str] | None = None, *, colors: bool = True,
               indiv: bool = True) -> "RelStructure":
        """Project onto the named relations, optionally dropping colors or ⊴."""
        keep = self.relations if names is None else {k: self.relations[k] for k in names
                                                     if k in self.relations}
        return RelStructure(
            self.n,
            keep,
            self.colors if colors else None,
            self.indiv if indiv else (),
        )

    def induced(self, vertices: Iterable[int]) -> "RelStructure":
        """Substructure on ``vertices`` relabeled to ``0..m-1`` in increasing order."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        rels = {
            name: (r.arity, {tuple(pos[x] for x in t) for t in r.tuples if all(x in pos for x in t)})
            for name, r in self.relations.items()
        }
        colors = [[pos[v] for v in c if v in pos] for c in self.colors]
        colors = [c for c in colors if c]
        return RelStructure(len(vs), rels, colors, [pos[v] for v in self.indiv if v in pos])

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "relations": {
                name: {"arity": r.arity, "tuples": [list(t) for t in sorted(r.tuples)]}
                for name, r in self.relations.items()
            },
            "colors": [list(c) for c in self.colors],
            "indiv": list(self.indiv),
        }

    def dumps(self, extra: Mapping | None = None) -> str:
        """Canonical JSON text (fixed field order, sorted tuples)."""
        doc = self.to_json()
        if extra:
            doc.update(extra)
        return json.dumps(doc, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, doc: Mapping) -> "RelStructure":
        rels = {name: (r["arity"], [tuple(t) for t in r["tuples"]])
                for name, r in doc.get("relations", {}).items()}
        return cls(doc["n"], rels, doc.get("colors"), doc.get("indiv", ()))


class ColoredGraph(RelStructure):
    """A structure whose only relation is a symmetric irreflexive ``E``."""

    def __post_init__(self):
        if "E" not in self.relations:
            rels = dict(self.relations)
            rels["E"] = (2, ())
            object.__setattr__(self, "relations", rels)
        super().__post_init__()
        if not self.is_binary_graph:
            raise NonGraphInput("colored graph needs exactly one symmetric irreflexive relation E")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], colors=None, indiv=()) -> "ColoredGraph":
        tuples = set()
        for a, b in edges:
            if a == b:
                raise NonGraphInput(f"self-loop at {a}")
            tuples.add((a, b))
            tuples.add((b, a))
        return cls(n, {"E": (2, tuples)}, colors, indiv)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((a, b) for a, b in self.relations["E"].tuples if a < b))

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in self.neighbors[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n


def as_graph(s: RelStructure) -> ColoredGraph:
    """View a structure with a single symmetric ``E`` as a ColoredGraph."""
    if isinstance(s, ColoredGraph):
        return s
    if not s.is_binary_graph and not (not s.relations and s.n >= 0):
        raise NonGraphInput("structure is not a colored graph")
    return ColoredGraph(s.n, s.relations, s.colors, s.indiv)


def disjoint_union(a: RelStructure, b: RelStructure) -> RelStructure:
    """Union with ``b`` shifted by ``a.n``; color classes merged by index.

    The individualization is dropped since two orders cannot be merged
    meaningfully.
    """
    shift = a.n
    rels: dict[str, tuple[int, set]] = {}
    for s, off in ((a, 0), (b, shift)):
        for name, r in s.relations.items():
            arity, ts = rels.setdefault(name, (r.arity, set()))
            if arity != r.arity:
                raise ValueError(f"relation {name} has different arities")
            ts.update(tuple(x + off for x in t) for t in r.tuples)
    m = max(len(a.colors), len(b.colors))
    colors = []
    for i in range(m):
        cls = list(a.colors[i]) if i < len(a.colors) else []
        if i < len(b.colors):
            cls += [v + shift for v in b.colors[i]]
        colors.append(cls)
    return RelStructure(a.n + b.n, rels, colors, ())


def compose(p: Sequence[int], q: Sequence[int]) -> Permutation:
    """``p ∘ q``: apply ``q`` first."""
    return tuple(p[x] for x in q)


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def identity(n: int) -> Permutation:
    return tuple(range(n))


def load(path) -> RelStructure:
    with open(path) as fh:
        doc = json.load(fh)
    s = RelStructure.from_json(doc)
    if s.is_binary_graph or (not s.relations):
        return as_graph(s)
    return s
