"""Multipede bases, closures and multipede structures.

A base is a bipartite graph between constraints (degree 3) and segments.
Segments are ``0..m-1`` and constraints are indexed by their position in
``constraints``; the total order puts segments by id and constraints by
index.  The multipede has two feet ``2w`` and ``2w + 1`` per segment ``w``
and, per constraint, the four triples whose foot indices sum to zero.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb, inf
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import BoundExceeded
from .structures import RelStructure

EXACT_MEAGER_BOUND = 24


@dataclass(frozen=True, eq=False)
class BipartiteBase:
    n_segments: int
    constraints: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        cons = tuple(tuple(sorted(int(x) for x in c)) for c in self.constraints)
        object.__setattr__(self, "constraints", cons)
        for c in cons:
            if len(set(c)) != 3 or any(x < 0 or x >= self.n_segments for x in c):
                raise ValueError(f"constraint {c} must have three distinct segments")
        if len(set(cons)) != len(cons):
            raise ValueError("constraints must be distinct")

    def __eq__(self, other):
        return (isinstance(other, BipartiteBase) and self.n_segments == other.n_segments
                and self.constraints == other.constraints)

    def __hash__(self):
        return hash((self.n_segments, self.constraints))

    @cached_property
    def incidence(self) -> np.ndarray:
        """GF(2) incidence matrix, rows constraints and columns segments."""
        m = np.zeros((len(self.constraints), self.n_segments), dtype=np.uint8)
        for i, c in enumerate(self.constraints):
            m[i, list(c)] = 1
        return m

    @cached_property
    def constraints_at(self) -> tuple[tuple[int, ...], ...]:
        at: list[list[int]] = [[] for _ in range(self.n_segments)]
        for i, c in enumerate(self.constraints):
            for w in c:
                at[w].append(i)
        return tuple(tuple(x) for x in at)

    @cached_property
    def segment_distances(self) -> np.ndarray:
        """Bipartite distances between segments (2 per shared constraint hop)."""
        m = self.n_segments
        out = np.full((m, m), inf)
        for s in range(m):
            out[s, s] = 0
            seen = {s}
            frontier = [s]
            d = 0
            while frontier:
                d += 2
                nxt = []
                for w in frontier:
                    for ci in self.constraints_at[w]:
                        for x in self.constraints[ci]:
                            if x not in seen:
                                seen.add(x)
                                out[s, x] = d
                                nxt.append(x)
                frontier = nxt
        return out

    def to_structure(self) -> RelStructure:
        """Shared JSON form: relation ``C`` lists the constraint neighborhoods."""
        return RelStructure(self.n_segments, {"C": (3, set(self.constraints))})

    @classmethod
    def from_structure(cls, s: RelStructure) -> "BipartiteBase":
        return cls(s.n, tuple(sorted(s.relations["C"].tuples)))


def sample_bipartite(n: int, epsilon: float, seed: int) -> BipartiteBase:
    """Each 3-subset of the segments becomes a constraint with probability n^(-2+ε)."""
    if n < 4:
        raise ValueError("need at least 4 segments")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    p = float(n) ** (-2.0 + epsilon)
    draws = rng.random(comb(n, 3))
    picked = [c for c, x in zip(combinations(range(n), 3), draws) if x < p]
    return BipartiteBase(n, tuple(picked))


def gf2_rank(m: np.ndarray) -> int:
    """Rank over GF(2) by elimination on row bitmasks."""
    rows = [int("".join(map(str, r[::-1])), 2) if len(r) else 0 for r in np.asarray(m, dtype=np.uint8)]
    rank = 0
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank


def is_odd(b: BipartiteBase) -> bool:
    """Every nonempty segment set meets some constraint in an odd number."""
    if b.n_segments == 0:
        return True
    return gf2_rank(b.incidence) == b.n_segments


def is_odd_bruteforce(b: BipartiteBase) -> bool:
    """Subset enumeration: the incidence matrix has trivial kernel."""
    m = b.n_segments
    if m > 20:
        raise BoundExceeded("subset enumeration limited to 20 segments")
    if m == 0:
        return True
    inc = b.incidence.astype(np.int64)
    masks = np.arange(1, 1 << m, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(m)) & 1).astype(np.int64)
    hits = (bits @ inc.T) % 2
    return bool(np.all(hits.any(axis=1)))


def contained_constraints(b: BipartiteBase, x: Iterable[int]) -> int:
    xs = set(x)
    return sum(1 for c in b.constraints if set(c) <= xs)


def is_k_meager(b: BipartiteBase, k: int, *, mode: str = "exact",
                bound: int | None = EXACT_MEAGER_BOUND, samples: int = 2000,
                seed: int = 0, ratio: float = 2.0, max_size: int | None = None) -> bool:
    """Every X with |X| <= 2k contains at most 2|X| constraints.

    ``ratio`` replaces the factor 2 and ``max_size`` the size window 2k.
    ``ratio=0.5, max_size=2k+1`` is the density condition under which
    closures of at most k segments at most double (see :func:`closure`).

    Exact mode only inspects connected unions of constraint neighborhoods: a
    violating set contains a violating component of such a union.  Sample
    mode checks random unions instead and certifies nothing.
    """
    limit = 2 * k if max_size is None else max_size
    if mode == "sample":
        rng = np.random.default_rng(seed)
        nc = len(b.constraints)
        for _ in range(samples):
            if nc == 0:
                return True
            picks = rng.choice(nc, size=min(nc, int(rng.integers(1, limit + 1))), replace=False)
            xs = set()
            for i in picks:
                xs |= set(b.constraints[i])
            if len(xs) <= limit and contained_constraints(b, xs) > ratio * len(xs):
                return False
        return True
    if bound is not None and b.n_segments > bound:
        raise BoundExceeded(f"exact meagerness check limited to {bound} segments")
    cons = [frozenset(c) for c in b.constraints]
    seen: set[frozenset] = set()
    queue = deque(c for c in set(cons))
    while queue:
        xs = queue.popleft()
        if xs in seen or len(xs) > limit:
            continue
        seen.add(xs)
        if sum(1 for c in cons if c <= xs) > ratio * len(xs):
            return False
        for c in cons:
            if c & xs and not c <= xs:
                ys = xs | c
                if len(ys) <= limit and ys not in seen:
                    queue.append(ys)
    return True


class ScatteredSet(NamedTuple):
    segments: tuple[int, ...]
    complete: bool


def scattered_set(b: BipartiteBase, k: int, target: int) -> ScatteredSet:
    """Greedy set of segments at pairwise distance at least 2k, in segment order."""
    dist = b.segment_distances
    chosen: list[int] = []
    for w in range(b.n_segments):
        if len(chosen) >= target:
            break
        if all(dist[w, x] >= 2 * k for x in chosen):
            chosen.append(w)
    return ScatteredSet(tuple(chosen), len(chosen) >= target)


def is_k_scattered(b: BipartiteBase, x: Iterable[int], k: int) -> bool:
    xs = list(x)
    dist = b.segment_distances
    return all(dist[a, c] >= 2 * k for a, c in combinations(xs, 2))


def attractor(b: BipartiteBase, x: Iterable[int]) -> frozenset:
    """X together with every constraint neighborhood having at most one segment outside X."""
    xs = set(x)
    out = set(xs)
    for c in b.constraints:
        if sum(1 for w in c if w not in xs) <= 1:
            out |= set(c)
    return frozenset(out)


def closure(b: BipartiteBase, x: Iterable[int]) -> frozenset:
    """Least fixpoint of the attractor containing X."""
    cur = frozenset(x)
    while True:
        nxt = attractor(b, cur)
        if nxt == cur:
            return cur
        cur = nxt


def components(b: BipartiteBase, y: Iterable[int]) -> list[frozenset]:
    """Components of the graph on Y linking segments of constraints inside Y."""
    ys = set(y)
    parent = {w: w for w in ys}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for c in b.constraints:
        if set(c) <= ys:
            r = [find(w) for w in c]
            top = min(r)
            for q in r:
                parent[q] = top
    groups: dict[int, set] = {}
    for w in ys:
        groups.setdefault(find(w), set()).add(w)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def distance_to_set(b: BipartiteBase, w: int, y: Iterable[int]) -> float:
    ys = list(y)
    if not ys:
        return inf
    return float(min(b.segment_distances[w, x] for x in ys))


def sample_odd_meager(n: int, epsilon: float, k: int, seed: int,
                      max_tries: int = 1000) -> tuple[BipartiteBase, int]:
    """Rejection-sample an odd, k-meager base; returns the base and the seed used.

    Seeds ``seed, seed+1, ...`` are tried in order.
    """
    for t in range(max_tries):
        b = sample_bipartite(n, epsilon, seed + t)
        if is_odd(b) and is_k_meager(b, k, bound=None):
            return b, seed + t
    raise BoundExceeded(f"no odd {k}-meager base found in {max_tries} tries")


@dataclass(frozen=True, eq=False)
class Multipede:
    structure: RelStructure
    base: BipartiteBase

    def feet(self, w: int) -> tuple[int, int]:
        return (2 * w, 2 * w + 1)


def build_multipede(b: BipartiteBase) -> Multipede:
    triples = set()
    for u1, u2, u3 in b.constraints:
        for i1 in (0, 1):
            for i2 in (0, 1):
                i3 = (i1 + i2) % 2
                triples.add((2 * u1 + i1, 2 * u2 + i2, 2 * u3 + i3))
    colors = [[2 * w, 2 * w + 1] for w in range(b.n_segments)]
    return Multipede(RelStructure(2 * b.n_segments, {"R": (3, triples)}, colors), b)


def feet_of(segments: Iterable[int]) -> list[int]:
    return sorted(f for w in segments for f in (2 * w, 2 * w + 1))


def feet_induced(m: Multipede | RelStructure, x: Iterable[int]) -> RelStructure:
    """The multipede restricted to the feet of X (relabelled in foot order)."""
    s = m.structure if isinstance(m, Multipede) else m
    return s.induced(feet_of(x))
