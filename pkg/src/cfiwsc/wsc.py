"""Fixed-point iteration with witnessed symmetric choice, and canonization built on it.

A program supplies four callbacks.  Starting from the empty stage, each
round asks ``choice`` for a set of tuples, picks one of them, and lets
``step`` extend the stage.  Once the stage stops growing, every round's
choice-set must be certified as an orbit: the maps returned by ``witness``
have to be automorphisms of the structure together with all stages up to
that round, and between them they must move every choice tuple onto every
other one.  Only then is ``output`` consulted.

Callbacks see a projected view of the structure (declared relations,
optionally colors and the individualization) rather than the full input.
"""

from __future__ import annotations

import random
from collections import OrderedDict
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, NamedTuple, Sequence, Union

from .automorphisms import (DEFAULT_BOUND, automorphism_generators, canonical_labeling,
                            equitable_labels, is_automorphism, isomorphic, orbits)
from .errors import (ArityMismatchError, NonMonotoneStepError, NotProgressingError,
                     ReadyConditionError, UnwitnessedChoiceError)
from .structures import ColoredGraph, Permutation, RelStructure, compose, inverse

Tup = tuple[int, ...]
Stage = frozenset

ACCEPTED_TRUE = "accepted-true"
ACCEPTED_FALSE = "accepted-false"
REJECTED = "rejected-unwitnessed"

Pick = Union[str, Callable[[Sequence[Tup]], Tup]]


@dataclass(frozen=True)
class WscProgram:
    """Callbacks and declarations of a witnessed-choice fixed point.

    ``step(view, R, S)`` returns tuples to add to ``R`` (or, with
    ``replace=True``, the whole next stage, which must contain ``R``).
    ``choice(view, R)`` returns the choice-set, ``witness(view, R, R_final,
    (v, w))`` returns the vertex pairs of one candidate map and
    ``output(view, R_final)`` the verdict.
    """

    step: Callable[[RelStructure, Stage, Stage], Iterable[Sequence[int]]]
    choice: Callable[[RelStructure, Stage], Iterable[Sequence[int]]]
    witness: Callable[[RelStructure, Stage, Stage, tuple[Tup, Tup]], Iterable[tuple[int, int]]]
    output: Callable[[RelStructure, Stage], bool]
    arity: int
    choice_arity: int
    relations: tuple[str, ...] | None = None
    uses_colors: bool = True
    mentions_indiv: bool = False
    replace: bool = False

    def view(self, s: RelStructure) -> RelStructure:
        return s.reduct(self.relations, colors=self.uses_colors, indiv=self.mentions_indiv)


class Round(NamedTuple):
    choice_set: frozenset
    chosen: Tup | None
    witnessed: bool


@dataclass(frozen=True)
class WscOutcome:
    verdict: str
    final: Stage
    log: tuple[Round, ...]
    stages: tuple[Stage, ...]

    @property
    def accepted(self) -> bool:
        return self.verdict != REJECTED

    @property
    def value(self) -> bool | None:
        """Output verdict of an accepted run, None when rejected."""
        return None if self.verdict == REJECTED else self.verdict == ACCEPTED_TRUE


def _tuples(raw: Iterable[Sequence[int]], arity: int, n: int, what: str) -> frozenset:
    out = set()
    for t in raw:
        t = tuple(int(x) for x in t)
        if len(t) != arity:
            raise ArityMismatchError(f"{what} produced {t}, expected arity {arity}")
        if any(x < 0 or x >= n for x in t):
            raise ArityMismatchError(f"{what} produced {t} outside the universe")
        out.add(t)
    return frozenset(out)


def _picker(pick: Pick, seed: int | None) -> Callable[[Sequence[Tup]], Tup]:
    if callable(pick):
        return pick
    if pick == "min":
        return lambda ts: ts[0]
    if pick == "max":
        return lambda ts: ts[-1]
    if pick == "random":
        rng = random.Random(seed)
        return lambda ts: ts[rng.randrange(len(ts))]
    raise ValueError(f"unknown pick policy {pick!r}")


def _as_permutation(pairs: Iterable[tuple[int, int]], n: int) -> Permutation | None:
    img = [-1] * n
    for a, b in pairs:
        a, b = int(a), int(b)
        if not (0 <= a < n and 0 <= b < n) or img[a] not in (-1, b):
            return None
        img[a] = b
    if -1 in img or len(set(img)) != n:
        return None
    return tuple(img)


def _preserves(view: RelStructure, stage: Stage, birth: dict, perm: Permutation) -> bool:
    """Automorphism of the view mapping every earlier stage onto itself.

    Stages are nested, so it suffices that each tuple of the latest stage
    goes to a tuple that entered the iteration in the same round.
    """
    if not is_automorphism(view, perm):
        return False
    return all(birth.get(tuple(perm[x] for x in t)) == birth[t] for t in stage)


def _witnessed(p: WscProgram, view: RelStructure, cur: Stage, birth: dict, final: Stage,
               choice_set: frozenset) -> bool:
    """Set-level check: every ordered pair is linked by some accepted map."""
    if not choice_set:
        return True
    # the identity always witnesses a tuple against itself
    maps: set[Permutation] = {tuple(range(view.n))}
    for v, w in product(sorted(choice_set), repeat=2):
        pairs = list(p.witness(view, cur, final, (v, w)))
        if not pairs and view.n:
            continue
        perm = _as_permutation(pairs, view.n)
        if perm is None:
            return False
        if perm not in maps:
            if not _preserves(view, cur, birth, perm):
                return False
            maps.add(perm)
    for v, w in product(choice_set, repeat=2):
        if not any(tuple(m[x] for x in w) == v for m in maps):
            return False
    return True


def wsc_fixpoint(s: RelStructure, p: WscProgram, *, pick: Pick = "min",
                 seed: int | None = None) -> WscOutcome:
    """Run ``p`` on ``s``; the chosen tuple is the least one unless ``pick`` says otherwise."""
    view = p.view(s)
    chooser = _picker(pick, seed)
    stage: Stage = frozenset()
    stages = [stage]
    rounds: list[tuple[frozenset, Tup | None]] = []
    while True:
        options = _tuples(p.choice(view, stage), p.choice_arity, view.n, "choice")
        chosen = chooser(sorted(options)) if options else None
        if chosen is not None and chosen not in options:
            raise ValueError(f"pick policy returned {chosen}, not a member of the choice-set")
        single = frozenset({chosen}) if chosen is not None else frozenset()
        out = _tuples(p.step(view, stage, single), p.arity, view.n, "step")
        if p.replace:
            if not stage <= out:
                raise NonMonotoneStepError("step dropped tuples from the current stage")
            nxt = frozenset(out)
        else:
            nxt = stage | out
        rounds.append((options, chosen))
        if nxt == stage:
            break
        stage = nxt
        stages.append(stage)
    final = stage
    log = []
    ok = True
    birth: dict[Tup, int] = {}
    for i, (options, chosen) in enumerate(rounds):
        if i < len(stages):
            for t in stages[i] - stages[i - 1] if i else stages[0]:
                birth[t] = i
        cur = stages[min(i, len(stages) - 1)]
        good = ok and _witnessed(p, view, cur, birth, final, options)
        ok = ok and good
        log.append(Round(options, chosen, good))
    if not ok:
        verdict = REJECTED
    else:
        verdict = ACCEPTED_TRUE if p.output(view, final) else ACCEPTED_FALSE
    return WscOutcome(verdict, final, tuple(log), tuple(stages))


# -- threshold graphs ---------------------------------------------------------


def _threshold_choice(view: RelStructure, stage: Stage) -> list[Tup]:
    gone = {t[0] for t in stage}
    rest = [v for v in range(view.n) if v not in gone]
    nb = view.neighbors
    out = []
    for y in rest:
        inside = sum(1 for z in nb[y] if z not in gone)
        if inside == 0 or inside == len(rest) - 1:
            out.append((y,))
    return out


def _transposition(view: RelStructure, stage: Stage, final: Stage,
                   pair: tuple[Tup, Tup]) -> list[tuple[int, int]]:
    (y,), (y2,) = pair
    return [(z, z) for z in range(view.n) if z not in (y, y2)] + [(y, y2), (y2, y)]


THRESHOLD_PROGRAM = WscProgram(
    step=lambda view, stage, chosen: chosen,
    choice=_threshold_choice,
    witness=_transposition,
    output=lambda view, final: len(final) == view.n,
    arity=1,
    choice_arity=1,
    relations=("E",),
    uses_colors=False,
)


def threshold_via_wsc(g: ColoredGraph, *, pick: Pick = "min", seed: int | None = None) -> WscOutcome:
    """Decide whether ``g`` is a threshold graph by deleting isolated or universal vertices."""
    return wsc_fixpoint(g, THRESHOLD_PROGRAM, pick=pick, seed=seed)


def is_threshold_graph(g: ColoredGraph) -> bool:
    """Direct elimination: drop any isolated or universal vertex until none is left."""
    alive = set(range(g.n))
    nb = [set(x) for x in g.neighbors]
    while alive:
        for v in sorted(alive):
            d = len(nb[v] & alive)
            if d == 0 or d == len(alive) - 1:
                alive.discard(v)
                break
        else:
            return False
    return True


# -- canonization ---------------------------------------------------------------

Ready = Callable[[RelStructure], Iterable[int]]


def _order_of(stage: Stage) -> tuple[int, ...]:
    """Vertices individualized by a stage of ``(earlier, later)`` pairs, in order."""
    before: dict[int, int] = {}
    for a, b in stage:
        before[b] = before.get(b, 0) + 1
    return tuple(sorted(before, key=before.__getitem__))


def _canonize_program(ready: Ready, check: bool, bound: int) -> WscProgram:
    memo: dict = {}
    orders: dict[Stage, tuple[int, ...]] = {}
    discrete_from = [float("inf")]

    def order_of(stage: Stage) -> tuple[int, ...]:
        if stage not in orders:
            orders[stage] = _order_of(stage)
        return orders[stage]

    def current(view: RelStructure, stage: Stage) -> RelStructure:
        return view.individualize(order_of(stage))

    def choice(view: RelStructure, stage: Stage):
        cur = current(view, stage)
        o = frozenset(int(v) for v in ready(cur))
        done = len(cur.indiv) == cur.n
        if not o and cur.n:
            raise NotProgressingError("ready oracle returned an empty set")
        if len(o) == 1 and not done and cur.indiv_pos[next(iter(o))]:
            raise NotProgressingError(
                f"ready oracle returned individualized vertex {next(iter(o))} "
                "while vertices remain")
        if check and cur.n <= bound and len(cur.indiv) < discrete_from[0]:
            if len(set(equitable_labels(cur))) == cur.n:
                # individualizing more vertices keeps the partition discrete
                discrete_from[0] = len(cur.indiv)
            orbs = orbits(cur, bound=bound)
            if o and o not in orbs:
                raise UnwitnessedChoiceError(f"ready oracle returned {sorted(o)}, not a 1-orbit")
            if len(o) == 1 and any(len(x) > 1 for x in orbs):
                raise ReadyConditionError("ready oracle returned a singleton beside a non-trivial orbit")
        elif check and len(o) > 1 and len(cur.indiv) >= discrete_from[0]:
            raise UnwitnessedChoiceError(f"ready oracle returned {sorted(o)} on a discrete structure")
        memo[stage] = (cur, min(o) if o else None, {})
        return [(v,) for v in o]

    def step(view: RelStructure, stage: Stage, chosen: Stage):
        if not chosen:
            return ()
        (v,), = chosen
        order = order_of(stage)
        if v in order or view.indiv_pos[v]:
            return ()
        return [(a, v) for a in order] + [(v, v)]

    def to_target(stage: Stage, x: int) -> Permutation | None:
        cur, v0, maps = memo[stage]
        if x == v0:
            return tuple(range(cur.n))
        if x not in maps:
            maps[x] = isomorphic(cur.individualize([v0]), cur.individualize([x]), bound=max(bound, cur.n))
        return maps[x]

    def witness(view: RelStructure, stage: Stage, final: Stage, pair: tuple[Tup, Tup]):
        (v,), (w,) = pair
        if stage not in memo:
            choice(view, stage)
        to_v, to_w = to_target(stage, v), to_target(stage, w)
        if to_v is None or to_w is None:
            return []
        return list(enumerate(compose(to_v, inverse(to_w))))

    return WscProgram(step=step, choice=choice, witness=witness,
                      output=lambda view, final: True, arity=2, choice_arity=1,
                      relations=None, uses_colors=True, mentions_indiv=True)


def canonize_run(s: RelStructure, ready: Ready, *, pick: Pick = "min", seed: int | None = None,
                 check: bool = True, bound: int = DEFAULT_BOUND
                 ) -> tuple[RelStructure, Permutation, WscOutcome]:
    """Canonize ``s``; also return the labelling ``s -> canon`` and the fixed-point run."""
    run = wsc_fixpoint(s, _canonize_program(ready, check, bound), pick=pick, seed=seed)
    if not run.accepted:
        bad = next(i for i, r in enumerate(run.log) if not r.witnessed)
        raise UnwitnessedChoiceError(f"choice in round {bad} was not witnessed as an orbit")
    order = s.indiv + _order_of(run.final)
    if len(order) != s.n:
        raise NotProgressingError("fixed point reached before every vertex was individualized")
    perm = [0] * s.n
    for i, v in enumerate(order):
        perm[v] = i
    canon = s.relabel(perm).without_indiv().individualize(range(s.n))
    return canon, tuple(perm), run


def gurevich_canonize(s: RelStructure, ready: Ready, **kw) -> RelStructure:
    """Totally ordered canon of ``s``: individualize witnessed choices from ready orbits.

    The result is ``s`` relabelled so that the i-th individualized vertex
    becomes ``i``; its individualization covers the universe.
    """
    return canonize_run(s, ready, **kw)[0]


class BruteForceReady:
    """Ready oracle from exact orbits.

    If some prefix of the individualization already refines to a discrete
    partition, the shortest such prefix fixes a labelling and the answer is
    the non-individualized vertex with the least label.  Otherwise orbits
    are computed exactly and ordered by a canonical labelling; the answer is
    the first non-trivial orbit, else the first singleton orbit that is not
    individualized.  Fully individualized inputs get their first vertex.

    Discrete-prefix labellings are memoized, which makes the long tail of a
    canonization cheap without changing any answer.
    """

    def __init__(self, *, bound: int | None = None, cache_size: int = 4096):
        self.bound = bound
        self.cache_size = cache_size
        self._cache: OrderedDict = OrderedDict()

    def _discrete_prefix(self, s: RelStructure) -> list[int] | None:
        """Labels of the shortest discrete individualization prefix, if any."""
        ident = (id(s.relations), s.colors)
        p = s.indiv
        hit = self._cache.get(ident + (p,))
        if hit is not None:
            return hit[1]
        parent = self._cache.get(ident + (p[:-1],)) if p else None
        if parent is not None and parent[1] is not None:
            labels = parent[1]
        else:
            labels = None
            start = len(p) if parent is not None else 0
            core = s.without_indiv()
            for j in range(start, len(p) + 1):
                lab = equitable_labels(core.individualize(p[:j]))
                if len(set(lab)) == s.n:
                    labels = lab
                    break
        self._cache[ident + (p,)] = (s.relations, labels)
        if len(self._cache) > self.cache_size:
            self._cache.popitem(last=False)
        return labels

    def __call__(self, s: RelStructure) -> frozenset:
        if s.n == 0:
            return frozenset()
        if len(s.indiv) == s.n:
            return frozenset({s.indiv[0]})
        lab = self._discrete_prefix(s)
        if lab is not None:
            rest = (v for v in range(s.n) if not s.indiv_pos[v])
            return frozenset({min(rest, key=lab.__getitem__)})
        gens = automorphism_generators(s, bound=self.bound)
        orbs = orbits(s, gens=gens)
        perm, _ = canonical_labeling(s, bound=self.bound)
        orbs.sort(key=lambda o: min(perm[v] for v in o))
        for o in orbs:
            if len(o) > 1:
                return o
        return next(o for o in orbs if not s.indiv_pos[next(iter(o))])


brute_force_ready = BruteForceReady()


def _tuple_orbit(t: Tup, gens: Sequence[Permutation]) -> set[Tup]:
    seen = {t}
    stack = [t]
    while stack:
        x = stack.pop()
        for g in gens:
            y = tuple(g[a] for a in x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def order_k_orbits(s: RelStructure, k: int, ready: Ready = brute_force_ready,
                   **kw) -> list[list[Tup]]:
    """k-tuples grouped and ordered by the canons of their individualizations.

    Entries already individualized in ``s`` are recorded by position; the
    remaining distinct entries are individualized in order of appearance.
    Two equal canons yield an automorphism of ``s``; tuples reachable by such
    automorphisms share their key and are not canonized again.
    """
    keys: dict[Tup, tuple] = {}
    seen: dict[tuple, tuple[Tup, Permutation]] = {}
    gens: list[Permutation] = []
    for u in product(range(s.n), repeat=k):
        fresh = tuple(dict.fromkeys(x for x in u if not s.indiv_pos[x]))
        if fresh in keys:
            continue
        orbit = _tuple_orbit(fresh, gens)
        known = next((keys[t] for t in orbit if t in keys), None)
        if known is None:
            canon, lab, _ = canonize_run(s.individualize(fresh), ready, **kw)
            known = canon.key()
            if known in seen:
                other, lab0 = seen[known]
                g = compose(inverse(lab0), lab)
                if g not in gens:
                    gens.append(g)
                    orbit = _tuple_orbit(fresh, gens)
            else:
                seen[known] = (fresh, lab)
        for t in orbit:
            keys[t] = known
    keyed: dict[tuple, list[Tup]] = {}
    for u in product(range(s.n), repeat=k):
        fresh = tuple(dict.fromkeys(x for x in u if not s.indiv_pos[x]))
        pattern = tuple(-s.indiv_pos[x] if s.indiv_pos[x] else fresh.index(x) for x in u)
        keyed.setdefault((pattern, keys[fresh]), []).append(u)
    return [keyed[key] for key in sorted(keyed)]


def _is_edge(t: Tup, nb) -> bool:
    return t[0] != t[1] and t[1] in nb[t[0]]


def _on_cycle(n: int, edges: set[tuple[int, int]], e: tuple[int, int]) -> bool:
    """Whether undirected edge ``e`` of ``edges`` lies on a cycle."""
    u, v = e
    if (min(u, v), max(u, v)) not in edges:
        return False
    adj: dict[int, list[int]] = {x: [] for x in range(n)}
    for a, b in edges:
        if {a, b} != {u, v}:
            adj[a].append(b)
            adj[b].append(a)
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return v in seen


class CfiReady:
    """Ready oracle for two-pair CFI graphs over bases of minimum degree 3.

    The base graph is recovered from distances, with the base endpoints of
    individualized edge vertices individualized in order.  Its 2-orbits are
    ordered by ``order_k_orbits`` (with the exact oracle on the small base).
    The answer is, in this order of preference: all edge vertices whose
    origin lies in the least class of directed edges on a cycle avoiding the
    individualized edges; otherwise the pair-order vertices over the least
    non-trivial class of directed edges; otherwise the least
    non-individualized vertex of the induced total order.
    """

    def __init__(self):
        self._orders: dict = {}

    def _edge_classes(self, b: RelStructure) -> list[list[tuple[int, int]]]:
        key = b.key()
        if key not in self._orders:
            nb = b.neighbors
            classes = order_k_orbits(b, 2, BruteForceReady())
            self._orders[key] = [cls for cls in classes if _is_edge(cls[0], nb)]
        return self._orders[key]

    def __call__(self, s: RelStructure) -> frozenset:
        from .cfi import pair_order, recover_base

        if s.n == 0:
            return frozenset()
        rb = recover_base(s)
        base = rb.base
        ends: list[int] = []
        for u, v in rb.orig:
            for x in (u, v):
                if x not in ends:
                    ends.append(x)
        b = base.individualize(ends)
        classes = self._edge_classes(b)
        gone = {(min(e), max(e)) for e in rb.orig}
        rest = {e for e in base.edges if e not in gone}
        edge_origin = {x: o for x, o in rb.origin.items() if isinstance(o, tuple)}
        for cls in classes:
            if _on_cycle(base.n, rest, cls[0]):
                members = set(cls)
                return frozenset(x for x, o in edge_origin.items() if o in members)
        gadget_base = {x: o for x, o in rb.origin.items() if not isinstance(o, tuple)}
        r = pair_order(s.neighbors, base, edge_origin, gadget_base, s.indiv)
        for cls in classes:
            if len(cls) > 1:
                members = set(cls)
                return frozenset(x for x in r if edge_origin[x] in members)
        if len(s.indiv) == s.n:
            return frozenset({s.indiv[0]})
        rank = {t: i for i, cls in enumerate(classes) for t in cls}
        key: dict[int, tuple] = {x: (0, rank[o], x not in r) for x, o in edge_origin.items()}
        for y in gadget_base:
            key[y] = (1, tuple(sorted(key[x] for x in s.neighbors[y])))
        return frozenset({min((v for v in range(s.n) if not s.indiv_pos[v]), key=key.__getitem__)})


cfi_ready = CfiReady()
