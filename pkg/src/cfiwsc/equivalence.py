"""Counting-logic equivalence: tuple WL, C^k, and pebble-game solvers.

``wl_refine(s, d)`` colors d-tuples; a round replaces the color of ``u`` by
the old color together with the multiset over all ``w`` of
``(atp(u w), c(u[1/w]), ..., c(u[d/w]))``.  Two structures agree in C^k
iff this refinement at dimension ``k - 1`` gives equal histograms on the
two sides of their disjoint union.

The bijective k-pebble game is solved by a backward fixpoint over full
k-pebble positions: Spoiler wins a position if it is not a local
isomorphism, or if for some pebble the matrix of safe answers has no
perfect matching.  Positions with fewer pebbles are modelled by doubling
the last pebble, which only removes options from Spoiler that picking the
doubled pebble gives back.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, KTooSmall
from .joins import pebbled_part_individualizations, pebbled_part_vertices
from .matching import has_perfect_matching
from .structures import RelStructure

SPOILER = "Spoiler"
DUPLICATOR = "Duplicator"

DEFAULT_MAX_TUPLES = 4_000_000
DENSE_LIMIT = 4_000_000


@dataclass(frozen=True)
class StableColoring:
    dim: int
    colors: np.ndarray
    histogram: Counter
    rounds: int

    def color(self, tup: Sequence[int]) -> int:
        return int(self.colors[tuple(tup)])


@dataclass(frozen=True)
class GameVerdict:
    winner: str
    depth: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def spoiler_wins(self) -> bool:
        return self.winner == SPOILER


class _Side:
    """Dense per-vertex data for atomic-type computation."""

    def __init__(self, n: int, color: np.ndarray, ipos: np.ndarray, rels: dict[str, tuple[int, set]]):
        self.n = n
        self.color = color
        self.ipos = ipos
        self.rels = rels

    @classmethod
    def of(cls, s: RelStructure) -> "_Side":
        return cls(s.n, np.array(s.color_of, dtype=np.int64), np.array(s.indiv_pos, dtype=np.int64),
                   {k: (r.arity, r.tuples) for k, r in s.relations.items()})

    @classmethod
    def union(cls, a: RelStructure, b: RelStructure) -> "_Side":
        """Disjoint union; classes merged by index, individualization positions kept per side."""
        rels: dict[str, tuple[int, set]] = {}
        for s, off in ((a, 0), (b, a.n)):
            for k, r in s.relations.items():
                ar, ts = rels.setdefault(k, (r.arity, set()))
                ts.update(tuple(x + off for x in t) for t in r.tuples)
        color = np.array(a.color_of + b.color_of, dtype=np.int64)
        ipos = np.array(a.indiv_pos + b.indiv_pos, dtype=np.int64)
        return cls(a.n + b.n, color, ipos, rels)

    def dense(self, name: str, arity: int) -> np.ndarray:
        if self.n ** arity > DENSE_LIMIT:
            raise BudgetExceeded(f"relation {name} of arity {arity} too large to tabulate")
        d = np.zeros((self.n,) * arity, dtype=bool)
        tuples = self.rels.get(name, (arity, set()))[1]
        if tuples:
            idx = np.array(sorted(tuples), dtype=np.int64)
            d[tuple(idx.T)] = True
        return d


def _compress(codes: list[np.ndarray]) -> list[np.ndarray]:
    flat = np.concatenate([c.ravel() for c in codes])
    _, inv = np.unique(flat, return_inverse=True)
    out, off = [], 0
    for c in codes:
        out.append(inv[off:off + c.size].reshape(c.shape).astype(np.int64))
        off += c.size
    return out


def _push(codes: list[np.ndarray], feats: list[np.ndarray], base: int) -> list[np.ndarray]:
    codes = [c * base + f for c, f in zip(codes, feats)]
    if max(int(c.max(initial=0)) for c in codes) > (1 << 40):
        codes = _compress(codes)
    return codes


def atomic_types(sides: Sequence[_Side], m: int) -> list[np.ndarray]:
    """Jointly ranked atomic-type codes of all m-tuples on each side."""
    for sd in sides:
        if sd.n ** m > DEFAULT_MAX_TUPLES:
            raise BudgetExceeded(f"{sd.n}^{m} tuples exceed the budget")
    grids = [np.indices((sd.n,) * m, sparse=True) if m else () for sd in sides]
    codes = [np.zeros((sd.n,) * m, dtype=np.int64) for sd in sides]
    for i in range(m):
        for j in range(i + 1, m):
            feats = [np.broadcast_to(g[i] == g[j], (sd.n,) * m).astype(np.int64)
                     for sd, g in zip(sides, grids)]
            codes = _push(codes, feats, 2)
    span = max((int(sd.ipos.max(initial=0)) for sd in sides), default=0) + 1
    vmax = max((int(sd.color.max(initial=0)) for sd in sides), default=0) * span + span
    for i in range(m):
        feats = [np.broadcast_to((sd.color * span + sd.ipos)[g[i]], (sd.n,) * m)
                 for sd, g in zip(sides, grids)]
        codes = _push(codes, feats, vmax)
    names = sorted({k for sd in sides for k in sd.rels})
    for name in names:
        arity = next(sd.rels[name][0] for sd in sides if name in sd.rels)
        dens = [sd.dense(name, arity) for sd in sides]
        for sigma in product(range(m), repeat=arity):
            feats = [np.broadcast_to(d[tuple(g[p] for p in sigma)], (sd.n,) * m).astype(np.int64)
                     for sd, d, g in zip(sides, dens, grids)]
            codes = _push(codes, feats, 2)
    return _compress(codes)


def _substituted(c: np.ndarray, i: int, d: int) -> np.ndarray:
    """View of ``c[u with position i replaced by w]`` with axes (u_0..u_{d-1}, w)."""
    n = c.shape[0]
    moved = np.moveaxis(c, i, -1)
    return np.broadcast_to(np.expand_dims(moved, axis=i), (n,) * (d + 1))


def _wl(side: _Side, d: int, max_rounds: int | None = None) -> tuple[np.ndarray, int]:
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if side.n ** (d + 1) > DEFAULT_MAX_TUPLES:
        raise BudgetExceeded(f"{side.n}^{d + 1} tuples exceed the WL budget")
    n = side.n
    col = atomic_types([side], d)[0]
    ext = atomic_types([side], d + 1)[0]
    count = len(np.unique(col))
    rounds = 0
    while True:
        parts = [ext] + [_substituted(col, i, d) for i in range(d)]
        stacked = np.stack([p.reshape(-1) for p in parts], axis=1)
        _, pair_id = np.unique(stacked, axis=0, return_inverse=True)
        pair_id = pair_id.reshape((n,) * d + (n,))
        sig = np.sort(pair_id.reshape(-1, n), axis=1)
        rows = np.concatenate([col.reshape(-1, 1), sig], axis=1)
        _, new = np.unique(rows, axis=0, return_inverse=True)
        new = new.reshape((n,) * d).astype(np.int64)
        rounds += 1
        new_count = len(np.unique(new))
        col = new
        if new_count == count or (max_rounds is not None and rounds >= max_rounds):
            return col, rounds
        count = new_count


def wl_refine(s: RelStructure, d: int) -> StableColoring:
    """Stable d-dimensional coloring of ``s``."""
    col, rounds = _wl(_Side.of(s), d)
    hist = Counter(col.ravel().tolist())
    return StableColoring(d, col, hist, rounds)


def _side_histograms(col: np.ndarray, na: int) -> tuple[Counter, Counter]:
    d = col.ndim
    a = col[(slice(0, na),) * d]
    b = col[(slice(na, None),) * d]
    return Counter(a.ravel().tolist()), Counter(b.ravel().tolist())


def ck_equivalent(a: RelStructure, b: RelStructure, k: int) -> bool:
    """Whether ``a`` and ``b`` satisfy the same C^k sentences."""
    if k < 2:
        raise KTooSmall("C^k equivalence is decided for k >= 2")
    if a.n != b.n:
        return False
    if len(a.indiv) != len(b.indiv):
        return False
    col, _ = _wl(_Side.union(a, b), k - 1)
    ha, hb = _side_histograms(col, a.n)
    return ha == hb


# -- bijective pebble game -----------------------------------------------------


def _padded(pins: Sequence[int], k: int) -> tuple[int, ...]:
    pins = tuple(pins)
    return pins + (pins[-1],) * (k - len(pins))


def _game_fixpoint(ta: np.ndarray, tb: np.ndarray, sub_a: np.ndarray, sub_b: np.ndarray,
                   n: int, k: int, win: np.ndarray) -> tuple[np.ndarray, int]:
    """Close the Spoiler-winning set ``win`` (shape (n,)*k + (n,)*k) under pebble moves.

    ``sub_a``/``sub_b`` hold atomic types of (k-1)-tuples: contexts whose types
    differ are already won everywhere and are skipped.
    """
    rounds = 0
    dead = [np.zeros((n,) * (2 * (k - 1)), dtype=bool) for _ in range(k)]
    live = [(sub_a.reshape((n,) * (k - 1) + (1,) * (k - 1))
             == sub_b.reshape((1,) * (k - 1) + (n,) * (k - 1))) for _ in range(k)]
    while True:
        rounds += 1
        changed = False
        for i in range(k):
            # axes: A context (k-1), B context (k-1), A pebble i, B pebble i
            view = np.moveaxis(win, [i, k + i], [2 * k - 2, 2 * k - 1])
            cand = np.argwhere(live[i] & ~dead[i])
            newly = []
            for ctx in cand:
                safe = ~view[tuple(ctx)]
                if not has_perfect_matching(safe):
                    newly.append(tuple(ctx))
            for ctx in newly:
                dead[i][ctx] = True
                view[ctx] = True
                changed = True
        if not changed:
            return win, rounds


def _prepare(a: RelStructure, b: RelStructure, k: int):
    sa, sb = _Side.of(a), _Side.of(b)
    ta, tb = atomic_types([sa, sb], k)
    if k > 1:
        ua, ub = atomic_types([sa, sb], k - 1)
    else:
        ua, ub = np.zeros(()), np.zeros(())
    n = a.n
    win = ta.reshape((n,) * k + (1,) * k) != tb.reshape((1,) * k + (n,) * k)
    return ta, tb, ua, ub, np.ascontiguousarray(win)


def _check_game_budget(n: int, k: int, max_positions: int | None) -> None:
    limit = max_positions if max_positions is not None else 12 ** 4
    if n ** (2 * k) > max(limit, 12 ** 4 if k == 2 else 9 ** 6):
        raise BudgetExceeded(f"{n}^{2 * k} game positions exceed the budget")


def _verdict_from(win: np.ndarray, n: int, k: int, pa: Sequence[int], pb: Sequence[int]) -> bool:
    """Whether Spoiler wins from the pinned start position."""
    if pa:
        return bool(win[_padded(pa, k) + _padded(pb, k)])
    diag = np.empty((n, n), dtype=bool)
    for w in range(n):
        for x in range(n):
            diag[w, x] = win[(w,) * k + (x,) * k]
    return not has_perfect_matching(~diag)


def bijective_game_decide(a: RelStructure, a_pins: Sequence[int], b: RelStructure,
                          b_pins: Sequence[int], k: int, *,
                          max_positions: int | None = None) -> GameVerdict:
    """Exact winner of the bijective k-pebble game from the pinned position."""
    if k < 1:
        raise KTooSmall("need at least one pebble")
    if len(a_pins) != len(b_pins) or len(a_pins) > k:
        raise ValueError("pins must have equal length at most k")
    if a.n != b.n:
        return GameVerdict(SPOILER, 0, {"reason": "sizes differ"})
    if len(a.indiv) != len(b.indiv):
        return GameVerdict(SPOILER, 0, {"reason": "individualizations differ"})
    n = a.n
    if n == 0:
        return GameVerdict(DUPLICATOR)
    _check_game_budget(n, k, max_positions)
    ta, tb, ua, ub, win = _prepare(a, b, k)
    win, rounds = _game_fixpoint(ta, tb, ua, ub, n, k, win)
    if _verdict_from(win, n, k, a_pins, b_pins):
        return GameVerdict(SPOILER, rounds)
    return GameVerdict(DUPLICATOR)


# -- P^k game ------------------------------------------------------------------


def _wl_position_wins(a: RelStructure, b: RelStructure, k: int) -> np.ndarray:
    """Spoiler-winning full k-positions of the plain game, read off (k-1)-WL colors."""
    n = a.n
    col, _ = _wl(_Side.union(a, b), k - 1)
    ta, tb = atomic_types([_Side.of(a), _Side.of(b)], k)
    win = ta.reshape((n,) * k + (1,) * k) != tb.reshape((1,) * k + (n,) * k)
    ca = col[(slice(0, n),) * (k - 1)]
    cb = col[(slice(n, None),) * (k - 1)]
    for i in range(k):
        # color of the (k-1)-subtuple without position i, broadcast over position i
        sa = np.expand_dims(ca, axis=i)
        sb = np.expand_dims(cb, axis=i)
        win = win | (sa.reshape(sa.shape + (1,) * k) != sb.reshape((1,) * k + sb.shape))
    return win


def _partial_iso(a: RelStructure, b: RelStructure, xs: Sequence[int], ys: Sequence[int]) -> bool:
    if len(xs) != len(ys):
        return False
    ca, cb = a.color_of, b.color_of
    if any(ca[x] != cb[y] for x, y in zip(xs, ys)):
        return False
    pos = {x: y for x, y in zip(xs, ys)}
    for name, r in a.relations.items():
        rb = b.relations.get(name)
        for t in r.tuples:
            if all(v in pos for v in t):
                if rb is None or tuple(pos[v] for v in t) not in rb.tuples:
                    return False
        if rb is not None:
            inv = {y: x for x, y in pos.items()}
            for t in rb.tuples:
                if all(v in inv for v in t) and tuple(inv[v] for v in t) not in r.tuples:
                    return False
    return True


def pk_game_decide(a, b, k: int, *, max_responses: int = 40320) -> GameVerdict:
    """Winner of the game with one additional P-move, on CFI graphs over joins.

    The P-move individualizes all pebbled-part vertices on both sides.  By
    symmetry of individualization positions, Spoiler's ordering can be fixed
    to the sorted one; Duplicator answers with any ordering of the other
    side's pebbled-part vertices.  After the move the plain game is played
    on the individualized structures.
    """
    if k < 3:
        raise KTooSmall("the P-move game needs k >= 3")
    ga, gb = a.graph, b.graph
    if ga.n != gb.n:
        return GameVerdict(SPOILER, 0, {"reason": "sizes differ"})
    n = ga.n
    _check_game_budget(n, k, None)
    ta, tb, ua, ub, win = _prepare(ga, gb, k)

    def p_set(c, tup) -> tuple[int, ...]:
        return tuple(pebbled_part_vertices(c, tup))

    cache: dict = {}

    def post_move(sa: tuple, sb: tuple) -> np.ndarray:
        """Positions Spoiler wins for every Duplicator answer after the P-move on (sa, sb)."""
        key = (sa, sb)
        if key in cache:
            return cache[key]
        all_win = np.ones((n,) * (2 * k), dtype=bool)
        if len(sa) == len(sb):
            count = 0
            for resp in pebbled_part_individualizations(b, _first_of(b, sb)):
                if set(resp) != set(sb):
                    continue
                count += 1
                if count > max_responses:
                    raise BudgetExceeded("too many Duplicator responses to the P-move")
                if not _partial_iso(ga, gb, sa, resp):
                    continue
                all_win &= _wl_position_wins(ga.individualize(sa), gb.individualize(resp), k)
                if not all_win.any():
                    break
        cache[key] = all_win
        return all_win

    groups: dict[tuple, list] = {}
    for ua_t in product(range(n), repeat=k):
        groups.setdefault(p_set(a, ua_t), []).append(ua_t)
    groups_b: dict[tuple, list] = {}
    for vb_t in product(range(n), repeat=k):
        groups_b.setdefault(p_set(b, vb_t), []).append(vb_t)
    pwin = np.zeros((n ** k, n ** k), dtype=bool)
    shape = (n,) * k
    for sa, rows in groups.items():
        ia = np.ravel_multi_index(np.array(rows).T, shape)
        for sb, cols in groups_b.items():
            ib = np.ravel_multi_index(np.array(cols).T, shape)
            pw = post_move(sa, sb).reshape(n ** k, n ** k)
            pwin[np.ix_(ia, ib)] = pw[np.ix_(ia, ib)]
    pwin = pwin.reshape(win.shape)
    start_sets = (p_set(a, ()), p_set(b, ()))
    win = win | pwin
    win, rounds = _game_fixpoint(ta, tb, ua, ub, n, k, win)
    spoiler = _verdict_from(win, n, k, (), ())
    if not spoiler:
        spoiler = _empty_p_move_wins(ga, gb, start_sets, b, k, max_responses)
    return GameVerdict(SPOILER if spoiler else DUPLICATOR, rounds if spoiler else None)


def _first_of(c, verts: Sequence[int]) -> tuple[int, ...]:
    """Pins reproducing the pebbled-part set ``verts``: one vertex per pebbled part."""
    from .joins import cfi_part_map

    pm = cfi_part_map(c)
    seen, pins = set(), []
    for v in verts:
        p = pm[v]
        if p is not None and p not in seen:
            seen.add(p)
            pins.append(v)
    return tuple(pins)


def _empty_p_move_wins(ga, gb, sets, b, k, max_responses) -> bool:
    """Spoiler opens with the P-move before placing any pebble."""
    sa, sb = sets
    if len(sa) != len(sb):
        return True
    count = 0
    for resp in pebbled_part_individualizations(b, ()):
        count += 1
        if count > max_responses:
            raise BudgetExceeded("too many Duplicator responses to the P-move")
        if _partial_iso(ga, gb, sa, resp) and ck_equivalent(ga.individualize(sa), gb.individualize(resp), k):
            return False
    return True
