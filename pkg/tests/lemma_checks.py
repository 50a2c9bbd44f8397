"""Closure and local-automorphism lemma checks on multipede bases.

Each check takes a base and concrete sets and returns True when the
statement holds for them; the caller decides how sets are drawn.
"""

from itertools import product

from cfiwsc.automorphisms import is_automorphism
from cfiwsc.multipede import (closure, components, distance_to_set, feet_induced, feet_of)


def random_scattered(b, k, rng, limit=None):
    """Greedy 2k-distance set over a random segment order."""
    order = list(range(b.n_segments))
    rng.shuffle(order)
    dist = b.segment_distances
    out = []
    for w in order:
        if limit is not None and len(out) >= limit:
            break
        if all(dist[w, x] >= 2 * k for x in out):
            out.append(w)
    return out


def singleton_components(b, y):
    return {next(iter(c)) for c in components(b, y) if len(c) == 1}


def component_split(b, x):
    """Each component of closure(X) is the closure of its share of X."""
    y = closure(b, x)
    xs = set(x)
    return all(closure(b, c & xs) == c for c in components(b, y))


def singleton_far_segment(b, y, u):
    """For closed Y and u at distance >= 4 from Y, Y + u is closed and u is alone."""
    yu = set(y) | {u}
    return closure(b, yu) == frozenset(yu) and u in singleton_components(b, yu)


def few_lose_singleton(b, x, y):
    """At most |Y| scattered segments are not singleton components of closure(X + Y)."""
    z = closure(b, set(x) | set(y))
    alone = singleton_components(b, z)
    return sum(1 for w in x if w not in alone) <= len(set(y))


def distance_partition(b, x, y):
    """Components of closure(X + Y) come from a partition meeting X at most once each."""
    xy = set(x) | set(y)
    z = closure(b, xy)
    xs = set(x)
    for c in components(b, z):
        if closure(b, c & xy) != c or len(c & xs) > 1:
            return False
    return True


def new_vertices_bound(b, x, y):
    xs, ys = set(x), set(y)
    return len(closure(b, ys) & (xs - ys)) <= len(ys - xs)


def flip(z, flipped):
    """Permutation of feet_induced(Z) swapping the feet of the flipped segments."""
    zs = sorted(z)
    perm = []
    for i, w in enumerate(zs):
        if w in flipped:
            perm += [2 * i + 1, 2 * i]
        else:
            perm += [2 * i, 2 * i + 1]
    return tuple(perm)


def flip_automorphisms(m, z):
    """All automorphisms of feet_induced(m, Z), as sets of flipped segments."""
    zs = sorted(z)
    s = feet_induced(m, zs)
    out = []
    for bits in product((0, 1), repeat=len(zs)):
        f = frozenset(w for w, bit in zip(zs, bits) if bit)
        if is_automorphism(s, flip(zs, f)):
            out.append(f)
    return out


def extension_holds(m, x):
    """Every automorphism of the feet over X extends to the feet over closure(X)."""
    big = closure(m.base, x)
    xs = set(x)
    restricted = {f & xs for f in flip_automorphisms(m, big)}
    return set(flip_automorphisms(m, xs)) <= restricted


def scattered_freedom(m, x, y):
    """With X outside closure(Y), any flips over X combine with any automorphism over Y."""
    xy = sorted(set(x) | set(y))
    s = feet_induced(m, xy)
    xs = list(x)
    for phi in flip_automorphisms(m, y):
        for bits in product((0, 1), repeat=len(xs)):
            f = set(phi) | {w for w, bit in zip(xs, bits) if bit}
            if not is_automorphism(s, flip(xy, f)):
                return False
    return True


def far_segments(b, y, min_dist=4):
    return [u for u in range(b.n_segments) if u not in y and distance_to_set(b, u, y) >= min_dist]


__all__ = ["random_scattered", "component_split", "singleton_far_segment", "few_lose_singleton",
           "distance_partition", "new_vertices_bound", "extension_holds", "scattered_freedom",
           "far_segments", "feet_of"]
