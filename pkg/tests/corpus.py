"""Small structures (at most 8 vertices) used by the game and logic cross-checks."""

import random

from cfiwsc.cfi import build_cfi
from cfiwsc.structures import ColoredGraph, RelStructure, disjoint_union

from conftest import random_graph


def cycle(n):
    return ColoredGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def circulant(n, steps):
    return ColoredGraph.from_edges(n, {tuple(sorted((i, (i + s) % n))) for i in range(n) for s in steps})


def cubic_eight():
    cube = ColoredGraph.from_edges(8, [(a, a ^ (1 << i)) for a in range(8) for i in range(3) if a < a ^ (1 << i)])
    wagner = circulant(8, [1, 4])
    k4 = circulant(4, [1, 2])
    two_k4 = disjoint_union(k4, k4)
    # two further cubic graphs on 8 vertices
    x = ColoredGraph.from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4),
                                    (0, 4), (1, 6), (2, 5), (3, 7)])
    y = ColoredGraph.from_edges(8, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (0, 6), (1, 7),
                                    (2, 6), (3, 7), (4, 6), (5, 7)])
    return [cube, wagner, two_k4, x, y]


def corpus():
    out = [cycle(6), disjoint_union(cycle(3), cycle(3)), cycle(8),
           disjoint_union(cycle(4), cycle(4)), cycle(7), disjoint_union(cycle(3), cycle(4))]
    out += cubic_eight()
    c6 = cycle(6)
    out += [c6.individualize([0]), c6.individualize([1]), c6.individualize([0, 3]),
            c6.individualize([0, 2])]
    out += [ColoredGraph.from_edges(6, c6.edges, [[0, 3], [1, 2, 4, 5]]),
            ColoredGraph.from_edges(6, c6.edges, [[0, 1], [2, 3, 4, 5]]),
            ColoredGraph.from_edges(6, c6.edges, [[0, 2, 4], [1, 3, 5]])]
    out += [RelStructure(4, {"R": (3, {(0, 1, 2), (1, 2, 3)})}),
            RelStructure(4, {"R": (3, {(0, 1, 2), (2, 3, 0)})}),
            RelStructure(4, {"R": (3, {(0, 1, 1), (2, 3, 3)})}),
            RelStructure(4, {"R": (3, {(0, 1, 1), (1, 2, 2)})})]
    edge = ColoredGraph.from_edges(2, [(0, 1)])
    out += [build_cfi(edge, 0).graph, build_cfi(edge, 1).graph]
    rng = random.Random(2024)
    while len(out) < 36:
        n = rng.choice([5, 6, 7, 8])
        out.append(random_graph(n, 0.45, rng, classes=rng.choice([1, 1, 2])))
    return out
