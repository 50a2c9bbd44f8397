from math import factorial

import pytest

from cfiwsc.automorphisms import isomorphic, orbits
from cfiwsc.cfi import build_cfi, complete_graph, cycle_graph
from cfiwsc.errors import ClassCountMismatch, DisconnectedPartError
from cfiwsc.joins import (cfi_omega, cfi_part_map, color_class_join, join_from_meta, join_meta,
                          pebbled_part_individualizations, pebbled_part_vertices)
from cfiwsc.structures import ColoredGraph


def two_class_path(n):
    return ColoredGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)],
                                   [list(range(0, n, 2)), list(range(1, n, 2))])


def three_class_graph():
    # a 9-vertex graph with three color classes
    return ColoredGraph.from_edges(9, [(i, (i + 1) % 9) for i in range(9)],
                                   [[0, 3, 6], [1, 4, 7], [2, 5, 8]])


def test_single_part_join():
    g = two_class_path(4)
    j = color_class_join([g])
    assert j.graph.n == g.n + 2
    assert len(j.graph.colors) == 4


def test_three_copies():
    g = three_class_graph()
    j = color_class_join([g, g, g])
    assert j.graph.n == 30 and len(j.graph.colors) == 6
    for i, u in enumerate(j.join_vertices):
        assert set(j.graph.neighbors[u]) == set(j.graph.colors[i])


def test_join_errors():
    with pytest.raises(ClassCountMismatch):
        color_class_join([two_class_path(4), three_class_graph()])
    split = ColoredGraph.from_edges(4, [(0, 1), (2, 3)], [[0, 2], [1, 3]])
    with pytest.raises(DisconnectedPartError):
        color_class_join([split])


def test_non_isomorphic_parts_lie_in_different_orbits():
    a = two_class_path(4)
    b = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], [[0, 2], [1, 3]])
    j = color_class_join([a, b])
    for o in orbits(j.graph):
        parts = {j.part_of(v) for v in o}
        assert len(parts) == 1


def test_orbits_never_mix_part_and_join_vertices():
    g = two_class_path(3)
    h = ColoredGraph.from_edges(3, [(0, 1), (1, 2)], [[0], [1, 2]])
    j = color_class_join([g, g, h])
    induced = {p.index: j.graph.induced(p.vertices) for p in j.parts}
    for o in orbits(j.graph):
        parts = {j.part_of(v) for v in o}
        assert None not in parts or parts == {None}
        if None not in parts:
            # identical parts may be swapped, but only isomorphic ones
            first = induced[min(parts)]
            assert all(isomorphic(first, induced[p]) is not None for p in parts)
    assert any(len({j.part_of(v) for v in o}) > 1 for o in orbits(j.graph))


def test_pinning_one_part_keeps_other_orbits():
    g = two_class_path(3)
    j = color_class_join([g, g])
    base = orbits(j.graph)
    p0 = sorted(j.parts[0].vertices)
    pinned = orbits(j.graph.individualize([p0[0]]))
    other = j.parts[1].vertices
    restricted_before = {frozenset(o & other) for o in base if o & other}
    restricted_after = {frozenset(o & other) for o in pinned if o & other}
    assert restricted_before == restricted_after


def test_cfi_omega_parts():
    c3 = cycle_graph(3)
    j = cfi_omega(c3, 0, 1)
    assert len(j.parts) == 3
    parts = [j.graph.induced(p.vertices) for p in j.parts]
    classes = []
    for p in parts:
        for cls in classes:
            if isomorphic(cls[0], p) is not None:
                cls.append(p)
                break
        else:
            classes.append([p])
    assert len(classes) == 2
    assert len(cfi_omega(c3, 1, 2).parts) == 6
    for u in j.join_vertices:
        assert (u,) in j.graph.colors


def test_meta_roundtrip():
    j = cfi_omega(cycle_graph(3), 1)
    back = join_from_meta(j.graph, join_meta(j))
    assert back.parts == j.parts and back.join_vertices == j.join_vertices


def small_cfi_over_join():
    # CFI over the join of two 2-class paths: parts of 3 vertices, 2 join vertices
    g = two_class_path(3)
    return build_cfi(color_class_join([g, g]), 0)


def test_pins_touching_no_part():
    c = small_cfi_over_join()
    pm = cfi_part_map(c)
    join_only = [v for v, p in enumerate(pm) if p is None]
    assert pebbled_part_vertices(c, []) == join_only
    first = next(pebbled_part_individualizations(c, [], limit=1))
    assert sorted(first) == join_only


def test_pins_in_one_part():
    c = small_cfi_over_join()
    pm = cfi_part_map(c)
    pin = pm.index(0)
    m = pm.count(0)
    j = pm.count(None)
    for ind in pebbled_part_individualizations(c, [pin], limit=50):
        assert len(ind) == m + j
    seq = list(pebbled_part_individualizations(c, [pin], limit=20))
    assert seq == sorted(seq)


def test_full_count_is_factorial_on_tiny_instance():
    # a join of one edge-only part: CFI vertex count small enough to enumerate
    g = ColoredGraph.from_edges(2, [(0, 1)], [[0], [1]])
    c = build_cfi(color_class_join([g]), 0)
    vs = pebbled_part_vertices(c, [])
    assert len(vs) == 10
    assert sum(1 for _ in pebbled_part_individualizations(c, [])) == factorial(10)
    assert sum(1 for _ in pebbled_part_individualizations(c, [], limit=720)) == 720
