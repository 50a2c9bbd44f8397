import random

import hypothesis.strategies as st
from hypothesis import settings

from cfiwsc.structures import ColoredGraph, RelStructure

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_graph(n, p, rng, classes=1):
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    cols = [[] for _ in range(classes)]
    for v in range(n):
        cols[rng.randrange(classes)].append(v)
    return ColoredGraph.from_edges(n, edges, [c for c in cols if c])


def random_perm(n, rng):
    p = list(range(n))
    rng.shuffle(p)
    return tuple(p)


@st.composite
def colored_graphs(draw, min_n=1, max_n=7, max_classes=3):
    n = draw(st.integers(min_n, max_n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, mask) if keep]
    labels = draw(st.lists(st.integers(0, max_classes - 1), min_size=n, max_size=n))
    cols = [[v for v in range(n) if labels[v] == c] for c in range(max_classes)]
    return ColoredGraph.from_edges(n, edges, [c for c in cols if c])


@st.composite
def ternary_structures(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    triples = draw(st.lists(st.tuples(*(st.integers(0, n - 1),) * 3), max_size=8))
    return RelStructure(n, {"R": (3, set(triples))})


@st.composite
def permutations_of(draw, n):
    return tuple(draw(st.permutations(list(range(n)))))


def relabeled(s, rng=None, seed=0):
    rng = rng or random.Random(seed)
    perm = random_perm(s.n, rng)
    return s.relabel(perm), perm


# -- acceptance reporting ------------------------------------------------------

CRITERIA: dict[int, str] = {}


def report_criterion(number, ok, detail=""):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    CRITERIA[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[number])
