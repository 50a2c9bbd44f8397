"""Witnessed symmetric choice: threshold graphs and canonization."""

from cfiwsc.automorphisms import isomorphic
from cfiwsc.cfi import build_cfi, cycle_graph
from cfiwsc.structures import ColoredGraph
from cfiwsc.wsc import BruteForceReady, gurevich_canonize, threshold_via_wsc

star = ColoredGraph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
path = ColoredGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
for name, g in [("star", star), ("path P4", path)]:
    out = threshold_via_wsc(g)
    print(f"{name}: verdict {out.verdict}, {len(out.log)} choice rounds")

ready = BruteForceReady()
c3 = cycle_graph(3)
canons = {f: gurevich_canonize(build_cfi(c3, f).graph, ready) for f in [(0, 0, 0), (1, 1, 0), (1, 0, 0)]}
print("even twists share a canon:", canons[(0, 0, 0)] == canons[(1, 1, 0)])
print("odd twist differs:", canons[(0, 0, 0)] != canons[(1, 0, 0)])
g = build_cfi(c3, (1, 0, 0)).graph
print("canon is isomorphic to its input:", isomorphic(canons[(1, 0, 0)].without_indiv(), g) is not None)
