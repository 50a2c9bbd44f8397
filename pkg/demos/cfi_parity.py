"""Two CFI graphs over K4 with opposite twist parity.

Color refinement and 3-variable counting logic cannot tell them apart,
yet they are not isomorphic. Moving the twist along a path keeps the class.
"""

from cfiwsc.automorphisms import isomorphic
from cfiwsc.cfi import build_cfi, complete_graph, path_twist_iso
from cfiwsc.equivalence import ck_equivalent

k4 = complete_graph(4)
even, odd = build_cfi(k4, 0), build_cfi(k4, 1)
print("vertices:", even.graph.n)
print("C^3 equivalent:", ck_equivalent(even.graph, odd.graph, 3))
print("isomorphic:", isomorphic(even.graph, odd.graph) is not None)

moved, _ = path_twist_iso(odd, [0, 1, 2])
print("twist after moving along 0-1-2:", moved.twist)
print("still isomorphic to the odd graph:", isomorphic(moved.graph, odd.graph) is not None)
