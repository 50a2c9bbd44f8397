"""Hide a CFI parity inside an asymmetric multipede and read it back out."""

import random

from cfiwsc.automorphisms import automorphisms, isomorphic
from cfiwsc.cfi import SINGLE_PAIR, build_cfi, complete_graph
from cfiwsc.gluing import classify_fixed_segments, extract_cfi, glue
from cfiwsc.multipede import build_multipede, is_odd, sample_bipartite

base = sample_bipartite(12, 0.8, 7)
print("odd base:", is_odd(base))
m = build_multipede(base)

segments = sorted(random.Random(0).sample(range(base.n_segments), 6))
for parity in (0, 1):
    c = build_cfi(complete_graph(4), parity, SINGLE_PAIR)
    g = glue(m, segments, c)
    roundtrip = isomorphic(extract_cfi(g), c.graph) is not None
    print(f"parity {parity}: universe {g.structure.n}, "
          f"automorphisms {len(automorphisms(g.structure))}, roundtrip {roundtrip}")

pins = [0, g.multipede.structure.n]
fs = classify_fixed_segments(g, pins)
print("pinning", pins, "fixes", sorted(fs.total), "segments")
