"""Pebble games: how many variables does it take to tell two structures apart?

With m pebble pairs Spoiler can tell structures apart exactly when some
sentence with m variables does.  The solver computes Duplicator's safe
region as a greatest fixed point.
"""

from cpt.games import separation_probe, solve
from cpt.structio import gen_bipartite_G0, gen_bipartite_G1, gen_colored, gen_naked

for a, b in ((3, 5), (4, 5), (1, 2)):
    for m in (2, 3, 4):
        v = solve(gen_naked(a), gen_naked(b), m)
        print(f"naked {a} vs {b}, m={m}: {v.winner.value:10s} safe region {len(v.certified_positions)}")

print("\ncolored (3,3) vs (4,2) first separated at m =",
      separation_probe(gen_colored([3, 3]), gen_colored([4, 2]), 4))

# one graph has a perfect matching and the other does not
print("G0 vs G1 with p=2 first separated at m =",
      separation_probe(gen_bipartite_G0(2), gen_bipartite_G1(2), 3))
