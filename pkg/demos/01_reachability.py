"""Reachability without choice.

The program keeps a frontier Y and a visited set X and expands every
frontier vertex at once.  It never picks a vertex, so it runs the same way
on isomorphic inputs.  We run it on a path, look at the step log, and then
see what happens when the resource budget is too small.
"""

from cpt.corpus import CORPUS, path_graph
from cpt.engine import Budget, Mode, parse_poly, run

entry = CORPUS["choiceless-reachability"]
program = entry.program()
print(entry.text())

g = path_graph(6)
res = run(program, g, entry.budget(), log=True)
print("\nstep log on a path with 6 vertices:")
for line in res.log:
    print(" ", line)
print(f"verdict {res.verdict.value} after {res.steps_taken} steps, "
      f"{res.active_count} active objects")

broken = path_graph(6, reachable=False)
print("\nsame path with the middle edge removed:",
      run(program, broken, entry.budget()).verdict.value)

# The active objects are the atoms, 0 and 1, plus every set the run has
# built.  A budget of n+2 leaves no room for the first frontier.
tight = Budget(parse_poly("n+5"), parse_poly("n+2"), Mode.ACTIVE)
r = run(program, g, tight)
print(f"\nwith resource n+2: {r.verdict.value} ({r.reason}), peak {r.resource_peak}")

# The relevant-objects measure also counts the extents themselves.
rel = run(program, g, Budget(parse_poly("n+5"), parse_poly("n^3"), Mode.RELEVANT))
print(f"relevant-mode run: {rel.verdict.value}, peak {rel.resource_peak}")
