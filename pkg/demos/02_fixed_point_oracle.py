"""Checking the interpreter against a fixed-point definition of the run.

Every run can be written as a simultaneous induction over step numbers:
D_f(i, x, y) holds when f(x) = y after i steps.  `crosscheck` builds that
system, evaluates it over a finite set of objects and compares each fact
with the interpreter.

There are two ways to handle clashing updates.  With "operational" a clash
anywhere voids the whole step, as the interpreter does.  With "block" a
clash only silences the do-forall block it occurs in.  The nested-clash
program separates the two.
"""

from cpt.corpus import CORPUS, path_graph
from cpt.lfp import ClashMode, crosscheck, formula_to_text
from cpt.structio import gen_naked

reach = CORPUS["choiceless-reachability"]
rep = crosscheck(reach.program(), path_graph(4), reach.budget())
print("reachability on a 4-path:", rep.summary())
print(f"  {rep.levels_checked} levels, {rep.oracle_facts} facts, domain of {rep.domain_size} objects")

first = rep.system.order[0]
body = formula_to_text(rep.system.defs[first].body)
print(f"\nthe definition of {first} starts with:\n  {body[:300]}...")

clash = CORPUS["nested-clash"]
print("\n" + clash.text())
for mode in ClashMode:
    r = crosscheck(clash.program(), gen_naked(1), clash.budget(), mode)
    print(f"{mode.value:12s} {r.summary()}")
