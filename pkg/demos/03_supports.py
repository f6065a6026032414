"""How much of the input does each built object depend on?

An object is supported by a set of atoms X if every automorphism of the
input that fixes X pointwise also fixes the object.  Programs without
choice can only build objects with small supports.  Here the reachability
and parity programs never need more than one atom.  The subspace program
needs more as the dimension grows.
"""

from cpt.corpus import CORPUS, unary_structure
from cpt.hf import Universe
from cpt.structio import gen_graph, gen_vector_space_example
from cpt.symmetry import min_support, support_experiment

u = Universe(4)
s = gen_graph(4, set())
pair = u.mk_set([0, u.mk_set([1, 2])])
print("min support of", u.render(pair), "on a naked 4-set:",
      sorted(min_support(pair, s, u).min_support))


def show(name, inputs):
    e = CORPUS[name]
    print(f"\n{name}\n  n  max-min-support  active  verdict")
    for row in support_experiment(e.program(), inputs, e.budget()):
        print("  " + "  ".join(row.tsv().split("\t")))


show("choiceless-reachability", [(n, gen_graph(n, set(), 0, 1)) for n in range(4, 9)])
show("orderings-parity", [(n, unary_structure(n, 2)) for n in range(4, 9)])
show("subspace-growth", [("d2", gen_vector_space_example(2, 2)),
                         ("d3", gen_vector_space_example(3, 2))])
