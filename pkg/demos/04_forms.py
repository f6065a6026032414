"""Forms: describing symmetric objects without naming atoms.

A form combined with a molecule (an injective tuple of atoms) denotes an
object.  Symbols c_p denote the p-th atom of the molecule.  A set form lists
(form, configuration) pairs, and each pair contributes the denotations over
every molecule that overlaps the current one in the given pattern.
"""

from cpt.forms import (
    Realm, SetForm, Symbol, binary_configurations, config, eq_rel, form_of, form_to_text,
    in_rel, nat_form,
)
from cpt.hf import Universe
from cpt.structio import gen_naked

u = Universe(5)
realm = Realm(u)
sigma = (0, 1)

confs = binary_configurations(2)
print(f"{len(confs)} ways two 2-molecules can overlap:")
for e in confs:
    print("  ", e)

# first atoms of all molecules sharing nothing with sigma: the atoms 2, 3, 4
disjoint = config([(2, 3), (0, 1)])
phi = SetForm([(Symbol(0), disjoint)])
print("\n", form_to_text(phi), "*", sigma, "=", u.render(realm.denote(phi, sigma)))

two = nat_form(2, 2)
print("nat_form(2) denotes", u.render(realm.denote(two, sigma)))

# membership and equality are decided from the forms and configurations alone
e = config([(2, 0), (0, 1)])
print("\nIn(c0, phi, E) =", in_rel(Symbol(0), phi, e),
      "  direct:", u.contains(realm.denote(phi, sigma), realm.denote(Symbol(0), (2, 0))))
print("Eq(c1, c0, E) =", eq_rel(Symbol(1), Symbol(0), e))

# and every object supported by sigma has a form
x = u.mk_set([u.mk_set([0, a]) for a in (2, 3, 4)])
f = form_of(x, sigma, gen_naked(5), u)
print("\nform_of", u.render(x), "=", form_to_text(f))
print("round trip ok:", realm.denote(f, sigma) == x)
