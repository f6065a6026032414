"""The shipped example programs, with input families and expected verdicts."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from ..engine import Budget, Mode, Verdict, parse_poly
from ..lang import parse_program
from ..structio import (
    InputStructure, gen_graph, gen_naked, gen_vector_space_example,
)


@dataclass
class Entry:
    name: str
    filename: str
    description: str
    steps: str
    resource: str
    counting: bool = False
    input_size: bool = False
    # sample inputs: (label, structure)
    inputs: Callable[[], list] = lambda: []
    # expected verdict on a structure, or None if unconstrained
    expect: Callable[[InputStructure], Verdict | None] = lambda s: None

    def text(self) -> str:
        return resources.files(__package__).joinpath(self.filename).read_text()

    def program(self, sugar: bool = False):
        return parse_program(self.text(), counting=self.counting,
                             input_size=self.input_size, sugar=sugar)

    def budget(self, mode: Mode = Mode.ACTIVE) -> Budget:
        return Budget(parse_poly(self.steps), parse_poly(self.resource), mode)


def _verdict(b: bool) -> Verdict:
    return Verdict.ACCEPT if b else Verdict.REJECT


# -- reachability ------------------------------------------------------------------

def bfs_reachable(s: InputStructure) -> bool:
    """Oracle: is some T-vertex reachable from some S-vertex?"""
    edges = s.relations["E"][1]
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
    start = [t[0] for t in s.relations["S"][1]]
    seen = set(start)
    queue = deque(start)
    while queue:
        x = queue.popleft()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return any(t[0] in seen for t in s.relations["T"][1])


def random_graph(n: int, rng: random.Random, p: float | None = None) -> InputStructure:
    p = p if p is not None else min(1.0, 1.5 / max(n, 1))
    edges = {(a, b) for a in range(n) for b in range(n) if a != b and rng.random() < p}
    return gen_graph(n, edges, rng.randrange(n), rng.randrange(n))


def path_graph(n: int, reachable: bool = True) -> InputStructure:
    edges = {(i, i + 1) for i in range(n - 1)}
    if not reachable:
        edges.discard((n // 2 - 1, n // 2))
    return gen_graph(n, edges, 0, n - 1)


def _reach_inputs():
    rng = random.Random(7)
    out = [("path4", path_graph(4)), ("path5", path_graph(5)),
           ("broken4", path_graph(4, False)), ("broken6", path_graph(6, False))]
    for k in range(6):
        n = 3 + k % 4
        out.append((f"random{n}_{k}", random_graph(n, rng)))
    return out


# -- parity families ----------------------------------------------------------------

def unary_structure(n: int, k: int) -> InputStructure:
    """n atoms, the first k of which satisfy U."""
    return InputStructure(n, {"U": (1, frozenset((i,) for i in range(k)))})


def _u_parity(s: InputStructure) -> Verdict:
    return _verdict(len(s.relations["U"][1]) % 2 == 0)


def _orderings_inputs():
    out = []
    for k in range(0, 4):
        n = max(k, math.factorial(k), 1)
        out.append((f"U{k}_n{n}", unary_structure(n, k)))
    out.append(("U2_n6", unary_structure(6, 2)))
    out.append(("U3_n7", unary_structure(7, 3)))
    return out


def _subsets_inputs():
    out = []
    for k in range(0, 4):
        n = max(k, 2 ** k, 1)
        out.append((f"U{k}_n{n}", unary_structure(n, k)))
    out.append(("U2_n5", unary_structure(5, 2)))
    return out


def _naked_inputs():
    return [(f"naked{n}", gen_naked(n)) for n in range(1, 7)]


def _subspace_inputs():
    return [("dim1", gen_vector_space_example(1, 4)),
            ("dim2", gen_vector_space_example(2, 4)),
            ("dim2_s16", gen_vector_space_example(2, 16))]


CORPUS: dict[str, Entry] = {e.name: e for e in [
    Entry("choiceless-reachability", "reachability.cpt",
          "Reachability from S to T by parallel frontier expansion.",
          steps="n+5", resource="n^2+2*n+10",
          inputs=_reach_inputs, expect=lambda s: _verdict(bfs_reachable(s))),
    Entry("orderings-parity", "orderings_parity.cpt",
          "Parity of U from all orderings of U built in parallel; meant for |U|! <= n.",
          steps="2*n+10", resource="20*n^2+40",
          inputs=_orderings_inputs, expect=_u_parity),
    Entry("even-subsets-parity", "even_subsets_parity.cpt",
          "Parity of U from the family of its even subsets; meant for 2^|U| <= n.",
          steps="n+5", resource="10*n^2+20",
          inputs=_subsets_inputs, expect=_u_parity),
    Entry("subspace-growth", "subspace_growth.cpt",
          "Grows all proper subspaces of a GF(2) vector space one dimension per step.",
          steps="n", resource="4*n+10",
          inputs=_subspace_inputs, expect=lambda s: Verdict.ACCEPT),
    Entry("inputsize-parity", "inputsize_parity.cpt",
          "Accepts exactly the structures with an odd number of atoms, via InputSize.",
          steps="n+3", resource="n^2+3*n+10", input_size=True,
          inputs=_naked_inputs, expect=lambda s: _verdict(s.atom_count % 2 == 1)),
    Entry("counting-parity", "count_atoms.cpt",
          "Accepts exactly the structures with an odd number of atoms, via Card.",
          steps="n+3", resource="n^2+3*n+10", counting=True,
          inputs=_naked_inputs, expect=lambda s: _verdict(s.atom_count % 2 == 1)),
    Entry("nested-clash", "nested_clash.cpt",
          "Witness separating step-global clash resolution from per-block resolution.",
          steps="4", resource="n+10",
          inputs=lambda: [("naked1", gen_naked(1)), ("naked2", gen_naked(2))],
          expect=lambda s: Verdict.INDETERMINATE),
    Entry("accept-now", "accept_now.cpt", "Accepts in one step.",
          steps="3", resource="n+3", inputs=lambda: [("naked2", gen_naked(2))],
          expect=lambda s: Verdict.ACCEPT),
    Entry("reject-now", "reject_now.cpt", "Rejects in one step.",
          steps="3", resource="n+3", inputs=lambda: [("naked2", gen_naked(2))],
          expect=lambda s: Verdict.REJECT),
    Entry("pair-then-accept", "pair_then_accept.cpt",
          "Builds {Atoms}, then accepts.",
          steps="3", resource="n+5",
          inputs=lambda: [("naked2", gen_naked(2)), ("naked3", gen_naked(3))],
          expect=lambda s: Verdict.ACCEPT),
]}


def corpus() -> list[tuple[str, str]]:
    return [(e.name, e.description) for e in CORPUS.values()]


def get(name: str) -> Entry:
    return CORPUS[name]


def runs():
    """Every (entry, label, structure) sample pair."""
    for e in CORPUS.values():
        for label, s in e.inputs():
            yield e, label, s
