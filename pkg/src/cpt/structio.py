"""Input structures: text format, initial states and benchmark generators."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .evaluate import State
from .hf import Universe


class StructureError(ValueError):
    pass


class VocabularyMismatch(ValueError):
    pass


@dataclass
class InputStructure:
    atom_count: int
    # name -> (arity, set of atom-index tuples)
    relations: dict[str, tuple[int, frozenset]] = field(default_factory=dict)

    def __post_init__(self):
        for name, (ar, tuples) in list(self.relations.items()):
            tuples = frozenset(tuple(t) for t in tuples)
            for t in tuples:
                if len(t) != ar:
                    raise StructureError(f"{name}: tuple {t} does not have arity {ar}")
                for x in t:
                    if not (0 <= x < self.atom_count):
                        raise StructureError(f"{name}: index {x} out of range")
            self.relations[name] = (ar, tuples)

    def holds(self, name: str, *args: int) -> bool:
        return tuple(args) in self.relations[name][1]

    def permuted(self, perm) -> "InputStructure":
        """Image under the atom permutation i -> perm[i]."""
        rels = {name: (ar, frozenset(tuple(perm[x] for x in t) for t in ts))
                for name, (ar, ts) in self.relations.items()}
        return InputStructure(self.atom_count, rels)


# -- text format ------------------------------------------------------------------

_TOK = re.compile(r"\s+|--[^\n]*|(\d+|[A-Za-z_][A-Za-z0-9_]*|[/{}(),])")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOK.match(text, pos)
        if m is None:
            raise StructureError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.group(1):
            out.append(m.group(1))
        pos = m.end()
    return out


def parse_structure(text: str) -> InputStructure:
    toks = _tokens(text)
    i = 0

    def take(expected=None):
        nonlocal i
        if i >= len(toks):
            raise StructureError("unexpected end of structure")
        t = toks[i]
        if expected is not None and t != expected:
            raise StructureError(f"expected {expected!r}, found {t!r}")
        i += 1
        return t

    def nat():
        t = take()
        if not t.isdigit():
            raise StructureError(f"expected a number, found {t!r}")
        return int(t)

    take("atoms")
    n = nat()
    rels: dict = {}
    while toks[i:i + 1] != ["end"]:
        take("relation")
        name = take()
        if name in rels:
            raise StructureError(f"relation {name} given twice")
        take("/")
        ar = nat()
        take("{")
        tuples = set()
        while toks[i:i + 1] == ["("]:
            take("(")
            t = [nat()]
            while toks[i:i + 1] == [","]:
                take(",")
                t.append(nat())
            take(")")
            if len(t) != ar:
                raise StructureError(f"{name}: tuple {tuple(t)} does not have arity {ar}")
            tuples.add(tuple(t))
        take("}")
        rels[name] = (ar, frozenset(tuples))
    take("end")
    if i != len(toks):
        raise StructureError(f"unexpected {toks[i]!r} after end")
    return InputStructure(n, rels)


def format_structure(s: InputStructure) -> str:
    lines = [f"atoms {s.atom_count}"]
    for name, (ar, tuples) in s.relations.items():
        body = "".join("(" + ",".join(map(str, t)) + ")" for t in sorted(tuples))
        lines.append(f"relation {name}/{ar} {{{body}}}")
    lines.append("end")
    return "\n".join(lines) + "\n"


# -- initial state ----------------------------------------------------------------------

def check_vocabulary(program, s: InputStructure) -> None:
    """Every declared input relation must be present with its arity.
    Extra relations in the structure are ignored."""
    for name, ar in program.vocab.inputs.items():
        if name not in s.relations:
            raise VocabularyMismatch(f"input relation {name} missing from structure")
        if s.relations[name][0] != ar:
            raise VocabularyMismatch(
                f"input relation {name} has arity {s.relations[name][0]}, program expects {ar}")


def initial_state(program, s: InputStructure, universe: Universe | None = None) -> State:
    check_vocabulary(program, s)
    u = universe if universe is not None else Universe(s.atom_count)
    if u.atom_count != s.atom_count:
        raise VocabularyMismatch("universe atom count differs from structure")
    inputs = {name: s.relations[name][1] for name in program.vocab.inputs}
    statics = {}
    if program.vocab.input_size:
        statics["InputSize"] = u.ordinal(s.atom_count)
    return State(u, program.vocab, inputs=inputs, statics=statics)


# -- generators --------------------------------------------------------------------------

def gen_naked(n: int) -> InputStructure:
    if n < 0:
        raise StructureError("size must be non-negative")
    return InputStructure(n)


def gen_colored(sizes, prefix: str = "C") -> InputStructure:
    """Atoms split into consecutive color classes C0, C1, ... of the given sizes."""
    if any(k < 0 for k in sizes):
        raise StructureError("color sizes must be non-negative")
    rels = {}
    start = 0
    for c, k in enumerate(sizes):
        rels[f"{prefix}{c}"] = (1, frozenset((x,) for x in range(start, start + k)))
        start += k
    return InputStructure(start, rels)


def color_classes(s: InputStructure) -> list[frozenset[int]]:
    """The color classes of a colored set; raises if the unary relations do
    not partition the atoms."""
    classes = []
    seen: set[int] = set()
    for name, (ar, tuples) in s.relations.items():
        if ar != 1:
            raise StructureError(f"colored sets have unary relations only; {name} has arity {ar}")
        cls = frozenset(t[0] for t in tuples)
        if cls & seen:
            raise StructureError(f"color {name} overlaps another color")
        seen |= cls
        classes.append(cls)
    if seen != set(range(s.atom_count)):
        raise StructureError("colors do not cover every atom")
    return classes


def is_colored_set(s: InputStructure) -> bool:
    try:
        color_classes(s)
    except StructureError:
        return False
    return True


def _bipartite(left_blocks, right_blocks) -> InputStructure:
    boys = sum(left_blocks)
    girls = sum(right_blocks)
    edges = set()
    b0, g0 = 0, boys
    for lb, rb in zip(left_blocks, right_blocks):
        for b in range(b0, b0 + lb):
            for g in range(g0, g0 + rb):
                edges.add((b, g))
        b0 += lb
        g0 += rb
    return InputStructure(boys + girls, {
        "Boy": (1, frozenset((x,) for x in range(boys))),
        "Girl": (1, frozenset((x,) for x in range(boys, boys + girls))),
        "E": (2, frozenset(edges)),
    })


def gen_bipartite_G0(p: int) -> InputStructure:
    """Two disjoint complete p x p blocks; has a perfect matching."""
    if p < 1:
        raise StructureError("p must be positive")
    return _bipartite([p, p], [p, p])


def gen_bipartite_G1(p: int) -> InputStructure:
    """Complete blocks (p+1) x p and (p-1) x p; no perfect matching."""
    if p < 2:
        raise StructureError("p must be at least 2")
    return _bipartite([p + 1, p - 1], [p, p])


def gen_vector_space_example(dim: int, extra: int) -> InputStructure:
    """Atoms 0..2^dim-1 are the vectors of GF(2)^dim (atom index = bit
    vector), with Add(x,y,z) iff x+y=z; atoms after them form the set S."""
    if dim < 0 or extra < 0:
        raise StructureError("dim and extra must be non-negative")
    size = 1 << dim
    add = frozenset((x, y, x ^ y) for x in range(size) for y in range(size))
    return InputStructure(size + extra, {
        "V": (1, frozenset((x,) for x in range(size))),
        "S": (1, frozenset((x,) for x in range(size, size + extra))),
        "Add": (3, add),
    })


def gen_graph(n: int, edges, source=None, target=None) -> InputStructure:
    """Directed graph with optional unary source/target markers S and T."""
    rels = {"E": (2, frozenset(edges))}
    if source is not None:
        rels["S"] = (1, frozenset({(source,)}))
    if target is not None:
        rels["T"] = (1, frozenset({(target,)}))
    return InputStructure(n, rels)
