import random

import pytest
from hypothesis import given, settings, strategies as st

from cpt.evaluate import eval_term
from cpt.lang import parse_program, parse_term
from cpt.structio import (
    InputStructure, StructureError, VocabularyMismatch, color_classes, format_structure,
    gen_bipartite_G0, gen_bipartite_G1, gen_colored, gen_graph, gen_naked,
    gen_vector_space_example, initial_state, is_colored_set, parse_structure,
)


def test_parse_examples():
    s = parse_structure("atoms 3 relation E/2 {(0,1)(1,2)} end")
    assert s.atom_count == 3 and s.relations["E"] == (2, frozenset({(0, 1), (1, 2)}))
    assert parse_structure("atoms 4 end") == InputStructure(4)
    dup = parse_structure("atoms 2 -- comment\nrelation U/1 {(0)(0)} end")
    assert dup.relations["U"][1] == {(0,)}


@pytest.mark.parametrize("text", [
    "atoms 3 relation E/2 {(0,1,2)} end",
    "atoms 2 relation U/1 {(5)} end",
    "atoms 2 relation U/1 {(0)}",
    "atoms x end",
    "atoms 2 end extra",
    "atoms 2 relation U/1 {} relation U/1 {} end",
    "atoms 2 ; end",
])
def test_parse_errors(text):
    with pytest.raises(StructureError):
        parse_structure(text)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.data())
def test_format_parse_roundtrip(n, data):
    edges = data.draw(st.frozensets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))
    marks = data.draw(st.frozensets(st.integers(0, n - 1)))
    s = InputStructure(n, {"E": (2, edges), "U": (1, frozenset((x,) for x in marks))})
    assert parse_structure(format_structure(s)) == s


def test_initial_state():
    p = parse_program("program skip")
    st_ = initial_state(p, gen_naked(3))
    assert st_.universe.atom_count == 3
    assert not st_.halted and st_.lookup("Output") == st_.universe.empty
    g = parse_program("input relation E/2; program skip")
    s = parse_structure("atoms 3 relation E/2 {(0,1)(1,2)} end")
    st2 = initial_state(g, s)
    u = st2.universe
    t = parse_term("E(x, y)", g.vocab, bound=("x", "y"))
    from cpt.evaluate import ExpandedState
    for a in range(3):
        for b in range(3):
            v = eval_term(t, ExpandedState(st2, {"x": a, "y": b}))
            assert v == (u.one if (a, b) in {(0, 1), (1, 2)} else u.empty)
    q = parse_program("program skip", input_size=True)
    st3 = initial_state(q, gen_naked(4))
    assert eval_term(parse_term("InputSize", q.vocab), st3) == st3.universe.ordinal(4)


def test_vocabulary_mismatch():
    g = parse_program("input relation E/2; program skip")
    with pytest.raises(VocabularyMismatch):
        initial_state(g, gen_naked(2))
    with pytest.raises(VocabularyMismatch):
        initial_state(g, InputStructure(2, {"E": (1, frozenset())}))
    # extra relations are ignored
    initial_state(g, InputStructure(2, {"E": (2, frozenset()), "F": (1, frozenset())}))


def test_initial_state_natural():
    g = parse_program("input relation E/2; input relation S/1; program skip")
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(1, 6)
        edges = {(rng.randrange(n), rng.randrange(n)) for _ in range(n)}
        s = gen_graph(n, edges, rng.randrange(n))
        perm = list(range(n))
        rng.shuffle(perm)
        a = initial_state(g, s.permuted(perm))
        b = initial_state(g, s)
        for name in ("E", "S"):
            assert a.inputs[name] == {tuple(perm[x] for x in t) for t in b.inputs[name]}


def test_generators():
    assert gen_naked(0).atom_count == 0
    g0 = gen_bipartite_G0(2)
    assert g0.atom_count == 8 and len(g0.relations["E"][1]) == 8
    g1 = gen_bipartite_G1(2)
    assert g1.atom_count == 8 and len(g1.relations["E"][1]) == 3 * 2 + 1 * 2
    with pytest.raises(StructureError):
        gen_bipartite_G1(1)
    with pytest.raises(StructureError):
        gen_naked(-1)
    v = gen_vector_space_example(2, 3)
    assert v.atom_count == 7 and len(v.relations["Add"][1]) == 16
    assert v.holds("Add", 1, 2, 3)


def test_colored_validator():
    c = gen_colored([2, 0, 3])
    assert is_colored_set(c) and [len(x) for x in color_classes(c)] == [2, 0, 3]
    overlap = InputStructure(2, {"A": (1, frozenset({(0,), (1,)})), "B": (1, frozenset({(1,)}))})
    assert not is_colored_set(overlap)
    gap = InputStructure(2, {"A": (1, frozenset({(0,)}))})
    assert not is_colored_set(gap)
    assert not is_colored_set(gen_graph(2, set()))


def max_matching(s):
    """Augmenting-path maximum matching between Boy and Girl atoms."""
    boys = sorted(t[0] for t in s.relations["Boy"][1])
    adj = {b: [g for (x, g) in s.relations["E"][1] if x == b] for b in boys}
    match: dict = {}

    def augment(b, seen):
        for g in adj[b]:
            if g in seen:
                continue
            seen.add(g)
            if g not in match or augment(match[g], seen):
                match[g] = b
                return True
        return False

    return sum(augment(b, set()) for b in boys)


def test_bipartite_matchability():
    for p in range(2, 7):
        g0, g1 = gen_bipartite_G0(p), gen_bipartite_G1(p)
        girls0 = len(g0.relations["Girl"][1])
        assert len(g0.relations["Boy"][1]) == girls0 == max_matching(g0) == 2 * p
        assert len(g1.relations["Boy"][1]) == len(g1.relations["Girl"][1]) == 2 * p
        assert max_matching(g1) < 2 * p
