import itertools

import pytest

from cpt.corpus import CORPUS, path_graph
from cpt.engine import generous_budget
from cpt.hf import Universe
from cpt.lang import parse_program, parse_term
from cpt.lang.syntax import App, Var, Vocabulary
from cpt.lfp import (
    FALSE, And, Atom, ClashMode, Domain, Exists, LfpSystem, Not, NotMonotone, Or, PredApp, PredDef,
    Solver, TermEq, active_formula_check, build_system, check_system, conj, crosscheck, is_simple,
    lfp_eval, to_simple, update_formula,
)
from cpt.structio import gen_naked

DYN = {"f": 1, "c": 0}


def rule(text):
    return parse_program("dynamic f/1; dynamic c; " + text).body


def test_update_formula_cases():
    assert update_formula(rule("program skip"), "f", ("x",), "y", DYN) == FALSE
    phi = update_formula(rule("program f(Atoms) := true"), "f", ("x",), "y", DYN)
    assert phi == And((TermEq(Var("x"), App("Atoms", ())), TermEq(Var("y"), App("true", ()))))
    assert update_formula(rule("program f(Atoms) := true"), "c", (), "y", DYN) == FALSE
    cond = update_formula(rule("program if c = Atoms then c := true else c := false endif"),
                          "c", (), "y", DYN)
    assert isinstance(cond, Or) and len(cond.parts) == 2
    first, second = cond.parts
    assert first.parts[0].right == App("true", ()) and second.parts[0].right == App("false", ())


def test_block_mode_adds_clash_conjunct():
    r = rule("program do forall v in Atoms c := v enddo")
    op = update_formula(r, "c", (), "y", DYN, ClashMode.OPERATIONAL)
    block = update_formula(r, "c", (), "y", DYN, ClashMode.BLOCK)
    assert isinstance(op, Exists)
    assert isinstance(block, And) and block.parts[-1] == op


def test_to_simple_examples():
    vocab = Vocabulary({"g": 1}, {"f": (1, False), "h": (1, False)})
    t = parse_term("f(h(x))", vocab, bound=("x",))
    s = to_simple(TermEq(t, Var("y")))
    assert is_simple(s) and isinstance(s, Exists)
    assert s.body == And((Atom("h", ("x",), s.var), Atom("f", (s.var,), "y")))
    already = Atom("f", ("x",), "y")
    assert to_simple(already) == already


def small_domain(u):
    objs = set(range(u.atom_count)) | {u.empty}
    objs |= {u.mk_set(c) for k in (1, 2) for c in itertools.combinations(sorted(objs), k)}
    extra = [u.mk_set([u.mk_set([0]), 1]), u.mk_set([u.one, u.mk_set([0, 1])])]
    return u.tc_many(objs | set(extra))


def test_to_simple_equivalence_by_model_check():
    u = Universe(2)
    dom = Domain(u, small_domain(u))
    assert dom.is_transitive()
    t = parse_term("Pair(Union(x), y)", Vocabulary(), bound=("x", "y"))
    simple = to_simple(TermEq(t, Var("z")))
    assert is_simple(simple)
    solver = Solver(dom)
    for x in dom.sorted:
        for y in dom.sorted:
            got = {e["z"] for e in solver.solve(simple, {"x": x, "y": y})}
            inner = u.big_union(x)
            v = u.pair(inner, y)
            want = {v} if inner in dom.objects and v in dom.objects else set()
            assert got == want


def test_lfp_transitive_closure():
    u = Universe(3)
    edges = frozenset({(0, 1), (1, 2)})
    dom = Domain(u, set(range(3)) | {u.empty}, inputs={"E": edges})
    body = Or((Atom("E", ("x", "y"), True),
               Exists("z", conj(PredApp("T", ("x", "z")), Atom("E", ("z", "y"), True)))))
    sys = LfpSystem({"T": PredDef("T", ("x", "y"), body)}, ["T"])
    res = lfp_eval(sys, dom)
    assert res.facts("T") == {(0, 1), (1, 2), (0, 2)}
    sizes = [st["T"] for st in res.stages]
    assert sizes == sorted(sizes) and sizes[0] == 0
    assert len(res.stages) == 3


def test_non_monotone_rejected():
    check_system(LfpSystem({"T": PredDef("T", ("x",), PredApp("T", ("x",)))}, ["T"]))
    bad = LfpSystem({"T": PredDef("T", ("x",), Not(PredApp("T", ("x",))))}, ["T"])
    with pytest.raises(NotMonotone):
        check_system(bad)


def test_build_system_positive_on_corpus():
    from cpt.lang import time_explicit
    for e in CORPUS.values():
        for mode in ClashMode:
            sys = build_system(time_explicit(e.program()), mode)
            check_system(sys)
            assert all(name.startswith(("D_", "Clash")) for name in sys.defs)


def test_build_system_rejects_open_body():
    vocab = Vocabulary({}, {"f": (0, False)})
    from cpt.lang.syntax import Program, Update
    with pytest.raises(ValueError):
        build_system(Program(vocab, Update("f", (), Var("x"))))


def test_one_shot_facts():
    p = parse_program("program par Output := true; Halt := true endpar")
    rep = crosscheck(p, gen_naked(2), generous_budget())
    assert rep.agree
    one = Universe(2).one
    assert ("Output", 1, (), one) in rep.facts
    assert not any(i == 0 for _, i, _, _ in rep.facts)


def test_persistence_and_removal():
    p = parse_program("""dynamic f; dynamic predicate A; dynamic predicate B;
    program
    if not A then par f := Atoms; A := true endpar
    else if not B then par f := emptyset; B := true endpar
    else par Output := true; Halt := true endpar endif endif""")
    rep = crosscheck(p, gen_naked(2), generous_budget())
    assert rep.agree
    levels = sorted(i for f, i, _, _ in rep.facts if f == "f")
    assert levels == [1]
    a_levels = sorted(i for f, i, _, _ in rep.facts if f == "A")
    assert a_levels == [1, 2, 3]


def test_crosscheck_examples():
    reach = CORPUS["choiceless-reachability"]
    for s in (path_graph(4), path_graph(4, reachable=False)):
        assert crosscheck(reach.program(), s, reach.budget()).agree
    par = CORPUS["inputsize-parity"]
    for n in range(1, 6):
        assert crosscheck(par.program(), gen_naked(n), par.budget()).agree


def test_nested_clash_modes():
    e = CORPUS["nested-clash"]
    s = gen_naked(1)
    op = crosscheck(e.program(), s, e.budget(), ClashMode.OPERATIONAL)
    block = crosscheck(e.program(), s, e.budget(), ClashMode.BLOCK)
    assert op.agree
    assert not block.agree and "oracle only" in block.mismatch


def test_functional_in_last_argument():
    for e in CORPUS.values():
        for label, s in e.inputs()[:2]:
            if s.atom_count > 6:
                continue
            rep = crosscheck(e.program(), s, e.budget())
            assert rep.agree, (e.name, label, rep.mismatch)
            keys = [(f, i, a) for f, i, a, _ in rep.facts]
            assert len(keys) == len(set(keys))


def test_active_formula_check():
    skip = parse_program("program Halt := true")
    rep = active_formula_check(skip, gen_naked(3), generous_budget())
    u = Universe(3)
    assert rep.ok
    assert rep.selected == set(range(3)) | {u.empty, u.one}
    e = CORPUS["choiceless-reachability"]
    r1 = active_formula_check(e.program(), path_graph(4), e.budget(), margin=1)
    r2 = active_formula_check(e.program(), path_graph(4), e.budget(), margin=2)
    assert r1.ok and r2.ok
    assert r1.closure == r2.closure and r2.domain_size > r1.domain_size


def test_block_mode_agrees_without_nested_clashes():
    e = CORPUS["choiceless-reachability"]
    rep = crosscheck(e.program(), path_graph(4), e.budget(), ClashMode.BLOCK)
    assert rep.agree
    assert any(name.startswith("Clash_") for name in rep.system.defs)
