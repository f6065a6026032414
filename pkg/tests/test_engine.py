import random

import pytest
from hypothesis import given, settings, strategies as st

from cpt.corpus import CORPUS, bfs_reachable, path_graph, runs
from cpt.engine import (
    Budget, Mode, Polynomial, PolynomialError, RunMode, Verdict, active_objects, check_activation,
    generous_budget, parse_poly, relevant_objects, run, standard_run,
)
from cpt.evaluate import fire
from cpt.lang import parse_program
from cpt.structio import gen_naked, initial_state

CLOCK = "30*n+100"


def test_parse_poly():
    assert parse_poly("n^2+3*n+10")(2) == 20
    assert parse_poly("7")(100) == 7
    assert parse_poly("2*n")(5) == 10
    assert str(parse_poly("n^2+3*n+10")) == "n^2+3*n+10"
    with pytest.raises(PolynomialError):
        parse_poly("n+")
    with pytest.raises(PolynomialError):
        Polynomial((0, -1))


def test_active_objects_initial():
    p = parse_program("dynamic f; dynamic predicate R/1; program skip")
    for n in range(5):
        assert len(active_objects(initial_state(p, gen_naked(n)))) == n + 2


def test_active_objects_after_updates():
    p = parse_program("dynamic f; dynamic predicate R/1; program skip")
    st = initial_state(p, gen_naked(3))
    u = st.universe
    base = active_objects(st)
    ab = u.mk_set([0, 1])
    assert active_objects(fire(st, {("f", (), ab)})) == base | {ab}
    assert active_objects(fire(st, {("R", (0,), u.one)})) == base


def test_relevant_objects():
    p = parse_program("dynamic f; program skip")
    st = initial_state(p, gen_naked(2))
    assert relevant_objects(st) == active_objects(st)
    st1 = fire(st, {("f", (), st.universe.one)})
    assert relevant_objects(st1) > active_objects(st1)


def test_run_examples():
    e = CORPUS["choiceless-reachability"]
    p = e.program()
    big = Budget(parse_poly("n+5"), parse_poly("n^4+100"))
    assert run(p, path_graph(5), big).verdict is Verdict.ACCEPT
    assert run(p, path_graph(5, reachable=False), big).verdict is Verdict.REJECT
    skip = parse_program("program skip")
    r = run(skip, gen_naked(2), Budget(Polynomial.const(3), None))
    assert r.verdict is Verdict.INDETERMINATE and r.reason == "budget-exhausted"
    assert r.steps_taken == 3 and r.exit_code == 2


def test_relevant_mode_detects_repetition():
    skip = parse_program("program skip")
    r = run(skip, gen_naked(2), generous_budget(Mode.RELEVANT))
    assert r.reason == "state-repeated" and r.steps_taken == 0


def test_nonboolean_output():
    p = parse_program("program par Output := Atoms; Halt := true endpar")
    r = run(p, gen_naked(2), generous_budget())
    assert r.verdict is Verdict.INDETERMINATE and r.reason == "halted-nonboolean-output"


def test_resource_bound_cuts_run():
    e = CORPUS["pair-then-accept"]
    r = run(e.program(), gen_naked(3), Budget(None, Polynomial.const(5)))
    assert r.verdict is Verdict.INDETERMINATE and r.exhausted


def test_standard_run():
    p = CORPUS["inputsize-parity"].program()
    assert standard_run(p, gen_naked(7), parse_poly(CLOCK)).verdict is Verdict.ACCEPT
    assert standard_run(p, gen_naked(8), parse_poly(CLOCK)).verdict is Verdict.REJECT
    r = standard_run(p, gen_naked(8), parse_poly("1"))
    assert r.verdict is Verdict.REJECT and r.exhausted
    with pytest.raises(ValueError):
        RunMode(False, parse_poly("1"))


def test_standard_run_total_on_corpus():
    for e, label, s in runs():
        if not e.input_size:
            continue
        r = standard_run(e.program(), s, parse_poly(CLOCK))
        assert r.verdict in (Verdict.ACCEPT, Verdict.REJECT)
        assert r.verdict is e.expect(s)


def test_activation_examples():
    e = CORPUS["choiceless-reachability"]
    rep = check_activation(e.program(), path_graph(5), e.budget())
    assert rep.ok and rep.counterexamples == []
    p = parse_program("dynamic f; program par f := Pair(Atoms, Atoms); Halt := true endpar")
    rep = check_activation(p, gen_naked(2), generous_budget())
    assert rep.ok and len(rep.activated) == 2
    rep = check_activation(parse_program("program skip"), gen_naked(2), Budget(Polynomial.const(3), None))
    assert rep.activated == set()


def test_activation_on_corpus():
    for e, label, s in runs():
        rep = check_activation(e.program(), s, e.budget())
        assert rep.ok, (e.name, label, rep.counterexamples)


def test_monotone_activation_and_microstep_bound():
    for e, label, s in runs():
        p = e.program()
        r = run(p, s, generous_budget(Mode.MICROSTEPS, steps=int(e.budget().step_poly(s.atom_count))),
                keep_states=True)
        acc: set = set()
        sizes = []
        for st_ in r.states:
            acc |= active_objects(st_)
            sizes.append(len(acc))
        assert sizes == sorted(sizes)
        assert r.active_count == sizes[-1]
        assert r.active_count <= r.microsteps + s.atom_count + 2, (e.name, label)


def test_relevant_budget_reproduces_active_verdicts():
    for e, label, s in runs():
        p = e.program()
        a = run(p, s, e.budget())
        if a.verdict is Verdict.INDETERMINATE:
            continue
        m = run(p, s, generous_budget(Mode.MICROSTEPS, steps=a.steps_taken))
        n = s.atom_count
        arity = max([1] + [v[0] for v in p.vocab.dynamics.values()])
        r_bound = Polynomial.const((m.microsteps + n + 2) ** (arity + 2))
        r = run(p, s, Budget(e.budget().step_poly, r_bound, Mode.RELEVANT))
        assert r.verdict is a.verdict, (e.name, label)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 7), st.randoms(use_true_random=False))
def test_isomorphism_invariance(n, rnd):
    e = CORPUS["choiceless-reachability"]
    from cpt.corpus import random_graph
    s = random_graph(n, random.Random(rnd.random()))
    perm = list(range(n))
    rnd.shuffle(perm)
    a, b = run(e.program(), s, e.budget()), run(e.program(), s.permuted(perm), e.budget())
    assert a.verdict is b.verdict
    assert a.steps_taken == b.steps_taken and a.active_count == b.active_count
    assert a.verdict is (Verdict.ACCEPT if bfs_reachable(s) else Verdict.REJECT)


def test_log_lines():
    e = CORPUS["accept-now"]
    r = run(e.program(), gen_naked(2), e.budget(), log=True)
    assert len(r.log) == r.steps_taken
    assert r.log[0].startswith("step 0 consistent=1 updates=[")


def test_corpus_expected_verdicts():
    for e, label, s in runs():
        r = run(e.program(), s, e.budget())
        assert r.verdict is e.expect(s), (e.name, label, r.verdict, r.reason)
