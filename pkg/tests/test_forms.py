import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cpt.forms import (
    EMPTY, ConfigurationMismatch, FormError, RealizationError, Realm, SetForm, Symbol,
    binary_configurations, config, configurations, denote, discrete, eq_rel, extend_molecule,
    form_of, form_to_text, in_rel, nat_form, parse_form, rank, strategy_check,
)
from cpt.forms_checks import check_configs, check_in_eq, form_family
from cpt.hf import Universe
from cpt.structio import gen_naked
from cpt.symmetry import apply_perm, min_support


def test_config_examples():
    c = config([(0, 1)])
    assert c.l == 1 and c.classes == 2
    c = config([(0, 1), (1, 2)])
    assert c.merges() == [((0, 1), (1, 0))]
    assert str(c) == "[(0,1)=(1,0)]"
    assert config([(0, 1), (2, 3)]) == discrete(2)
    with pytest.raises(FormError):
        config([(0, 0)])
    with pytest.raises(FormError):
        config([(0, 1), (2,)])


def test_configuration_counts():
    assert len(binary_configurations(1)) == 2
    assert len(binary_configurations(2)) == 7
    assert len(binary_configurations(3)) == 34
    for c in configurations(3, 2):
        for i in range(3):
            assert len(set(c.row(i))) == 2


def test_config_determined_by_pairs():
    samples, bad = check_configs(3, 7, samples=200, seed=1)
    assert bad == 0


def test_denote_examples():
    u = Universe(6)
    assert denote(Symbol(0), (3, 4), u) == 3
    assert denote(EMPTY, (3, 4), u) == u.empty
    for n in range(4):
        assert denote(nat_form(n, 2), (0, 1), u) == u.ordinal(n)
    assert denote(nat_form(1, 2), (0, 1), u) == denote(nat_form(1, 2), (2, 3), u) == u.one


def test_denote_sets():
    u = Universe(5)
    r = Realm(u)
    same = binary_configurations(1)
    fixed = next(e for e in same if e.same(0, 0, 1, 0))
    free = next(e for e in same if not e.same(0, 0, 1, 0))
    assert r.denote(SetForm([(Symbol(0), fixed)]), (2,)) == u.mk_set([2])
    assert r.denote(SetForm([(Symbol(0), free)]), (2,)) == u.mk_set([0, 1, 3, 4])
    with pytest.raises(FormError):
        r.denote(Symbol(1), (2,))


def test_realization_room():
    u = Universe(3)
    with pytest.raises(RealizationError):
        denote(SetForm([(Symbol(0), discrete(2))]), (0, 1), u)


def test_rank():
    assert rank(Symbol(0)) == 0 and rank(EMPTY) == 0
    assert rank(nat_form(3, 1)) == 3
    assert rank(SetForm([(Symbol(0), discrete(1))])) == 1


def test_in_eq_examples():
    for e in binary_configurations(2):
        for p, q in itertools.product(range(2), repeat=2):
            assert eq_rel(Symbol(p), Symbol(q), e) == e.same(0, p, 1, q)
            assert not in_rel(Symbol(p), Symbol(q), e)
        assert not in_rel(nat_form(1, 2), Symbol(0), e)


def test_in_eq_against_denotations():
    fam = form_family(2, width1=1)
    checked, bad = check_in_eq(2, 6, fam)
    assert checked == len(fam) ** 2 * 7 and bad == []


def test_in_eq_k1_wider_family():
    checked, bad = check_in_eq(1, 4, form_family(1, width1=3))
    assert bad == []


def test_form_of_examples():
    s, u = gen_naked(6), Universe(6)
    assert form_of(2, (2, 5), s, u) == Symbol(0)
    assert form_of(u.empty, (2, 5), s, u) == EMPTY
    x = u.mk_set([2, 5])
    assert denote(form_of(x, (2, 5), s, u), (2, 5), u) == x
    with pytest.raises(FormError):
        form_of(u.mk_set([0]), (2, 5), s, u)


def test_parse_form():
    f = parse_form("{(c0, [(0,0)=(1,0)]), (c1, [])}", 2)
    assert isinstance(f, SetForm) and len(f.members) == 2
    assert parse_form(form_to_text(f), 2) == f
    assert parse_form("c1", 2) == Symbol(1)
    for bad in ("c2", "{(c0, [(0,0)=(0,1)])}", "{(c0, [(0,0)=(1,0)]", "x"):
        with pytest.raises(FormError):
            parse_form(bad, 2)


def test_parse_print_family():
    for f in form_family(2, width1=1):
        assert parse_form(form_to_text(f), 2) == f


def random_mols(rng, n, k, l):
    return [tuple(rng.sample(range(n), k)) for _ in range(l)]


def test_extend_molecule_random():
    rng = random.Random(0)
    for _ in range(300):
        k, l = rng.randint(1, 3), rng.randint(1, 3)
        n = k * (l + 1) + rng.randint(0, 2)
        mols = random_mols(rng, n, k, l + 1)
        q = config(mols)
        tau = extend_molecule(q, mols[1:], n)
        assert config([tau] + mols[1:]) == q


def test_extend_molecule_cases():
    q = config([(0, 1), (0, 1)])
    assert extend_molecule(q, [(0, 1)], 4) == (0, 1)
    q = discrete(2)
    tau = extend_molecule(q, [(0, 1)], 4)
    assert not set(tau) & {0, 1}
    with pytest.raises(ConfigurationMismatch):
        extend_molecule(config([(0, 1), (2, 3), (0, 2)]), [(0, 1), (0, 1)], 6)
    with pytest.raises(RealizationError):
        extend_molecule(q, [(0, 1)], 3)


def test_extend_molecule_colored():
    color_of = {0: 0, 1: 0, 2: 1, 3: 1, 4: 0, 5: 1}
    mols = [(4, 5), (0, 2)]
    q = config(mols, color_of)
    tau = extend_molecule(q, mols[1:], 6, color_of)
    assert config([tau, mols[1]], color_of) == q
    with pytest.raises(RealizationError):
        extend_molecule(q, [(0, 2)], 6, {0: 0, 1: 1, 2: 1, 3: 1, 4: 1, 5: 1})


def test_strategy_check():
    ui, uj = Universe(6), Universe(7)
    fam = form_family(2, width1=1)
    rng = random.Random(3)
    for _ in range(30):
        forms = rng.sample(fam, 3)
        sig = random_mols(rng, 6, 2, 3)
        # a τ̄ with the same configuration, built by extension
        q = config(sig)
        tau = [tuple(rng.sample(range(7), 2))]
        for i in range(1, 3):
            tau.append(extend_molecule(q.sub(i, *range(i)), tau, 7))
        assert config(tau) == q
        assert strategy_check(list(zip(forms, sig, tau)), ui, uj)
    same = [(f, (0, 1), (0, 1)) for f in fam[:5]]
    assert strategy_check(same, ui, ui)
    with pytest.raises(ConfigurationMismatch):
        strategy_check([(EMPTY, (0, 1), (0, 1)), (EMPTY, (0, 2), (3, 4))], ui, uj)


def test_equivariance_small():
    u = Universe(4)
    r = Realm(u)
    fam = form_family(2, width1=1, rank2=False)
    for perm in itertools.permutations(range(4)):
        memo: dict = {}
        for phi in fam:
            x = r.denote(phi, (0, 1))
            assert apply_perm(perm, x, u, memo) == r.denote(phi, (perm[0], perm[1]))


def test_denotations_are_symmetric():
    s, u = gen_naked(5), Universe(5)
    r = Realm(u)
    for phi in form_family(2, width1=1)[::7]:
        x = r.denote(phi, (0, 1))
        for y in u.tc(x):
            assert len(min_support(y, s, u).min_support) <= 2


def symmetric_objects(u, sigma, rng, rounds=3, per_round=5):
    """Random objects supported by Range(sigma) whose members are all images
    of such objects, so everything in their closure has a small support."""
    n, k = u.atom_count, len(sigma)
    rest = [a for a in range(n) if a not in sigma]
    stab = []
    for p in itertools.permutations(rest):
        perm = list(range(n))
        for a, b in zip(rest, p):
            perm[a] = b
        stab.append(tuple(perm))
    pool = list(sigma) + [u.empty]
    for _ in range(rounds):
        for _ in range(per_round):
            seeds = rng.sample(pool, rng.randint(1, 2))
            moved = []
            for z in seeds:
                pi = list(range(n))
                rng.shuffle(pi)
                moved.append(apply_perm(pi, z, u))
            orbit = {apply_perm(g, z, u) for z in moved for g in stab}
            pool.append(u.mk_set(orbit))
    return pool


def test_round_trip_random_symmetric_objects():
    s, u = gen_naked(6), Universe(6)
    rng = random.Random(8)
    sigma = (0, 1)
    objs = symmetric_objects(u, sigma, rng)
    assert max(u.rank(x) for x in objs) >= 3
    for x in objs:
        f = form_of(x, sigma, s, u)
        assert denote(f, sigma, u) == x


@settings(max_examples=15, deadline=None)
@given(st.randoms(use_true_random=False))
def test_round_trip_property(rnd):
    s, u = gen_naked(5), Universe(5)
    sigma = tuple(rnd.sample(range(5), 2))
    for x in symmetric_objects(u, sigma, rnd, rounds=2, per_round=3):
        assert denote(form_of(x, sigma, s, u), sigma, u) == x
