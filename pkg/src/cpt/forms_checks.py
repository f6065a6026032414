"""Desk-scale checks of the forms calculus, shared by the CLI and the tests.

Forms of rank <= 2 are far too many to list (already 2^21 of rank 1 for
k = 2), so the checks run over a bounded-width family: every symbol and the
empty form, every rank-1 form with at most ``width1`` members, and every
rank-2 form with one member whose own form has at most one member.
"""

from __future__ import annotations

import itertools

from .forms import (
    EMPTY, Form, Realm, SetForm, Symbol, binary_configurations, config, eq_rel, form_of,
    in_rel,
)
from .hf import Universe
from .structio import gen_naked
from .symmetry import apply_perm, supports


def form_family(k: int, width1: int = 2, rank2: bool = True) -> list[Form]:
    confs = binary_configurations(k)
    rank0 = [Symbol(p) for p in range(k)] + [EMPTY]
    pairs = [(f, e) for f in rank0 for e in confs]
    rank1 = [SetForm(c) for w in range(1, width1 + 1) for c in itertools.combinations(pairs, w)]
    out = rank0 + rank1
    if rank2:
        thin = [f for f in rank1 if len(f.members) == 1]
        out += [SetForm([(f, e)]) for f in thin for e in confs]
    return out


def check_in_eq(k: int, atoms: int, family=None):
    """In/Eq against direct ∈ and = of denotations; returns (checked, failures)."""
    family = family if family is not None else form_family(k)
    u = Universe(atoms)
    r = Realm(u)
    sigma = tuple(range(k))
    checked, bad = 0, []
    for e in binary_configurations(k):
        tau = next(r.realizations(e, sigma))
        ys = [r.denote(psi, tau) for psi in family]
        xs = [r.denote(phi, sigma) for phi in family]
        for i, psi in enumerate(family):
            for j, phi in enumerate(family):
                checked += 1
                if in_rel(psi, phi, e) != u.contains(xs[j], ys[i]) or \
                        eq_rel(psi, phi, e) != (xs[j] == ys[i]):
                    bad.append((psi, phi, e))
    return checked, bad


def check_round_trip(k: int, atoms: int, family=None):
    """denote(form_of(x, σ), σ) = x for every x = φ * σ in the family."""
    family = family if family is not None else form_family(k)
    u = Universe(atoms)
    s = gen_naked(atoms)
    r = Realm(u)
    sigma = tuple(range(k))
    seen, bad = set(), []
    for phi in family:
        x = r.denote(phi, sigma)
        if x in seen:
            continue
        seen.add(x)
        if r.denote(form_of(x, sigma, s, u), sigma) != x:
            bad.append(phi)
    return len(seen), bad


def check_equivariance(k: int, atoms: int, family=None):
    """π(φ * σ) = φ * πσ for every permutation π of the atoms."""
    family = family if family is not None else form_family(k)
    u = Universe(atoms)
    r = Realm(u)
    sigma = tuple(range(k))
    checked, bad = 0, []
    base = [r.denote(phi, sigma) for phi in family]
    for perm in itertools.permutations(range(atoms)):
        memo: dict = {}
        psigma = tuple(perm[a] for a in sigma)
        for phi, x in zip(family, base):
            checked += 1
            if apply_perm(perm, x, u, memo) != r.denote(phi, psigma):
                bad.append((phi, perm))
    return checked, bad


def check_supported(k: int, atoms: int, family=None):
    """Range(σ) supports every φ * σ."""
    family = family if family is not None else form_family(k)
    u = Universe(atoms)
    s = gen_naked(atoms)
    r = Realm(u)
    sigma = tuple(range(k))
    bad = [phi for phi in family if not supports(set(sigma), r.denote(phi, sigma), s, u)]
    return len(family), bad


def check_configs(k: int, atoms: int, samples: int = 200, seed: int = 0):
    """Configurations are determined by their pairwise parts."""
    import random

    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        l = rng.randint(1, 4)
        mols = [tuple(rng.sample(range(atoms), k)) for _ in range(l)]
        c = config(mols)
        for i, j in itertools.combinations(range(l), 2):
            if c.sub(i, j) != config((mols[i], mols[j])):
                bad += 1
    return samples, bad


def run_all(k: int = 2, atoms: int = 6, full: bool = False):
    """(name, passed, detail) per check.  full uses the wider family for In/Eq."""
    fam = form_family(k) if full else form_family(k, width1=1)
    eq_atoms = min(atoms, 5)
    rows = []
    n, bad = check_round_trip(k, atoms, fam)
    rows.append(("round-trip", not bad, f"{n} objects, {len(bad)} failures"))
    n, bad = check_in_eq(k, atoms, fam)
    rows.append(("in-eq", not bad, f"{n} cases, {len(bad)} failures"))
    n, bad = check_equivariance(k, eq_atoms, fam)
    rows.append(("equivariance", not bad, f"{n} cases over {eq_atoms} atoms, {len(bad)} failures"))
    n, bad = check_supported(k, atoms, fam)
    rows.append(("supported", not bad, f"{n} forms, {len(bad)} failures"))
    n, bad = check_configs(k, atoms)
    rows.append(("pairwise-configs", not bad, f"{n} samples, {bad} failures"))
    return rows
