"""Atom permutations acting on HF objects, supports and Δ-systems.

A set X of atoms supports y when every automorphism of the input that fixes
X pointwise also fixes y.  Deciding this only needs a generating set of the
pointwise stabilizer of X.  Atoms a, b are *twins* when the transposition
(a b) is an automorphism; twins form equivalence classes, and the stabilizer
is generated by

* transpositions of twins outside X, and
* the stabilizer elements that are increasing on every twin class outside X
  (one per coset of the twin group), found by backtracking.

For naked and colored sets the second family is just the identity, so this
is the plain transposition test.  For other structures the search is exact
but exponential, and is capped by ``max_atoms``.
"""

from __future__ import annotations

import itertools
import math
import weakref
from dataclasses import dataclass

from .hf import Universe
from .structio import InputStructure, StructureError, color_classes


class SearchCapExceeded(RuntimeError):
    pass


class DeltaPreconditionError(ValueError):
    pass


# -- permutations acting on objects -----------------------------------------------

def apply_perm(perm, x: int, u: Universe, memo: dict | None = None) -> int:
    """The image of x under the atom permutation i -> perm[i]."""
    if memo is None:
        memo = {}
    return _apply(tuple(perm), x, u, memo)


def _apply(perm, x, u, memo):
    if x < u.atom_count:
        return perm[x]
    got = memo.get(x)
    if got is not None:
        return got
    elems = u.elements(x)
    out = u.mk_set(_apply(perm, e, u, memo) for e in elems) if elems else x
    memo[x] = out
    return out


def transposition(n: int, a: int, b: int) -> tuple[int, ...]:
    p = list(range(n))
    p[a], p[b] = b, a
    return tuple(p)


def is_automorphism(perm, s: InputStructure) -> bool:
    for _, (_, tuples) in s.relations.items():
        for t in tuples:
            if tuple(perm[x] for x in t) not in tuples:
                return False
    return True


def atoms_in(u: Universe, x: int, memo: dict | None = None) -> frozenset[int]:
    """Atoms occurring in TC(x) (or x itself)."""
    if memo is None:
        memo = {}
    if x < u.atom_count:
        return frozenset((x,))
    got = memo.get(x)
    if got is None:
        acc: set[int] = set()
        for e in u.elements(x):
            acc |= atoms_in(u, e, memo)
        got = frozenset(acc)
        memo[x] = got
    return got


# -- automorphism groups ------------------------------------------------------------

class AutGroup:
    """Pointwise stabilizers of atom sets in the automorphism group of an input."""

    def __init__(self, s: InputStructure, max_atoms: int = 16):
        self.structure = s
        self.n = n = s.atom_count
        self.colored = _colored(s)
        if not self.colored and n > max_atoms:
            raise SearchCapExceeded(
                f"automorphism search on a {n}-atom structure exceeds the cap {max_atoms}")
        self._sig = self._signatures()
        self.classes = self._twin_classes()
        self.class_of = {a: i for i, c in enumerate(self.classes) for a in c}
        self._gens: dict[frozenset, list[tuple[int, ...]]] = {}
        # per-universe caches: perm images and atoms_in
        self._memos: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()
        self._atom_memos: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()
        # tuples indexed by their atoms, for the backtracking consistency check
        self._rel_tuples = [(ts, t) for _, (_, ts) in sorted(s.relations.items()) for t in ts]

    def _signatures(self):
        sig: dict[int, list] = {a: [] for a in range(self.n)}
        for name, (ar, tuples) in sorted(self.structure.relations.items()):
            counts = {a: [0] * ar for a in range(self.n)}
            for t in tuples:
                for i, x in enumerate(t):
                    counts[x][i] += 1
            for a in range(self.n):
                sig[a].append((name, tuple(counts[a])))
        return {a: tuple(v) for a, v in sig.items()}

    def _twin_classes(self) -> list[tuple[int, ...]]:
        if self.colored:
            groups: dict = {}
            for a in range(self.n):
                groups.setdefault(self._sig[a], []).append(a)
            return sorted(tuple(g) for g in groups.values())
        classes: list[list[int]] = []
        for a in range(self.n):
            for c in classes:
                b = c[0]
                if self._sig[a] == self._sig[b] and is_automorphism(
                        transposition(self.n, a, b), self.structure):
                    c.append(a)
                    break
            else:
                classes.append([a])
        return [tuple(c) for c in classes]

    # stabilizer generators

    def generators(self, X) -> list[tuple[int, ...]]:
        X = frozenset(X)
        got = self._gens.get(X)
        if got is None:
            got = []
            for c in self.classes:
                free = [a for a in c if a not in X]
                for a, b in zip(free, free[1:]):
                    got.append(transposition(self.n, a, b))
            if not self.colored:
                ident = tuple(range(self.n))
                got.extend(p for p in self._increasing_reps(X) if p != ident)
            self._gens[X] = got
        return got

    def _increasing_reps(self, X):
        n = self.n
        order = sorted(X) + [a for a in range(n) if a not in X]
        pos = {a: i for i, a in enumerate(order)}
        # tuples checked once their last atom (in order) is assigned
        due: list[list] = [[] for _ in range(n)]
        for ts, t in self._rel_tuples:
            if t:
                due[max(pos[x] for x in t)].append((ts, t))
        prev_in_class: dict[int, int] = {}
        last: dict[int, int] = {}
        for a in order:
            if a in X:
                continue
            c = self.class_of[a]
            if c in last:
                prev_in_class[a] = last[c]
            last[c] = a
        perm = [-1] * n
        used = [False] * n
        out = []

        def ok(i):
            for ts, t in due[i]:
                if tuple(perm[x] for x in t) not in ts:
                    return False
            return True

        def go(i):
            if i == n:
                out.append(tuple(perm))
                return
            a = order[i]
            if a in X:
                cands = [a]
            else:
                p = prev_in_class.get(a)
                if p is None:
                    size = sum(1 for x in self.classes[self.class_of[a]] if x not in X)
                    cands = [b for b in range(n)
                             if not used[b] and b not in X and self._sig[b] == self._sig[a]
                             and sum(1 for x in self.classes[self.class_of[b]] if x not in X) == size]
                else:
                    cls = self.class_of[perm[p]]
                    cands = [b for b in self.classes[cls] if b > perm[p] and not used[b]]
            for b in cands:
                if used[b]:
                    continue
                perm[a] = b
                used[b] = True
                if ok(i):
                    go(i + 1)
                used[b] = False
                perm[a] = -1

        go(0)
        return out

    def all_automorphisms(self, X=(), max_atoms: int = 8):
        """Every automorphism fixing X pointwise, by brute force (the oracle)."""
        if self.n > max_atoms:
            raise SearchCapExceeded(f"{self.n} atoms exceed the brute-force cap {max_atoms}")
        X = set(X)
        for p in itertools.permutations(range(self.n)):
            if all(p[x] == x for x in X) and is_automorphism(p, self.structure):
                yield p

    # support tests

    def atoms_in(self, y: int, u: Universe) -> frozenset[int]:
        return atoms_in(u, y, self._atom_memos.setdefault(u, {}))

    def fixes(self, perm, y: int, u: Universe) -> bool:
        if all(perm[a] == a for a in self.atoms_in(y, u)):
            return True
        memo = self._memos.setdefault(u, {}).setdefault(perm, {})
        return _apply(perm, y, u, memo) == y

    def supports(self, X, y: int, u: Universe) -> bool:
        return all(self.fixes(g, y, u) for g in self.generators(X))

    def supports_exhaustive(self, X, y: int, u: Universe) -> bool:
        return all(_apply(p, y, u, {}) == y for p in self.all_automorphisms(X))


def _colored(s: InputStructure) -> bool:
    return all(ar == 1 for ar, _ in s.relations.values())


_groups: dict[int, tuple[InputStructure, AutGroup]] = {}


def aut_group(s: InputStructure, max_atoms: int = 16) -> AutGroup:
    """A cached AutGroup for s."""
    got = _groups.get(id(s))
    if got is None or got[0] is not s:
        got = (s, AutGroup(s, max_atoms))
        if len(_groups) > 64:
            _groups.clear()
        _groups[id(s)] = got
    return got[1]


def supports(X, y: int, s: InputStructure, u: Universe) -> bool:
    """Does X support y, with respect to the automorphisms of s?"""
    return aut_group(s).supports(X, y, u)


def supports_exhaustive(X, y: int, s: InputStructure, u: Universe) -> bool:
    """The same question answered by trying every permutation (n <= 8)."""
    return aut_group(s).supports_exhaustive(X, y, u)


# -- minimal supports ---------------------------------------------------------------

@dataclass
class SupportReport:
    object: int
    min_support: frozenset[int]
    method: str  # "exhaustive" or "intersection-shortcut"
    lattice_ok: bool | None = None


def _small(X, s: InputStructure) -> bool:
    """The half-cut condition: below half of every color (or of all atoms)."""
    try:
        classes = color_classes(s) if s.relations else [frozenset(range(s.atom_count))]
    except StructureError:
        classes = [frozenset(range(s.atom_count))]
    return all(2 * len(X & c) < len(c) for c in classes if c)


def min_support(y: int, s: InputStructure, u: Universe, half_cut: bool = False,
                max_atoms: int = 16, max_size: int = 6) -> SupportReport:
    """Smallest support of y, found by trying atom subsets in ascending size."""
    n = s.atom_count
    if n > max_atoms:
        raise SearchCapExceeded(f"{n} atoms exceed the support-search cap {max_atoms}")
    g = aut_group(s, max_atoms)
    # the atoms of TC(y) always support y, so the search stops by then
    limit = min(max_size, len(g.atoms_in(y, u)))
    best = None
    for k in range(limit + 1):
        for X in itertools.combinations(range(n), k):
            if g.supports(X, y, u):
                best = frozenset(X)
                break
        if best is not None:
            break
    if best is None:
        if limit < max_size:
            best = g.atoms_in(y, u)
        else:
            raise SearchCapExceeded(f"no support of size <= {max_size}")
    if not (half_cut and _small(best, s)):
        return SupportReport(y, best, "exhaustive")
    found = [frozenset(X) for k in range(min(max_size, n) + 1)
             for X in itertools.combinations(range(n), k)
             if _small(frozenset(X), s) and g.supports(X, y, u)]
    inter = frozenset.intersection(*found)
    ok = g.supports(inter, y, u) and len(inter) == len(best)
    return SupportReport(y, inter, "intersection-shortcut", ok)


def min_support_sizes(objects, s: InputStructure, u: Universe, max_atoms: int = 16,
                      max_size: int = 6) -> dict[int, int]:
    """|min support| for many objects at once; each candidate X is tried
    against every object still unresolved."""
    n = s.atom_count
    if n > max_atoms:
        raise SearchCapExceeded(f"{n} atoms exceed the support-search cap {max_atoms}")
    g = aut_group(s, max_atoms)
    out: dict[int, int] = {}
    todo = set(objects)
    for y in list(todo):
        if not g.atoms_in(y, u):
            out[y] = 0
            todo.discard(y)
    for k in range(max_size + 1):
        if not todo:
            break
        for X in itertools.combinations(range(n), k):
            if not todo:
                break
            gens = g.generators(X)
            hit = [y for y in todo if all(g.fixes(p, y, u) for p in gens)]
            for y in hit:
                out[y] = k
                todo.discard(y)
        for y in [y for y in todo if len(g.atoms_in(y, u)) <= k]:
            out[y] = len(g.atoms_in(y, u))
            todo.discard(y)
    if todo:
        raise SearchCapExceeded(f"{len(todo)} objects have no support of size <= {max_size}")
    return out


# -- Δ-systems ------------------------------------------------------------------------

def delta_bound(l: int, p: int) -> int:
    return math.factorial(l) * p ** (l + 1)


def delta_system(family, l: int, p: int) -> list[frozenset]:
    """p members of family whose pairwise intersections are all equal.

    Needs every member to have at most l elements and at least l!*p^(l+1)
    members (repetitions count).
    """
    fam = [frozenset(x) for x in family]
    if p < 0 or l < 0:
        raise DeltaPreconditionError("l and p must be non-negative")
    if any(len(x) > l for x in fam):
        raise DeltaPreconditionError(f"some set has more than {l} elements")
    if len(fam) < delta_bound(l, p):
        raise DeltaPreconditionError(
            f"family has {len(fam)} sets, fewer than {l}!*{p}^{l + 1} = {delta_bound(l, p)}")
    return _delta(fam, l, p)


def _delta(fam, l, p):
    if p == 0:
        return []
    if l == 0:
        return fam[:p]
    counts: dict = {}
    for x in fam:
        for a in x:
            counts[a] = counts.get(a, 0) + 1
    threshold = delta_bound(l - 1, p)
    common = [a for a, c in sorted(counts.items(), key=lambda kv: repr(kv[0])) if c >= threshold]
    if common:
        # some point lies in many members: remove it and recurse
        a = common[0]
        sub = _delta([x - {a} for x in fam if a in x], l - 1, p)
        return [x | {a} for x in sub]
    # no point is popular, so greedy disjoint picking succeeds
    chosen: list[frozenset] = []
    used: set = set()
    for x in fam:
        if not (x & used):
            chosen.append(x)
            used |= x
            if len(chosen) == p:
                return chosen
    raise AssertionError("greedy extraction failed despite the size bound")


def is_delta_system(sets) -> bool:
    sets = [frozenset(x) for x in sets]
    if len(sets) < 2:
        return True
    core = sets[0] & sets[1]
    return all(a & b == core for a, b in itertools.combinations(sets, 2))


# -- experiments ------------------------------------------------------------------------

@dataclass
class ExperimentRow:
    label: str
    n: int
    max_min_support: int
    cumulative_active: int
    verdict: str

    def tsv(self) -> str:
        return f"{self.n}\t{self.max_min_support}\t{self.cumulative_active}\t{self.verdict}"


def support_experiment(program, inputs, budget, max_atoms: int = 16,
                       max_size: int = 6) -> list[ExperimentRow]:
    """For each (label, structure): run the program and record the largest
    minimal support among all objects active at some point of the run."""
    from .engine import active_objects, run
    from .structio import initial_state

    rows = []
    for label, s in inputs:
        u = Universe(s.atom_count)
        res = run(program, s, budget, collect=True, universe=u)
        active = active_objects(initial_state(program, s, u)) | res.activated
        sizes = min_support_sizes(active, s, u, max_atoms, max_size)
        rows.append(ExperimentRow(label, s.atom_count, max(sizes.values(), default=0),
                                  len(active), res.verdict.value))
    return rows
