"""Molecules, configurations and forms.

A molecule is an injective sequence of k atoms.  The configuration of a
sequence of molecules records which positions hold the same atom.  A form is
either a symbol c_p or a finite set of (form, binary configuration) pairs;
together with a molecule it denotes an HF object:

    c_p * σ = σ(p)
    φ * σ   = {ψ * τ : (ψ, C(τ, σ)) ∈ φ}

where τ ranges over every molecule with the required configuration.  The
relations In and Eq decide membership and equality of denotations from the
forms and a configuration alone.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

from .hf import Universe


class FormError(ValueError):
    pass


class ConfigurationMismatch(FormError):
    pass


class RealizationError(FormError):
    """Not enough (suitably colored) atoms to realize a configuration."""


# -- configurations -----------------------------------------------------------------

def _canonical(labels):
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


@dataclass(frozen=True)
class Configuration:
    """l rows of k positions; labels[i*k+p] names the class of (i, p).

    Labels are in restricted-growth form, so equal configurations have equal
    label tuples.  colors, when present, gives the color of each class.
    """
    l: int
    k: int
    labels: tuple[int, ...]
    colors: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.labels) != self.l * self.k:
            raise FormError("label count does not match l*k")
        if _canonical(self.labels) != self.labels:
            raise FormError("labels are not in canonical form")
        for i in range(self.l):
            row = self.row(i)
            if len(set(row)) != self.k:
                raise FormError(f"row {i} repeats a class")
        if self.colors is not None and len(self.colors) != self.classes:
            raise FormError("one color per class is required")

    @classmethod
    def make(cls, l, k, labels, colors=None) -> "Configuration":
        """Canonicalize arbitrary labels (colors keyed by the raw labels)."""
        canon = _canonical(labels)
        cols = None
        if colors is not None:
            first = {}
            for raw, c in zip(labels, canon):
                first.setdefault(c, raw)
            cols = tuple(colors[first[c]] for c in range(len(first)))
        return cls(l, k, canon, cols)

    @property
    def classes(self) -> int:
        return max(self.labels, default=-1) + 1

    def row(self, i: int) -> tuple[int, ...]:
        return self.labels[i * self.k:(i + 1) * self.k]

    def same(self, i, p, j, q) -> bool:
        return self.labels[i * self.k + p] == self.labels[j * self.k + q]

    def sub(self, *rows) -> "Configuration":
        """The configuration of the selected rows, in the given order."""
        raw = tuple(x for i in rows for x in self.row(i))
        cols = None if self.colors is None else dict(enumerate(self.colors))
        return Configuration.make(len(rows), self.k, raw, cols)

    def merges(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        out = []
        first: dict = {}
        for idx, x in enumerate(self.labels):
            pos = divmod(idx, self.k)
            if x in first:
                out.append((first[x], pos))
            else:
                first[x] = pos
        return out

    def __str__(self):
        return "[" + ", ".join(f"({a},{b})=({c},{d})" for (a, b), (c, d) in self.merges()) + "]"


def config(mols, colors=None) -> Configuration:
    """C(σ_0, ..., σ_{l-1}); colors maps atoms to colors for the colored variant."""
    mols = [tuple(m) for m in mols]
    if not mols:
        raise FormError("config needs at least one molecule")
    k = len(mols[0])
    for m in mols:
        if len(m) != k:
            raise FormError("molecules have different lengths")
        if len(set(m)) != k:
            raise FormError(f"molecule {m} is not injective")
    raw = tuple(a for m in mols for a in m)
    return Configuration.make(len(mols), k, raw, colors)


def discrete(k: int) -> Configuration:
    """The binary configuration of two disjoint molecules."""
    return Configuration(2, k, tuple(range(2 * k)))


def _extend_rows(base: tuple[int, ...], k: int, rows: int):
    """Every way to append `rows` injective rows to the labels `base`."""
    if rows == 0:
        yield base
        return
    used = max(base, default=-1) + 1
    for row in _rows(used, k):
        yield from _extend_rows(base + row, k, rows - 1)


def _rows(used: int, k: int):
    # each position takes an old class or a new one; rows stay injective
    def go(p, taken, nxt):
        if p == k:
            yield ()
            return
        for c in range(used):
            if c not in taken:
                for rest in go(p + 1, taken | {c}, nxt):
                    yield (c,) + rest
        for rest in go(p + 1, taken, nxt + 1):
            yield (nxt,) + rest
    yield from go(0, frozenset(), used)


@lru_cache(maxsize=None)
def configurations(l: int, k: int) -> tuple[Configuration, ...]:
    """All l-ary configurations over k positions (uncolored)."""
    if l == 0:
        return (Configuration(0, k, ()),)
    out = {Configuration.make(l, k, lab) for lab in _extend_rows(tuple(range(k)), k, l - 1)}
    return tuple(sorted(out, key=lambda c: c.labels))


def binary_configurations(k: int) -> tuple[Configuration, ...]:
    return configurations(2, k)


@lru_cache(maxsize=None)
def _ternary_over(e12: Configuration) -> dict:
    """Ternary Q with Q_12 = e12, grouped by Q_02 and by Q_01."""
    k = e12.k
    by02: dict = {}
    by01: dict = {}
    base = e12.labels
    for row in _rows(e12.classes, k):
        q = Configuration.make(3, k, row + base)
        by02.setdefault(q.sub(0, 2), []).append(q)
        by01.setdefault(q.sub(0, 1), []).append(q)
    return {"02": by02, "01": by01}


# -- forms ------------------------------------------------------------------------------

class Form:
    __slots__ = ()


class Symbol(Form):
    __slots__ = ("p", "_hash")

    def __init__(self, p: int):
        self.p = p
        self._hash = hash(("c", p))

    def __eq__(self, other):
        return isinstance(other, Symbol) and other.p == self.p

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"c{self.p}"


class SetForm(Form):
    __slots__ = ("members", "_hash", "_rank")

    def __init__(self, members=()):
        self.members: frozenset = frozenset(members)
        for f, e in self.members:
            if not isinstance(f, Form) or not isinstance(e, Configuration) or e.l != 2:
                raise FormError("set forms hold (form, binary configuration) pairs")
        self._hash = hash(("s", self.members))
        self._rank = 1 + max((rank(f) for f, _ in self.members), default=-1)

    def __eq__(self, other):
        return isinstance(other, SetForm) and other._hash == self._hash and other.members == self.members

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return form_to_text(self)


EMPTY = SetForm()


def rank(f: Form) -> int:
    """0 for symbols and for the empty form, else 1 + the largest member rank."""
    return 0 if isinstance(f, Symbol) else f._rank


def symbols(f: Form) -> set[int]:
    if isinstance(f, Symbol):
        return {f.p}
    out: set[int] = set()
    for g, _ in f.members:
        out |= symbols(g)
    return out


def form_to_text(f: Form) -> str:
    if isinstance(f, Symbol):
        return f"c{f.p}"
    parts = sorted(f"({form_to_text(g)}, {e})" for g, e in f.members)
    return "{" + ", ".join(parts) + "}"


_FTOK = re.compile(r"\s*(c\d+|\d+|[{}()\[\],=])")


def parse_form(text: str, k: int) -> Form:
    """Read `c0` or `{(F, [(0,0)=(1,1)]), ...}`; configurations list merged
    position pairs of a binary configuration."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _FTOK.match(text, pos)
        if m is None:
            raise FormError(f"bad form text at {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    i = 0

    def take(want=None):
        nonlocal i
        if i >= len(toks):
            raise FormError("unexpected end of form text")
        t = toks[i]
        if want is not None and t != want:
            raise FormError(f"expected {want!r}, found {t!r}")
        i += 1
        return t

    def peek():
        if i >= len(toks):
            raise FormError("unexpected end of form text")
        return toks[i]

    def position():
        take("(")
        a = int(take())
        take(",")
        b = int(take())
        take(")")
        if a not in (0, 1) or not 0 <= b < k:
            raise FormError(f"position ({a},{b}) out of range")
        return a * k + b

    def conf():
        take("[")
        parent = list(range(2 * k))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x
        while peek() != "]":
            a = position()
            take("=")
            b = position()
            parent[find(a)] = find(b)
            if peek() == ",":
                take(",")
        take("]")
        try:
            return Configuration.make(2, k, tuple(find(x) for x in range(2 * k)))
        except FormError as e:
            raise FormError(f"not a configuration: {e}") from None

    def form():
        t = take()
        if t.startswith("c"):
            p = int(t[1:])
            if p >= k:
                raise FormError(f"symbol {t} needs k > {p}")
            return Symbol(p)
        if t != "{":
            raise FormError(f"unexpected {t!r}")
        members = []
        while peek() != "}":
            take("(")
            f = form()
            take(",")
            e = conf()
            take(")")
            members.append((f, e))
            if peek() == ",":
                take(",")
        take("}")
        return SetForm(members)

    f = form()
    if i != len(toks):
        raise FormError(f"trailing text {toks[i:]}")
    return f


# -- denotation -------------------------------------------------------------------------

class Realm:
    """A naked (or colored) set of atoms in which forms are evaluated.

    color_of, when given, maps each atom to its color; realizations of
    colored configurations then match colors.
    """

    def __init__(self, universe: Universe, color_of=None):
        self.u = universe
        self.n = universe.atom_count
        self.color_of = color_of
        self._memo: dict = {}

    def realizations(self, e: Configuration, sigma):
        """Every molecule τ with C(τ, σ) = e."""
        k = e.k
        sigma = tuple(sigma)
        fixed = {}
        for p in range(k):
            for q in range(k):
                if e.same(0, p, 1, q):
                    fixed[p] = sigma[q]
        free = [p for p in range(k) if p not in fixed]
        pool = [a for a in range(self.n) if a not in set(sigma)]
        if len(pool) < len(free):
            raise RealizationError(
                f"{self.n} atoms cannot realize {e} next to a {k}-molecule")
        for pick in itertools.permutations(pool, len(free)):
            tau = dict(fixed)
            tau.update(zip(free, pick))
            t = tuple(tau[p] for p in range(k))
            if self.color_of is not None and e.colors is not None:
                if config((t, sigma), self.color_of) != e:
                    continue
            yield t

    def denote(self, f: Form, sigma) -> int:
        sigma = tuple(sigma)
        if isinstance(f, Symbol):
            if f.p >= len(sigma):
                raise FormError(f"symbol c{f.p} outside a {len(sigma)}-molecule")
            return sigma[f.p]
        key = (f, sigma)
        got = self._memo.get(key)
        if got is None:
            elems = set()
            for g, e in f.members:
                if e.k != len(sigma):
                    raise FormError("configuration and molecule disagree on k")
                for tau in self.realizations(e, sigma):
                    elems.add(self.denote(g, tau))
            got = self.u.mk_set(elems)
            self._memo[key] = got
        return got


def denote(f: Form, sigma, universe: Universe) -> int:
    """f * sigma over the naked set of all atoms of universe."""
    return Realm(universe).denote(f, sigma)


# -- In and Eq ------------------------------------------------------------------------------

@lru_cache(maxsize=None)
def in_rel(psi: Form, phi: Form, e: Configuration) -> bool:
    """psi * τ ∈ phi * σ whenever C(τ, σ) = e."""
    if isinstance(phi, Symbol):
        return False
    groups = _ternary_over(e)["02"]
    for chi, e02 in phi.members:
        for q in groups.get(e02, ()):
            if eq_rel(psi, chi, q.sub(1, 0)):
                return True
    return False


@lru_cache(maxsize=None)
def eq_rel(psi: Form, phi: Form, e: Configuration) -> bool:
    """psi * τ = phi * σ whenever C(τ, σ) = e."""
    if isinstance(psi, Symbol) and isinstance(phi, Symbol):
        return e.same(0, psi.p, 1, phi.p)
    if isinstance(psi, Symbol) or isinstance(phi, Symbol):
        return False
    t = _ternary_over(e)
    for chi, e02 in phi.members:
        for q in t["02"].get(e02, ()):
            if not in_rel(chi, psi, q.sub(0, 1)):
                return False
    for chi, e01 in psi.members:
        for q in t["01"].get(e01, ()):
            if not in_rel(chi, phi, q.sub(0, 2)):
                return False
    return True


# -- molecule extension, numerals, form extraction -----------------------------------------

def extend_molecule(q: Configuration, mols, atom_count: int, color_of=None,
                    check_room: bool = True):
    """A molecule τ_0 with C(τ_0, mols...) = q, built by copying the forced
    entries and filling the rest with fresh atoms (of matching colors)."""
    mols = [tuple(m) for m in mols]
    l, k = len(mols), q.k
    if q.l != l + 1:
        raise FormError(f"a {q.l}-ary configuration cannot extend {l} molecules")
    if l:
        tail = config(mols, color_of if q.colors is not None else None)
        if tail != q.sub(*range(1, l + 1)):
            raise ConfigurationMismatch("the molecules do not realize the tail of the configuration")
    if check_room and atom_count < k * (l + 1):
        raise RealizationError(f"need at least {k * (l + 1)} atoms, have {atom_count}")
    used = {a for m in mols for a in m}
    tau: dict[int, int] = {}
    for p in range(k):
        for i in range(1, l + 1):
            for r in range(k):
                if q.same(0, p, i, r):
                    tau[p] = mols[i - 1][r]
    pool = [a for a in range(atom_count) if a not in used]
    for p in range(k):
        if p in tau:
            continue
        want = None if q.colors is None else q.colors[q.labels[p]]
        for a in pool:
            if want is None or color_of[a] == want:
                tau[p] = a
                pool.remove(a)
                break
        else:
            raise RealizationError(f"no fresh atom left for position {p}")
    return tuple(tau[p] for p in range(k))


@lru_cache(maxsize=None)
def nat_form(n: int, k: int) -> Form:
    """φ_n = {(φ_r, E) : r < n, E binary}; denotes the ordinal n everywhere."""
    return SetForm((nat_form(r, k), e) for r in range(n) for e in binary_configurations(k))


def form_of(x: int, sigma, structure, universe: Universe) -> Form:
    """A form φ with φ * σ = x, for x supported by Range(σ) and k-symmetric."""
    from .symmetry import min_support, supports

    sigma = tuple(sigma)
    k = len(sigma)
    u = universe
    memo: dict = {}

    def go(y, mol):
        key = (y, mol)
        if key in memo:
            return memo[key]
        if not supports(set(mol), y, structure, u):
            raise FormError(f"{u.render(y)} is not supported by the atoms {sorted(mol)}")
        if u.is_atom(y):
            f = Symbol(mol.index(y))
        else:
            members = []
            for z in u.elements(y):
                tau = _molecule_for(z, mol)
                members.append((go(z, tau), config((tau, mol))))
            f = SetForm(members)
        memo[key] = f
        return f

    def _molecule_for(z, mol):
        rep = min_support(z, structure, u, max_size=k)
        supp = sorted(rep.min_support)
        if len(supp) > k:
            raise FormError(f"{u.render(z)} has no support of size <= {k}")
        if u.is_atom(z):
            supp = [z]
        # pad with atoms of the parent molecule first, then any others
        rest = [a for a in mol if a not in supp] + [
            a for a in range(u.atom_count) if a not in supp and a not in mol]
        return tuple(supp + rest[:k - len(supp)])

    return go(x, sigma)


# -- strategy condition ---------------------------------------------------------------------

def strategy_check(triples, universe_i: Universe, universe_j: Universe) -> bool:
    """For (φ_i, σ_i, τ_i) with C(σ̄) = C(τ̄): is x_i -> y_i a partial
    isomorphism for ∈ and =, and do In/Eq predict both sides?"""
    triples = list(triples)
    if not triples:
        return True
    sig = [t[1] for t in triples]
    tau = [t[2] for t in triples]
    if config(sig) != config(tau):
        raise ConfigurationMismatch("C(σ) differs from C(τ)")
    ri, rj = Realm(universe_i), Realm(universe_j)
    xs = [ri.denote(f, s) for f, s, _ in triples]
    ys = [rj.denote(f, t) for f, _, t in triples]
    for a, (fa, sa, _) in enumerate(triples):
        for b, (fb, sb, _) in enumerate(triples):
            e = config((sa, sb))
            in_x = universe_i.contains(xs[b], xs[a])
            in_y = universe_j.contains(ys[b], ys[a])
            eq_x, eq_y = xs[a] == xs[b], ys[a] == ys[b]
            if in_x != in_y or eq_x != eq_y:
                return False
            if in_rel(fa, fb, e) != in_x or eq_rel(fa, fb, e) != eq_x:
                return False
    return True
