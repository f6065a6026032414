"""Interned hereditarily finite objects over a finite set of atoms.

Every object lives in a :class:`Universe` and is referred to by an integer
id.  Ids ``0 .. atom_count-1`` are the atoms; sets get the following ids in
creation order.  A set is stored as the sorted tuple of its element ids, and
the intern table maps that tuple back to the id, so two sets are equal iff
their ids are equal.
"""

from __future__ import annotations

from typing import Iterable, Iterator


class UnknownObject(ValueError):
    pass


class Universe:
    """Append-only store of HF objects over ``atom_count`` atoms."""

    def __init__(self, atom_count: int):
        if atom_count < 0:
            raise ValueError("atom_count must be non-negative")
        self.atom_count = atom_count
        self._elems: list[tuple[int, ...] | None] = [None] * atom_count
        self._rank: list[int] = [0] * atom_count
        self._table: dict[tuple[int, ...], int] = {}
        self._members: dict[int, frozenset[int]] = {}
        # von Neumann ordinal recognition: id -> n and n -> id
        self._ordinal_value: dict[int, int] = {}
        self._ordinals: list[int] = []
        self.empty = self.mk_set(())
        self.one = self.mk_set((self.empty,))
        self._atoms_set: int | None = None

    def __len__(self) -> int:
        return len(self._elems)

    def __contains__(self, x: int) -> bool:
        return isinstance(x, int) and 0 <= x < len(self._elems)

    def _check(self, x: int) -> None:
        if not (0 <= x < len(self._elems)):
            raise UnknownObject(f"unknown object id {x}")

    # -- construction -----------------------------------------------------

    def mk_set(self, elems: Iterable[int]) -> int:
        key = tuple(sorted(set(elems)))
        found = self._table.get(key)
        if found is not None:
            return found
        n = len(self._elems)
        for e in key:
            if not (0 <= e < n):
                raise UnknownObject(f"unknown element id {e}")
        self._elems.append(key)
        self._rank.append(1 + max(self._rank[e] for e in key) if key else 0)
        self._table[key] = n
        if _all_ordinals_below(self, key):
            self._note_ordinal(n, len(key))
        return n

    def _note_ordinal(self, x: int, k: int) -> None:
        self._ordinal_value[x] = k
        if k == len(self._ordinals):
            self._ordinals.append(x)

    def lookup(self, elems: Iterable[int]) -> int | None:
        """Id of the set with these elements, or None if never created."""
        return self._table.get(tuple(sorted(set(elems))))

    def pair(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        return self.mk_set((a, b))

    def singleton(self, a: int) -> int:
        return self.pair(a, a)

    def atoms(self) -> int:
        """The set of all atoms."""
        if self._atoms_set is None:
            self._atoms_set = self.mk_set(range(self.atom_count))
        return self._atoms_set

    def ordinal(self, n: int) -> int:
        if n < 0:
            raise ValueError("ordinals are non-negative")
        while len(self._ordinals) <= n:
            prev = self._ordinals[-1]
            self.mk_set(self._elems[prev] + (prev,))
        return self._ordinals[n]

    # -- inspection -------------------------------------------------------

    def is_atom(self, x: int) -> bool:
        self._check(x)
        return x < self.atom_count

    def is_set(self, x: int) -> bool:
        self._check(x)
        return x >= self.atom_count

    def elements(self, x: int) -> tuple[int, ...]:
        """Members of x in canonical order; atoms have none."""
        self._check(x)
        e = self._elems[x]
        return () if e is None else e

    def members(self, x: int) -> frozenset[int]:
        s = self._members.get(x)
        if s is None:
            s = frozenset(self.elements(x))
            self._members[x] = s
        return s

    def contains(self, y: int, x: int) -> bool:
        """x ∈ y."""
        return x in self.members(y)

    def rank(self, x: int) -> int:
        self._check(x)
        return self._rank[x]

    def ordinal_value(self, x: int) -> int | None:
        """n if x is the von Neumann ordinal n, else None."""
        return self._ordinal_value.get(x)

    # -- set-theoretic functions -----------------------------------------

    def big_union(self, a: int) -> int:
        self._check(a)
        if a < self.atom_count:
            return self.empty
        out: set[int] = set()
        for b in self._elems[a]:
            if b >= self.atom_count:
                out.update(self._elems[b])
        return self.mk_set(out)

    def the_unique(self, a: int) -> int:
        self._check(a)
        e = self._elems[a]
        if e is not None and len(e) == 1:
            return e[0]
        return self.empty

    def union(self, a: int, b: int) -> int:
        return self.mk_set(self.elements(a) + self.elements(b))

    def card_ordinal(self, x: int) -> int:
        """The ordinal |x|; atoms count as having no cardinality and give ∅."""
        self._check(x)
        if x < self.atom_count:
            return self.empty
        return self.ordinal(len(self._elems[x]))

    def tc(self, x: int) -> frozenset[int]:
        """TC(x): the least transitive set having x as a member."""
        self._check(x)
        return frozenset(self.tc_many((x,)))

    def tc_many(self, xs: Iterable[int], into: set[int] | None = None) -> set[int]:
        """Union of TC(x) over xs, optionally extending an existing closed set."""
        seen = set() if into is None else into
        stack = [x for x in xs if x not in seen]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            e = self._elems[x]
            if e:
                stack.extend(y for y in e if y not in seen)
        return seen

    def is_transitive(self, x: int) -> bool:
        if self.is_atom(x):
            return False
        mem = self.members(x)
        return all(z in mem for y in self.elements(x) for z in self.elements(y))

    def is_pos_integer(self, x: int) -> bool:
        """x is a positive von Neumann integer.

        Checks the structural characterisation directly: x is transitive, and x
        and each of its members is either 0 or of the form z ∪ {z}.
        """
        if self.is_atom(x) or x == self.empty:
            return False
        if not self.is_transitive(x):
            return False
        return all(self._zero_or_successor(y) for y in (x, *self.elements(x)))

    def _zero_or_successor(self, y: int) -> bool:
        if y == self.empty:
            return True
        if self.is_atom(y):
            return False
        mem = self.members(y)
        # z ∪ {z} = y forces z to be the element of largest rank
        z = max(self.elements(y), key=self.rank)
        if self.is_atom(z):
            return False
        return mem == self.members(z) | {z}

    def kuratowski(self, x: int, y: int) -> int:
        return self.pair(self.singleton(x), self.pair(x, y))

    def big_intersection(self, z: int) -> int:
        sets = [self.members(w) for w in self.elements(z)]
        if not sets:
            return self.empty
        return self.mk_set(frozenset.intersection(*sets))

    def proj1(self, z: int) -> int:
        return self.the_unique(self.big_intersection(z))

    def proj2(self, z: int) -> int:
        inter = self.big_intersection(z)
        uni = self.big_union(z)
        if uni == inter:
            return self.proj1(z)
        return self.the_unique(self.mk_set(self.members(uni) - self.members(inter)))

    def tuple_object(self, items: tuple[int, ...]) -> int:
        """Encode a non-empty tuple as right-nested Kuratowski pairs."""
        if not items:
            return self.empty
        if len(items) == 1:
            return items[0]
        return self.kuratowski(items[0], self.tuple_object(items[1:]))

    # -- rendering and transport -----------------------------------------

    def render(self, x: int) -> str:
        self._check(x)
        if x < self.atom_count:
            return f"a{x}"
        k = self._ordinal_value.get(x)
        if k is not None:
            return str(k)
        return "{" + ",".join(self.render(y) for y in self._elems[x]) + "}"

    def export(self, x: int):
        """Universe-independent value: ('a', i) for atoms, nested frozensets."""
        if x < self.atom_count:
            return ("a", x)
        return frozenset(self.export(y) for y in self._elems[x])

    def import_(self, value) -> int:
        if isinstance(value, tuple):
            return value[1]
        return self.mk_set(self.import_(v) for v in value)

    def iter_ids(self) -> Iterator[int]:
        return iter(range(len(self._elems)))


def _all_ordinals_below(u: Universe, key: tuple[int, ...]) -> bool:
    vals = {u._ordinal_value.get(e) for e in key}
    return None not in vals and vals == set(range(len(key)))
