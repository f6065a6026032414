"""Exact solver for the m-pebble game on finite relational structures.

Duplicator wins a play if it never ends, so winning is a safety objective:
the solver computes the greatest set of partial-isomorphism positions from
which Duplicator can answer every Spoiler move and stay inside the set.

Pebbles are interchangeable, so a position is stored as the sorted tuple of
the (a, b) pairs currently on the board; off-board pebbles are implicit.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .structio import InputStructure


class GameTooLarge(RuntimeError):
    pass


class Winner(enum.Enum):
    DUPLICATOR = "Duplicator"
    SPOILER = "Spoiler"


def _check_vocab(A: InputStructure, B: InputStructure):
    va = {k: v[0] for k, v in A.relations.items()}
    vb = {k: v[0] for k, v in B.relations.items()}
    if va != vb:
        raise ValueError(f"structures have different vocabularies: {va} vs {vb}")


def is_partial_iso(pos, A: InputStructure, B: InputStructure) -> bool:
    """pos is an iterable of (a, b) pairs, or None for an off-board pebble."""
    pairs = sorted({p for p in pos if p is not None})
    for (a, b), (c, d) in itertools.combinations(pairs, 2):
        if (a == c) != (b == d):
            return False
    for name, (ar, ta) in A.relations.items():
        tb = B.relations[name][1]
        for combo in itertools.product(pairs, repeat=ar):
            if (tuple(x for x, _ in combo) in ta) != (tuple(y for _, y in combo) in tb):
                return False
    return True


@dataclass
class GameVerdict:
    winner: Winner
    m: int
    certified_positions: frozenset  # the safe region
    start: tuple

    def wins_from(self, pos) -> bool:
        return _canon(pos) in self.certified_positions


def _canon(pos) -> tuple:
    return tuple(sorted(p for p in pos if p is not None))


class _Arena:
    def __init__(self, A, B, m, limit):
        _check_vocab(A, B)
        self.A, self.B, self.m = A, B, m
        self.na, self.nb = A.atom_count, B.atom_count
        pairs = [(a, b) for a in range(self.na) for b in range(self.nb)
                 if is_partial_iso(((a, b),), A, B)]
        # sorted multisets of at most m pairs, grown one pair at a time
        layer = [()]
        self.positions = [()]
        for _ in range(m):
            nxt = []
            for pos in layer:
                lo = pairs.index(pos[-1]) if pos else 0
                for pair in pairs[lo:]:
                    cand = pos + (pair,)
                    if _extends_iso(pos, pair, A, B):
                        nxt.append(cand)
            layer = nxt
            self.positions.extend(layer)
            if len(self.positions) > limit:
                raise GameTooLarge(f"more than {limit} positions")

    def lifts(self, pos):
        """Positions left after Spoiler picks up one pebble (or takes a free one)."""
        out = set()
        if len(pos) < self.m:
            out.add(pos)
        for i in range(len(pos)):
            out.add(pos[:i] + pos[i + 1:])
        return out

    def good(self, rest, region) -> bool:
        """Every Spoiler placement next to rest has a reply inside region."""
        for a in range(self.na):
            if not any(_insert(rest, (a, b)) in region for b in range(self.nb)):
                return False
        for b in range(self.nb):
            if not any(_insert(rest, (a, b)) in region for a in range(self.na)):
                return False
        return True

    def closure(self, region: set) -> set:
        """Positions of region all of whose Spoiler moves can be answered in region."""
        cache: dict = {}
        out = set()
        for pos in region:
            ok = True
            for rest in self.lifts(pos):
                g = cache.get(rest)
                if g is None:
                    g = cache[rest] = self.good(rest, region)
                if not g:
                    ok = False
                    break
            if ok:
                out.add(pos)
        return out


def _extends_iso(pos, pair, A, B) -> bool:
    """Is pos + pair a partial isomorphism, given that pos is one?"""
    a, b = pair
    for c, d in pos:
        if (a == c) != (b == d):
            return False
    pairs = sorted(set(pos) | {pair})
    for name, (ar, ta) in A.relations.items():
        tb = B.relations[name][1]
        for combo in itertools.product(pairs, repeat=ar):
            if pair not in combo:
                continue
            if (tuple(x for x, _ in combo) in ta) != (tuple(y for _, y in combo) in tb):
                return False
    return True


def _insert(rest, pair):
    out = list(rest)
    out.append(pair)
    out.sort()
    return tuple(out)


def solve(A: InputStructure, B: InputStructure, m: int, start=(),
          limit: int = 2_000_000) -> GameVerdict:
    """Decide G_m(A, B) from the start position (all pebbles off by default)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    arena = _Arena(A, B, m, limit)
    region = set(arena.positions)
    while True:
        nxt = arena.closure(region)
        if nxt == region:
            break
        region = nxt
    s = _canon(start)
    if len(s) > m:
        raise ValueError("start position has more than m pebbles")
    win = Winner.DUPLICATOR if s in region else Winner.SPOILER
    return GameVerdict(win, m, frozenset(region), s)


def closure_of(verdict: GameVerdict, A, B) -> frozenset:
    """Apply the Duplicator-closure operator to a verdict's safe region."""
    arena = _Arena(A, B, verdict.m, 10**9)
    return frozenset(arena.closure(set(verdict.certified_positions)))


def separation_probe(A: InputStructure, B: InputStructure, m_max: int, **kw) -> int | None:
    """Least m <= m_max for which Spoiler wins G_m(A, B), or None."""
    for m in range(1, m_max + 1):
        if solve(A, B, m, **kw).winner is Winner.SPOILER:
            return m
    return None


# -- brute force oracle -----------------------------------------------------------------

def brute_force(A: InputStructure, B: InputStructure, m: int, depth: int | None = None) -> Winner:
    """Backward induction over the game tree with pebble indices kept.

    won[d] holds the positions from which Duplicator survives d more rounds.
    With depth at least (|A||B|+1)^m + 1 the bounded game has the same winner
    as the infinite one, since some position must repeat along a longer play.
    """
    _check_vocab(A, B)
    na, nb = A.atom_count, B.atom_count
    if depth is None:
        depth = (na * nb + 1) ** m + 1
    cells = [None] + [(a, b) for a in range(na) for b in range(nb)]
    alive = {p for p in itertools.product(cells, repeat=m) if is_partial_iso(p, A, B)}
    for _ in range(depth):
        nxt = set()
        for pos in alive:
            ok = True
            for i in range(m):
                for a in range(na):
                    if not any(_put(pos, i, (a, b)) in alive for b in range(nb)):
                        ok = False
                        break
                if not ok:
                    break
                for b in range(nb):
                    if not any(_put(pos, i, (a, b)) in alive for a in range(na)):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                nxt.add(pos)
        if nxt == alive:
            break
        alive = nxt
    return Winner.DUPLICATOR if (None,) * m in alive else Winner.SPOILER


def _put(pos, i, pair):
    out = list(pos)
    out[i] = pair
    return tuple(out)
