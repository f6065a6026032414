"""Term evaluation, rule denotation and firing of update sets.

Terms and rules are compiled once into Python closures of the form
``fn(state, env, trace)``; the public functions here are thin wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .hf import Universe
from .lang.syntax import App, Comp, Cond, Enum, Forall, Par, Skip, Update, Var, Vocabulary
from .lang.transform import enum_term


class UnassignedVariable(KeyError):
    pass


class State:
    """A state: universe, static input relations and dynamic extents.

    Extents map argument tuples to values and never store ∅.  A State is
    treated as immutable once built; fire() returns a new one.
    """

    __slots__ = ("universe", "vocab", "inputs", "extents", "statics", "_key")

    def __init__(self, universe: Universe, vocab: Vocabulary, inputs=None,
                 extents=None, statics=None):
        self.universe = universe
        self.vocab = vocab
        self.inputs: dict[str, frozenset] = dict(inputs or {})
        self.extents: dict[str, dict[tuple, int]] = {
            name: {} for name in vocab.dynamics
        }
        if extents:
            for name, ext in extents.items():
                self.extents[name] = dict(ext)
        self.statics: dict[str, int] = dict(statics or {})
        self._key = None

    def lookup(self, f: str, args: tuple = ()) -> int:
        return self.extents[f].get(tuple(args), self.universe.empty)

    def holds(self, f: str, args: tuple = ()) -> bool:
        return self.lookup(f, args) == self.universe.one

    @property
    def halted(self) -> bool:
        return self.holds("Halt")

    def key(self):
        """Hashable summary; equal keys over one universe mean equal states."""
        if self._key is None:
            self._key = tuple(sorted(
                (name, frozenset(ext.items())) for name, ext in self.extents.items() if ext
            ))
        return self._key

    def facts(self):
        """All (f, args, value) triples stored in the dynamic extents."""
        for name in sorted(self.extents):
            for args, val in sorted(self.extents[name].items()):
                yield name, args, val

    def extent_sizes(self) -> dict[str, int]:
        return {name: len(ext) for name, ext in sorted(self.extents.items())}

    def __eq__(self, other):
        return isinstance(other, State) and self.universe is other.universe and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        u = self.universe
        parts = [f"{f}{_fmt_args(u, a)}={u.render(v)}" for f, a, v in self.facts()]
        return "State(" + ", ".join(parts) + ")"


def _fmt_args(u, args):
    return "(" + ",".join(u.render(a) for a in args) + ")" if args else ""


@dataclass
class ExpandedState:
    state: State
    assignment: dict = field(default_factory=dict)


class Trace:
    """Collects values of grounded subterms and counts evaluation events."""

    __slots__ = ("values", "events")

    def __init__(self):
        self.values: set[int] = set()
        self.events = 0

    def add(self, v: int) -> None:
        self.values.add(v)
        self.events += 1


# -- compilation --------------------------------------------------------------

def compile_term(t, vocab: Vocabulary):
    match t:
        case Var(name):
            def var(st, env, tr):
                try:
                    v = env[name]
                except KeyError:
                    raise UnassignedVariable(name) from None
                if tr is not None:
                    tr.add(v)
                return v
            return var
        case Enum(items):
            return compile_term(enum_term(items), vocab)
        case Comp(body, var, rng, guard):
            fb = compile_term(body, vocab)
            fr = compile_term(rng, vocab)
            fg = compile_term(guard, vocab)

            def comp(st, env, tr):
                u = st.universe
                one = u.one
                out = []
                inner = dict(env)
                for a in u.elements(fr(st, env, tr)):
                    inner[var] = a
                    if fg(st, inner, tr) == one:
                        out.append(fb(st, inner, tr))
                v = u.mk_set(out)
                if tr is not None:
                    tr.add(v)
                return v
            return comp
        case App(name, args):
            return _compile_app(name, [compile_term(a, vocab) for a in args], vocab)
    raise TypeError(f"not a term: {t!r}")


def _compile_app(name, fs, vocab: Vocabulary):
    def rec(v, tr):
        if tr is not None:
            tr.add(v)
        return v

    if name in ("true", "false", "emptyset", "Atoms"):
        def const(st, env, tr):
            u = st.universe
            v = u.one if name == "true" else u.atoms() if name == "Atoms" else u.empty
            return rec(v, tr)
        return const
    if name == "=":
        fa, fb = fs

        def eq(st, env, tr):
            u = st.universe
            return rec(u.one if fa(st, env, tr) == fb(st, env, tr) else u.empty, tr)
        return eq
    if name == "in":
        fa, fb = fs

        def mem(st, env, tr):
            u = st.universe
            x = fa(st, env, tr)
            return rec(u.one if u.contains(fb(st, env, tr), x) else u.empty, tr)
        return mem
    if name == "not":
        (fa,) = fs

        def neg(st, env, tr):
            u = st.universe
            x = fa(st, env, tr)
            # non-Boolean arguments make a connective false
            return rec(u.one if x == u.empty else u.empty, tr)
        return neg
    if name in ("and", "or"):
        fa, fb = fs
        want_and = name == "and"

        def conn(st, env, tr):
            u = st.universe
            x, y = fa(st, env, tr), fb(st, env, tr)
            bools = (u.empty, u.one)
            if x not in bools or y not in bools:
                return rec(u.empty, tr)
            if want_and:
                return rec(u.one if x == u.one and y == u.one else u.empty, tr)
            return rec(u.one if x == u.one or y == u.one else u.empty, tr)
        return conn
    if name in ("Union", "TheUnique", "Card"):
        (fa,) = fs
        op = {"Union": Universe.big_union, "TheUnique": Universe.the_unique,
              "Card": Universe.card_ordinal}[name]

        def unary(st, env, tr):
            return rec(op(st.universe, fa(st, env, tr)), tr)
        return unary
    if name == "Pair":
        fa, fb = fs

        def pair(st, env, tr):
            return rec(st.universe.pair(fa(st, env, tr), fb(st, env, tr)), tr)
        return pair
    if name == "InputSize":
        def isize(st, env, tr):
            return rec(st.statics["InputSize"], tr)
        return isize
    if name in vocab.inputs:
        def inp(st, env, tr):
            args = tuple(f(st, env, tr) for f in fs)
            u = st.universe
            return rec(u.one if args in st.inputs[name] else u.empty, tr)
        return inp
    if name in vocab.dynamics:
        def dyn(st, env, tr):
            args = tuple(f(st, env, tr) for f in fs)
            return rec(st.extents[name].get(args, st.universe.empty), tr)
        return dyn
    raise NameError(f"unknown function name {name}")


def compile_rule(r, vocab: Vocabulary):
    """Compile a rule to fn(state, env, trace, out) adding updates to out."""
    match r:
        case Skip():
            return lambda st, env, tr, out: None
        case Update(fname, args, rhs):
            fas = [compile_term(a, vocab) for a in args]
            fr = compile_term(rhs, vocab)

            def upd(st, env, tr, out):
                xs = tuple(f(st, env, tr) for f in fas)
                out.add((fname, xs, fr(st, env, tr)))
            return upd
        case Cond(guard, then, else_):
            fg = compile_term(guard, vocab)
            ft = compile_rule(then, vocab)
            fe = compile_rule(else_ if else_ is not None else Skip(), vocab)

            def cond(st, env, tr, out):
                if fg(st, env, tr) == st.universe.one:
                    ft(st, env, tr, out)
                else:
                    fe(st, env, tr, out)
            return cond
        case Forall(var, rng, body):
            fr = compile_term(rng, vocab)
            fb = compile_rule(body, vocab)

            def forall(st, env, tr, out):
                inner = dict(env)
                for a in st.universe.elements(fr(st, env, tr)):
                    inner[var] = a
                    fb(st, inner, tr, out)
            return forall
        case Par(rules):
            fs = [compile_rule(x, vocab) for x in rules]

            def par(st, env, tr, out):
                for f in fs:
                    f(st, env, tr, out)
            return par
    raise TypeError(f"not a rule: {r!r}")


# -- public API -----------------------------------------------------------------

def _split(es):
    if isinstance(es, ExpandedState):
        return es.state, es.assignment
    return es, {}


def eval_term(t, es, trace: Trace | None = None) -> int:
    st, env = _split(es)
    return compile_term(t, st.vocab)(st, env, trace)


def den(r, es, trace: Trace | None = None) -> frozenset:
    """The action of r at es: a set of (fname, args, value) updates."""
    st, env = _split(es)
    out: set = set()
    compile_rule(r, st.vocab)(st, env, trace, out)
    return frozenset(out)


def is_consistent(updates) -> bool:
    seen: dict = {}
    for f, args, v in updates:
        w = seen.setdefault((f, args), v)
        if w != v:
            return False
    return True


def fire(s: State, updates) -> State:
    """Apply a consistent action simultaneously; an inconsistent one is a no-op."""
    if not updates:
        return s
    if not is_consistent(updates):
        return s
    empty = s.universe.empty
    extents = dict(s.extents)
    touched = set()
    for f, args, v in updates:
        if f not in touched:
            extents[f] = dict(extents[f])
            touched.add(f)
        if v == empty:
            extents[f].pop(args, None)
        else:
            extents[f][args] = v
    new = State.__new__(State)
    new.universe = s.universe
    new.vocab = s.vocab
    new.inputs = s.inputs
    new.extents = extents
    new.statics = s.statics
    new._key = None
    return new


class Stepper:
    """A program compiled once for repeated sequel computation."""

    def __init__(self, program):
        self.program = program
        self.fn = compile_rule(program.body, program.vocab)

    def den(self, s: State, trace: Trace | None = None) -> frozenset:
        out: set = set()
        self.fn(s, {}, trace, out)
        return frozenset(out)

    def sequel(self, s: State, trace: Trace | None = None) -> State:
        return fire(s, self.den(s, trace))


def sequel(s: State, p, trace: Trace | None = None) -> State:
    return Stepper(p).sequel(s, trace)


def canonical_updates(u: Universe, updates) -> list[str]:
    """Deterministic textual form of an update set, for traces."""
    rows = sorted(updates, key=lambda x: (x[0], x[1], x[2]))
    return [f"{f}{_fmt_args(u, a)}:={u.render(v)}" for f, a, v in rows]
