"""First-order translation of programs and a fixed-point evaluator.

The pipeline mirrors the classical argument that runs are definable by
simultaneous induction:

1. ``update_formula(rule, f)`` gives a formula U(x̄, y) true exactly when
   (f, x̄, y) is in the action of the rule.
2. ``to_simple`` flattens nested terms so every atom reads h(x̄) = t with
   variables x̄ and t a variable or a truth constant.
3. ``build_system`` turns the update formulas into a recurrence for relations
   D_f(i, x̄, y), meaning f(x̄) = y ≠ ∅ holds at step i.
4. ``lfp_eval`` evaluates a system over a finite transitive domain.

The evaluator is a generate-and-test solver: ``solve(φ, env)`` yields every
extension of env that satisfies φ, choosing conjuncts that can produce
bindings before falling back to enumerating the domain.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .evaluate import State
from .hf import Universe
from .lang.syntax import (
    App, Comp, Cond, Enum, Forall, Par, Program, Skip, Update, Var,
)
from .lang.transform import desugar, rename_apart, time_explicit, enum_term


# -- formulas ----------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class TermEq:
    """t1 = t2 over program terms; removed by to_simple."""
    left: object
    right: object


@dataclass(frozen=True)
class Atom:
    """h(args) = res with args variable names and res a name or a bool."""
    h: str
    args: tuple
    res: object


@dataclass(frozen=True)
class PredApp:
    name: str
    args: tuple


@dataclass(frozen=True)
class PosInt:
    var: str


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Exists:
    var: str
    body: object
    bound: object = None  # None, a variable name, or (before to_simple) a term


@dataclass(frozen=True)
class ForallF:
    var: str
    body: object
    bound: object = None


@dataclass(frozen=True)
class Collect:
    """z is the set of all w satisfying body."""
    z: str
    w: str
    body: object


TRUE = Const(True)
FALSE = Const(False)


def conj(*parts):
    flat = []
    for p in parts:
        if p == TRUE:
            continue
        if p == FALSE:
            return FALSE
        flat.extend(p.parts if isinstance(p, And) else (p,))
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts):
    flat = []
    for p in parts:
        if p == FALSE:
            continue
        if p == TRUE:
            return TRUE
        flat.extend(p.parts if isinstance(p, Or) else (p,))
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def neg(p):
    if isinstance(p, Const):
        return Const(not p.value)
    return Not(p)


def _term_vars(t) -> set[str]:
    from .lang.syntax import free_vars
    return set(free_vars(t))


_FV_CACHE: dict[int, tuple] = {}


def free_fvars(phi) -> frozenset[str]:
    hit = _FV_CACHE.get(id(phi))
    if hit is not None and hit[0] is phi:
        return hit[1]
    out = _free_fvars(phi)
    # keep phi alive so its id is not reused
    _FV_CACHE[id(phi)] = (phi, out)
    return out


def _free_fvars(phi) -> frozenset[str]:
    match phi:
        case Const():
            return frozenset()
        case TermEq(a, b):
            return frozenset(_term_vars(a) | _term_vars(b))
        case Atom(_, args, res):
            out = set(args)
            if isinstance(res, str):
                out.add(res)
            return frozenset(out)
        case PredApp(_, args):
            return frozenset(a for a in args if isinstance(a, str))
        case PosInt(v):
            return frozenset((v,))
        case Not(b):
            return free_fvars(b)
        case And(ps) | Or(ps):
            return frozenset().union(*map(free_fvars, ps))
        case Exists(v, b, bound) | ForallF(v, b, bound):
            out = free_fvars(b) - {v}
            if isinstance(bound, str):
                out |= {bound}
            elif bound is not None:
                out |= _term_vars(bound)
            return out
        case Collect(z, w, b):
            return (free_fvars(b) - {w}) | {z}
    raise TypeError(f"not a formula: {phi!r}")


# -- printing ----------------------------------------------------------------------------

def formula_to_text(phi) -> str:
    from .lang.syntax import term_to_text
    match phi:
        case Const(v):
            return "true" if v else "false"
        case TermEq(a, b):
            return f"(= {term_to_text(a)} {term_to_text(b)})"
        case Atom(h, args, res):
            r = res if isinstance(res, str) else ("true" if res else "false")
            return f"{h}({', '.join(args)})={r}"
        case PredApp(name, args):
            return f"{name}({', '.join(map(str, args))})"
        case PosInt(v):
            return f"PosInteger({v})"
        case Not(b):
            return f"(not {formula_to_text(b)})"
        case And(ps):
            return "(and " + " ".join(map(formula_to_text, ps)) + ")"
        case Or(ps):
            return "(or " + " ".join(map(formula_to_text, ps)) + ")"
        case Exists(v, b, bound) | ForallF(v, b, bound):
            q = "exists" if isinstance(phi, Exists) else "forall"
            if bound is None:
                rng = ""
            elif isinstance(bound, str):
                rng = f" in {bound}"
            else:
                rng = f" in {term_to_text(bound)}"
            return f"({q} {v}{rng} {formula_to_text(b)})"
        case Collect(z, w, b):
            return f"(collect {z} {w} {formula_to_text(b)})"
    raise TypeError(f"not a formula: {phi!r}")


# -- fresh names and substitution --------------------------------------------------------------

class Fresh:
    """Supplies variable names that cannot clash with program variables."""

    def __init__(self, stem: str = "%"):
        self.stem = stem
        self.counter = itertools.count(1)

    def __call__(self, hint: str = "t") -> str:
        return f"{self.stem}{hint}{next(self.counter)}"


def subst_term(t, old: str, new: str):
    match t:
        case Var(name):
            return Var(new) if name == old else t
        case App(name, args):
            return App(name, tuple(subst_term(a, old, new) for a in args))
        case Enum(items):
            return Enum(tuple(subst_term(a, old, new) for a in items))
        case Comp(body, var, rng, guard):
            rng2 = subst_term(rng, old, new)
            if var == old:
                return Comp(body, var, rng2, guard)
            return Comp(subst_term(body, old, new), var, rng2, subst_term(guard, old, new))
    raise TypeError(f"not a term: {t!r}")


def subst_rule(r, old: str, new: str):
    match r:
        case Skip():
            return r
        case Update(f, args, rhs):
            return Update(f, tuple(subst_term(a, old, new) for a in args), subst_term(rhs, old, new))
        case Cond(g, a, b):
            return Cond(subst_term(g, old, new), subst_rule(a, old, new),
                        None if b is None else subst_rule(b, old, new))
        case Forall(v, rng, body):
            rng2 = subst_term(rng, old, new)
            return Forall(v, rng2, body if v == old else subst_rule(body, old, new))
        case Par(rules):
            return Par(tuple(subst_rule(x, old, new) for x in rules))
    raise TypeError(f"not a rule: {r!r}")


def subst_formula(phi, old: str, new: str):
    """Rename the free variable old to new."""
    def n(x):
        return new if x == old else x

    match phi:
        case Const():
            return phi
        case PosInt(v):
            return PosInt(n(v))
        case TermEq(a, b):
            return TermEq(subst_term(a, old, new), subst_term(b, old, new))
        case Atom(h, args, res):
            return Atom(h, tuple(map(n, args)), n(res) if isinstance(res, str) else res)
        case PredApp(name, args):
            return PredApp(name, tuple(n(a) if isinstance(a, str) else a for a in args))
        case Not(b):
            return Not(subst_formula(b, old, new))
        case And(ps):
            return And(tuple(subst_formula(p, old, new) for p in ps))
        case Or(ps):
            return Or(tuple(subst_formula(p, old, new) for p in ps))
        case Exists(v, b, bound) | ForallF(v, b, bound):
            if isinstance(bound, str):
                bound = n(bound)
            elif bound is not None:
                bound = subst_term(bound, old, new)
            body = b if v == old else subst_formula(b, old, new)
            return type(phi)(v, body, bound)
        case Collect(z, w, b):
            return Collect(n(z), w, b if w == old else subst_formula(b, old, new))
    raise TypeError(f"not a formula: {phi!r}")


# -- update formulas --------------------------------------------------------------------------------

# time index placeholder in hoisted clash predicates, filled in by replace_dynamic
CLASH_INDEX = "%index"

class ClashMode(enum.Enum):
    BLOCK = "block"
    OPERATIONAL = "operational"


def update_formula(r, f: str, xs: tuple[str, ...], y: str, dynamics,
                   mode: ClashMode = ClashMode.OPERATIONAL, fresh: Fresh | None = None,
                   clash_pred=None):
    """Formula over program terms, true iff (f, xs, y) is in the action of r.

    In BLOCK mode every do-forall carries the negated clash condition of its
    own branches; in OPERATIONAL mode actions are plain unions and clashes
    are handled once per step by the system.  dynamics maps each dynamic
    name to its arity.  If clash_pred is given it maps a do-forall to a
    formula standing for its clash condition, which keeps the result from
    growing exponentially with the nesting depth.
    """
    fresh = fresh or Fresh()

    def go(r, f, xs, y):
        match r:
            case Skip():
                return FALSE
            case Update(h, args, rhs):
                if h != f:
                    return FALSE
                return conj(*(TermEq(Var(x), t) for x, t in zip(xs, args)), TermEq(Var(y), rhs))
            case Cond(g, a, b):
                b = b if b is not None else Skip()
                return disj(conj(TermEq(g, App("true")), go(a, f, xs, y)),
                            conj(TermEq(g, App("false")), go(b, f, xs, y)))
            case Forall(u, rng, body):
                inner = go(body, f, xs, y)
                main = Exists(u, inner, rng) if inner != FALSE else FALSE
                if mode is ClashMode.OPERATIONAL or main == FALSE:
                    return main
                c = clash_pred(r) if clash_pred else clash_formula(r, dynamics, fresh)
                return conj(neg(c), main)
            case Par(rules):
                return disj(*(go(x, f, xs, y) for x in rules))
        raise TypeError(f"not a rule: {r!r}")

    return go(r, f, xs, y)


def clash_formula(r: Forall, dynamics, fresh: Fresh | None = None, clash_pred=None):
    """Two branches of the do-forall r write different values to one location."""
    fresh = fresh or Fresh()
    u, rng, body = r.var, r.range, r.body
    parts = []
    for h, ar in dynamics.items():
        u2 = fresh("u")
        zs = tuple(fresh("z") for _ in range(ar))
        w, w2 = fresh("w"), fresh("w")
        a = update_formula(body, h, zs, w, dynamics, ClashMode.BLOCK, fresh, clash_pred)
        if a == FALSE:
            continue
        b = subst_formula(subst_formula(a, u, u2), w, w2)
        core = conj(a, b, Not(TermEq(Var(w), Var(w2))))
        for v in (w2, w, *zs):
            core = Exists(v, core)
        parts.append(Exists(u, Exists(u2, core, rng), rng))
    return disj(*parts)


# -- simplification --------------------------------------------------------------------------------------

def to_simple(phi, fresh: Fresh | None = None):
    """Equivalent formula whose atoms are all of the form h(x̄) = t."""
    fresh = fresh or Fresh()

    def flatten_into(t, target):
        """Formula saying Val(t) = target (a variable name or a bool)."""
        match t:
            case Var(name):
                if isinstance(target, bool):
                    return Atom("true" if target else "false", (), name)
                return Atom("=", (name, target), True)
            case Enum(items):
                return flatten_into(enum_term(items), target)
            case App(h, args):
                names, parts, new = [], [], []
                for a in args:
                    if isinstance(a, Var):
                        names.append(a.name)
                    else:
                        z = fresh("t")
                        new.append(z)
                        names.append(z)
                        parts.append(flatten_into(a, z))
                body = conj(*parts, Atom(h, tuple(names), target))
                for z in reversed(new):
                    body = Exists(z, body)
                return body
            case Comp(body, v, rng, guard):
                if isinstance(target, bool):
                    z = fresh("t")
                    return Exists(z, conj(flatten_into(t, z),
                                          Atom("true" if target else "false", (), z)))
                zr = fresh("r")
                w = fresh("w")
                psi = Exists(v, conj(Atom("in", (v, zr), True), flatten_into(guard, True),
                                     flatten_into(body, w)), zr)
                return Exists(zr, conj(flatten_into(rng, zr), Collect(target, w, psi)))
        raise TypeError(f"not a term: {t!r}")

    def go(phi):
        match phi:
            case Const() | Atom() | PredApp() | PosInt():
                return phi
            case TermEq(a, b):
                if isinstance(b, Var):
                    return flatten_into(a, b.name)
                if isinstance(a, Var):
                    return flatten_into(b, a.name)
                if b in (App("true"), App("false")):
                    return flatten_into(a, b.name == "true")
                z = fresh("e")
                return Exists(z, conj(flatten_into(b, z), flatten_into(a, z)))
            case Not(b):
                return neg(go(b))
            case And(ps):
                return conj(*map(go, ps))
            case Or(ps):
                return disj(*map(go, ps))
            case Exists(v, b, bound) | ForallF(v, b, bound):
                cls = type(phi)
                if bound is None or isinstance(bound, str):
                    return cls(v, go(b), bound)
                if isinstance(bound, Var):
                    return cls(v, go(b), bound.name)
                zr = fresh("r")
                inner = cls(v, go(b), zr)
                return Exists(zr, conj(flatten_into(bound, zr), inner))
            case Collect(z, w, b):
                return Collect(z, w, go(b))
        raise TypeError(f"not a formula: {phi!r}")

    return go(phi)


def is_simple(phi) -> bool:
    match phi:
        case TermEq():
            return False
        case Const() | Atom() | PredApp() | PosInt():
            return True
        case Not(b) | Collect(_, _, b):
            return is_simple(b)
        case And(ps) | Or(ps):
            return all(map(is_simple, ps))
        case Exists(_, b, bound) | ForallF(_, b, bound):
            return (bound is None or isinstance(bound, str)) and is_simple(b)
    raise TypeError(f"not a formula: {phi!r}")


def replace_dynamic(phi, dynamics, index: str, fresh: Fresh, prefix: str = "D_"):
    """Replace each atom h(ū) = t with h dynamic by a lookup in D_h at the
    given time index, defaulting to ∅ outside the stored extent."""

    def lookup(h, args, res):
        y = fresh("y")
        stored = PredApp(prefix + h, (index, *args, res))
        default = conj(Atom("emptyset", (), res),
                       Not(Exists(y, PredApp(prefix + h, (index, *args, y)))))
        return disj(stored, default)

    def go(phi):
        match phi:
            case Atom(h, args, res) if h in dynamics:
                if isinstance(res, bool):
                    z = fresh("c")
                    return Exists(z, conj(Atom("true" if res else "false", (), z), lookup(h, args, z)))
                return lookup(h, args, res)
            case PredApp(name, args) if CLASH_INDEX in args:
                return PredApp(name, tuple(index if a == CLASH_INDEX else a for a in args))
            case Const() | Atom() | PredApp() | PosInt():
                return phi
            case Not(b):
                return Not(go(b))
            case And(ps):
                return And(tuple(map(go, ps)))
            case Or(ps):
                return Or(tuple(map(go, ps)))
            case Exists(v, b, bound):
                return Exists(v, go(b), bound)
            case ForallF(v, b, bound):
                return ForallF(v, go(b), bound)
            case Collect(z, w, b):
                return Collect(z, w, go(b))
        raise TypeError(f"not a simple formula: {phi!r}")

    return go(phi)


# -- systems ---------------------------------------------------------------------------------------------------

@dataclass
class PredDef:
    name: str
    params: tuple[str, ...]
    body: object


@dataclass
class LfpSystem:
    """Simultaneous definitions.  If time_indexed, the first parameter of
    every predicate is a time index, bodies refer to the previous index or
    to predicates defined earlier in ``order`` at the same index, and the
    system is evaluated index by index."""
    defs: dict[str, PredDef]
    order: list[str]
    time_indexed: bool = False
    mode: ClashMode | None = None
    program: Program | None = None

    def to_text(self) -> str:
        lines = []
        for name in self.order:
            d = self.defs[name]
            lines.append(f"{name}({', '.join(d.params)}) <-> {formula_to_text(d.body)}")
        return "\n".join(lines) + "\n"


class NotMonotone(ValueError):
    pass


def _pred_occurrences(phi, positive=True, out=None):
    """(name, args, positive?) for every predicate application."""
    out = [] if out is None else out
    match phi:
        case PredApp(name, args):
            out.append((name, args, positive))
        case Not(b):
            _pred_occurrences(b, not positive, out)
        case And(ps) | Or(ps):
            for p in ps:
                _pred_occurrences(p, positive, out)
        case Exists(_, b, _) | Collect(_, _, b):
            _pred_occurrences(b, positive, out)
        case ForallF(_, b, _):
            _pred_occurrences(b, positive, out)
    return out


def check_system(sys: LfpSystem) -> None:
    """Raise NotMonotone unless the system is well founded.

    Plain systems need every defined predicate to occur positively.  For
    time-indexed systems a predicate may occur negatively if it is read at
    the previous index (bound to Union(i)) or is defined earlier at the
    same index.
    """
    names = set(sys.defs)
    for pos, name in enumerate(sys.order):
        d = sys.defs[name]
        prev_vars = _predecessor_vars(d.body, d.params[0]) if sys.time_indexed else set()
        for other, args, positive in _pred_occurrences(d.body):
            if other not in names:
                continue
            if not sys.time_indexed:
                if not positive:
                    raise NotMonotone(f"{other} occurs negatively in the definition of {name}")
                continue
            idx = args[0]
            if idx in prev_vars:
                continue
            if idx == d.params[0] and sys.order.index(other) < pos:
                continue
            raise NotMonotone(f"{other} is read at index {idx} in {name}, which is neither "
                              "the previous index nor an earlier same-index predicate")


def _predecessor_vars(phi, index: str) -> set[str]:
    """Variables v bound by an atom Union(index) = v."""
    out: set[str] = set()

    def walk(p):
        match p:
            case Atom("Union", (a,), res) if a == index and isinstance(res, str):
                out.add(res)
            case Not(b) | Exists(_, b, _) | ForallF(_, b, _) | Collect(_, _, b):
                walk(b)
            case And(ps) | Or(ps):
                for q in ps:
                    walk(q)

    walk(phi)
    return out


def build_system(p: Program, mode: ClashMode = ClashMode.OPERATIONAL) -> LfpSystem:
    """The step recurrence for D_f(i, x̄, y): f(x̄) = y ≠ ∅ after i steps.

    p should be time-explicit so that every step index is an active object.
    """
    from .lang.syntax import free_vars
    if free_vars(p.body):
        raise ValueError("program body has free variables")
    body = desugar(p.body)
    dynamics = {name: ar for name, (ar, _) in p.vocab.dynamics.items()}
    fresh = Fresh()

    # hoisted per-block clash predicates (BLOCK mode), innermost first
    clash_defs: dict[Forall, PredDef] = {}

    def clash_pred(r: Forall):
        if r not in clash_defs:
            fv = tuple(sorted(free_vars(r)))
            raw = clash_formula(r, dynamics, fresh, clash_pred)
            name = f"Clash_{len(clash_defs) + 1}"
            phi = replace_dynamic(to_simple(raw, fresh), dynamics, "%i", fresh)
            clash_defs[r] = PredDef(name, ("%i", *fv), phi)
        d = clash_defs[r]
        return PredApp(d.name, (CLASH_INDEX, *d.params[1:]))

    def U(f, index, xs, y):
        raw = update_formula(body, f, xs, y, dynamics, mode, fresh, clash_pred)
        return replace_dynamic(to_simple(raw, fresh), dynamics, index, fresh)

    # parameter names start with % so program variables cannot capture them
    i, j, y = "%i", "%j", "%y"
    defs: dict[str, PredDef] = {}
    order = []
    for f, ar in dynamics.items():
        xs = tuple(f"%x{k}" for k in range(1, ar + 1))
        z = fresh("z")
        dpred = "D_" + f
        old = PredApp(dpred, (j, *xs, y))
        overwritten = Exists(z, conj(Not(Atom("=", (z, y), True)), U(f, j, xs, z)))
        core = disj(conj(old, Not(overwritten)), U(f, j, xs, y))
        if mode is ClashMode.OPERATIONAL:
            gate = PredApp("Clash", (j,))
            core = disj(conj(gate, old), conj(Not(gate), core))
        rhs = conj(PosInt(i), Not(Atom("emptyset", (), y)),
                   Exists(j, conj(Atom("Union", (i,), j), core)))
        defs[dpred] = PredDef(dpred, (i, *xs, y), rhs)
        order.append(dpred)
    if mode is ClashMode.OPERATIONAL:
        parts = []
        for h, ar in dynamics.items():
            zs = tuple(fresh("z") for _ in range(ar))
            w, w2 = fresh("w"), fresh("w")
            core = conj(U(h, i, zs, w), U(h, i, zs, w2), Not(Atom("=", (w, w2), True)))
            for v in (w2, w, *zs):
                core = Exists(v, core)
            parts.append(core)
        defs["Clash"] = PredDef("Clash", (i,), disj(*parts))
        order.append("Clash")
    for d in clash_defs.values():
        defs[d.name] = d
        order.append(d.name)
    sys = LfpSystem(defs, order, True, mode, p)
    check_system(sys)
    return sys


# -- evaluation context -----------------------------------------------------------------------------------------

class Domain:
    """A finite transitive set of objects plus the static data needed to
    evaluate atoms: input relations, InputSize and optionally a state whose
    dynamic functions are read directly."""

    def __init__(self, universe: Universe, objects, inputs=None, statics=None,
                 state: State | None = None):
        self.u = universe
        # 0 and 1 are always present so Boolean atoms have values
        self.objects = frozenset(objects) | {universe.empty, universe.one}
        self.sorted = sorted(self.objects)
        self.inputs = dict(inputs or {})
        self.statics = dict(statics or {})
        self.state = state
        self.ordinals = sorted((x for x in self.objects if universe.ordinal_value(x) is not None),
                               key=universe.ordinal_value)

    def is_transitive(self) -> bool:
        return all(e in self.objects for x in self.objects for e in self.u.elements(x))

    def apply(self, h: str, args: tuple[int, ...]) -> int | None:
        """Value of h at args, or None if it falls outside the domain."""
        u = self.u
        match h:
            case "true":
                v = u.one
            case "false" | "emptyset":
                v = u.empty
            case "Atoms":
                v = u.atoms()
            case "=":
                v = u.one if args[0] == args[1] else u.empty
            case "in":
                v = u.one if u.contains(args[1], args[0]) else u.empty
            case "not":
                v = u.one if args[0] == u.empty else u.empty
            case "and" | "or":
                a, b = args
                if a not in (u.empty, u.one) or b not in (u.empty, u.one):
                    v = u.empty
                elif h == "and":
                    v = u.one if a == b == u.one else u.empty
                else:
                    v = u.one if u.one in (a, b) else u.empty
            case "Union":
                v = u.big_union(args[0])
            case "TheUnique":
                v = u.the_unique(args[0])
            case "Pair":
                v = u.pair(*args)
            case "Card":
                v = u.card_ordinal(args[0])
            case "InputSize":
                v = self.statics["InputSize"]
            case _ if h in self.inputs:
                v = u.one if args in self.inputs[h] else u.empty
            case _ if self.state is not None and h in self.state.extents:
                v = self.state.lookup(h, args)
            case _:
                raise NameError(f"no interpretation for {h}")
        return v if v in self.objects else None


def domain_from_state(s: State, objects) -> Domain:
    return Domain(s.universe, objects, s.inputs, s.statics, s)


# -- solver ------------------------------------------------------------------------------------------------------

class Solver:
    def __init__(self, dom: Domain, relations: dict | None = None):
        self.dom = dom
        self.u = dom.u
        # predicate name -> set of tuples
        self.rel: dict[str, set] = relations if relations is not None else {}
        # predicate name -> first argument -> list of tuples, rebuilt lazily
        self._index: dict[str, dict] = {}
        self._index_size: dict[str, int] = {}
        self._gen_cache: dict = {}

    def add_facts(self, name: str, tuples) -> None:
        self.rel.setdefault(name, set()).update(tuples)

    def _by_first(self, name: str) -> dict:
        tuples = self.rel.get(name, ())
        if self._index_size.get(name) != len(tuples):
            idx: dict = {}
            for t in tuples:
                idx.setdefault(t[0], []).append(t)
            self._index[name] = idx
            self._index_size[name] = len(tuples)
        return self._index[name]

    def holds(self, phi, env) -> bool:
        for _ in self.solve(phi, env):
            return True
        return False

    # readiness: can phi produce its unbound free variables without a
    # blind enumeration of the domain?
    def _can_generate(self, phi, bound) -> bool:
        key = (id(phi), frozenset(bound & free_fvars(phi)))
        hit = self._gen_cache.get(key)
        if hit is None:
            hit = self._gen_cache[key] = (phi, self._can_generate_raw(phi, bound))
        return hit[1]

    def _can_generate_raw(self, phi, bound) -> bool:
        match phi:
            case Const():
                return True
            case Atom(h, args, res):
                if all(a in bound for a in args):
                    return True
                if res is True and h == "in" and args[1] in bound:
                    return True
                if res is True and h == "=" and (args[0] in bound or args[1] in bound):
                    return True
                return False
            case PredApp():
                return True
            case PosInt(v):
                return True
            case Not():
                return free_fvars(phi) <= bound
            case And(ps):
                b = set(bound)
                rest = list(ps)
                while rest:
                    for k, p in enumerate(rest):
                        if self._can_generate(p, b):
                            b |= free_fvars(p)
                            del rest[k]
                            break
                    else:
                        return False
                return True
            case Or(ps):
                return all(self._can_generate(p, bound) for p in ps)
            case Exists(v, b, bnd):
                if bnd is not None:
                    return bnd in bound and self._can_generate(b, bound | {v})
                return self._can_generate(b, bound)
            case ForallF():
                return free_fvars(phi) <= bound
            case Collect(z, w, b):
                return (free_fvars(b) - {w}) <= bound and self._can_generate(b, bound)
        raise TypeError(f"not a formula: {phi!r}")

    def _pick(self, parts, bound):
        """Index of the next conjunct to solve: tests first, then generators."""
        best, best_rank = None, None
        for k, p in enumerate(parts):
            fv = free_fvars(p)
            if fv <= bound:
                rank = 0 if isinstance(p, (Atom, Const, PosInt)) else 1
            elif self._can_generate(p, bound):
                rank = 2 if isinstance(p, (Atom, PredApp)) else 3
            else:
                continue
            if best_rank is None or rank < best_rank:
                best, best_rank = k, rank
                if rank == 0:
                    break
        return best

    def _enumerate(self, vars_, env):
        vars_ = [v for v in vars_ if v not in env]
        if not vars_:
            yield env
            return
        for vals in itertools.product(self.dom.sorted, repeat=len(vars_)):
            e = dict(env)
            e.update(zip(vars_, vals))
            yield e

    def solve(self, phi, env):
        match phi:
            case Const(v):
                if v:
                    yield env
            case Atom():
                yield from self._solve_atom(phi, env)
            case PredApp(name, args):
                yield from self._solve_pred(name, args, env)
            case PosInt(v):
                if v in env:
                    if self.u.is_pos_integer(env[v]):
                        yield env
                else:
                    for x in self.dom.ordinals:
                        if x != self.u.empty:
                            yield {**env, v: x}
            case Not(b):
                missing = [v for v in free_fvars(b) if v not in env]
                for e in self._enumerate(sorted(missing), env):
                    if not self.holds(b, e):
                        yield e
            case And(ps):
                yield from self._solve_and(list(ps), env)
            case Or(ps):
                fv = sorted(free_fvars(phi))
                seen = set()
                for p in ps:
                    for e in self.solve(p, env):
                        for e2 in self._enumerate(fv, e):
                            key = tuple(e2[v] for v in fv)
                            if key not in seen:
                                seen.add(key)
                                yield e2
            case Exists(v, b, bnd):
                fv = sorted(free_fvars(phi) - set(env))
                saved = env.get(v, _MISSING)
                base = {k: x for k, x in env.items() if k != v}
                seen = set()
                for e in self._solve_quant(v, b, bnd, base):
                    key = tuple(e.get(x) for x in fv)
                    if key in seen:
                        continue
                    seen.add(key)
                    out = {k: x for k, x in e.items() if k != v}
                    if saved is not _MISSING:
                        out[v] = saved
                    yield out
            case ForallF(v, b, bnd):
                missing = [x for x in free_fvars(phi) if x not in env]
                for e in self._enumerate(sorted(missing), env):
                    base = {k: x for k, x in e.items() if k != v}
                    values = self.u.elements(e[bnd]) if bnd is not None else self.dom.sorted
                    if all(self.holds(b, {**base, v: a}) for a in values):
                        yield e
            case Collect(z, w, b):
                yield from self._solve_collect(z, w, b, env)
            case _:
                raise TypeError(f"not a simple formula: {phi!r}")

    def _solve_quant(self, v, b, bnd, env):
        if bnd is not None:
            if bnd not in env:
                for e in self._enumerate([bnd], env):
                    yield from self._solve_quant(v, b, bnd, e)
                return
            for a in self.u.elements(env[bnd]):
                yield from self.solve(b, {**env, v: a})
        else:
            yield from self.solve(b, env)

    def _solve_and(self, parts, env):
        if not parts:
            yield env
            return
        bound = set(env)
        k = self._pick(parts, bound)
        if k is None:
            # nothing can generate: enumerate one unbound variable blindly
            v = sorted(free_fvars(parts[0]) - bound)[0]
            for e in self._enumerate([v], env):
                yield from self._solve_and(parts, e)
            return
        first, rest = parts[k], parts[:k] + parts[k + 1:]
        for e in self.solve(first, env):
            yield from self._solve_and(rest, e)

    def _solve_atom(self, phi: Atom, env):
        h, args, res = phi.h, phi.args, phi.res
        u = self.u
        missing = [a for a in args if a not in env]
        if missing:
            if res is True and h == "in" and args[1] in env and args[0] not in env:
                for a in u.elements(env[args[1]]):
                    yield {**env, args[0]: a}
                return
            if res is True and h == "=" and len(missing) == 1:
                known = args[1] if args[0] in missing else args[0]
                yield {**env, missing[0]: env[known]}
                return
            for e in self._enumerate(sorted(set(missing)), env):
                yield from self._solve_atom(phi, e)
            return
        v = self.dom.apply(h, tuple(env[a] for a in args))
        if v is None:
            return
        if res is True:
            if v == u.one:
                yield env
        elif res is False:
            if v == u.empty:
                yield env
        elif res in env:
            if env[res] == v:
                yield env
        else:
            yield {**env, res: v}

    def _solve_pred(self, name, args, env):
        if args and isinstance(args[0], str) and args[0] in env:
            candidates = self._by_first(name).get(env[args[0]], ())
        else:
            candidates = self.rel.get(name, ())
        for t in candidates:
            e = env
            ok = True
            for a, x in zip(args, t):
                if a in e:
                    if e[a] != x:
                        ok = False
                        break
                else:
                    if e is env:
                        e = dict(env)
                    e[a] = x
            if ok:
                yield e

    def _solve_collect(self, z, w, b, env):
        missing = [x for x in free_fvars(b) - {w} if x not in env]
        for e in self._enumerate(sorted(missing), env):
            inner = {k: x for k, x in e.items() if k != w}
            members = {s[w] for s in self.solve(b, inner) if w in s}
            # members outside the domain cannot be collected
            target = self.u.lookup(members)
            if target is None or target not in self.dom.objects:
                continue
            if z in e:
                if e[z] == target:
                    yield e
            else:
                yield {**e, z: target}


_MISSING = object()


# -- evaluation of systems ------------------------------------------------------------------------------------------

@dataclass
class LfpResult:
    relations: dict[str, set]
    stages: list[dict[str, int]]  # per stage, relation sizes

    def facts(self, name: str) -> set:
        return self.relations.get(name, set())


def lfp_eval(sys: LfpSystem, dom: Domain, base: dict | None = None,
             max_level: int | None = None, max_stages: int = 10_000) -> LfpResult:
    """Least fixed point of the system over dom.

    base holds fixed relations (for example D_f facts) that bodies may read.
    Time-indexed systems are evaluated index by index over the ordinals of
    dom (up to max_level); each index is one stage.
    """
    check_system(sys)
    rel: dict[str, set] = {name: set() for name in sys.defs}
    if base:
        for k, v in base.items():
            rel[k] = set(v)
    solver = Solver(dom, rel)
    stages = [{name: 0 for name in sys.order}]
    if sys.time_indexed:
        for i in dom.ordinals:
            level = dom.u.ordinal_value(i)
            if max_level is not None and level > max_level:
                break
            for name in sys.order:
                d = sys.defs[name]
                new = set()
                for e in solver.solve(d.body, {d.params[0]: i}):
                    if all(p in e for p in d.params):
                        new.add(tuple(e[p] for p in d.params))
                    else:
                        for e2 in solver._enumerate(list(d.params), e):
                            new.add(tuple(e2[p] for p in d.params))
                rel[name] |= new
            stages.append({name: len(rel[name]) for name in sys.order})
        return LfpResult(rel, stages)
    for _ in range(max_stages):
        new_rel = {}
        for name in sys.order:
            d = sys.defs[name]
            found = set()
            for e in solver.solve(d.body, {}):
                for e2 in solver._enumerate(list(d.params), e):
                    found.add(tuple(e2[p] for p in d.params))
            new_rel[name] = found
        changed = False
        for name, found in new_rel.items():
            if not found <= rel[name]:
                rel[name] |= found
                changed = True
        if not changed:
            return LfpResult(rel, stages)
        stages.append({name: len(rel[name]) for name in sys.order})
    raise RuntimeError("fixed point not reached")


# -- cross-checking against the interpreter -------------------------------------------------------------------------------

@dataclass
class CrosscheckReport:
    agree: bool
    steps: int
    levels_checked: int
    interpreter_facts: int
    oracle_facts: int
    domain_size: int
    mismatch: str | None = None
    verdict: object = None
    system: LfpSystem | None = None
    # (f, step, args, value) facts derived by the fixed-point system
    facts: set = field(default_factory=set)

    def summary(self) -> str:
        if self.agree:
            return (f"AGREE steps={self.steps} facts={self.interpreter_facts} "
                    f"domain={self.domain_size}")
        return f"DISAGREE {self.mismatch}"


def run_facts(states) -> set:
    """(f, i, args, value) for every stored location of every state."""
    out = set()
    for i, s in enumerate(states):
        for f, args, v in s.facts():
            out.add((f, i, args, v))
    return out


def crosscheck(p: Program, input_structure, budget,
               mode: ClashMode = ClashMode.OPERATIONAL) -> CrosscheckReport:
    """Compare the interpreter's extents step by step with the D_f relations
    computed by the fixed-point system for the time-explicit version of p."""
    from .engine import run

    q = time_explicit(rename_apart(Program(p.vocab, desugar(p.body))))
    res = run(q, input_structure, budget, collect=True, keep_states=True)
    states = res.states
    u = states[0].universe
    steps = len(states) - 1
    objects = set(res.traced) | set(range(u.atom_count)) | {u.empty, u.one}
    for s in states:
        objects |= _critical(s)
    objects |= {u.ordinal(k) for k in range(steps + 1)}
    objects = u.tc_many(objects)
    dom = Domain(u, objects, states[0].inputs, states[0].statics)
    sys = build_system(q, mode)
    lr = lfp_eval(sys, dom, max_level=steps)
    oracle = set()
    for f in q.vocab.dynamics:
        for t in lr.facts("D_" + f):
            level = u.ordinal_value(t[0])
            if level is not None and level <= steps:
                oracle.add((f, level, t[1:-1], t[-1]))
    interp = run_facts(states)
    report = CrosscheckReport(interp == oracle, steps, steps + 1, len(interp), len(oracle),
                              len(objects), verdict=res.verdict, system=sys, facts=oracle)
    if not report.agree:
        diff = sorted((interp ^ oracle), key=lambda x: (x[1], x[0]))
        f, i, args, v = diff[0]
        side = "interpreter only" if (f, i, args, v) in interp else "oracle only"
        rendered = ",".join(u.render(a) for a in args)
        report.mismatch = f"step {i}: {f}({rendered}) = {u.render(v)} ({side})"
    return report


def _critical(s: State) -> set:
    from .engine import critical_objects
    return critical_objects(s)


# -- definability of the active set ---------------------------------------------------------------------------------------

@dataclass
class ActiveReport:
    ok: bool
    selected: set      # objects x with phi(x)
    closure: set       # least set containing selected and closed under members
    active: set        # interpreter's cumulative active set
    domain_size: int


def active_system(dynamics: dict[str, int]) -> LfpSystem:
    """Act(x): x is an atom, 0 or 1, or occurs in some D_f fact, or is a
    member of an Act object.  Positive, so a plain least fixed point."""
    base = []
    for f, ar in dynamics.items():
        vs = tuple(f"v{k}" for k in range(ar + 1))
        body = conj(PredApp("D_" + f, ("i", *vs)), disj(*(Atom("=", (v, "x"), True) for v in vs)))
        for v in ("i", *reversed(vs)):
            body = Exists(v, body)
        base.append(body)
    is_atom = conj(Not(Atom("emptyset", (), "x")), ForallF("w", Atom("in", ("w", "x"), False)))
    binary = disj(Atom("emptyset", (), "x"), Atom("true", (), "x"))
    member = Exists("y", conj(PredApp("Act", ("y",)), Atom("in", ("x", "y"), True)))
    return LfpSystem({"Act": PredDef("Act", ("x",), disj(is_atom, binary, *base, member))},
                     ["Act"])


def selected_objects(dom: Domain, dfacts: dict, dynamics: dict[str, int]) -> set:
    """Objects satisfying the non-recursive disjuncts: atoms, 0, 1, and
    components of D_f facts."""
    u = dom.u
    out = {x for x in dom.objects if u.is_atom(x)} | {u.empty, u.one}
    for f in dynamics:
        for t in dfacts.get("D_" + f, ()):
            out.update(t[1:])
    return out


def active_formula_check(p: Program, input_structure, budget, margin: int = 1,
                         cap: int = 2000) -> ActiveReport:
    """Recover the interpreter's active set from fixed-point definitions
    evaluated over a transitive domain with a margin of extra objects."""
    from .engine import run

    q = time_explicit(rename_apart(Program(p.vocab, desugar(p.body))))
    res = run(q, input_structure, budget, collect=True, keep_states=True)
    states = res.states
    u = states[0].universe
    steps = len(states) - 1
    active: set = set()
    for s in states:
        active |= u.tc_many(_critical(s))
    objects = set(active) | set(res.traced) | {u.ordinal(k) for k in range(steps + 1)}
    objects = u.tc_many(objects)
    objects = _add_margin(u, objects, margin, cap)
    dom = Domain(u, objects, states[0].inputs, states[0].statics)
    sys = build_system(q)
    lr = lfp_eval(sys, dom, max_level=steps)
    dyn = {name: ar for name, (ar, _) in q.vocab.dynamics.items()}
    dfacts = {k: v for k, v in lr.relations.items() if k.startswith("D_")}
    selected = selected_objects(dom, dfacts, dyn)
    act = active_system(dyn)
    closure = lfp_eval(act, dom, base=dfacts).facts("Act")
    closure = {t[0] for t in closure}
    return ActiveReport(closure == active, selected, closure, active, len(objects))


def _add_margin(u: Universe, objects: set, margin: int, cap: int) -> set:
    """Add layers of pairs of existing objects, at most cap new ones per layer."""
    objects = set(objects)
    for _ in range(margin):
        base = sorted(objects)
        added = 0
        for a, b in itertools.combinations_with_replacement(base, 2):
            if added >= cap:
                break
            x = u.pair(a, b)
            if x not in objects:
                objects.add(x)
                added += 1
        objects = u.tc_many(objects)
    return objects
