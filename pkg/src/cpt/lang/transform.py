"""Program transformations: desugaring, well-formedness, renaming apart and
the time-explicit clock."""

from __future__ import annotations

import itertools

from .syntax import (
    App, Comp, Cond, Enum, Forall, Par, Program, Skip, Update, Var, Vocabulary,
    bound_vars, free_vars, is_boolean, names_used,
)

EMPTY = App("emptyset")
ONE = App("Pair", (EMPTY, EMPTY))
TWO_SET = App("Pair", (EMPTY, ONE))  # {0, 1}


def _fresh_namer(taken: set[str], stem: str):
    for k in itertools.count():
        name = f"{stem}{k}"
        if name not in taken:
            taken.add(name)
            yield name


def _all_vars(node) -> set[str]:
    return set(bound_vars(node)) | set(free_vars(node))


def enum_term(items: tuple):
    """{t1,...,tn} as Pair/Union compositions."""
    n = len(items)
    if n == 0:
        return EMPTY
    if n == 1:
        return App("Pair", (items[0], items[0]))
    if n == 2:
        return App("Pair", items)
    k = (n + 1) // 2
    return App("Union", (App("Pair", (enum_term(items[:k]), enum_term(items[k:]))),))


def par_rule(rules: tuple, fresh) -> object:
    """Right fold of the binary do-in-parallel encoding."""
    if len(rules) == 1:
        return rules[0]
    v = next(fresh)
    rest = par_rule(rules[1:], fresh)
    return Forall(v, TWO_SET, Cond(App("=", (Var(v), EMPTY)), rules[0], rest))


def desugar(node):
    """Remove par blocks, enumerated sets and else-less conditionals.

    Works on a Program, a rule or a term.  Fresh par variables avoid every
    variable name already present.
    """
    if isinstance(node, Program):
        return Program(node.vocab, desugar(node.body))
    fresh = _fresh_namer(_all_vars(node), "_p")

    def go(n):
        match n:
            case Var():
                return n
            case App(name, args):
                return App(name, tuple(go(a) for a in args))
            case Enum(items):
                return enum_term(tuple(go(a) for a in items))
            case Comp(body, var, rng, guard):
                return Comp(go(body), var, go(rng), go(guard))
            case Skip():
                return n
            case Update(f, args, rhs):
                return Update(f, tuple(go(a) for a in args), go(rhs))
            case Cond(guard, then, else_):
                return Cond(go(guard), go(then), Skip() if else_ is None else go(else_))
            case Forall(var, rng, body):
                return Forall(var, go(rng), go(body))
            case Par(rules):
                return par_rule(tuple(go(r) for r in rules), fresh)
        raise TypeError(f"cannot desugar {n!r}")

    return go(node)


# -- well-formedness ----------------------------------------------------------

def check_wf(p: Program) -> list[str]:
    vocab = p.vocab
    out: list[str] = []
    fv = free_vars(p.body)
    if fv:
        out.append(f"free variables in program body: {', '.join(sorted(fv))}")

    def name_ok(name, nargs):
        want = vocab.arity(name)
        if want is None:
            out.append(f"unknown name {name}")
        elif want != nargs:
            out.append(f"arity mismatch: {name} takes {want}, got {nargs}")

    def term(t):
        match t:
            case Var():
                pass
            case App(name, args):
                name_ok(name, len(args))
                for a in args:
                    term(a)
            case Enum(items):
                for a in items:
                    term(a)
            case Comp(body, var, rng, guard):
                if var in free_vars(rng):
                    out.append(f"range contains head variable {var} free")
                if not is_boolean(guard, vocab):
                    out.append("comprehension guard is not Boolean")
                term(body)
                term(rng)
                term(guard)

    def rule(r):
        match r:
            case Skip():
                pass
            case Update(f, args, rhs):
                if f in vocab.inputs or vocab.builtin_arity(f) is not None:
                    out.append(f"static name updated: {f}")
                elif f not in vocab.dynamics:
                    out.append(f"unknown name {f}")
                else:
                    name_ok(f, len(args))
                    if vocab.dynamics[f][1] and not is_boolean(rhs, vocab):
                        out.append(f"relational name {f} updated with non-Boolean term")
                for a in args:
                    term(a)
                term(rhs)
            case Cond(guard, then, else_):
                if not is_boolean(guard, vocab):
                    out.append("conditional guard is not Boolean")
                term(guard)
                rule(then)
                if else_ is not None:
                    rule(else_)
            case Forall(var, rng, body):
                if var in free_vars(rng):
                    out.append(f"range contains head variable {var} free")
                term(rng)
                rule(body)
            case Par(rules):
                for x in rules:
                    rule(x)

    rule(p.body)
    return out


# -- renaming apart -------------------------------------------------------------

def rename_apart(p: Program) -> Program:
    """Alpha-rename so that binders are pairwise distinct and never clash
    with a free name.  The first binder of a name keeps it; later ones get
    primes appended."""
    used = set(free_vars(p.body))

    def fresh(v):
        name = v
        while name in used:
            name += "'"
        used.add(name)
        return name

    def go(n, env):
        match n:
            case Var(name):
                return Var(env.get(name, name))
            case App(name, args):
                return App(name, tuple(go(a, env) for a in args))
            case Enum(items):
                return Enum(tuple(go(a, env) for a in items))
            case Comp(body, var, rng, guard):
                rng2 = go(rng, env)
                new = fresh(var)
                inner = {**env, var: new}
                return Comp(go(body, inner), new, rng2, go(guard, inner))
            case Skip():
                return n
            case Update(f, args, rhs):
                return Update(f, tuple(go(a, env) for a in args), go(rhs, env))
            case Cond(guard, then, else_):
                return Cond(go(guard, env), go(then, env),
                            None if else_ is None else go(else_, env))
            case Forall(var, rng, body):
                rng2 = go(rng, env)
                new = fresh(var)
                return Forall(new, rng2, go(body, {**env, var: new}))
            case Par(rules):
                return Par(tuple(go(r, env) for r in rules))
        raise TypeError(f"cannot rename {n!r}")

    return Program(p.vocab, go(p.body, {}))


def is_renamed_apart(node) -> bool:
    """Binders pairwise distinct and disjoint from free names."""
    bv = bound_vars(node)
    return len(bv) == len(set(bv)) and not (set(bv) & free_vars(node))


# -- time-explicit transform -------------------------------------------------------

class NameClash(ValueError):
    pass


def time_explicit(p: Program, clock: str = "CT") -> Program:
    """Run p in parallel with a counter that grows by one ordinal per step
    until Halt holds."""
    if clock in p.vocab.all_names() or clock in names_used(p.body):
        raise NameClash(f"name {clock} already used")
    vocab = p.vocab.copy()
    vocab.dynamics[clock] = (0, False)
    ct = App(clock)
    succ = App("Union", (App("Pair", (ct, App("Pair", (ct, ct)))),))
    tick = Cond(App("not", (App("Halt"),)), Update(clock, (), succ), Skip())
    body = desugar(Par((p.body, tick)))
    return Program(vocab, body)
