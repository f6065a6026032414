"""Abstract syntax of terms, rules and programs, plus the pretty-printer."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Comp:
    """{body : var in range : guard}"""
    body: "Term"
    var: str
    range: "Term"
    guard: "Term"


@dataclass(frozen=True)
class Enum:
    """Surface form {t1, ..., tn}; removed by desugaring."""
    items: tuple


Term = Union[Var, App, Comp, Enum]


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Update:
    fname: str
    args: tuple
    rhs: Term


@dataclass(frozen=True)
class Cond:
    guard: Term
    then: "Rule"
    else_: "Rule | None" = None


@dataclass(frozen=True)
class Forall:
    var: str
    range: Term
    body: "Rule"


@dataclass(frozen=True)
class Par:
    """Surface form par R0; ...; Rk endpar; removed by desugaring."""
    rules: tuple


Rule = Union[Skip, Update, Cond, Forall, Par]

LOGIC_NAMES = {"true": 0, "false": 0, "=": 2, "not": 1, "and": 2, "or": 2}
SET_NAMES = {"in": 2, "emptyset": 0, "Atoms": 0, "Union": 1, "TheUnique": 1, "Pair": 2}
COUNTING_NAMES = {"Card": 1}
INPUT_SIZE_NAMES = {"InputSize": 0}
BOOLEAN_BUILTINS = frozenset({"true", "false", "=", "not", "and", "or", "in"})
CONNECTIVES = frozenset({"not", "and", "or"})
RESERVED = set(LOGIC_NAMES) | set(SET_NAMES) | set(COUNTING_NAMES) | set(INPUT_SIZE_NAMES)


@dataclass
class Vocabulary:
    inputs: dict[str, int] = field(default_factory=dict)
    # name -> (arity, is_relational); Halt and Output are always present
    dynamics: dict[str, tuple[int, bool]] = field(default_factory=dict)
    counting: bool = False
    input_size: bool = False

    def __post_init__(self):
        for name in ("Halt", "Output"):
            self.dynamics.setdefault(name, (0, True))

    def copy(self) -> "Vocabulary":
        return Vocabulary(dict(self.inputs), dict(self.dynamics), self.counting, self.input_size)

    def builtin_arity(self, name: str) -> int | None:
        if name in LOGIC_NAMES:
            return LOGIC_NAMES[name]
        if name in SET_NAMES:
            return SET_NAMES[name]
        if self.counting and name in COUNTING_NAMES:
            return COUNTING_NAMES[name]
        if self.input_size and name in INPUT_SIZE_NAMES:
            return INPUT_SIZE_NAMES[name]
        return None

    def arity(self, name: str) -> int | None:
        a = self.builtin_arity(name)
        if a is not None:
            return a
        if name in self.inputs:
            return self.inputs[name]
        if name in self.dynamics:
            return self.dynamics[name][0]
        return None

    def is_predicate(self, name: str) -> bool:
        if name in BOOLEAN_BUILTINS or name in self.inputs:
            return True
        d = self.dynamics.get(name)
        return d is not None and d[1]

    def is_dynamic(self, name: str) -> bool:
        return name in self.dynamics

    def all_names(self) -> set[str]:
        return set(self.inputs) | set(self.dynamics)


@dataclass
class Program:
    vocab: Vocabulary
    body: Rule


def is_boolean(t: Term, vocab: Vocabulary) -> bool:
    """Syntactic Boolean-ness: applications of predicates and logic names."""
    return isinstance(t, App) and vocab.is_predicate(t.name)


# -- free variables ---------------------------------------------------------

def free_vars(node) -> frozenset[str]:
    match node:
        case Var(name):
            return frozenset((name,))
        case App(_, args) | Enum(args):
            return frozenset().union(*map(free_vars, args)) if args else frozenset()
        case Comp(body, var, rng, guard):
            return ((free_vars(body) | free_vars(guard)) - {var}) | free_vars(rng)
        case Skip():
            return frozenset()
        case Update(_, args, rhs):
            return frozenset().union(free_vars(rhs), *map(free_vars, args))
        case Cond(guard, then, else_):
            out = free_vars(guard) | free_vars(then)
            return out | free_vars(else_) if else_ is not None else out
        case Forall(var, rng, body):
            return (free_vars(body) - {var}) | free_vars(rng)
        case Par(rules):
            return frozenset().union(*map(free_vars, rules)) if rules else frozenset()
    raise TypeError(f"not a term or rule: {node!r}")


def bound_vars(node) -> list[str]:
    """Binder names in pre-order, with repetitions."""
    out: list[str] = []

    def walk(n):
        match n:
            case Var():
                pass
            case App(_, args) | Enum(args):
                for a in args:
                    walk(a)
            case Comp(body, var, rng, guard):
                out.append(var)
                walk(rng)
                walk(body)
                walk(guard)
            case Skip():
                pass
            case Update(_, args, rhs):
                for a in args:
                    walk(a)
                walk(rhs)
            case Cond(guard, then, else_):
                walk(guard)
                walk(then)
                if else_ is not None:
                    walk(else_)
            case Forall(var, rng, body):
                out.append(var)
                walk(rng)
                walk(body)
            case Par(rules):
                for r in rules:
                    walk(r)

    walk(node)
    return out


def names_used(node) -> set[str]:
    """Function names applied or updated anywhere in node."""
    out: set[str] = set()

    def walk(n):
        match n:
            case Var():
                pass
            case App(name, args):
                out.add(name)
                for a in args:
                    walk(a)
            case Enum(args):
                for a in args:
                    walk(a)
            case Comp(body, _, rng, guard):
                walk(body)
                walk(rng)
                walk(guard)
            case Skip():
                pass
            case Update(fname, args, rhs):
                out.add(fname)
                for a in args:
                    walk(a)
                walk(rhs)
            case Cond(guard, then, else_):
                walk(guard)
                walk(then)
                if else_ is not None:
                    walk(else_)
            case Forall(_, rng, body):
                walk(rng)
                walk(body)
            case Par(rules):
                for r in rules:
                    walk(r)

    walk(node)
    return out


# -- printing ---------------------------------------------------------------

_INFIX = {"=": "=", "in": "in", "and": "and", "or": "or"}


def term_to_text(t: Term) -> str:
    match t:
        case Var(name):
            return name
        case App(name, args):
            if name in _INFIX and len(args) == 2:
                return f"({term_to_text(args[0])} {_INFIX[name]} {term_to_text(args[1])})"
            if name == "not" and len(args) == 1:
                return f"(not {term_to_text(args[0])})"
            if not args:
                return name
            return f"{name}(" + ", ".join(map(term_to_text, args)) + ")"
        case Comp(body, var, rng, guard):
            return f"{{{term_to_text(body)} : {var} in {term_to_text(rng)} : {term_to_text(guard)}}}"
        case Enum(items):
            return "{" + ", ".join(map(term_to_text, items)) + "}"
    raise TypeError(f"not a term: {t!r}")


def rule_to_text(r: Rule, indent: int = 0) -> str:
    pad = "  " * indent
    match r:
        case Skip():
            return pad + "skip"
        case Update(fname, args, rhs):
            lhs = fname if not args else f"{fname}(" + ", ".join(map(term_to_text, args)) + ")"
            return f"{pad}{lhs} := {term_to_text(rhs)}"
        case Cond(guard, then, else_):
            lines = [f"{pad}if {term_to_text(guard)} then", rule_to_text(then, indent + 1)]
            if else_ is not None:
                lines += [pad + "else", rule_to_text(else_, indent + 1)]
            lines.append(pad + "endif")
            return "\n".join(lines)
        case Forall(var, rng, body):
            return "\n".join([
                f"{pad}do forall {var} in {term_to_text(rng)}",
                rule_to_text(body, indent + 1),
                pad + "enddo",
            ])
        case Par(rules):
            inner = ";\n".join(rule_to_text(x, indent + 1) for x in rules)
            return f"{pad}par\n{inner}\n{pad}endpar"
    raise TypeError(f"not a rule: {r!r}")


def program_to_text(p: Program) -> str:
    lines = [f"input relation {name}/{ar};" for name, ar in p.vocab.inputs.items()]
    for name, (ar, rel) in p.vocab.dynamics.items():
        if name in ("Halt", "Output"):
            continue
        kw = "dynamic predicate" if rel else "dynamic"
        lines.append(f"{kw} {name}/{ar};")
    lines.append("program")
    lines.append(rule_to_text(p.body, 1))
    return "\n".join(lines) + "\n"
