"""Recursive-descent parser for the program text format.

Identifiers are resolved while parsing: a name bound by an enclosing
``do forall`` or comprehension is a variable, anything else must be a
declared or builtin function name.  Comprehensions are recognised by scanning
ahead for a ``:`` at brace depth zero, so the binder is known before the body
is parsed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    App, Comp, Cond, Enum, Forall, Par, Program, Skip, Update, Var, Vocabulary,
    COUNTING_NAMES, INPUT_SIZE_NAMES, RESERVED,
)
from .transform import desugar


class CptSyntaxError(Exception):
    """Parse failure with a position.  kind is one of
    lexical, syntax, unknown-name, arity, scope."""

    def __init__(self, kind: str, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {kind} error: {msg}")
        self.kind = kind
        self.msg = msg
        self.line = line
        self.col = col


KEYWORDS = {
    "program", "input", "relation", "dynamic", "predicate", "skip", "if", "then",
    "else", "endif", "do", "forall", "in", "enddo", "par", "endpar", "not", "and",
    "or", "true", "false", "emptyset", "Atoms",
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<assign>:=)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<sym>[(){},:;/=])
""", re.VERBOSE)


@dataclass
class Tok:
    kind: str  # ident, kw, num, sym, eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CptSyntaxError("lexical", f"unexpected character {text[pos]!r}",
                                 line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        col = pos - line_start + 1
        if kind == "ident" and s in KEYWORDS:
            kind = "kw"
        elif kind == "assign":
            kind = "sym"
        if kind != "ws":
            toks.append(Tok(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.toks = tokenize(text)
        self.i = 0
        self.vocab = vocab
        self.scope: list[str] = []
        # (var, scope depth when its range started): var must not occur free there
        self.forbidden: list[tuple[str, int]] = []

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "sym") and t.text in texts

    def error(self, kind: str, msg: str, tok: Tok | None = None):
        t = tok or self.tok
        return CptSyntaxError(kind, msg, t.line, t.col)

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error("syntax", f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> Tok:
        t = self.tok
        if t.kind != "ident":
            raise self.error("syntax", f"expected a name, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    # -- declarations -----------------------------------------------------

    def program(self) -> Program:
        while not self.at("program"):
            if self.accept("input"):
                self.expect("relation")
                name = self.ident()
                self.expect("/")
                ar = self.number()
                self.expect(";")
                self.declare(name, lambda: self.vocab.inputs.__setitem__(name.text, ar))
            elif self.accept("dynamic"):
                rel = self.accept("predicate")
                name = self.ident()
                ar = 0
                if self.accept("/"):
                    ar = self.number()
                self.expect(";")
                self.declare(name, lambda: self.vocab.dynamics.__setitem__(name.text, (ar, rel)))
            else:
                found = self.tok.text or "end of input"
                raise self.error("syntax", f"expected a declaration or 'program', found {found!r}")
        self.expect("program")
        body = self.rule()
        if self.tok.kind != "eof":
            raise self.error("syntax", f"unexpected {self.tok.text!r} after program body")
        return Program(self.vocab, body)

    def number(self) -> int:
        t = self.tok
        if t.kind != "num":
            raise self.error("syntax", "expected an arity")
        self.i += 1
        return int(t.text)

    def declare(self, name: Tok, add) -> None:
        n = name.text
        if n in ("Halt", "Output"):
            raise self.error("syntax", f"{n} is implicitly declared", name)
        if n in RESERVED or n in self.vocab.all_names():
            raise self.error("syntax", f"name {n} is reserved or already declared", name)
        if n == "CT":
            raise self.error("syntax", "CT is reserved for the time-explicit transform", name)
        add()

    # -- rules ------------------------------------------------------------

    def rule(self):
        t = self.tok
        if self.accept("skip"):
            return Skip()
        if self.accept("if"):
            guard = self.term()
            self.expect("then")
            then = self.rule()
            else_ = self.rule() if self.accept("else") else None
            self.expect("endif")
            return Cond(guard, then, else_)
        if self.accept("do"):
            self.expect("forall")
            var = self.ident().text
            self.expect("in")
            rng = self.bounded_range(var)
            self.accept(":")
            self.scope.append(var)
            body = self.rule()
            self.scope.pop()
            self.expect("enddo")
            return Forall(var, rng, body)
        if self.accept("par"):
            rules = [self.rule()]
            while self.accept(";"):
                rules.append(self.rule())
            self.expect("endpar")
            return Par(tuple(rules))
        if t.kind == "ident":
            name = self.ident()
            if name.text in self.scope:
                raise self.error("syntax", f"cannot assign to variable {name.text}", name)
            args = self.call_args() if self.at("(") else ()
            if name.text not in self.vocab.all_names() and self.vocab.builtin_arity(name.text) is None:
                raise self.error("unknown-name", f"unknown name {name.text}", name)
            self.check_arity(name, len(args))
            self.expect(":=")
            return Update(name.text, args, self.term())
        raise self.error("syntax", f"expected a rule, found {t.text or 'end of input'!r}")

    def bounded_range(self, var: str):
        self.forbidden.append((var, len(self.scope)))
        try:
            return self.term()
        finally:
            self.forbidden.pop()

    # -- terms ------------------------------------------------------------

    def term(self):
        left = self.conj()
        while self.accept("or"):
            left = App("or", (left, self.conj()))
        return left

    def conj(self):
        left = self.neg()
        while self.accept("and"):
            left = App("and", (left, self.neg()))
        return left

    def neg(self):
        if self.accept("not"):
            return App("not", (self.neg(),))
        return self.comparison()

    def comparison(self):
        left = self.primary()
        if self.at("=", "in"):
            op = self.tok.text
            self.i += 1
            right = self.primary()
            if self.at("=", "in"):
                raise self.error("syntax", "= and in are non-associative; add parentheses")
            return App(op, (left, right))
        return left

    def primary(self):
        t = self.tok
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        if self.accept("true"):
            return App("true")
        if self.accept("false"):
            return App("false")
        if self.accept("emptyset"):
            return App("emptyset")
        if self.accept("Atoms"):
            return App("Atoms")
        if self.at("{"):
            return self.brace()
        if t.kind == "ident":
            return self.name_term()
        raise self.error("syntax", f"expected a term, found {t.text or 'end of input'!r}")

    def name_term(self):
        t = self.ident()
        name = t.text
        depth = _rindex(self.scope, name)
        for var, mark in self.forbidden:
            if var == name and depth < mark:
                raise self.error("scope", f"range contains head variable {name} free", t)
        if depth >= 0:
            if self.at("("):
                raise self.error("syntax", f"variable {name} applied to arguments", t)
            return Var(name)
        args = self.call_args() if self.at("(") else ()
        if self.vocab.arity(name) is None:
            if name in COUNTING_NAMES:
                raise self.error("unknown-name", f"{name} needs the counting extension", t)
            if name in INPUT_SIZE_NAMES:
                raise self.error("unknown-name", f"{name} needs the InputSize extension", t)
            raise self.error("unknown-name", f"unknown name {name}", t)
        self.check_arity(t, len(args))
        return App(name, args)

    def call_args(self) -> tuple:
        self.expect("(")
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        return tuple(args)

    def check_arity(self, t: Tok, n: int) -> None:
        want = self.vocab.arity(t.text)
        if want is not None and want != n:
            raise self.error("arity", f"{t.text} takes {want} argument(s), got {n}", t)

    def brace(self):
        start = self.expect("{")
        if self.accept("}"):
            return Enum(())
        binder = self.scan_binder()
        if binder is None:
            items = [self.term()]
            while self.accept(","):
                items.append(self.term())
            self.expect("}")
            return Enum(tuple(items))
        self.scope.append(binder)
        body = self.term()
        self.scope.pop()
        self.expect(":")
        var = self.ident().text
        self.expect("in")
        rng = self.bounded_range(var)
        self.expect(":")
        self.scope.append(var)
        guard = self.term()
        self.scope.pop()
        self.expect("}")
        if var != binder:
            raise self.error("syntax", "comprehension binder mismatch", start)
        return Comp(body, var, rng, guard)

    def scan_binder(self) -> str | None:
        """If the brace just opened is a comprehension, return its variable."""
        depth = 0
        j = self.i
        while True:
            t = self.toks[j]
            if t.kind == "eof":
                return None
            if t.kind == "sym":
                if t.text in "({":
                    depth += 1
                elif t.text in ")}":
                    if depth == 0:
                        return None
                    depth -= 1
                elif depth == 0 and t.text == ",":
                    return None
                elif depth == 0 and t.text == ":":
                    v = self.toks[j + 1]
                    return v.text if v.kind == "ident" else None
            j += 1


def _rindex(xs: list[str], x: str) -> int:
    for k in range(len(xs) - 1, -1, -1):
        if xs[k] == x:
            return k
    return -1


def parse_program(text: str, counting: bool = False, input_size: bool = False,
                  sugar: bool = False) -> Program:
    """Parse program text.  The result is desugared unless sugar is true."""
    vocab = Vocabulary(counting=counting, input_size=input_size)
    prog = _Parser(text, vocab).program()
    return prog if sugar else desugar(prog)


def parse_term(text: str, vocab: Vocabulary, bound=(), sugar: bool = False):
    """Parse a standalone term; names in bound are treated as variables."""
    p = _Parser(text, vocab)
    p.scope = list(bound)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("syntax", f"unexpected {p.tok.text!r} after term")
    return t if sugar else desugar(t)
