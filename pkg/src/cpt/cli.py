"""Command-line front end.

Exit codes: 0 accept (or success), 1 reject (or a failed check), 2
indeterminate, 64 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .engine import Budget, Mode, PolynomialError, RunMode, parse_poly, run, standard_run
from .lang import CptSyntaxError, check_wf, parse_program
from .structio import StructureError, VocabularyMismatch, parse_structure

USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load_program(path: str, counting: bool, input_size: bool):
    """A file path, or the name of a corpus entry."""
    p = Path(path)
    if not p.exists() and path in corpus_mod.CORPUS:
        e = corpus_mod.get(path)
        return parse_program(e.text(), counting=counting or e.counting,
                             input_size=input_size or e.input_size)
    try:
        text = p.read_text()
    except OSError as e:
        raise UsageError(f"cannot read program {path}: {e.strerror}") from None
    return parse_program(text, counting=counting, input_size=input_size)


def _load_structure(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read structure {path}: {e.strerror}") from None
    return parse_structure(text)


def _poly(text):
    return None if text is None else parse_poly(text)


# "paper" is an older name for "block", still accepted
_CLASH_ALIASES = {"operational": "operational", "block": "block", "paper": "block"}


def _clash_mode(text):
    if text not in _CLASH_ALIASES:
        raise argparse.ArgumentTypeError(f"invalid clash mode {text!r}")
    return _CLASH_ALIASES[text]


def _budget(args) -> Budget:
    if args.steps is None and args.resource is None:
        raise UsageError("a budget is required: give --steps and/or --resource")
    return Budget(_poly(args.steps), _poly(args.resource), Mode(args.mode))


def _add_program_flags(sp, budget=True):
    sp.add_argument("program")
    sp.add_argument("--counting", action="store_true", help="enable Card")
    sp.add_argument("--input-size", action="store_true", help="enable InputSize")
    if budget:
        sp.add_argument("--steps", metavar="POLY")
        sp.add_argument("--resource", metavar="POLY")
        sp.add_argument("--mode", choices=[m.value for m in Mode], default="active")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cpt", description="Bounded runs of set-theoretic state machine programs.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sp = sub.add_parser("run", help="run a program on a structure")
    _add_program_flags(sp)
    sp.add_argument("structure")
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--clock", metavar="POLY", help="standard run with a microstep clock")

    sp = sub.add_parser("check", help="parse and check well-formedness")
    _add_program_flags(sp, budget=False)

    sp = sub.add_parser("oracle", help="compare the interpreter with the fixed-point evaluator")
    _add_program_flags(sp)
    sp.add_argument("structure")
    sp.add_argument("--clash-mode", type=_clash_mode, default="operational",
                    metavar="{operational,block}",
                    help="operational: a clash voids the whole step; "
                         "block: a clash silences only the do-forall block containing it")
    sp.add_argument("--dump-lfp", action="store_true")

    sp = sub.add_parser("support", help="largest minimal support among active objects")
    _add_program_flags(sp)
    sp.add_argument("structures", nargs="+")

    sp = sub.add_parser("game", help="solve the m-pebble game on two structures")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("-m", type=int, required=True, dest="pebbles")
    sp.add_argument("--certify", action="store_true")

    sp = sub.add_parser("forms-test", help="desk-scale checks of the forms calculus")
    sp.add_argument("--atoms", type=int, default=6)
    sp.add_argument("-k", type=int, default=2)

    sp = sub.add_parser("corpus", help="list or print shipped programs")
    sp.add_argument("name", nargs="?")
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args, out)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return USAGE
    except CptSyntaxError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return USAGE
    except (StructureError, VocabularyMismatch, PolynomialError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


def _dispatch(args, out) -> int:
    return {
        "run": _cmd_run, "check": _cmd_check, "oracle": _cmd_oracle,
        "support": _cmd_support, "game": _cmd_game, "forms-test": _cmd_forms,
        "corpus": _cmd_corpus,
    }[args.cmd](args, out)


def _cmd_run(args, out) -> int:
    if args.clock is not None and not args.input_size:
        raise UsageError("--clock needs --input-size")
    p = _load_program(args.program, args.counting, args.input_size)
    s = _load_structure(args.structure)
    if args.clock is not None:
        res = standard_run(p, s, parse_poly(args.clock), log=args.trace)
        measure = "microsteps"
    else:
        budget = _budget(args)
        res = run(p, s, budget, RunMode(args.input_size), log=args.trace)
        measure = budget.mode.value
    for line in res.log:
        print(line, file=out)
    print(f"verdict {res.verdict.value}", file=out)
    if res.reason:
        print(f"reason {res.reason}", file=out)
    print(f"steps {res.steps_taken}", file=out)
    print(f"peak {res.resource_peak} ({measure})", file=out)
    return res.exit_code


def _cmd_check(args, out) -> int:
    p = _load_program(args.program, args.counting, args.input_size)
    problems = check_wf(p)
    for msg in problems:
        print(msg, file=out)
    if problems:
        return 1
    print("ok", file=out)
    return 0


def _cmd_oracle(args, out) -> int:
    from .lfp import ClashMode, crosscheck

    p = _load_program(args.program, args.counting, args.input_size)
    s = _load_structure(args.structure)
    rep = crosscheck(p, s, _budget(args), ClashMode(args.clash_mode))
    if args.dump_lfp:
        print(rep.system.to_text(), file=out)
    print(rep.summary(), file=out)
    return 0 if rep.agree else 1


def _cmd_support(args, out) -> int:
    from .symmetry import SearchCapExceeded, support_experiment

    p = _load_program(args.program, args.counting, args.input_size)
    inputs = [(path, _load_structure(path)) for path in args.structures]
    try:
        rows = support_experiment(p, inputs, _budget(args))
    except SearchCapExceeded as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return 1
    for row in rows:
        print(row.tsv(), file=out)
    return 0


def _cmd_game(args, out) -> int:
    from .games import GameTooLarge, solve

    if args.pebbles < 0:
        raise UsageError("-m must be non-negative")
    a, b = _load_structure(args.a), _load_structure(args.b)
    try:
        v = solve(a, b, args.pebbles)
    except GameTooLarge as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        raise UsageError(str(e)) from None
    print(f"winner {v.winner.value}", file=out)
    if args.certify:
        print(f"safe-region {len(v.certified_positions)}", file=out)
    return 0


def _cmd_forms(args, out) -> int:
    from .forms_checks import run_all

    ok = True
    for name, passed, detail in run_all(args.k, args.atoms):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}", file=out)
        ok = ok and passed
    return 0 if ok else 1


def _cmd_corpus(args, out) -> int:
    if args.name is None:
        for name, desc in corpus_mod.corpus():
            print(f"{name}\t{desc}", file=out)
        return 0
    if args.name not in corpus_mod.CORPUS:
        raise UsageError(f"no corpus entry named {args.name}")
    e = corpus_mod.get(args.name)
    print(f"-- {e.description}", file=out)
    print(f"-- budget: steps {e.steps}, resource {e.resource}", file=out)
    out.write(e.text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
