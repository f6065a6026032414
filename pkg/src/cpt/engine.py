"""Bounded runs of programs: budgets, object accounting and verdicts."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .evaluate import State, Stepper, Trace, canonical_updates, is_consistent, fire
from .structio import initial_state


# -- polynomials -------------------------------------------------------------------

class PolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial in n; coeffs[k] is the coefficient of n^k."""
    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = list(self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) or (0,))
        if self.coeffs[-1] < 0:
            raise PolynomialError("leading coefficient must be non-negative")

    def __call__(self, n: int) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * n + c
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self):
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0 and len(self.coeffs) > 1:
                continue
            mono = "" if k == 0 else "n" if k == 1 else f"n^{k}"
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return "+".join(terms).replace("+-", "-")

    @classmethod
    def const(cls, c: int) -> "Polynomial":
        return cls((c,))


def parse_poly(text: str) -> Polynomial:
    """Parse e.g. '3*n^2+5*n+7'.  Only the variable n is allowed."""
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    n = sympy.Symbol("n")
    try:
        expr = parse_expr(text, local_dict={"n": n},
                          transformations=standard_transformations + (convert_xor,),
                          evaluate=True)
    except Exception as e:
        raise PolynomialError(f"cannot parse polynomial {text!r}: {e}") from None
    if not isinstance(expr, sympy.Expr) or expr.free_symbols - {n}:
        raise PolynomialError(f"{text!r} is not a polynomial in n")
    try:
        poly = sympy.Poly(expr, n)
    except sympy.PolynomialError:
        raise PolynomialError(f"{text!r} is not a polynomial in n") from None
    coeffs = poly.all_coeffs()[::-1]
    if not all(c.is_integer for c in coeffs):
        raise PolynomialError(f"{text!r} has non-integer coefficients")
    return Polynomial(tuple(int(c) for c in coeffs))


# -- budgets and results ------------------------------------------------------------------

class Mode(enum.Enum):
    ACTIVE = "active"
    RELEVANT = "relevant"
    MICROSTEPS = "microsteps"


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    INDETERMINATE = "indeterminate"


@dataclass
class Budget:
    """step_poly bounds the run length, resource_poly the count measured by
    mode.  None means unbounded."""
    step_poly: Polynomial | None
    resource_poly: Polynomial | None
    mode: Mode = Mode.ACTIVE


@dataclass
class RunMode:
    input_size_enabled: bool = False
    clock_poly: Polynomial | None = None

    def __post_init__(self):
        if self.clock_poly is not None and not self.input_size_enabled:
            raise ValueError("a clock requires InputSize")


@dataclass
class RunResult:
    verdict: Verdict
    reason: str | None
    steps_taken: int
    resource_peak: int
    final_state: State
    exhausted: bool = False
    microsteps: int = 0
    active_count: int = 0
    activated: set | None = None
    traced: set | None = None
    log: list[str] = field(default_factory=list)
    states: list[State] | None = None

    @property
    def exit_code(self) -> int:
        return {Verdict.ACCEPT: 0, Verdict.REJECT: 1, Verdict.INDETERMINATE: 2}[self.verdict]


# -- object accounting -----------------------------------------------------------------------

def critical_objects(s: State) -> set[int]:
    u = s.universe
    out = set(range(u.atom_count))
    out.add(u.empty)
    out.add(u.one)
    for ext in s.extents.values():
        for args, v in ext.items():
            out.add(v)
            out.update(args)
    return out


def active_objects(s: State, into: set | None = None) -> set[int]:
    """Objects in the transitive closure of some critical object."""
    return s.universe.tc_many(critical_objects(s), into)


def extent_object(s: State, f: str) -> int:
    """Extent(f) as an object: the set of (args..., value) tuples."""
    u = s.universe
    return u.mk_set(u.tuple_object(args + (v,)) for args, v in s.extents[f].items())


def relevant_objects(s: State, into: set | None = None) -> set[int]:
    out = active_objects(s, into)
    u = s.universe
    return u.tc_many([extent_object(s, f) for f in s.extents], out)


def _verdict_of(s: State):
    u = s.universe
    if not s.halted:
        return None
    out = s.lookup("Output")
    if out == u.one:
        return Verdict.ACCEPT, None
    if out == u.empty:
        return Verdict.REJECT, None
    return Verdict.INDETERMINATE, "halted-nonboolean-output"


def _log_line(i: int, s: State, updates, new: State) -> str:
    ups = ", ".join(canonical_updates(s.universe, updates))
    sizes = ",".join(f"{k}:{v}" for k, v in new.extent_sizes().items())
    return f"step {i} consistent={int(is_consistent(updates))} updates=[{ups}] sizes={sizes}"


def run(p, input_structure, budget: Budget, mode: RunMode | None = None, *,
        collect: bool = False, log: bool = False, keep_states: bool = False,
        universe=None) -> RunResult:
    """Run p on the input under the budget.

    The step bound is checked before each step and the resource bound after
    it; the result describes the longest prefix within both bounds.
    """
    mode = mode or RunMode()
    if mode.input_size_enabled and not p.vocab.input_size:
        raise ValueError("program was not parsed with InputSize enabled")
    n = input_structure.atom_count
    st = initial_state(p, input_structure, universe)
    stepper = Stepper(p)
    step_bound = budget.step_poly(n) if budget.step_poly is not None else None
    res_bound = budget.resource_poly(n) if budget.resource_poly is not None else None

    active = active_objects(st)
    initial_active = set(active)
    relevant = relevant_objects(st) if budget.mode is Mode.RELEVANT else None
    seen = {st.key()} if budget.mode is Mode.RELEVANT else None
    microsteps = 0
    traced: set | None = set() if collect else None
    lines: list[str] = []
    states = [st] if keep_states else None
    need_trace = collect or budget.mode is Mode.MICROSTEPS

    def measure():
        if budget.mode is Mode.ACTIVE:
            return len(active)
        if budget.mode is Mode.RELEVANT:
            return len(relevant)
        return microsteps

    def result(verdict, reason, exhausted=False):
        return RunResult(
            verdict, reason, steps, peak, st, exhausted, microsteps, len(active),
            (active - initial_active) if collect else None, traced, lines, states)

    steps = 0
    peak = measure()
    if res_bound is not None and peak > res_bound:
        return result(Verdict.INDETERMINATE, "budget-exhausted", True)
    while True:
        v = _verdict_of(st)
        if v is not None:
            return result(*v)
        if step_bound is not None and steps >= step_bound:
            return result(Verdict.INDETERMINATE, "budget-exhausted", True)
        tr = Trace() if need_trace else None
        updates = stepper.den(st, tr)
        new = fire(st, updates)
        if budget.mode is Mode.ACTIVE:
            new_active = active_objects(new, set(active))
            new_measure = len(new_active)
        elif budget.mode is Mode.RELEVANT:
            new_active = active_objects(new, set(active))
            new_relevant = relevant_objects(new, set(relevant))
            new_measure = len(new_relevant)
        else:
            new_active = active_objects(new, set(active))
            # the step itself costs one microstep so empty steps still count
            new_micro = microsteps + tr.events + len(updates) + 1
            new_measure = new_micro
        if res_bound is not None and new_measure > res_bound:
            return result(Verdict.INDETERMINATE, "budget-exhausted", True)
        if budget.mode is Mode.RELEVANT:
            key = new.key()
            if key in seen:
                return result(Verdict.INDETERMINATE, "state-repeated")
            seen.add(key)
            relevant = new_relevant
        if budget.mode is Mode.MICROSTEPS:
            microsteps = new_micro
        else:
            microsteps += (tr.events if tr is not None else 0) + len(updates) + 1
        active = new_active
        if traced is not None:
            traced |= tr.values
        if log:
            lines.append(_log_line(steps, st, updates, new))
        st = new
        steps += 1
        peak = max(peak, new_measure)
        if states is not None:
            states.append(st)


def standard_run(p, input_structure, clock: Polynomial, **kw) -> RunResult:
    """Run with InputSize preset and a microstep clock of clock(n).

    The verdict is always Accept or Reject; running out of clock rejects.
    """
    if not p.vocab.input_size:
        raise ValueError("standard runs need a program parsed with InputSize enabled")
    res = run(p, input_structure, Budget(None, clock, Mode.MICROSTEPS),
              RunMode(True, clock), **kw)
    if res.verdict is Verdict.INDETERMINATE:
        res.verdict = Verdict.REJECT
        res.exhausted = True
    return res


@dataclass
class ActivationReport:
    ok: bool
    activated: set
    traced: set
    counterexamples: list


def check_activation(p, input_structure, budget: Budget) -> ActivationReport:
    """Every object activated during the run is the value of some grounded
    subterm evaluated during the run."""
    res = run(p, input_structure, budget, collect=True)
    missing = sorted(res.activated - res.traced)
    return ActivationReport(not missing, res.activated, res.traced, missing)



def generous_budget(mode: Mode = Mode.ACTIVE, steps: int = 10_000, resource: int = 10**9) -> Budget:
    return Budget(Polynomial.const(steps), Polynomial.const(resource), mode)
