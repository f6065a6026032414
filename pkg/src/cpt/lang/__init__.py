"""The transition-rule language: syntax, parser and transformations."""

from .syntax import (
    App, Comp, Cond, Enum, Forall, Par, Program, Skip, Update, Var, Vocabulary,
    free_vars, bound_vars, names_used, is_boolean,
    term_to_text, rule_to_text, program_to_text,
)
from .transform import (
    desugar, check_wf, rename_apart, is_renamed_apart, time_explicit, NameClash,
    enum_term,
)
from .parser import CptSyntaxError, parse_program, parse_term, tokenize
