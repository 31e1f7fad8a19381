"""Verification of first-order CTL properties by constraint solving.

Pipeline: parse a transition system and a temporal formula with data
quantifiers, compile the formula into forall-exists implication
constraints with well-foundedness obligations, and solve them over a
bounded integer domain; either directly by ground search, or by
Skolemizing existential heads through a template refinement loop. An
independent explicit-state checker provides the reference semantics.
"""

from .cegar import (
    Exhausted,
    RefinementConstraint,
    SkolemTemplate,
    Solved,
    default_templates,
    parse_templates,
    refine_loop,
    skolemize,
)
from .errors import (
    BoundTooLarge,
    CtlfoError,
    MissingTemplate,
    NotExportable,
    OpenFormula,
    ParseError,
    ShadowingError,
    TotalityRequired,
    UnboundVariable,
    UndeclaredVariable,
    UnsupportedConstruct,
)
from .formula import (
    Formula,
    check_no_shadowing,
    desugar,
    formula_size,
    free_data_vars,
    negation_normal_form,
    render_formula,
)
from .gen import GenContext, gen, gen_trace, gen_with_trace, render_gen_trace
from .grounding import GroundSystem, ground
from .harness import RunReport, cmd_bench, cmd_disprove, cmd_gen, cmd_mc, cmd_prove
from .horn import (
    Head,
    HornClause,
    HornSystem,
    PredApp,
    PredicateSymbol,
    emit_chc,
    emit_textual,
    read_textual,
)
from .logic import Assertion, Term, Var
from .mc import McResult, Witness, mc, mc_check, mc_state, render_mc_result
from .parser import parse_assertion, parse_formula, parse_term
from .solver import (
    Sat,
    Solution,
    Unknown,
    Unsat,
    check_solution,
    check_wf_acyclic,
    render_solution,
    solve_ground,
    wf_levels,
)
from .system import DomainBound, TransitionSystem, is_total, load_system, parse_system

__version__ = "0.1.0"

__all__ = [
    "Assertion",
    "BoundTooLarge",
    "CtlfoError",
    "DomainBound",
    "Exhausted",
    "Formula",
    "GenContext",
    "GroundSystem",
    "Head",
    "HornClause",
    "HornSystem",
    "McResult",
    "MissingTemplate",
    "NotExportable",
    "OpenFormula",
    "ParseError",
    "PredApp",
    "PredicateSymbol",
    "RefinementConstraint",
    "RunReport",
    "Sat",
    "ShadowingError",
    "SkolemTemplate",
    "Solution",
    "Solved",
    "Term",
    "TotalityRequired",
    "TransitionSystem",
    "UnboundVariable",
    "UndeclaredVariable",
    "Unknown",
    "Unsat",
    "UnsupportedConstruct",
    "Var",
    "Witness",
    "check_no_shadowing",
    "check_solution",
    "check_wf_acyclic",
    "cmd_bench",
    "cmd_disprove",
    "cmd_gen",
    "cmd_mc",
    "cmd_prove",
    "default_templates",
    "desugar",
    "emit_chc",
    "emit_textual",
    "formula_size",
    "free_data_vars",
    "gen",
    "gen_trace",
    "gen_with_trace",
    "ground",
    "is_total",
    "load_system",
    "mc",
    "mc_check",
    "mc_state",
    "negation_normal_form",
    "parse_assertion",
    "parse_formula",
    "parse_system",
    "parse_templates",
    "parse_term",
    "read_textual",
    "refine_loop",
    "render_formula",
    "render_gen_trace",
    "render_mc_result",
    "render_solution",
    "skolemize",
    "solve_ground",
    "wf_levels",
]
