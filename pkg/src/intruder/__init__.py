"""Ground intruder deduction modulo AC-convergent theories."""

from .engine import Decision, Sequent, applicable, decide, linear_search, right_prove
from .problem import Problem, parse_problem, parse_term
from .proofs import Proof, check_proof
from .terms import Hole, Term, TermBank, Var
from .theories import Recipe, TheoryDef, Theories, elem_deduce, verify_recipe

__all__ = [
    "Decision",
    "Hole",
    "Problem",
    "Proof",
    "Recipe",
    "Sequent",
    "Term",
    "TermBank",
    "Theories",
    "TheoryDef",
    "Var",
    "applicable",
    "check_proof",
    "decide",
    "linear_search",
    "right_prove",
    "elem_deduce",
    "parse_problem",
    "parse_term",
    "verify_recipe",
]
