"""Fuzzy answer set optimization.

Programs pair generator rules, whose fuzzy answer sets are the candidate
solutions, with preference rules that rank those candidates.  Typical use::

    from faso import solve
    solution = solve(open("examples/water.faso").read(), strategy="pareto")
    solution.optimal
"""

from .aggregates import UNDEFINED, AggregateValue, eval_aggregate, eval_aggregate_atom
from .generator import FuzzyAnswerSet, NotStratified, UnsupportedFragment, generate_answer_sets
from .grounder import BudgetExceeded, GroundingError, GroundProgram, ground_program
from .parser import ParseError, parse_file, parse_program, print_program, print_rule
from .preference import Outcome, Ranker, maximal_compare, pareto_compare, rank
from .solve import InvalidProgram, Solution, report_benefits, solve
from .syntax import EPSILON, Program, validate_program

__version__ = "0.1.0"

__all__ = [
    "EPSILON",
    "UNDEFINED",
    "AggregateValue",
    "BudgetExceeded",
    "FuzzyAnswerSet",
    "GroundProgram",
    "GroundingError",
    "InvalidProgram",
    "NotStratified",
    "Outcome",
    "ParseError",
    "Program",
    "Ranker",
    "Solution",
    "UnsupportedFragment",
    "eval_aggregate",
    "eval_aggregate_atom",
    "generate_answer_sets",
    "ground_program",
    "maximal_compare",
    "pareto_compare",
    "parse_file",
    "parse_program",
    "print_program",
    "print_rule",
    "rank",
    "report_benefits",
    "solve",
    "validate_program",
]
