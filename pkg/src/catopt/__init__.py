"""Global optimization with categorical variables described by catalog properties."""

from .catalog import Catalog, CatalogConstraint, items_in_box, load_csv
from .contract import Clutch, HC4, ObjectiveCut, clutch, fixed_point, hc4_revise
from .expr import Constraint, ParseError, eval_interval, gradient_interval, parse, parse_constraint
from .interval import EMPTY, Interval
from .problemfile import load_problem, parse_problem
from .solver import Problem, Result, SolverConfig, SolverState, solve

__all__ = [
    "Catalog", "CatalogConstraint", "Clutch", "Constraint", "EMPTY", "HC4", "Interval",
    "ObjectiveCut", "ParseError", "Problem", "Result", "SolverConfig", "SolverState", "clutch", "eval_interval",
    "fixed_point", "gradient_interval", "hc4_revise", "items_in_box", "load_csv", "load_problem",
    "parse", "parse_constraint", "parse_problem", "solve",
]
