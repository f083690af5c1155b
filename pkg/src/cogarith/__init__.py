"""Simulated mental arithmetic with response-time accounting."""

__version__ = "0.1.0"

from .errors import CogArithError, DomainError, ParseError  # noqa: E402
from .parser import Operator, Problem, parse_problem  # noqa: E402

__all__ = [
    "CogArithError",
    "DomainError",
    "Operator",
    "ParseError",
    "Problem",
    "parse_problem",
]
