"""Hybrid symbolic-numeric indefinite integration."""

from .expr import Expr, differentiate, evaluate, evaluate_many, to_str
from .integrator import IntegratorConfig, Solved, Unsolved, integrate, verify
from .numeric import SamplerConfig
from .parser import ParseError, parse

__all__ = [
    "Expr", "IntegratorConfig", "ParseError", "SamplerConfig", "Solved", "Unsolved",
    "differentiate", "evaluate", "evaluate_many", "integrate", "parse", "to_str", "verify",
]
__version__ = "0.1.0"
