"""Continuous-logic sentences over tracial matrix algebras: formula parsing,
fixed-dimension evaluation, nonlocal game values over PVM tuples, and trace
moment nets."""

from importlib import resources

from .errors import (BudgetExceeded, ConfigInvalid, DimensionMismatch, FreeVariableError, InvalidArgument,
                     InvalidPVM, NotHermitian, ParseError, TooFar, TraceLogicError, UnboundVariable,
                     UnsupportedError, ValidationError)
from .evaluator import EvalResult, OptimizerConfig, eval_qf, eval_sentence, inf_upper_bound, sup_lower_bound
from .formula import Sentence, classify, lipschitz_bound, modulus_of_continuity, parse, to_text
from .games import (NonlocalGame, coloring_game, deterministic_value, relaxed_game_value, round_to_pvm,
                    synchronous_value_lower_bound)
from .moments import density_gap, moment_map, net_lower_bound
from .terms import enumerate_monomials, monomial_count

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled corpus file."""
    return resources.files(__name__).joinpath("data", name)


__all__ = [
    "BudgetExceeded", "ConfigInvalid", "DimensionMismatch", "EvalResult", "FreeVariableError",
    "InvalidArgument", "InvalidPVM", "NonlocalGame", "NotHermitian", "OptimizerConfig", "ParseError",
    "Sentence", "TooFar", "TraceLogicError", "UnboundVariable", "UnsupportedError", "ValidationError",
    "classify", "coloring_game", "data_path", "density_gap", "deterministic_value", "enumerate_monomials",
    "eval_qf", "eval_sentence", "inf_upper_bound", "lipschitz_bound", "modulus_of_continuity", "moment_map",
    "monomial_count", "net_lower_bound", "parse", "relaxed_game_value", "round_to_pvm", "sup_lower_bound",
    "synchronous_value_lower_bound", "to_text",
]
