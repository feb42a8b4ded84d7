"""Weighted multiset automata: semirings, mc-regular expressions, compilation,
compressed inside weights and weight learning."""

from .core import (
    EPSILON, Multiset, WeightedMultisetAutomaton, check_commutativity,
    enumerate_language, weight,
)
from .construct import compile, compile_lazy, state_count
from .errors import MswaError
from .regex import parse, regex_weight_oracle, to_text, validate_mc
from .semiring import BOOLEAN, LOG, RATIONAL, REAL, VITERBI, Matrix, get_semiring

__version__ = "0.1.0"

__all__ = [
    "BOOLEAN", "EPSILON", "LOG", "RATIONAL", "REAL", "VITERBI",
    "Matrix", "MswaError", "Multiset", "WeightedMultisetAutomaton",
    "check_commutativity", "compile", "compile_lazy", "enumerate_language",
    "get_semiring", "parse", "regex_weight_oracle", "state_count", "to_text",
    "validate_mc", "weight",
]
