"""Weighted document spanners: semiring-annotated extraction with automata."""

from .algebra import (RecognizableRelation, auto_join, auto_project, auto_union, b_projection,
                      b_unambiguous_join, k_extension, string_select)
from .automaton import (Builder, ExtendedVSetAutomaton, WeightedVSetAutomaton, check_functional,
                        eliminate_epsilon, evaluate_all_runs, from_extended, functionalize, to_extended, trim)
from .core import KRelation, Span, VTuple, krel_join, krel_project, krel_select, krel_union
from .enumeration import enumerate_ranked, enumerate_support, top_k
from .errors import (AmbiguityError, CapabilityError, FormatError, InvalidValueError, InvariantError,
                     ParseError, PreconditionError, ResourceError, SchemaError, SpanweaveError)
from .evaluation import answer_test, build_product_dag, max_tuple, threshold
from .semiring import SEMIRINGS, Semiring, get_semiring
from .softspanner import SoftSpanner, compile_soft, soft_probability

__version__ = "0.1.0"

__all__ = [
    "RecognizableRelation", "auto_join", "auto_project", "auto_union", "b_projection", "b_unambiguous_join",
    "k_extension", "string_select",
    "Builder", "ExtendedVSetAutomaton", "WeightedVSetAutomaton", "check_functional", "eliminate_epsilon",
    "evaluate_all_runs", "from_extended", "functionalize", "to_extended", "trim",
    "KRelation", "Span", "VTuple", "krel_join", "krel_project", "krel_select", "krel_union",
    "enumerate_ranked", "enumerate_support", "top_k",
    "AmbiguityError", "CapabilityError", "FormatError", "InvalidValueError", "InvariantError", "ParseError",
    "PreconditionError", "ResourceError", "SchemaError", "SpanweaveError",
    "answer_test", "build_product_dag", "max_tuple", "threshold",
    "SEMIRINGS", "Semiring", "get_semiring",
    "SoftSpanner", "compile_soft", "soft_probability",
]
