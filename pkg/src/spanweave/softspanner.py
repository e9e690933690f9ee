"""Soft spanners: a Boolean base spanner scored by weighted factor spanners.

The score of a base tuple t is exp(sum over factors S of w(S) times the
number of S-tuples compatible with t); probabilities normalize the scores
over the base relation.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

from .algebra import auto_project, auto_union, b_unambiguous_join
from .automaton import DEFAULT_RUN_CAP, WeightedVSetAutomaton, empty_automaton, reweight, trim
from .core import Document, KRelation, VTuple
from .enumeration import enumerate_support
from .errors import ResourceError, SchemaError
from .semiring import BOOLEAN, PROBABILITY, REAL


class SoftSpanner:
    def __init__(self, base: WeightedVSetAutomaton, factors: Sequence[Tuple[WeightedVSetAutomaton, float]]):
        if base.semiring is not BOOLEAN:
            raise SchemaError("the base spanner must be a Boolean automaton")
        for s, w in factors:
            if s.semiring is not BOOLEAN:
                raise SchemaError("factor spanners must be Boolean automata")
            if s.alphabet != base.alphabet:
                raise SchemaError("factor spanners must share the base spanner's alphabet")
            if not isinstance(w, (int, float)) or isinstance(w, bool) or not math.isfinite(w):
                raise SchemaError(f"factor weight must be a finite number, got {w!r}")
        self.base = base
        self.factors: List[Tuple[WeightedVSetAutomaton, float]] = [(s, float(w)) for s, w in factors]

    @property
    def variables(self) -> frozenset:
        return self.base.variables


def _with_final_weight(a: WeightedVSetAutomaton, w: float) -> WeightedVSetAutomaton:
    final = {q: w for q in a.final} if w != 0.0 else {}
    return trim(WeightedVSetAutomaton(a.semiring, a.alphabet, a.variables, a.n_states,
                                      a.initial, final, a.transitions))


def compile_soft(q: SoftSpanner) -> WeightedVSetAutomaton:
    """Real-weighted automaton whose weight of t is the log-score of t.

    Tuples matched by no factor have log-score 0, which is the real zero and
    therefore simply absent from the compiled relation.
    """
    out = empty_automaton(REAL, q.base.alphabet, q.variables)
    for s, w in q.factors:
        joined = b_unambiguous_join(q.base, s)
        real = reweight(joined, REAL, lambda _: 1.0)
        part = auto_project(_with_final_weight(real, w), q.variables)
        out = auto_union(out, part)
    return out


def soft_scores(q: SoftSpanner, d: Document, compiled: WeightedVSetAutomaton = None,
                cap: int = DEFAULT_RUN_CAP) -> Dict[VTuple, float]:
    """Unnormalized score exp(log-score) of every tuple of the base relation."""
    if compiled is None:
        compiled = compile_soft(q)
    logs = dict(enumerate_support(compiled, d, force=True, cap=cap))
    scores = {}
    for t, _ in enumerate_support(q.base, d):
        if len(scores) >= cap:
            raise ResourceError(f"base relation exceeds {cap} tuples")
        scores[t] = math.exp(logs.get(t, 0.0))
    return scores


def soft_probability(q: SoftSpanner, d: Document, compiled: WeightedVSetAutomaton = None,
                     cap: int = DEFAULT_RUN_CAP) -> KRelation:
    scores = soft_scores(q, d, compiled, cap)
    z = math.fsum(scores.values())
    return KRelation(PROBABILITY, q.variables, {t: h / z for t, h in scores.items()})


def partition_function(q: SoftSpanner, d: Document, compiled: WeightedVSetAutomaton = None) -> float:
    return math.fsum(soft_scores(q, d, compiled).values())
