"""Unranked and ranked enumeration of the annotated relation.

Both streams walk the product DAG by *label* sequences.  On the DAG of a
functional extended automaton, label sequences and tuples are in bijection,
so grouping node paths by label merges exactly the runs of one tuple.

Ranked enumeration is a Yen-style k-best search where a deviation fixes a
label prefix, not a node prefix.  The spur search starts from every node the
prefix can reach (with the best prefix weight into each), which keeps the
search complete when the automaton is nondeterministic.
"""

from __future__ import annotations

import heapq
import itertools
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .automaton import DEFAULT_RUN_CAP, WeightedVSetAutomaton
from .core import Document, VTuple
from .errors import CapabilityError, ResourceError
from .evaluation import SINK, SOURCE, ProductDag, _require_bipotent_ordered, dag_for, label_key


def enumerate_support(a: WeightedVSetAutomaton, d: Document, force: bool = False,
                      cap: int = DEFAULT_RUN_CAP) -> Iterator[Tuple[VTuple, Any]]:
    """Every tuple of the support once, with its weight, in canonical label order.

    Needs a positive semiring; with ``force`` other semirings are accepted,
    zero-weight tuples are filtered and ``cap`` bounds the search.
    """
    s = a.semiring
    if not s.is_positive and not force:
        raise CapabilityError(f"enumerate_support needs a positive semiring; {s.name} is not "
                              "(pass force=True to filter zero weights instead)")
    dag = dag_for(a, d)
    if dag.empty:
        return
    zero = s.is_zero
    stack: List[Tuple[Dict[int, Any], tuple]] = [({SOURCE: s.one}, ())]
    steps = 0
    while stack:
        frontier, labels = stack.pop()
        steps += 1
        if force and steps > cap:
            raise ResourceError(f"enumeration exceeded {cap} steps")
        if SINK in frontier:
            w = frontier[SINK]
            if not zero(w):
                yield dag.decode(labels), w
            continue
        groups: Dict[tuple, Dict[int, Any]] = {}
        for v, wv in frontier.items():
            for lab, u, w in dag.out[v]:
                g = groups.setdefault(lab, {})
                x = s.times(wv, w)
                g[u] = s.plus(g[u], x) if u in g else x
        for lab in sorted(groups, key=label_key, reverse=True):
            nxt = {u: w for u, w in groups[lab].items() if not zero(w)}
            if nxt:
                stack.append((nxt, labels + (lab,)))


class _Rank:
    """Heap order: larger weight first, then smaller canonical label sequence."""

    __slots__ = ("k", "lk")

    def __init__(self, k, lk):
        self.k = k
        self.lk = lk

    def __lt__(self, other: "_Rank") -> bool:
        if self.k != other.k:
            return self.k > other.k
        return self.lk < other.lk


def _suffix_dp(dag: ProductDag):
    """Best weight from every node to the sink, with the chosen next step."""
    s = dag.semiring
    key = s.order_key
    best: Dict[int, Any] = {SINK: s.one}
    step: Dict[int, Tuple[tuple, int]] = {}
    for v in reversed(dag.order):
        if v == SINK:
            continue
        winner = None
        for lab, u, w in dag.out[v]:
            val = s.times(w, best[u])
            rank = (label_key(lab), u)
            if winner is None or key(val) > key(winner[0]) or (key(val) == key(winner[0]) and rank < winner[1]):
                winner = (val, rank, lab, u)
        best[v] = winner[0]
        step[v] = (winner[2], winner[3])
    return best, step


def _suffix_labels(step, v: int) -> tuple:
    out = []
    while v != SINK:
        lab, v = step[v]
        out.append(lab)
    return tuple(out)


def enumerate_ranked(a: WeightedVSetAutomaton, d: Document) -> Iterator[Tuple[VTuple, Any]]:
    """Tuples in non-increasing weight order (positively ordered, bipotent semirings)."""
    s = a.semiring
    _require_bipotent_ordered(s, "enumerate_ranked")
    dag = dag_for(a, d)
    if dag.empty:
        return
    key = s.order_key
    best, step = _suffix_dp(dag)
    if s.is_zero(best[SOURCE]):
        return
    first = _suffix_labels(step, SOURCE)
    rank = lambda w, labels: _Rank(key(w), tuple(map(label_key, labels)))  # noqa: E731
    heap = [(rank(best[SOURCE], first), first, best[SOURCE])]
    known = {first}
    trie: Dict[tuple, dict] = {}
    emitted = set()
    while heap:
        _, labels, weight = heapq.heappop(heap)
        t = dag.decode(labels)
        if t not in emitted:
            emitted.add(t)
            yield t, weight
        node = trie
        for lab in labels:
            node = node.setdefault(lab, {})
        frontier: Dict[int, Any] = {SOURCE: s.one}
        tnode = trie
        for j, lab in enumerate(labels):
            if lab[0] == "T":
                spur = _spur(dag, frontier, tnode.keys(), best, key)
                if spur is not None:
                    val, lab2, u = spur
                    cand = labels[:j] + (lab2,) + _suffix_labels(step, u)
                    if cand not in known:
                        known.add(cand)
                        heapq.heappush(heap, (rank(val, cand), cand, val))
            tnode = tnode[lab]
            frontier = _advance(dag, frontier, lab, key)


def _spur(dag: ProductDag, frontier: Dict[int, Any], banned, best, key):
    s = dag.semiring
    banned = set(banned)
    winner = None
    for v in sorted(frontier):
        wv = frontier[v]
        for lab, u, w in dag.out[v]:
            if lab in banned:
                continue
            val = s.times(s.times(wv, w), best[u])
            if s.is_zero(val):
                continue
            rank = (label_key(lab), u)
            if winner is None or key(val) > key(winner[0]) or (key(val) == key(winner[0]) and rank < winner[1]):
                winner = (val, rank, lab, u)
    if winner is None:
        return None
    return winner[0], winner[2], winner[3]


def _advance(dag: ProductDag, frontier: Dict[int, Any], lab: tuple, key) -> Dict[int, Any]:
    s = dag.semiring
    nxt: Dict[int, Any] = {}
    for v, wv in frontier.items():
        for lab2, u, w in dag.out[v]:
            if lab2 == lab:
                val = s.times(wv, w)
                if u not in nxt or key(val) > key(nxt[u]):
                    nxt[u] = val
    return nxt


def top_k(a: WeightedVSetAutomaton, d: Document, k: int) -> List[Tuple[VTuple, Any]]:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        _require_bipotent_ordered(a.semiring, "top_k")
        return []
    return list(itertools.islice(enumerate_ranked(a, d), k))
