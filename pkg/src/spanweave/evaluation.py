"""Answer testing, the product DAG, best-weight evaluation and threshold."""

from __future__ import annotations

from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .automaton import (DEFAULT_RUN_CAP, LETTER, VARIABLE, Builder, ExtendedVSetAutomaton,
                        WeightedVSetAutomaton, canonical_ops, close_, op_key, open_, sym, to_extended)
from .core import Document, KRelation, Span, VTuple
from .errors import CapabilityError, PreconditionError, ResourceError

SOURCE, SINK = 0, 1
HASH = ("#",)

DagLabel = tuple  # ("#",) | ("T", ops) | ("sym", a)


def label_key(label: DagLabel) -> tuple:
    """Canonical order on DAG labels: '#' first, then operation sets, then letters."""
    if label[0] == "#":
        return (0,)
    if label[0] == "T":
        return (1, tuple(op_key(o) for o in label[1]))
    return (2, label[1])


class ProductDag:
    """Layered DAG of (state, position) nodes for an extended automaton on a document.

    Node ids: ``0`` is the source, ``1`` the sink, and state ``q`` at position
    ``i`` is ``2 + (i-1)*N + q`` with ``N`` the number of extended states.
    ``pos`` is the index of a node along any source-to-sink path.
    """

    def __init__(self, e: ExtendedVSetAutomaton, d: Document):
        self.semiring = e.semiring
        self.variables = e.variables
        self.document = d
        self.n = len(d)
        self.n_ext = e.n_states
        self.kinds = e.kinds
        self.out: Dict[int, List[Tuple[DagLabel, int, Any]]] = {}
        self.inc: Dict[int, List[Tuple[DagLabel, int, Any]]] = {}
        self._build(e, d)

    def node(self, q: int, i: int) -> int:
        return 2 + (i - 1) * self.n_ext + q

    def state_of(self, v: int) -> Tuple[int, int]:
        """``(q, i)`` of an inner node."""
        i, q = divmod(v - 2, self.n_ext)
        return q, i + 1

    def layer(self, v: int) -> int:
        if v == SOURCE:
            return 0
        if v == SINK:
            return self.n + 2
        return self.state_of(v)[1]

    def pos(self, v: int) -> int:
        if v == SOURCE:
            return 0
        if v == SINK:
            return 2 * self.n + 3
        q, i = self.state_of(v)
        return 2 * i - 1 if self.kinds[q] == VARIABLE else 2 * i

    @property
    def path_length(self) -> int:
        return 2 * self.n + 3

    def _build(self, e: ExtendedVSetAutomaton, d: Document) -> None:
        n = self.n
        edges: Dict[int, List[Tuple[DagLabel, int, Any]]] = {}
        frontier = []
        edges[SOURCE] = []
        for q, w in sorted(e.initial.items()):
            v = self.node(q, 1)
            edges[SOURCE].append((HASH, v, w))
            frontier.append(v)
        seen = set(frontier)
        # forward sweep in path order; every edge goes one step further along the path
        while frontier:
            nxt = []
            for v in frontier:
                q, i = self.state_of(v)
                row: List[Tuple[DagLabel, int, Any]] = []
                if self.kinds[q] == VARIABLE:
                    for t, r, w in e.set_out[q]:
                        row.append((("T", t), self.node(r, i), w))
                else:
                    if i <= n:
                        for r, w in e.letter_out[q].get(d[i - 1], ()):
                            row.append((("sym", d[i - 1]), self.node(r, i + 1), w))
                    elif q in e.final:
                        row.append((HASH, SINK, e.final[q]))
                edges[v] = row
                for _, u, _ in row:
                    if u != SINK and u not in seen:
                        seen.add(u)
                        nxt.append(u)
            frontier = nxt
        # prune nodes that cannot reach the sink
        alive = {SINK}
        for v in sorted(edges, key=self.pos, reverse=True):
            if any(u in alive for _, u, _ in edges[v]):
                alive.add(v)
        if SOURCE not in alive:
            alive = set()
        for v in sorted(alive, key=self.pos):
            if v == SINK:
                continue
            row = [(lab, u, w) for lab, u, w in edges[v] if u in alive]
            row.sort(key=lambda x: (label_key(x[0]), x[1]))
            self.out[v] = row
            for lab, u, w in row:
                self.inc.setdefault(u, []).append((lab, v, w))
        if alive:
            self.out.setdefault(SINK, [])
        self.order = sorted(alive, key=lambda v: (self.pos(v), v))

    @property
    def empty(self) -> bool:
        return not self.order

    def __len__(self) -> int:
        return len(self.order)

    def n_edges(self) -> int:
        return sum(len(r) for r in self.out.values())

    def decode(self, labels: Sequence[DagLabel]) -> VTuple:
        """Tuple of a source-to-sink label sequence."""
        starts: Dict[str, int] = {}
        ends: Dict[str, int] = {}
        for idx, lab in enumerate(labels):
            if lab[0] == "T":
                i = (idx + 1) // 2
                for kind, x in lab[1]:
                    (starts if kind == "open" else ends)[x] = i
        return VTuple({x: Span(starts[x], ends[x]) for x in starts})


def build_product_dag(e: ExtendedVSetAutomaton, d: Document) -> ProductDag:
    return ProductDag(e, d)


def dag_for(a: WeightedVSetAutomaton, d: Document) -> ProductDag:
    return ProductDag(to_extended(a), d)


def dag_path_relation(dag: ProductDag, cap_paths: int = DEFAULT_RUN_CAP) -> KRelation:
    """Aggregate every source-to-sink path by its decoded tuple (explicit path enumeration)."""
    s = dag.semiring
    acc: Dict[VTuple, Any] = {}
    if dag.empty:
        return KRelation(s, dag.variables)
    stack = [(SOURCE, (), s.one)]
    count = 0
    while stack:
        v, labels, w = stack.pop()
        count += 1
        if count > cap_paths:
            raise ResourceError(f"DAG path enumeration exceeded {cap_paths} steps")
        if v == SINK:
            t = dag.decode(labels)
            acc[t] = s.plus(acc[t], w) if t in acc else w
            continue
        for lab, u, ew in dag.out[v]:
            stack.append((u, labels + (lab,), s.times(w, ew)))
    return KRelation(s, dag.variables, acc)


# ---------------------------------------------------------------- answer testing

def tuple_checker(t: VTuple, d: Document, semiring, alphabet: Iterable[str]) -> WeightedVSetAutomaton:
    """Chain automaton accepting only ``d`` annotated with ``t`` (operations in canonical order)."""
    ops_at: Dict[int, List[tuple]] = {}
    for x, span in t:
        ops_at.setdefault(span.start, []).append(open_(x))
        ops_at.setdefault(span.end, []).append(close_(x))
    labels = []
    for i in range(1, len(d) + 2):
        labels.extend(canonical_ops(ops_at.get(i, ())))
        if i <= len(d):
            labels.append(sym(d[i - 1]))
    b = Builder(semiring, alphabet, t.vars, len(labels) + 1)
    b.set_initial(0)
    b.set_final(len(labels))
    for i, lab in enumerate(labels):
        b.edge(i, lab, i + 1)
    return b.build(trim_result=False)


def answer_test(a: WeightedVSetAutomaton, d: Document, t: VTuple):
    """Weight of ``t`` on ``d``: join with the checker chain, then a vector-matrix power."""
    from .algebra import auto_join

    s = a.semiring
    if not isinstance(t, VTuple):
        t = VTuple(t)
    if t.vars != a.variables or not t.valid_for(d) or any(ch not in a.alphabet for ch in d):
        return s.zero
    to_extended(a)  # precondition check, and caches the extended form
    joined = auto_join(a, tuple_checker(t, d, s, a.alphabet))
    if joined.n_states == 0:
        return s.zero
    steps = len(d) + 2 * len(t)
    matrix: Dict[int, Dict[int, Any]] = {}
    for (p, _, q), w in joined.transitions.items():
        row = matrix.setdefault(p, {})
        row[q] = s.plus(row[q], w) if q in row else w
    vec = dict(joined.initial)
    for _ in range(steps):
        nxt: Dict[int, Any] = {}
        for p, v in vec.items():
            for q, w in matrix.get(p, {}).items():
                x = s.times(v, w)
                nxt[q] = s.plus(nxt[q], x) if q in nxt else x
        vec = nxt
    return s.sum(s.times(v, joined.final[q]) for q, v in sorted(vec.items()) if q in joined.final)


# ---------------------------------------------------------------- best weight

class Best(NamedTuple):
    tuple: VTuple
    weight: Any


def _require_bipotent_ordered(s, what: str) -> None:
    if not (s.is_bipotent and s.is_positively_ordered):
        raise CapabilityError(
            f"{what} needs a positively ordered, bipotent semiring; {s.name} is not "
            "(use force_enumerate for the exponential fallback)")


def best_path(dag: ProductDag) -> Optional[Tuple[Any, List[DagLabel]]]:
    """Forward max-weight dynamic program over the DAG in topological order.

    Ties go to the predecessor with the lowest (layer, node id, label).
    """
    if dag.empty:
        return None
    s = dag.semiring
    key = s.order_key
    best: Dict[int, Any] = {SOURCE: s.one}
    back: Dict[int, Tuple[int, DagLabel]] = {}
    for v in dag.order:
        if v == SOURCE:
            continue
        winner = None
        for lab, u, w in dag.inc.get(v, ()):
            if u not in best:
                continue
            val = s.times(best[u], w)
            rank = (dag.layer(u), u, label_key(lab))
            if winner is None or key(val) > key(winner[0]) or (key(val) == key(winner[0]) and rank < winner[1]):
                winner = (val, rank, u, lab)
        if winner is not None:
            best[v] = winner[0]
            back[v] = (winner[2], winner[3])
    if SINK not in best or s.is_zero(best[SINK]):
        return None
    labels = []
    v = SINK
    while v != SOURCE:
        u, lab = back[v]
        labels.append(lab)
        v = u
    labels.reverse()
    return best[SINK], labels


def max_tuple(a: WeightedVSetAutomaton, d: Document, force_enumerate: bool = False,
              cap: int = DEFAULT_RUN_CAP) -> Optional[Best]:
    """A tuple of maximal weight, or None when the support is empty."""
    s = a.semiring
    if not (s.is_bipotent and s.is_positively_ordered):
        if not s.is_ordered:
            raise CapabilityError(f"semiring {s.name} is not ordered")
        if not force_enumerate:
            _require_bipotent_ordered(s, "max_tuple")
        from .enumeration import enumerate_support

        top = None
        for t, w in enumerate_support(a, d, force=True, cap=cap):
            if top is None or s.order_key(w) > s.order_key(top.weight):
                top = Best(t, w)
        return top
    dag = dag_for(a, d)
    found = best_path(dag)
    if found is None:
        return None
    weight, labels = found
    return Best(dag.decode(labels), weight)


def threshold(a: WeightedVSetAutomaton, d: Document, w, force_enumerate: bool = False,
              cap: int = DEFAULT_RUN_CAP) -> bool:
    """Is there a tuple whose weight is at least ``w``?  Only tuples of the support count."""
    s = a.semiring
    if not s.is_ordered:
        raise CapabilityError(f"threshold needs an ordered semiring; {s.name} is not")
    key = s.order_key
    if s.is_bipotent and s.is_positively_ordered:
        top = max_tuple(a, d)
        return top is not None and key(w) <= key(top.weight)
    if not force_enumerate:
        _require_bipotent_ordered(s, "threshold")
    from .enumeration import enumerate_support

    return any(key(w) <= key(v) for _, v in enumerate_support(a, d, force=True, cap=cap))
