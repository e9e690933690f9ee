"""Weighted VSet-automata and their extended (bipartite) form.

Labels are pairs: ``("sym", a)``, ``("eps", "")``, ``("open", x)`` and
``("close", x)``.  States are dense integers ``0 .. n_states-1``.
"""

from __future__ import annotations

from collections import deque
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .core import Document, KRelation, Span, VTuple
from .errors import InvariantError, ParseError, PreconditionError, ResourceError, SchemaError
from .semiring import Semiring, get_semiring

Label = Tuple[str, str]
EPS: Label = ("eps", "")

DEFAULT_RUN_CAP = 10**6
DEFAULT_VAR_CAP = 12


def sym(a: str) -> Label:
    return ("sym", a)


def open_(x: str) -> Label:
    return ("open", x)


def close_(x: str) -> Label:
    return ("close", x)


def is_op(label: Label) -> bool:
    return label[0] == "open" or label[0] == "close"


def op_key(op: Label) -> Tuple[int, str]:
    """Canonical order on variable operations: opens before closes, then by name."""
    return (0 if op[0] == "open" else 1, op[1])


def canonical_ops(ops: Iterable[Label]) -> Tuple[Label, ...]:
    return tuple(sorted(ops, key=op_key))


def label_to_json(label: Label) -> dict:
    kind, x = label
    if kind == "eps":
        return {"eps": True}
    return {kind: x}


def label_from_json(obj) -> Label:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"malformed label {obj!r}")
    (kind, x), = obj.items()
    if kind == "eps":
        if x is not True:
            raise ParseError(f"malformed label {obj!r}")
        return EPS
    if kind not in ("sym", "open", "close") or not isinstance(x, str):
        raise ParseError(f"malformed label {obj!r}")
    return (kind, x)


def _fmt_label(label: Label) -> str:
    kind, x = label
    return {"sym": x, "eps": "eps", "open": "|-" + x, "close": "-|" + x}[kind]


def _check_common(semiring, alphabet, variables, n_states, initial, final):
    for a in alphabet:
        if not isinstance(a, str) or len(a) != 1:
            raise InvariantError(f"alphabet symbols must be single characters, got {a!r}")
    for name, table in (("initial", initial), ("final", final)):
        for q, w in table.items():
            if not (isinstance(q, int) and 0 <= q < n_states):
                raise InvariantError(f"{name} weight on unknown state {q!r}")
            _check_weight(semiring, w, f"{name} weight of state {q}")


def _check_weight(semiring: Semiring, w, where: str) -> None:
    if not semiring.contains(w):
        raise InvariantError(f"{where}: {w!r} is not a {semiring.name} value")
    if semiring.is_zero(w):
        raise InvariantError(f"{where}: zero weight stored")


class WeightedVSetAutomaton:
    """Immutable weighted VSet-automaton with a sparse transition map."""

    __slots__ = ("semiring", "alphabet", "variables", "n_states", "initial", "final",
                 "transitions", "_out", "_cache")

    def __init__(self, semiring: Semiring, alphabet: Iterable[str], variables: Iterable[str],
                 n_states: int, initial: Dict[int, Any], final: Dict[int, Any],
                 transitions: Dict[Tuple[int, Label, int], Any]):
        self.semiring = semiring
        self.alphabet = frozenset(alphabet)
        self.variables = frozenset(variables)
        self.n_states = n_states
        self.initial = dict(initial)
        self.final = dict(final)
        self.transitions = dict(transitions)
        self._out: Optional[List[List[Tuple[Label, int, Any]]]] = None
        self._cache: Dict[str, Any] = {}
        self._validate()

    def _validate(self) -> None:
        _check_common(self.semiring, self.alphabet, self.variables, self.n_states, self.initial, self.final)
        for (p, label, q), w in self.transitions.items():
            if not (0 <= p < self.n_states and 0 <= q < self.n_states):
                raise InvariantError(f"transition {p} -> {q} uses an unknown state")
            kind, x = label
            if kind == "sym" and x not in self.alphabet:
                raise InvariantError(f"transition {p} -> {q} reads {x!r}, which is not in the alphabet")
            if kind in ("open", "close") and x not in self.variables:
                raise InvariantError(f"transition {p} -> {q} uses undeclared variable {x!r}")
            if kind not in ("sym", "eps", "open", "close"):
                raise InvariantError(f"unknown label kind {kind!r}")
            _check_weight(self.semiring, w, f"transition {p} -{_fmt_label(label)}-> {q}")
        cycle = _find_eps_cycle(self)
        if cycle:
            raise InvariantError("epsilon cycle at states " + " -> ".join(map(str, cycle)))

    @property
    def out(self) -> List[List[Tuple[Label, int, Any]]]:
        if self._out is None:
            out: List[list] = [[] for _ in range(self.n_states)]
            for (p, label, q), w in sorted(self.transitions.items(), key=lambda kv: kv[0]):
                out[p].append((label, q, w))
            self._out = out
        return self._out

    @property
    def has_epsilon(self) -> bool:
        return any(label == EPS for (_, label, _) in self.transitions)

    def stats(self) -> str:
        return f"{self.n_states} states, {len(self.transitions)} transitions"

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedVSetAutomaton):
            return NotImplemented
        return (self.semiring is other.semiring and self.alphabet == other.alphabet
                and self.variables == other.variables and self.n_states == other.n_states
                and self.initial == other.initial and self.final == other.final
                and self.transitions == other.transitions)

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return (f"WeightedVSetAutomaton({self.semiring.name}, vars={sorted(self.variables)}, "
                f"{self.stats()})")

    def to_json(self) -> dict:
        enc = self.semiring.encode
        return {
            "semiring": self.semiring.name,
            "alphabet": sorted(self.alphabet),
            "vars": sorted(self.variables),
            "states": self.n_states,
            "initial": {str(q): enc(w) for q, w in sorted(self.initial.items())},
            "final": {str(q): enc(w) for q, w in sorted(self.final.items())},
            "transitions": [
                {"from": p, "label": label_to_json(label), "to": q, "weight": enc(w)}
                for (p, label, q), w in sorted(self.transitions.items())
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "WeightedVSetAutomaton":
        if not isinstance(obj, dict):
            raise ParseError("automaton must be a JSON object")
        try:
            s = get_semiring(obj["semiring"])
            dec = s.decode
            n = obj["states"]
            if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                raise ParseError(f"'states' must be a nonnegative integer, got {n!r}")
            initial = {_state(q): dec(w) for q, w in obj.get("initial", {}).items()}
            final = {_state(q): dec(w) for q, w in obj.get("final", {}).items()}
            transitions: Dict[Tuple[int, Label, int], Any] = {}
            for t in obj.get("transitions", []):
                key = (_state(t["from"]), label_from_json(t["label"]), _state(t["to"]))
                if key in transitions:
                    raise ParseError(f"duplicate transition {t!r}")
                transitions[key] = dec(t["weight"])
            alphabet = obj["alphabet"]
            variables = obj.get("vars", [])
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"malformed automaton: missing or bad field {exc}") from None
        for a in alphabet:
            if not isinstance(a, str) or len(a) != 1:
                raise ParseError(f"alphabet symbols must be single characters, got {a!r}")
        return cls(s, alphabet, variables, n, initial, final, transitions)


def _state(q) -> int:
    try:
        return int(q)
    except (TypeError, ValueError):
        raise ParseError(f"bad state id {q!r}") from None


def _find_eps_cycle(a: WeightedVSetAutomaton) -> Optional[List[int]]:
    eps: Dict[int, List[int]] = {}
    for (p, label, q) in a.transitions:
        if label == EPS:
            eps.setdefault(p, []).append(q)
    if not eps:
        return None
    color: Dict[int, int] = {}
    for root in sorted(eps):
        if color.get(root):
            continue
        stack = [(root, iter(sorted(eps.get(root, ()))))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            c = color.get(nxt, 0)
            if c == 1:
                return path[path.index(nxt):] + [nxt]
            if c == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(eps.get(nxt, ())))))
    return None


class Builder:
    """Accumulating constructor: repeated weights are added, zeros are dropped."""

    def __init__(self, semiring: Semiring, alphabet: Iterable[str], variables: Iterable[str], n_states: int = 0):
        self.semiring = semiring
        self.alphabet = frozenset(alphabet)
        self.variables = frozenset(variables)
        self.n_states = n_states
        self.initial: Dict[int, Any] = {}
        self.final: Dict[int, Any] = {}
        self.transitions: Dict[Tuple[int, Label, int], Any] = {}

    def state(self) -> int:
        self.n_states += 1
        return self.n_states - 1

    def set_initial(self, q: int, w=None) -> None:
        self._acc(self.initial, q, w)

    def set_final(self, q: int, w=None) -> None:
        self._acc(self.final, q, w)

    def edge(self, p: int, label: Label, q: int, w=None) -> None:
        self._acc(self.transitions, (p, label, q), w)

    def _acc(self, table: dict, key, w) -> None:
        s = self.semiring
        if w is None:
            w = s.one
        table[key] = s.plus(table[key], w) if key in table else w

    def build(self, trim_result: bool = True) -> WeightedVSetAutomaton:
        z = self.semiring.is_zero
        a = WeightedVSetAutomaton(
            self.semiring, self.alphabet, self.variables, self.n_states,
            {q: w for q, w in self.initial.items() if not z(w)},
            {q: w for q, w in self.final.items() if not z(w)},
            {k: w for k, w in self.transitions.items() if not z(w)},
        )
        return trim(a) if trim_result else a


def _useful_states(n: int, initial: Iterable[int], final: Iterable[int], edges: Iterable[Tuple[int, int]]) -> List[int]:
    fwd: Dict[int, List[int]] = {}
    bwd: Dict[int, List[int]] = {}
    for p, q in edges:
        fwd.setdefault(p, []).append(q)
        bwd.setdefault(q, []).append(p)

    def reach(roots, graph):
        seen = set(roots)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for q in graph.get(p, ()):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    return sorted(reach(initial, fwd) & reach(final, bwd))


def trim(a: WeightedVSetAutomaton) -> WeightedVSetAutomaton:
    """Drop states not on any initial-to-final path and renumber densely."""
    keep = _useful_states(a.n_states, a.initial, a.final, ((p, q) for (p, _, q) in a.transitions))
    if len(keep) == a.n_states:
        return a
    new = {q: i for i, q in enumerate(keep)}
    return WeightedVSetAutomaton(
        a.semiring, a.alphabet, a.variables, len(keep),
        {new[q]: w for q, w in a.initial.items() if q in new},
        {new[q]: w for q, w in a.final.items() if q in new},
        {(new[p], l, new[q]): w for (p, l, q), w in a.transitions.items() if p in new and q in new},
    )


def empty_automaton(semiring: Semiring, alphabet: Iterable[str], variables: Iterable[str] = ()) -> WeightedVSetAutomaton:
    return WeightedVSetAutomaton(semiring, alphabet, variables, 0, {}, {}, {})


def universal_automaton(semiring: Semiring, alphabet: Iterable[str]) -> WeightedVSetAutomaton:
    """One state, weight one everywhere, no variables: maps every document to the scalar one."""
    alphabet = frozenset(alphabet)
    return WeightedVSetAutomaton(semiring, alphabet, (), 1, {0: semiring.one}, {0: semiring.one},
                                 {(0, sym(a), 0): semiring.one for a in alphabet})


def reweight(a: WeightedVSetAutomaton, semiring: Semiring, fn) -> WeightedVSetAutomaton:
    """Apply ``fn`` to every stored weight, landing in ``semiring``."""
    b = Builder(semiring, a.alphabet, a.variables, a.n_states)
    for q, w in a.initial.items():
        b.set_initial(q, fn(w))
    for q, w in a.final.items():
        b.set_final(q, fn(w))
    for (p, l, q), w in a.transitions.items():
        b.edge(p, l, q, fn(w))
    return b.build()


# ---------------------------------------------------------------- run semantics

def _iter_runs(a: WeightedVSetAutomaton, d: Document, cap_runs: int) -> Iterator[Tuple[tuple, tuple, Any]]:
    """Yield ``(starts, ends, weight)`` for every valid accepting run with nonzero weight."""
    s = a.semiring
    vars_ = sorted(a.variables)
    idx = {x: i for i, x in enumerate(vars_)}
    k = len(vars_)
    n = len(d)
    out = a.out
    z = s.is_zero
    stack = [(q, 1, (0,) * k, (0,) * k, w) for q, w in sorted(a.initial.items(), reverse=True)]
    steps = 0
    while stack:
        q, pos, starts, ends, w = stack.pop()
        steps += 1
        if steps > cap_runs:
            raise ResourceError(f"run enumeration exceeded the cap of {cap_runs} configurations")
        if pos == n + 1 and q in a.final and 0 not in ends:
            v = s.times(w, a.final[q])
            if not z(v):
                yield starts, ends, v
        for label, r, tw in reversed(out[q]):
            kind, x = label
            if kind == "sym":
                if pos > n or d[pos - 1] != x:
                    continue
                nxt = (r, pos + 1, starts, ends)
            elif kind == "eps":
                nxt = (r, pos, starts, ends)
            else:
                i = idx[x]
                if kind == "open":
                    if starts[i]:
                        continue
                    nxt = (r, pos, starts[:i] + (pos,) + starts[i + 1:], ends)
                else:
                    if not starts[i] or ends[i]:
                        continue
                    nxt = (r, pos, starts, ends[:i] + (pos,) + ends[i + 1:])
            v = s.times(w, tw)
            if not z(v):
                stack.append(nxt + (v,))


def _tuple_of(vars_: Sequence[str], starts: tuple, ends: tuple) -> VTuple:
    return VTuple(zip(vars_, (Span(i, j) for i, j in zip(starts, ends))))


def evaluate_all_runs(a: WeightedVSetAutomaton, d: Document, cap_runs: int = DEFAULT_RUN_CAP) -> KRelation:
    """Reference semantics by explicit run enumeration (exponential; small inputs only)."""
    s = a.semiring
    vars_ = sorted(a.variables)
    acc: Dict[Tuple[tuple, tuple], Any] = {}
    for starts, ends, w in _iter_runs(a, d, cap_runs):
        key = (starts, ends)
        acc[key] = s.plus(acc[key], w) if key in acc else w
    return KRelation(s, a.variables, [(_tuple_of(vars_, st, en), w) for (st, en), w in acc.items()])


def check_unambiguous_support(a: WeightedVSetAutomaton, docs: Iterable[Document],
                              cap_runs: int = DEFAULT_RUN_CAP) -> bool:
    """Bounded check: every produced tuple has exactly one valid nonzero run on each given document."""
    for d in docs:
        seen = set()
        for starts, ends, _ in _iter_runs(a, d, cap_runs):
            if (starts, ends) in seen:
                return False
            seen.add((starts, ends))
    return True


# ---------------------------------------------------------------- functionality

WAIT, OPEN, CLOSED = 0, 1, 2


def _step_status(status: tuple, idx: Dict[str, int], label: Label) -> Optional[tuple]:
    kind, x = label
    if kind == "open":
        i = idx[x]
        if status[i] != WAIT:
            return None
        return status[:i] + (OPEN,) + status[i + 1:]
    if kind == "close":
        i = idx[x]
        if status[i] != OPEN:
            return None
        return status[:i] + (CLOSED,) + status[i + 1:]
    return status


def check_functional(a: WeightedVSetAutomaton) -> bool:
    """True iff every accepting path opens and then closes each variable exactly once."""
    a = trim(a)
    idx = {x: i for i, x in enumerate(sorted(a.variables))}
    start = (WAIT,) * len(idx)
    done = (CLOSED,) * len(idx)
    status: Dict[int, tuple] = {q: start for q in a.initial}
    queue = deque(sorted(a.initial))
    while queue:
        p = queue.popleft()
        st = status[p]
        for label, q, _ in a.out[p]:
            nst = _step_status(st, idx, label)
            if nst is None:
                return False
            old = status.get(q)
            if old is None:
                status[q] = nst
                queue.append(q)
            elif old != nst:
                return False
    return all(status[q] == done for q in a.final)


def functionalize(a: WeightedVSetAutomaton, max_vars: int = DEFAULT_VAR_CAP) -> WeightedVSetAutomaton:
    """Product with variable statuses {waiting, open, closed}^V, keeping valid runs only."""
    if len(a.variables) > max_vars:
        raise ResourceError(f"functionalize: {len(a.variables)} variables exceed the cap of {max_vars}")
    idx = {x: i for i, x in enumerate(sorted(a.variables))}
    start = (WAIT,) * len(idx)
    done = (CLOSED,) * len(idx)
    b = Builder(a.semiring, a.alphabet, a.variables)
    ids: Dict[Tuple[int, tuple], int] = {}
    queue: deque = deque()

    def node(q, st):
        key = (q, st)
        if key not in ids:
            ids[key] = b.state()
            queue.append(key)
        return ids[key]

    for q, w in sorted(a.initial.items()):
        b.set_initial(node(q, start), w)
    while queue:
        q, st = queue.popleft()
        me = ids[(q, st)]
        if st == done and q in a.final:
            b.set_final(me, a.final[q])
        for label, r, w in a.out[q]:
            nst = _step_status(st, idx, label)
            if nst is not None:
                b.edge(me, label, node(r, nst), w)
    return b.build()


# ---------------------------------------------------------------- epsilon removal

def _sparse_mul(s: Semiring, left: Dict[int, Dict[int, Any]], right: Dict[int, Dict[int, Any]]):
    out: Dict[int, Dict[int, Any]] = {}
    for p, row in left.items():
        acc: Dict[int, Any] = {}
        for r, w in row.items():
            for q, v in right.get(r, {}).items():
                x = s.times(w, v)
                acc[q] = s.plus(acc[q], x) if q in acc else x
        acc = {q: w for q, w in acc.items() if not s.is_zero(w)}
        if acc:
            out[p] = acc
    return out


def epsilon_closure(a: WeightedVSetAutomaton) -> Dict[int, Dict[int, Any]]:
    """Closure weights D[p][q] = sum over epsilon paths p ~> q, including the empty path."""
    s = a.semiring
    eps: Dict[int, Dict[int, Any]] = {}
    for (p, label, q), w in a.transitions.items():
        if label == EPS:
            eps.setdefault(p, {})[q] = w
    closure = {p: {p: s.one} for p in range(a.n_states)}
    power = eps
    # Without cycles an epsilon path has fewer than n_states edges.
    for _ in range(a.n_states):
        if not power:
            break
        for p, row in power.items():
            target = closure[p]
            for q, w in row.items():
                target[q] = s.plus(target[q], w) if q in target else w
        power = _sparse_mul(s, power, eps)
    return closure


def eliminate_epsilon(a: WeightedVSetAutomaton) -> WeightedVSetAutomaton:
    if not a.has_epsilon:
        return a
    s = a.semiring
    closure = epsilon_closure(a)
    b = Builder(s, a.alphabet, a.variables, a.n_states)
    for q, w in a.initial.items():
        b.set_initial(q, w)
    for p in range(a.n_states):
        for q, dw in closure[p].items():
            if q in a.final:
                b.set_final(p, s.times(dw, a.final[q]))
            for label, r, w in a.out[q]:
                if label != EPS:
                    b.edge(p, label, r, s.times(dw, w))
    return b.build()


# ---------------------------------------------------------------- extended form

LETTER, VARIABLE = "letter", "variable"


class ExtendedVSetAutomaton:
    """Bipartite form: letters lead from letter states to variable states,
    operation sets lead from variable states to letter states."""

    __slots__ = ("semiring", "alphabet", "variables", "n_states", "kinds", "initial", "final",
                 "letter_transitions", "set_transitions", "_letter_out", "_set_out")

    def __init__(self, semiring: Semiring, alphabet: Iterable[str], variables: Iterable[str],
                 kinds: Sequence[str], initial: Dict[int, Any], final: Dict[int, Any],
                 letter_transitions: Dict[Tuple[int, str, int], Any],
                 set_transitions: Dict[Tuple[int, frozenset, int], Any]):
        self.semiring = semiring
        self.alphabet = frozenset(alphabet)
        self.variables = frozenset(variables)
        self.kinds = tuple(kinds)
        self.n_states = len(self.kinds)
        self.initial = dict(initial)
        self.final = dict(final)
        self.letter_transitions = dict(letter_transitions)
        self.set_transitions = {(p, frozenset(t), q): w for (p, t, q), w in set_transitions.items()}
        self._letter_out = None
        self._set_out = None
        self._validate()

    def _validate(self) -> None:
        s = self.semiring
        _check_common(s, self.alphabet, self.variables, self.n_states, self.initial, self.final)
        for k in self.kinds:
            if k not in (LETTER, VARIABLE):
                raise InvariantError(f"unknown state kind {k!r}")
        for q in self.initial:
            if self.kinds[q] != VARIABLE:
                raise InvariantError(f"initial state {q} must be a variable state")
        for q in self.final:
            if self.kinds[q] != LETTER:
                raise InvariantError(f"final state {q} must be a letter state")
        for (p, a, q), w in self.letter_transitions.items():
            if not (0 <= p < self.n_states and 0 <= q < self.n_states):
                raise InvariantError(f"letter transition {p} -> {q} uses an unknown state")
            if self.kinds[p] != LETTER or self.kinds[q] != VARIABLE:
                raise InvariantError(f"letter transition {p} -{a}-> {q} must go from a letter state to a variable state")
            if a not in self.alphabet:
                raise InvariantError(f"letter transition {p} -> {q} reads {a!r}, not in the alphabet")
            _check_weight(s, w, f"letter transition {p} -{a}-> {q}")
        for (p, t, q), w in self.set_transitions.items():
            if not (0 <= p < self.n_states and 0 <= q < self.n_states):
                raise InvariantError(f"set transition {p} -> {q} uses an unknown state")
            if self.kinds[p] != VARIABLE or self.kinds[q] != LETTER:
                raise InvariantError(f"set transition {p} -> {q} must go from a variable state to a letter state")
            for op in t:
                if not is_op(op) or op[1] not in self.variables:
                    raise InvariantError(f"set transition {p} -> {q} has bad operation {op!r}")
            _check_weight(s, w, f"set transition {p} -> {q}")

    @property
    def letter_out(self) -> List[Dict[str, List[Tuple[int, Any]]]]:
        if self._letter_out is None:
            out: List[Dict[str, list]] = [dict() for _ in range(self.n_states)]
            for (p, a, q), w in sorted(self.letter_transitions.items()):
                out[p].setdefault(a, []).append((q, w))
            self._letter_out = out
        return self._letter_out

    @property
    def set_out(self) -> List[List[Tuple[Tuple[Label, ...], int, Any]]]:
        if self._set_out is None:
            out: List[list] = [[] for _ in range(self.n_states)]
            rows = sorted(((p, canonical_ops(t), q), w) for (p, t, q), w in self.set_transitions.items())
            for (p, t, q), w in rows:
                out[p].append((t, q, w))
            self._set_out = out
        return self._set_out

    def stats(self) -> str:
        return (f"{self.n_states} states, "
                f"{len(self.letter_transitions) + len(self.set_transitions)} transitions")

    def __repr__(self) -> str:
        return f"ExtendedVSetAutomaton({self.semiring.name}, vars={sorted(self.variables)}, {self.stats()})"

    def to_json(self) -> dict:
        enc = self.semiring.encode
        rows = [{"from": p, "label": {"sym": a}, "to": q, "weight": enc(w)}
                for (p, a, q), w in sorted(self.letter_transitions.items())]
        sets = sorted(((p, canonical_ops(t), q), w) for (p, t, q), w in self.set_transitions.items())
        rows += [{"from": p, "labelset": [label_to_json(o) for o in t], "to": q, "weight": enc(w)}
                 for (p, t, q), w in sets]
        return {
            "semiring": self.semiring.name,
            "alphabet": sorted(self.alphabet),
            "vars": sorted(self.variables),
            "states": self.n_states,
            "kind": list(self.kinds),
            "initial": {str(q): enc(w) for q, w in sorted(self.initial.items())},
            "final": {str(q): enc(w) for q, w in sorted(self.final.items())},
            "transitions": rows,
        }

    @classmethod
    def from_json(cls, obj) -> "ExtendedVSetAutomaton":
        try:
            s = get_semiring(obj["semiring"])
            dec = s.decode
            kinds = obj["kind"]
            if len(kinds) != obj["states"]:
                raise ParseError("'kind' must list one entry per state")
            letters, sets = {}, {}
            for t in obj.get("transitions", []):
                p, q, w = _state(t["from"]), _state(t["to"]), dec(t["weight"])
                if "labelset" in t:
                    ops = frozenset(label_from_json(o) for o in t["labelset"])
                    if any(not is_op(o) for o in ops):
                        raise ParseError(f"labelset may only hold variable operations: {t!r}")
                    sets[(p, ops, q)] = w
                else:
                    label = label_from_json(t["label"])
                    if label[0] != "sym":
                        raise ParseError(f"extended automata only have letter or labelset transitions: {t!r}")
                    letters[(p, label[1], q)] = w
            return cls(s, obj["alphabet"], obj.get("vars", []), kinds,
                       {_state(q): dec(w) for q, w in obj.get("initial", {}).items()},
                       {_state(q): dec(w) for q, w in obj.get("final", {}).items()},
                       letters, sets)
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"malformed extended automaton: {exc}") from None


def trim_extended(e: ExtendedVSetAutomaton) -> ExtendedVSetAutomaton:
    edges = [(p, q) for (p, _, q) in e.letter_transitions] + [(p, q) for (p, _, q) in e.set_transitions]
    keep = _useful_states(e.n_states, e.initial, e.final, edges)
    if len(keep) == e.n_states:
        return e
    new = {q: i for i, q in enumerate(keep)}
    return ExtendedVSetAutomaton(
        e.semiring, e.alphabet, e.variables, [e.kinds[q] for q in keep],
        {new[q]: w for q, w in e.initial.items() if q in new},
        {new[q]: w for q, w in e.final.items() if q in new},
        {(new[p], a, new[q]): w for (p, a, q), w in e.letter_transitions.items() if p in new and q in new},
        {(new[p], t, new[q]): w for (p, t, q), w in e.set_transitions.items() if p in new and q in new},
    )


def to_extended(a: WeightedVSetAutomaton) -> ExtendedVSetAutomaton:
    """Extended form of a functional automaton; the result is cached on ``a``."""
    cached = a._cache.get("extended")
    if cached is not None:
        return cached
    plain = trim(eliminate_epsilon(a))
    if not check_functional(plain):
        raise PreconditionError("to_extended needs a functional automaton (run functionalize first)")
    s = plain.semiring
    n = plain.n_states
    ops_out: List[List[Tuple[Label, int, Any]]] = [[] for _ in range(n)]
    letters: Dict[Tuple[int, str, int], Any] = {}
    for (p, label, q), w in plain.transitions.items():
        if label[0] == "sym":
            # letter copy of p is 2p+1, variable copy of q is 2q
            letters[(2 * p + 1, label[1], 2 * q)] = w
        else:
            ops_out[p].append((label, q, w))

    memo: Dict[Tuple[int, frozenset], Dict[int, Any]] = {}

    def delta(p: int, t: frozenset) -> Dict[int, Any]:
        # weight of all operation paths from p that use exactly the operations in t
        key = (p, t)
        if key in memo:
            return memo[key]
        if not t:
            res = {p: s.one}
        else:
            res = {}
            for op, r, w in ops_out[p]:
                if op in t:
                    for q, v in delta(r, t - {op}).items():
                        x = s.times(w, v)
                        res[q] = s.plus(res[q], x) if q in res else x
        memo[key] = res
        return res

    def reachable_sets(p: int) -> set:
        found = {frozenset()}
        seen = set()
        stack = [(p, frozenset())]
        while stack:
            r, used = stack.pop()
            for op, r2, _ in ops_out[r]:
                if op not in used:
                    nxt = used | {op}
                    if (r2, nxt) not in seen:
                        seen.add((r2, nxt))
                        found.add(nxt)
                        stack.append((r2, nxt))
        return found

    sets: Dict[Tuple[int, frozenset, int], Any] = {}
    for p in range(n):
        for t in reachable_sets(p):
            for q, w in delta(p, t).items():
                if not s.is_zero(w):
                    sets[(2 * p, t, 2 * q + 1)] = w
    kinds = [VARIABLE if i % 2 == 0 else LETTER for i in range(2 * n)]
    e = ExtendedVSetAutomaton(
        s, plain.alphabet, plain.variables, kinds,
        {2 * q: w for q, w in plain.initial.items()},
        {2 * q + 1: w for q, w in plain.final.items()},
        letters, sets,
    )
    e = trim_extended(e)
    a._cache["extended"] = e
    return e


def from_extended(e: ExtendedVSetAutomaton) -> WeightedVSetAutomaton:
    """Expand every operation set into a chain in canonical order, then remove epsilons."""
    s = e.semiring
    b = Builder(s, e.alphabet, e.variables, e.n_states)
    for q, w in e.initial.items():
        b.set_initial(q, w)
    for q, w in e.final.items():
        b.set_final(q, w)
    for (p, a, q), w in e.letter_transitions.items():
        b.edge(p, sym(a), q, w)
    for (p, t, q), w in sorted(((p, canonical_ops(t), q), w) for (p, t, q), w in e.set_transitions.items()):
        if not t:
            b.edge(p, EPS, q, w)
            continue
        cur, weight = p, w
        for i, op in enumerate(t):
            nxt = q if i == len(t) - 1 else b.state()
            b.edge(cur, op, nxt, weight)
            cur, weight = nxt, s.one
    return trim(eliminate_epsilon(b.build(trim_result=False)))
