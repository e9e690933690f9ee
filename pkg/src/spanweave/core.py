"""Documents, spans, variable tuples and K-relations with their algebra.

Documents are plain ``str`` values indexed by codepoint with 1-based positions.
A span ``Span(i, j)`` covers positions ``i .. j-1``.
"""

from __future__ import annotations

from typing import Any, Callable, Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Tuple

from .errors import ParseError, SchemaError
from .semiring import Semiring, get_semiring

Document = str


class Span(NamedTuple):
    start: int
    end: int

    def __str__(self) -> str:
        return f"<{self.start},{self.end}>"

    def valid_for(self, d: Document) -> bool:
        return 1 <= self.start <= self.end <= len(d) + 1

    def text(self, d: Document) -> str:
        return d[self.start - 1:self.end - 1]


class VTuple(tuple):
    """An immutable assignment of spans to variables.

    Stored as ``(variable, Span)`` pairs sorted by variable name, which gives a
    canonical hash, equality and ordering.
    """

    def __new__(cls, assignment: Mapping[str, Any] | Iterable = ()):
        items = assignment.items() if isinstance(assignment, Mapping) else assignment
        pairs = sorted((str(v), Span(*s)) for v, s in items)
        for (v1, _), (v2, _) in zip(pairs, pairs[1:]):
            if v1 == v2:
                raise SchemaError(f"variable {v1} assigned twice")
        return super().__new__(cls, pairs)

    @property
    def vars(self) -> frozenset:
        return frozenset(v for v, _ in self)

    def get(self, var: str) -> Optional[Span]:
        for v, s in self:
            if v == var:
                return s
        return None

    def span(self, var: str) -> Span:
        s = self.get(var)
        if s is None:
            raise KeyError(var)
        return s

    def restrict(self, x: Iterable[str]) -> "VTuple":
        keep = set(x)
        return VTuple((v, s) for v, s in self if v in keep)

    def as_dict(self) -> Dict[str, Span]:
        return dict(self)

    def compatible(self, other: "VTuple") -> bool:
        mine = dict(self)
        return all(mine.get(v, s) == s for v, s in other)

    def merge(self, other: "VTuple") -> "VTuple":
        return VTuple({**dict(self), **dict(other)})

    def valid_for(self, d: Document) -> bool:
        return all(s.valid_for(d) for _, s in self)

    def to_json(self) -> dict:
        return {v: [s.start, s.end] for v, s in self}

    @classmethod
    def from_json(cls, obj) -> "VTuple":
        if not isinstance(obj, dict):
            raise ParseError(f"tuple must be an object, got {obj!r}")
        try:
            return cls({v: (int(s[0]), int(s[1])) for v, s in obj.items()})
        except (TypeError, ValueError, IndexError):
            raise ParseError(f"malformed tuple {obj!r}") from None

    def __repr__(self) -> str:
        return "VTuple(" + ", ".join(f"{v}={s}" for v, s in self) + ")"


EMPTY_TUPLE = VTuple()


class KRelation:
    """Finite-support map from V-tuples to nonzero semiring values."""

    __slots__ = ("semiring", "vars", "_rows")

    def __init__(self, semiring: Semiring, variables: Iterable[str], rows: Mapping[VTuple, Any] | Iterable = ()):
        self.semiring = semiring
        self.vars = frozenset(variables)
        self._rows: Dict[VTuple, Any] = {}
        items = rows.items() if isinstance(rows, Mapping) else rows
        for t, w in items:
            t = t if isinstance(t, VTuple) else VTuple(t)
            if t.vars != self.vars:
                raise SchemaError(f"tuple {t!r} does not range over {sorted(self.vars)}")
            if t in self._rows:
                w = semiring.plus(self._rows[t], w)
            self._rows[t] = w
        self._rows = {t: w for t, w in self._rows.items() if not semiring.is_zero(w)}

    def __getitem__(self, t: VTuple):
        return self._rows.get(t, self.semiring.zero)

    def get(self, t: VTuple):
        return self[t]

    def __contains__(self, t) -> bool:
        return t in self._rows

    def __len__(self) -> int:
        return len(self._rows)

    def __iter__(self) -> Iterator[VTuple]:
        return iter(sorted(self._rows))

    def items(self):
        return sorted(self._rows.items())

    @property
    def support(self) -> frozenset:
        return frozenset(self._rows)

    def close_to(self, other: "KRelation", rel_tol: float = 1e-9) -> bool:
        if self.vars != other.vars or self.support != other.support:
            return False
        return all(self.semiring.eq(w, other[t], rel_tol) for t, w in self._rows.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, KRelation):
            return NotImplemented
        return self.semiring is other.semiring and self.vars == other.vars and self._rows == other._rows

    def __repr__(self) -> str:
        body = ", ".join(f"{t!r}: {w!r}" for t, w in self.items())
        return f"KRelation({self.semiring.name}, {{{body}}})"

    def diff(self, other: "KRelation", rel_tol: float = 1e-9) -> list:
        """Tuples whose weights differ, as ``(tuple, mine, theirs)``."""
        out = []
        for t in sorted(self.support | other.support):
            a, b = self[t], other[t]
            if not self.semiring.eq(a, b, rel_tol):
                out.append((t, a, b))
        return out

    def to_json(self) -> dict:
        enc = self.semiring.encode
        return {
            "semiring": self.semiring.name,
            "vars": sorted(self.vars),
            "rows": [{"tuple": t.to_json(), "weight": enc(w)} for t, w in self.items()],
        }

    @classmethod
    def from_json(cls, obj) -> "KRelation":
        try:
            s = get_semiring(obj["semiring"])
            rows = [(VTuple.from_json(r["tuple"]), s.decode(r["weight"])) for r in obj["rows"]]
            return cls(s, obj["vars"], rows)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed K-relation: {exc}") from None


def _same_semiring(r1: KRelation, r2: KRelation) -> None:
    if r1.semiring is not r2.semiring:
        raise SchemaError(f"semiring mismatch: {r1.semiring.name} vs {r2.semiring.name}")


def krel_union(r1: KRelation, r2: KRelation) -> KRelation:
    _same_semiring(r1, r2)
    if r1.vars != r2.vars:
        raise SchemaError(f"variable sets differ: {sorted(r1.vars)} vs {sorted(r2.vars)}")
    return KRelation(r1.semiring, r1.vars, list(r1._rows.items()) + list(r2._rows.items()))


def krel_project(r: KRelation, x: Iterable[str]) -> KRelation:
    x = frozenset(x)
    if not x <= r.vars:
        raise SchemaError(f"cannot project onto {sorted(x)}: not a subset of {sorted(r.vars)}")
    return KRelation(r.semiring, x, [(t.restrict(x), w) for t, w in r._rows.items()])


def krel_join(r1: KRelation, r2: KRelation) -> KRelation:
    _same_semiring(r1, r2)
    s = r1.semiring
    shared = r1.vars & r2.vars
    index: Dict[VTuple, list] = {}
    for t2, w2 in r2._rows.items():
        index.setdefault(t2.restrict(shared), []).append((t2, w2))
    rows = []
    for t1, w1 in r1._rows.items():
        for t2, w2 in index.get(t1.restrict(shared), ()):
            rows.append((t1.merge(t2), s.times(w1, w2)))
    return KRelation(s, r1.vars | r2.vars, rows)


def krel_select(r: KRelation, p: Callable[[VTuple], Any]) -> KRelation:
    """Keep the tuples on which ``p`` returns the semiring's one (or ``True``)."""
    s = r.semiring
    keep = []
    for t, w in r._rows.items():
        verdict = p(t)
        if verdict is True or (verdict is not False and verdict == s.one):
            keep.append((t, w))
    return KRelation(s, r.vars, keep)


def relation_from_rows(semiring: Semiring, variables: Iterable[str], rows: Iterable[Tuple[Mapping, Any]]) -> KRelation:
    return KRelation(semiring, variables, [(VTuple(t), w) for t, w in rows])
