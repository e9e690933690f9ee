"""Commutative semirings with capability flags.

A :class:`Semiring` is a plain value object: the CLI picks one by name and every
algorithm receives it at runtime.  The methods ``plus``/``times`` are the
unchecked hot path; the module-level :func:`add` and :func:`mul` validate their
arguments first.

Orders are expressed through ``order_key``: a function whose natural Python
ordering agrees with the semiring order.  For the tropical and access-control
semirings this runs against the numeric order so that the zero element is the
minimum.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence

from .errors import CapabilityError, InvalidValueError, ParseError

INF = math.inf

# Float comparisons: relative tolerance plus an absolute floor scaled by the
# operand magnitude (needed where additive cancellation or clamping at 0 occurs).
REL_TOL = 1e-9
ABS_FLOOR = 1e-12


class Access(enum.IntEnum):
    """Access-control levels, ordered P < C < S < T < 0."""

    P = 0
    C = 1
    S = 2
    T = 3
    ZERO = 4

    def __str__(self) -> str:
        return "0" if self is Access.ZERO else self.name

    def __repr__(self) -> str:
        return f"Access.{self.name}"


_ACCESS_BY_TOKEN = {str(level): level for level in Access}


@dataclass(frozen=True, eq=False)
class Semiring:
    name: str
    zero: Any
    one: Any
    plus: Callable[[Any, Any], Any]
    times: Callable[[Any, Any], Any]
    is_positive: bool
    is_bipotent: bool
    is_ordered: bool
    is_positively_ordered: bool
    contains: Callable[[Any], bool]
    encode: Callable[[Any], Any]
    decode: Callable[[Any], Any]
    sample: Callable[[random.Random], Any]
    order_key: Optional[Callable[[Any], Any]] = None
    exact: bool = True

    def __repr__(self) -> str:
        return f"Semiring({self.name!r})"

    def is_zero(self, v) -> bool:
        return v == self.zero

    def sum(self, values: Iterable) -> Any:
        acc = self.zero
        for v in values:
            acc = self.plus(acc, v)
        return acc

    def prod(self, values: Iterable) -> Any:
        acc = self.one
        for v in values:
            acc = self.times(acc, v)
        return acc

    def key(self, v):
        if self.order_key is None:
            raise CapabilityError(f"semiring {self.name} is not ordered")
        return self.order_key(v)

    def eq(self, a, b, rel_tol: float = REL_TOL) -> bool:
        """Equality, with relative tolerance for float semirings."""
        if self.exact:
            return a == b
        return close(a, b, rel_tol)


def close(x: float, y: float, rel_tol: float = REL_TOL, abs_tol: float = 0.0) -> bool:
    if x == y:
        return True
    if math.isinf(x) or math.isinf(y) or math.isnan(x) or math.isnan(y):
        return False
    diff = abs(x - y)
    return diff <= rel_tol * max(abs(x), abs(y)) or diff <= abs_tol


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _decode_float(v):
    if isinstance(v, str):
        try:
            v = float(v)
        except ValueError:
            raise ParseError(f"not a number: {v!r}") from None
    if not _is_num(v):
        raise ParseError(f"not a number: {v!r}")
    return float(v)


def _encode_float(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(v)


def _log_plus(x: float, y: float) -> float:
    if x == -INF:
        return y
    if y == -INF:
        return x
    if x == y:
        return x + math.log(2.0)
    m = x if x > y else y
    return m + math.log1p(math.exp(-abs(x - y)))


def _log_times(x: float, y: float) -> float:
    if x == -INF or y == -INF:
        return -INF
    return x + y


def _luk_times(x: float, y: float) -> float:
    v = x + y - 1.0
    return v if v > 0.0 else 0.0


def _pick(rng: random.Random, specials: Sequence, draw: Callable[[], Any], p: float = 0.15):
    if rng.random() < p:
        return rng.choice(specials)
    return draw()


def _decode_bool(v):
    if not isinstance(v, bool):
        raise ParseError(f"boolean weight expected, got {v!r}")
    return v


def _decode_count(v):
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ParseError(f"nonnegative integer weight expected, got {v!r}")
    return v


def _decode_tropical(v):
    if v == "inf":
        return INF
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ParseError(f"tropical weight must be a nonnegative integer or 'inf', got {v!r}")
    return v


def _decode_access(v):
    try:
        return _ACCESS_BY_TOKEN[str(v)]
    except KeyError:
        raise ParseError(f"access level must be one of P,C,S,T,0, got {v!r}") from None


def _unit_interval(v) -> bool:
    return _is_num(v) and 0.0 <= v <= 1.0


BOOLEAN = Semiring(
    name="boolean", zero=False, one=True,
    plus=lambda a, b: a or b, times=lambda a, b: a and b,
    is_positive=True, is_bipotent=True, is_ordered=True, is_positively_ordered=True,
    contains=lambda v: isinstance(v, bool),
    encode=bool, decode=_decode_bool,
    sample=lambda rng: rng.random() < 0.5,
    order_key=lambda v: v,
)

COUNTING = Semiring(
    name="counting", zero=0, one=1,
    plus=lambda a, b: a + b, times=lambda a, b: a * b,
    is_positive=True, is_bipotent=False, is_ordered=True, is_positively_ordered=True,
    contains=lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 0,
    encode=int, decode=_decode_count,
    sample=lambda rng: _pick(rng, (0, 1, 10**20), lambda: rng.randint(0, 50)),
    order_key=lambda v: v,
)

PROBABILITY = Semiring(
    name="probability", zero=0.0, one=1.0,
    plus=lambda a, b: a + b, times=lambda a, b: a * b,
    is_positive=True, is_bipotent=False, is_ordered=True, is_positively_ordered=True,
    contains=lambda v: _is_num(v) and 0.0 <= v < INF,
    encode=float, decode=_decode_float,
    sample=lambda rng: _pick(rng, (0.0, 1.0), lambda: rng.uniform(0.0, 10.0)),
    order_key=lambda v: v,
    exact=False,
)

VITERBI = Semiring(
    name="viterbi", zero=0.0, one=1.0,
    plus=lambda a, b: a if a >= b else b, times=lambda a, b: a * b,
    is_positive=True, is_bipotent=True, is_ordered=True, is_positively_ordered=True,
    contains=_unit_interval,
    encode=float, decode=_decode_float,
    sample=lambda rng: _pick(rng, (0.0, 1.0), rng.random),
    order_key=lambda v: v,
    exact=False,
)

ACCESS = Semiring(
    name="access", zero=Access.ZERO, one=Access.P,
    plus=min, times=max,
    is_positive=True, is_bipotent=True, is_ordered=True, is_positively_ordered=True,
    contains=lambda v: isinstance(v, Access),
    encode=str, decode=_decode_access,
    sample=lambda rng: rng.choice(list(Access)),
    order_key=lambda v: -int(v),
)

TROPICAL = Semiring(
    name="tropical", zero=INF, one=0,
    plus=min, times=lambda a, b: a + b,
    is_positive=True, is_bipotent=True, is_ordered=True, is_positively_ordered=True,
    contains=lambda v: v == INF or (isinstance(v, int) and not isinstance(v, bool) and v >= 0),
    encode=lambda v: "inf" if v == INF else int(v), decode=_decode_tropical,
    sample=lambda rng: _pick(rng, (INF, 0), lambda: rng.randint(0, 100)),
    order_key=lambda v: -v,
)

LUKASIEWICZ = Semiring(
    name="lukasiewicz", zero=0.0, one=1.0,
    plus=lambda a, b: a if a >= b else b, times=_luk_times,
    is_positive=False, is_bipotent=True, is_ordered=True, is_positively_ordered=True,
    contains=_unit_interval,
    encode=float, decode=_decode_float,
    sample=lambda rng: _pick(rng, (0.0, 1.0, 0.5), rng.random),
    order_key=lambda v: v,
    exact=False,
)

LOG = Semiring(
    name="log", zero=-INF, one=0.0,
    plus=_log_plus, times=_log_times,
    is_positive=True, is_bipotent=False, is_ordered=True, is_positively_ordered=True,
    contains=lambda v: _is_num(v) and not math.isnan(v),
    encode=_encode_float, decode=_decode_float,
    sample=lambda rng: _pick(rng, (-INF, 0.0), lambda: rng.uniform(-20.0, 20.0)),
    order_key=lambda v: v,
    exact=False,
)

REAL = Semiring(
    name="real", zero=0.0, one=1.0,
    plus=lambda a, b: a + b, times=lambda a, b: a * b,
    is_positive=False, is_bipotent=False, is_ordered=True, is_positively_ordered=False,
    contains=lambda v: _is_num(v) and math.isfinite(v),
    encode=float, decode=_decode_float,
    sample=lambda rng: _pick(rng, (0.0, 1.0, -1.0), lambda: rng.uniform(-10.0, 10.0)),
    order_key=lambda v: v,
    exact=False,
)

SEMIRINGS = {s.name: s for s in (
    BOOLEAN, COUNTING, PROBABILITY, VITERBI, ACCESS, TROPICAL, LUKASIEWICZ, LOG, REAL)}


def get_semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name]
    except KeyError:
        raise ParseError(f"unknown semiring {name!r}; choose from {', '.join(SEMIRINGS)}") from None


def _check(s: Semiring, *values) -> None:
    for v in values:
        if not s.contains(v):
            raise InvalidValueError(f"{v!r} is not an element of the {s.name} semiring")


def add(s: Semiring, a, b):
    _check(s, a, b)
    return s.plus(a, b)


def mul(s: Semiring, a, b):
    _check(s, a, b)
    return s.times(a, b)


def compare(s: Semiring, a, b) -> int:
    """Return -1, 0 or 1 as ``a`` is below, equal to or above ``b`` in the semiring order."""
    if not s.is_ordered:
        raise CapabilityError(f"semiring {s.name} is not ordered")
    _check(s, a, b)
    ka, kb = s.order_key(a), s.order_key(b)
    return (ka > kb) - (ka < kb)


def parse_value(s: Semiring, text: str):
    """Parse a weight given on the command line."""
    import json

    try:
        raw = json.loads(text)
    except ValueError:
        raw = text
    value = s.decode(raw)
    _check(s, value)
    return value


@dataclass
class AxiomReport:
    semiring: str
    checked: int
    violation: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.violation is None

    def __str__(self) -> str:
        if self.passed:
            return f"{self.semiring}: pass ({self.checked} triples)"
        return f"{self.semiring}: FAIL after {self.checked} triples: {self.violation}"


def _scale(*vals) -> float:
    m = 1.0
    for v in vals:
        if _is_num(v) and math.isfinite(v):
            m = max(m, abs(float(v)))
    return m * m


def axiom_check(s: Semiring, samples: Iterable[tuple]) -> AxiomReport:
    """Check the semiring axioms (and the claimed flags) on every sampled triple."""
    plus, times, zero, one = s.plus, s.times, s.zero, s.one

    def same(x, y, sc):
        return x == y if s.exact else close(x, y, REL_TOL, ABS_FLOOR * sc)

    def leq(x, y, sc):
        return s.order_key(x) <= s.order_key(y) or same(x, y, sc)

    checked = 0
    for a, b, c in samples:
        for v in (a, b, c):
            if not s.contains(v):
                return AxiomReport(s.name, checked, f"sample {v!r} outside the domain")
        sc = _scale(a, b, c)
        laws = (
            ("associativity of +", plus(plus(a, b), c), plus(a, plus(b, c))),
            ("associativity of *", times(times(a, b), c), times(a, times(b, c))),
            ("commutativity of +", plus(a, b), plus(b, a)),
            ("commutativity of *", times(a, b), times(b, a)),
            ("distributivity", times(plus(a, b), c), plus(times(a, c), times(b, c))),
            ("additive identity", plus(zero, a), a),
            ("multiplicative identity", times(one, a), a),
            ("absorption", times(zero, a), zero),
        )
        for law, lhs, rhs in laws:
            if not same(lhs, rhs, sc):
                return AxiomReport(s.name, checked, f"{law} fails on {(a, b, c)!r}: {lhs!r} != {rhs!r}")
        if s.is_bipotent:
            ab = plus(a, b)
            if ab != a and ab != b:
                return AxiomReport(s.name, checked, f"bipotency fails on {(a, b)!r}")
        if s.is_positive:
            if plus(a, b) == zero and not (a == zero and b == zero):
                return AxiomReport(s.name, checked, f"additive zero decomposition {(a, b)!r}")
            if times(a, b) == zero and not (a == zero or b == zero):
                return AxiomReport(s.name, checked, f"zero divisors {(a, b)!r}")
        if s.is_positively_ordered:
            if not leq(zero, a, sc):
                return AxiomReport(s.name, checked, f"zero is not below {a!r}")
            lo, hi = (a, b) if leq(a, b, sc) else (b, a)
            if not leq(plus(lo, c), plus(hi, c), sc) or not leq(times(lo, c), times(hi, c), sc):
                return AxiomReport(s.name, checked, f"order not preserved on {(lo, hi, c)!r}")
        checked += 1
    return AxiomReport(s.name, checked)


def random_triples(s: Semiring, n: int, rng: random.Random) -> list:
    return [(s.sample(rng), s.sample(rng), s.sample(rng)) for _ in range(n)]
