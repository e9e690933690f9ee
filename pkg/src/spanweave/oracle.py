"""Brute-force references and seeded instance generators for the test suites."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .automaton import (DEFAULT_RUN_CAP, EPS, Builder, WeightedVSetAutomaton, close_, empty_automaton,
                        functionalize, open_, sym)
from .core import Document, KRelation, Span, VTuple
from .errors import FormatError, ParseError, ResourceError
from .semiring import COUNTING, Access, Semiring

SIGMA = "σ"


# ---------------------------------------------------------------- run oracle

def _decode_run(ops: Sequence[Tuple[tuple, int]], variables: Iterable[str]) -> Optional[VTuple]:
    opened: Dict[str, int] = {}
    closed: Dict[str, int] = {}
    for (kind, x), pos in ops:
        if kind == "open":
            if x in opened:
                return None
            opened[x] = pos
        else:
            if x not in opened or x in closed:
                return None
            closed[x] = pos
    if set(opened) != set(variables) or set(closed) != set(variables):
        return None
    return VTuple({x: Span(opened[x], closed[x]) for x in opened})


def oracle_relation(a: WeightedVSetAutomaton, d: Document, cap_runs: int = DEFAULT_RUN_CAP) -> KRelation:
    """Ground truth: enumerate every run explicitly, keep the valid ones, sum per tuple.

    Run prefixes that repeat an operation or close an unopened variable can
    never become valid and are cut, which also keeps operation cycles finite.
    """
    s = a.semiring
    by_source: Dict[int, List[Tuple[tuple, int, Any]]] = {}
    for (p, label, q), w in a.transitions.items():
        by_source.setdefault(p, []).append((label, q, w))
    n = len(d)
    totals: Dict[VTuple, Any] = {}
    decoded: Dict[tuple, Optional[VTuple]] = {}
    # configuration: state, letters read, operations so far (with positions), run weight
    stack = [(q, 0, (), w) for q, w in a.initial.items()]
    explored = 0
    while stack:
        q, i, ops, w = stack.pop()
        explored += 1
        if explored > cap_runs:
            raise ResourceError(f"oracle exceeded {cap_runs} run prefixes")
        if i == n and q in a.final:
            if ops not in decoded:
                decoded[ops] = _decode_run(ops, a.variables)
            t = decoded[ops]
            if t is not None:
                v = s.times(w, a.final[q])
                if not s.is_zero(v):
                    totals[t] = s.plus(totals[t], v) if t in totals else v
        for label, r, tw in by_source.get(q, ()):
            v = s.times(w, tw)
            if s.is_zero(v):
                continue
            kind, x = label
            if kind == "sym":
                if i < n and d[i] == x:
                    stack.append((r, i + 1, ops, v))
            elif label == EPS:
                stack.append((r, i, ops, v))
            else:
                done = [o for o, _ in ops]
                if label in done or (kind == "close" and ("open", x) not in done):
                    continue
                stack.append((r, i, ops + ((label, i + 1),), v))
    return KRelation(s, a.variables, totals)


def all_documents(alphabet: Iterable[str], max_len: int) -> List[str]:
    letters = sorted(alphabet)
    return ["".join(p) for n in range(max_len + 1) for p in itertools.product(letters, repeat=n)]


# ---------------------------------------------------------------- random instances

def random_weight(s: Semiring, rng: random.Random):
    """A random nonzero weight of a shape that keeps tests well conditioned."""
    name = s.name
    if name == "boolean":
        return True
    if name == "counting":
        return rng.randint(1, 3)
    if name == "tropical":
        return rng.randint(0, 5)
    if name == "viterbi":
        return rng.choice((1.0, 0.9, 0.8, 0.5, rng.uniform(0.1, 1.0)))
    if name == "access":
        return rng.choice((Access.P, Access.C, Access.S, Access.T))
    if name == "lukasiewicz":
        return rng.uniform(0.6, 1.0)
    if name == "probability":
        return rng.uniform(0.1, 2.0)
    if name == "log":
        return rng.uniform(-2.0, 2.0)
    if name == "real":
        return rng.choice((-1.0, 1.0)) * rng.uniform(0.2, 2.0)
    v = s.sample(rng)
    return s.one if s.is_zero(v) else v


def _status_chain(variables: Sequence[str], rng: random.Random) -> List[tuple]:
    """Statuses (0 waiting, 1 open, 2 closed) along one random valid operation order."""
    k = len(variables)
    status = [0] * k
    chain = [tuple(status)]
    pending = [(0, i) for i in range(k)]
    while pending:
        step, i = pending.pop(rng.randrange(len(pending)))
        status[i] = step + 1
        if step == 0:
            pending.append((1, i))
        chain.append(tuple(status))
    return chain


def random_automaton(seed: int, *, n_states: int = 4, variables: Sequence[str] = ("x",),
                     alphabet: Sequence[str] = ("a", "b"), semiring: Semiring = COUNTING,
                     letter_density: float = 0.35, op_density: float = 0.5, eps_edges: int = 0,
                     functional: bool = True, max_tries: int = 100) -> WeightedVSetAutomaton:
    """Reproducible random automaton with a nonempty trimmed core.

    With ``functional`` every state is given a variable status and edges only
    connect compatible statuses, so the result is functional by construction.
    A spine of 2|V|+1 states guarantees some valid run, so ``n_states`` is
    raised to that minimum when needed.
    Otherwise variable operations are sprinkled freely and runs may be invalid.
    Epsilon edges always point from lower to higher state ids (no cycles).
    """
    rng = random.Random(seed)
    variables = sorted(variables)
    if functional:
        n_states = max(n_states, 2 * len(variables) + 1)
    for _ in range(max_tries):
        a = _draw(rng, n_states, variables, alphabet, semiring, letter_density, op_density,
                  eps_edges, functional)
        if a.n_states > 0:
            return a
    return a


def _draw(rng, n_states, variables, alphabet, semiring, letter_density, op_density, eps_edges, functional):
    b = Builder(semiring, alphabet, variables, n_states)
    w = lambda: random_weight(semiring, rng)  # noqa: E731
    k = len(variables)
    status = None
    spine: List[int] = []
    if functional:
        # states 0..2k follow one valid operation order (the spine), the rest
        # take statuses from that order or from a second random one
        chains = [_status_chain(variables, rng) for _ in range(2)]
        palette = sorted({st for c in chains for st in c})
        status = chains[0] + [rng.choice(palette) for _ in range(n_states - len(chains[0]))]
        spine = list(range(len(chains[0])))
    # extra initial/final states must carry the all-waiting/all-closed status
    starts = [q for q in range(n_states) if status is None or status[q] == status[0]]
    ends = [q for q in range(n_states) if status is None or status[q] == status[spine[-1]]]
    b.set_initial(0, w())
    if rng.random() < 0.3:
        b.set_initial(rng.choice(starts), w())
    b.set_final(spine[-1] if spine else n_states - 1, w())
    if rng.random() < 0.4:
        b.set_final(rng.choice(ends), w())
    for p in range(n_states):
        for q in range(n_states):
            for a in alphabet:
                if rng.random() < letter_density and (status is None or status[p] == status[q]):
                    b.edge(p, sym(a), q, w())
    if status is None:
        for x in variables:
            for label in (open_(x), close_(x)):
                for _ in range(rng.randint(1, 2)):
                    b.edge(rng.randrange(n_states), label, rng.randrange(n_states), w())
    else:
        for p in range(n_states):
            for q in range(n_states):
                diff = [i for i in range(k) if status[p][i] != status[q][i]]
                if len(diff) != 1 or status[q][diff[0]] != status[p][diff[0]] + 1:
                    continue
                if (p + 1 == q and q in spine) or rng.random() < op_density:
                    x = variables[diff[0]]
                    b.edge(p, open_(x) if status[q][diff[0]] == 1 else close_(x), q, w())
    for _ in range(eps_edges):
        if n_states < 2:
            break
        p = rng.randrange(n_states - 1)
        q = rng.randrange(p + 1, n_states)
        if status is None or status[p] == status[q]:
            b.edge(p, EPS, q, w())
    return b.build(trim_result=True) if functional else _trim_nonempty(b)


def _trim_nonempty(b: Builder) -> WeightedVSetAutomaton:
    a = b.build()
    # a nonfunctional draw is only interesting if some valid run survives
    return a if functionalize(a).n_states else empty_automaton(b.semiring, b.alphabet, b.variables)


def random_language(seed: int, alphabet: Sequence[str] = ("a", "b"), n_states: int = 3) -> WeightedVSetAutomaton:
    """Random Boolean automaton without variables (a regular language)."""
    from .semiring import BOOLEAN

    rng = random.Random(seed)
    while True:
        b = Builder(BOOLEAN, alphabet, (), n_states)
        b.set_initial(0)
        for q in range(n_states):
            if rng.random() < 0.5:
                b.set_final(q)
            for a in alphabet:
                for r in range(n_states):
                    if rng.random() < 0.35:
                        b.edge(q, sym(a), r)
        a = b.build()
        if a.n_states:
            return a


def accepts(lang: WeightedVSetAutomaton, word: str) -> bool:
    """Membership by direct NFA simulation (variables are ignored)."""
    cur = set(lang.initial)
    for ch in word:
        cur = {q for (p, label, q) in lang.transitions if p in cur and label == ("sym", ch)}
    return any(q in lang.final for q in cur)


# ---------------------------------------------------------------- MAX-3SAT

@dataclass(frozen=True)
class CnfFormula:
    """3-CNF formula; literals are nonzero ints in DIMACS style (``-2`` is the negation of x2)."""

    n_vars: int
    clauses: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if len(c) != 3:
                raise FormatError(f"clause {c} does not have exactly 3 literals")
            if len({abs(l) for l in c}) != 3:
                raise FormatError(f"clause {c} repeats a variable")
            if any(l == 0 or abs(l) > self.n_vars for l in c):
                raise FormatError(f"clause {c} mentions a variable outside 1..{self.n_vars}")

    def satisfied(self, tau: Sequence[int]) -> int:
        return sum(any((tau[abs(l) - 1] == 1) == (l > 0) for l in c) for c in self.clauses)

    def satisfiable(self) -> bool:
        m = len(self.clauses)
        return any(self.satisfied(tau) == m for tau in itertools.product((0, 1), repeat=self.n_vars))


def sat_var(i: int) -> str:
    return f"x{i}"


def assignment_tuple(tau: Sequence[int]) -> VTuple:
    """x_i spans the empty <i,i> when false and <i,i+1> when true."""
    return VTuple({sat_var(i): (i, i + 1 if v else i) for i, v in enumerate(tau, start=1)})


def max3sat_automaton(f: CnfFormula, symbol: str = SIGMA, max_vars: int = 16,
                      max_clauses: int = 32) -> WeightedVSetAutomaton:
    """Counting automaton whose weight on assignment tuples is the number of satisfied clauses."""
    if f.n_vars > max_vars or len(f.clauses) > max_clauses:
        raise ResourceError(f"formula exceeds {max_vars} variables / {max_clauses} clauses")
    b = Builder(COUNTING, (symbol,), [sat_var(i) for i in range(1, f.n_vars + 1)])
    for clause in f.clauses:
        for bits in itertools.product((0, 1), repeat=3):
            if not any(bits):
                continue  # the one local valuation that falsifies the clause
            forced = {abs(l): (v if l > 0 else 1 - v) for l, v in zip(clause, bits)}
            cur = b.state()
            b.set_initial(cur)
            for j in range(1, f.n_vars + 1):
                x = sat_var(j)
                s2, s3, s4, s5 = b.state(), b.state(), b.state(), b.state()
                b.edge(cur, open_(x), s2)
                b.edge(s2, close_(x), s3)
                if forced.get(j, 1) == 1:
                    b.edge(s2, sym(symbol), s4)
                    b.edge(s4, close_(x), s5)
                if forced.get(j, 0) == 0:
                    b.edge(s3, sym(symbol), s5)
                cur = s5
            b.set_final(cur)
    return b.build()


def random_cnf(rng: random.Random, n_vars: int, n_clauses: int) -> CnfFormula:
    clauses = []
    for _ in range(n_clauses):
        vs = rng.sample(range(1, n_vars + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(n_vars, clauses)


def parse_dimacs(text: str) -> CnfFormula:
    n_vars = None
    lits: List[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad DIMACS header {line!r}")
            n_vars = int(parts[2])
            continue
        try:
            lits.extend(int(tok) for tok in line.split())
        except ValueError:
            raise ParseError(f"bad DIMACS clause line {line!r}") from None
    if n_vars is None:
        raise ParseError("missing 'p cnf' header")
    clauses, cur = [], []
    for l in lits:
        if l == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(l)
    if cur:
        clauses.append(tuple(cur))
    return CnfFormula(n_vars, clauses)


# ---------------------------------------------------------------- soft spanners

def brute_force_soft_scores(base: WeightedVSetAutomaton, factors: Sequence[Tuple[WeightedVSetAutomaton, float]],
                            d: Document, cap_runs: int = DEFAULT_RUN_CAP) -> Dict[VTuple, float]:
    """Unnormalized score of each base tuple: the product over factors of exp(w * matches)."""
    base_rel = oracle_relation(base, d, cap_runs)
    factor_rels = [(oracle_relation(s, d, cap_runs), w) for s, w in factors]
    scores = {}
    for t in base_rel:
        log_score = 0.0
        for rel, w in factor_rels:
            matches = sum(1 for u in rel if t.compatible(u))
            log_score += w * matches
        scores[t] = math.exp(log_score)
    return scores


# ---------------------------------------------------------------- delay instance

def delay_instance(seed: int, n_states: int = 50, alphabet: Sequence[str] = ("a", "b"),
                   semiring: Semiring = None) -> WeightedVSetAutomaton:
    """Functional one-variable automaton with three strongly connected blocks (before, inside, after x).

    Every state is useful, so the trimmed automaton keeps all ``n_states`` states.
    """
    from .semiring import VITERBI

    semiring = semiring or VITERBI
    rng = random.Random(seed)
    third = n_states // 3
    blocks = [range(0, third), range(third, 2 * third), range(2 * third, n_states)]
    b = Builder(semiring, alphabet, ("x",), n_states)
    w = lambda: random_weight(semiring, rng)  # noqa: E731
    for block in blocks:
        states = list(block)
        for k, q in enumerate(states):
            b.edge(q, sym(alphabet[0]), states[(k + 1) % len(states)], w())
            for a in alphabet:
                b.edge(q, sym(a), rng.choice(states), w())
    for src, dst, op in ((blocks[0], blocks[1], open_("x")), (blocks[1], blocks[2], close_("x"))):
        for q in src:
            if q == src[-1] or rng.random() < 0.3:
                b.edge(q, op, rng.choice(list(dst)), w())
    b.set_initial(0)
    for q in blocks[2]:
        if q == blocks[2][-1] or rng.random() < 0.2:
            b.set_final(q, w())
    return b.build()
