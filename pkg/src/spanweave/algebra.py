"""Union, projection, join and string selection on automata, plus the
semiring-changing B-projection and K-extension."""

from __future__ import annotations

from collections import deque
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from .automaton import (DEFAULT_VAR_CAP, EPS, LETTER, VARIABLE, Builder, ExtendedVSetAutomaton,
                        WeightedVSetAutomaton, check_functional, close_, eliminate_epsilon,
                        from_extended, open_, reweight, sym, to_extended, trim_extended)
from .errors import AmbiguityError, CapabilityError, FormatError, ResourceError, SchemaError
from .semiring import BOOLEAN, COUNTING, Semiring

DEFAULT_DET_CAP = 2**16


def _same_schema(a1: WeightedVSetAutomaton, a2: WeightedVSetAutomaton) -> None:
    if a1.semiring is not a2.semiring:
        raise SchemaError(f"semiring mismatch: {a1.semiring.name} vs {a2.semiring.name}")
    if a1.alphabet != a2.alphabet:
        raise SchemaError("alphabet mismatch")


def ensure_functional(a: WeightedVSetAutomaton) -> WeightedVSetAutomaton:
    from .automaton import functionalize

    return a if check_functional(a) else functionalize(a)


def auto_union(a1: WeightedVSetAutomaton, a2: WeightedVSetAutomaton) -> WeightedVSetAutomaton:
    _same_schema(a1, a2)
    if a1.variables != a2.variables:
        raise SchemaError(f"variable sets differ: {sorted(a1.variables)} vs {sorted(a2.variables)}")
    off = a1.n_states
    b = Builder(a1.semiring, a1.alphabet, a1.variables, a1.n_states + a2.n_states)
    for shift, a in ((0, a1), (off, a2)):
        for q, w in a.initial.items():
            b.set_initial(q + shift, w)
        for q, w in a.final.items():
            b.set_final(q + shift, w)
        for (p, l, q), w in a.transitions.items():
            b.edge(p + shift, l, q + shift, w)
    return b.build()


def auto_project(a: WeightedVSetAutomaton, x: Iterable[str]) -> WeightedVSetAutomaton:
    x = frozenset(x)
    if not x <= a.variables:
        raise SchemaError(f"cannot project onto {sorted(x)}: not a subset of {sorted(a.variables)}")
    a = ensure_functional(a)
    b = Builder(a.semiring, a.alphabet, x, a.n_states)
    for q, w in a.initial.items():
        b.set_initial(q, w)
    for q, w in a.final.items():
        b.set_final(q, w)
    for (p, label, q), w in a.transitions.items():
        if label[0] in ("open", "close") and label[1] not in x:
            label = EPS
        b.edge(p, label, q, w)
    return eliminate_epsilon(b.build())


def extended_join(e1: ExtendedVSetAutomaton, e2: ExtendedVSetAutomaton) -> ExtendedVSetAutomaton:
    """Product of extended automata; operation sets must agree on shared variables."""
    s = e1.semiring
    shared = e1.variables & e2.variables
    ids: Dict[Tuple[int, int], int] = {}
    kinds: List[str] = []
    queue: deque = deque()

    def node(p1: int, p2: int) -> int:
        key = (p1, p2)
        if key not in ids:
            ids[key] = len(kinds)
            kinds.append(e1.kinds[p1])
            queue.append(key)
        return ids[key]

    initial: Dict[int, Any] = {}
    for q1, w1 in sorted(e1.initial.items()):
        for q2, w2 in sorted(e2.initial.items()):
            w = s.times(w1, w2)
            if not s.is_zero(w):
                initial[node(q1, q2)] = w
    final: Dict[int, Any] = {}
    letters: Dict[Tuple[int, str, int], Any] = {}
    sets: Dict[Tuple[int, frozenset, int], Any] = {}
    while queue:
        p1, p2 = queue.popleft()
        me = ids[(p1, p2)]
        if e1.kinds[p1] == LETTER:
            if p1 in e1.final and p2 in e2.final:
                w = s.times(e1.final[p1], e2.final[p2])
                if not s.is_zero(w):
                    final[me] = w
            out2 = e2.letter_out[p2]
            for a, succ1 in e1.letter_out[p1].items():
                for q2, w2 in out2.get(a, ()):
                    for q1, w1 in succ1:
                        w = s.times(w1, w2)
                        if not s.is_zero(w):
                            letters[(me, a, node(q1, q2))] = w
        else:
            for t1, q1, w1 in e1.set_out[p1]:
                own1 = frozenset(o for o in t1 if o[1] in shared)
                for t2, q2, w2 in e2.set_out[p2]:
                    if frozenset(o for o in t2 if o[1] in shared) != own1:
                        continue
                    w = s.times(w1, w2)
                    if not s.is_zero(w):
                        sets[(me, frozenset(t1) | frozenset(t2), node(q1, q2))] = w
    e = ExtendedVSetAutomaton(s, e1.alphabet | e2.alphabet, e1.variables | e2.variables, kinds,
                              initial, final, letters, sets)
    return trim_extended(e)


def auto_join(a1: WeightedVSetAutomaton, a2: WeightedVSetAutomaton) -> WeightedVSetAutomaton:
    _same_schema(a1, a2)
    e1 = to_extended(ensure_functional(a1))
    e2 = to_extended(ensure_functional(a2))
    return from_extended(extended_join(e1, e2))


def _all_weights_one(a: WeightedVSetAutomaton) -> bool:
    tables = (a.initial.values(), a.final.values(), a.transitions.values())
    return all(w == 1 for table in tables for w in table)


def _extended_weights_one(e: ExtendedVSetAutomaton) -> bool:
    tables = (e.initial.values(), e.final.values(), e.letter_transitions.values(), e.set_transitions.values())
    return all(w == 1 for table in tables for w in table)


def _self_product_diagonal(e: ExtendedVSetAutomaton) -> bool:
    """In an automaton without useless states, an off-diagonal useful pair of the
    self product means two distinct runs with the same label sequence."""
    prod = extended_join(e, e)
    return len(prod.kinds) == e.n_states


def b_unambiguous_join(a1: WeightedVSetAutomaton, a2: WeightedVSetAutomaton) -> WeightedVSetAutomaton:
    """Join of unambiguous functional Boolean automata, staying unambiguous.

    The inputs are reinterpreted over the counting semiring; the join is
    unambiguous iff every state pair has one run, which is checked by all
    weights being 1 and by the self product having only diagonal states.
    """
    for a in (a1, a2):
        if a.semiring is not BOOLEAN:
            raise SchemaError("b_unambiguous_join expects Boolean automata")
    _same_schema(a1, a2)
    c1 = reweight(ensure_functional(a1), COUNTING, lambda w: 1)
    c2 = reweight(ensure_functional(a2), COUNTING, lambda w: 1)
    e = extended_join(to_extended(c1), to_extended(c2))
    if not _extended_weights_one(e) or not _self_product_diagonal(e):
        raise AmbiguityError("join is ambiguous: some tuple has more than one run")
    joined = from_extended(e)
    if not _all_weights_one(joined):
        raise AmbiguityError("join is ambiguous: some tuple has more than one run")
    return reweight(joined, BOOLEAN, lambda w: True)


def b_projection(a: WeightedVSetAutomaton) -> WeightedVSetAutomaton:
    if not a.semiring.is_positive:
        raise CapabilityError(f"B-projection needs a positive semiring; {a.semiring.name} is not")
    return reweight(a, BOOLEAN, lambda w: True)


def _determinize_extended(e: ExtendedVSetAutomaton, cap: int) -> ExtendedVSetAutomaton:
    """Subset construction on a Boolean extended automaton."""
    start = frozenset(e.initial)
    ids = {start: 0}
    kinds = [VARIABLE]
    queue = deque([start])
    letters, sets, final = {}, {}, {}

    def node(subset: frozenset, kind: str) -> int:
        if subset not in ids:
            if len(ids) >= cap:
                raise ResourceError(f"determinization exceeded {cap} states")
            ids[subset] = len(kinds)
            kinds.append(kind)
            queue.append(subset)
        return ids[subset]

    if not start:
        return ExtendedVSetAutomaton(BOOLEAN, e.alphabet, e.variables, [], {}, {}, {}, {})
    while queue:
        subset = queue.popleft()
        me = ids[subset]
        if kinds[me] == LETTER:
            if any(q in e.final for q in subset):
                final[me] = True
            moves: Dict[str, set] = {}
            for p in subset:
                for a, succ in e.letter_out[p].items():
                    moves.setdefault(a, set()).update(q for q, _ in succ)
            for a in sorted(moves):
                letters[(me, a, node(frozenset(moves[a]), VARIABLE))] = True
        else:
            moves2: Dict[frozenset, set] = {}
            for p in subset:
                for t, q, _ in e.set_out[p]:
                    moves2.setdefault(frozenset(t), set()).add(q)
            for t in sorted(moves2, key=lambda t: sorted(t)):
                sets[(me, t, node(frozenset(moves2[t]), LETTER))] = True
    return ExtendedVSetAutomaton(BOOLEAN, e.alphabet, e.variables, kinds, {0: True}, final, letters, sets)


def k_extension(a: WeightedVSetAutomaton, semiring: Semiring, cap: int = DEFAULT_DET_CAP) -> WeightedVSetAutomaton:
    """Weight-one automaton over ``semiring`` with one run per tuple of the Boolean input."""
    if a.semiring is not BOOLEAN:
        raise SchemaError("k_extension expects a Boolean automaton")
    e = to_extended(ensure_functional(a))
    det = trim_extended(_determinize_extended(e, cap))
    one = semiring.one
    lifted = ExtendedVSetAutomaton(
        semiring, det.alphabet, det.variables, det.kinds,
        {q: one for q in det.initial}, {q: one for q in det.final},
        {k: one for k in det.letter_transitions}, {k: one for k in det.set_transitions},
    )
    return from_extended(lifted)


class RecognizableRelation:
    """Finite union of Cartesian products of regular languages.

    Each component is a Boolean automaton without variables.
    """

    def __init__(self, arity: int, products: Sequence[Sequence[WeightedVSetAutomaton]]):
        self.arity = arity
        self.products = [list(p) for p in products]
        for p in self.products:
            if len(p) != arity:
                raise FormatError(f"product of length {len(p)} in a relation of arity {arity}")
            for lang in p:
                if not isinstance(lang, WeightedVSetAutomaton):
                    raise FormatError("relation components must be automata")
                if lang.semiring is not BOOLEAN or lang.variables:
                    raise FormatError("relation components must be Boolean automata without variables")


def _gadget(lang: WeightedVSetAutomaton, x: str, alphabet: frozenset) -> WeightedVSetAutomaton:
    """Boolean automaton for: anything, open x, a word of ``lang``, close x, anything."""
    n = lang.n_states
    b = Builder(BOOLEAN, alphabet, (x,), n + 2)
    pre, post = n, n + 1
    b.set_initial(pre)
    b.set_final(post)
    for a in alphabet:
        b.edge(pre, sym(a), pre)
        b.edge(post, sym(a), post)
    for q in lang.initial:
        b.edge(pre, open_(x), q)
    for q in lang.final:
        b.edge(q, close_(x), post)
    for (p, label, q), _ in lang.transitions.items():
        if label[0] == "sym" and label[1] in alphabet:
            b.edge(p, label, q)
        elif label == EPS:
            b.edge(p, EPS, q)
    return eliminate_epsilon(b.build())


def selector_automaton(rel: RecognizableRelation, variables: Sequence[str], alphabet: Iterable[str]) -> WeightedVSetAutomaton:
    """Boolean automaton over ``variables`` accepting exactly the tuples whose spans form a word of ``rel``."""
    alphabet = frozenset(alphabet)
    if len(variables) != rel.arity:
        raise FormatError(f"relation has arity {rel.arity} but {len(variables)} variables were given")
    if len(set(variables)) != len(variables):
        raise FormatError("selection variables must be distinct")
    result = None
    for product in rel.products:
        acc = None
        for lang, x in zip(product, variables):
            g = _gadget(lang, x, alphabet)
            acc = g if acc is None else auto_join(acc, g)
        if result is None:
            result = acc
        elif acc is not None:
            result = auto_union(result, acc)
    if result is None:
        return Builder(BOOLEAN, alphabet, variables).build()
    return result


def string_select(a: WeightedVSetAutomaton, rel: RecognizableRelation, variables: Sequence[str],
                  cap: int = DEFAULT_DET_CAP) -> WeightedVSetAutomaton:
    if not isinstance(rel, RecognizableRelation):
        raise FormatError("string selection needs a relation in recognizable (union of products) form")
    if not set(variables) <= a.variables:
        raise SchemaError(f"selection variables {list(variables)} are not all in {sorted(a.variables)}")
    selector = selector_automaton(rel, variables, a.alphabet)
    return auto_join(a, k_extension(selector, a.semiring, cap))


def universal_language(alphabet: Iterable[str]) -> WeightedVSetAutomaton:
    """Boolean automaton for all words."""
    from .automaton import universal_automaton

    return universal_automaton(BOOLEAN, alphabet)


def word_language(word: str, alphabet: Iterable[str]) -> WeightedVSetAutomaton:
    """Boolean automaton accepting exactly ``word``."""
    b = Builder(BOOLEAN, alphabet, (), len(word) + 1)
    b.set_initial(0)
    b.set_final(len(word))
    for i, ch in enumerate(word):
        b.edge(i, sym(ch), i + 1)
    return b.build()
