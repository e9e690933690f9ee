"""The worked example: the president/birthplace document and its extractors.

``pair_extractor`` builds the Viterbi extractor for (person, location) pairs
that discounts every word skipped between the two spans by 0.9.
``gap_soft_spanner`` expresses the same preference as a soft spanner whose
single factor counts the words in between.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .automaton import Builder, WeightedVSetAutomaton, close_, open_, sym
from .core import KRelation, VTuple
from .semiring import BOOLEAN, VITERBI, Semiring

DOCUMENT = "Carter from Plains, Georgia, Washington from Westmoreland, Virginia"
PERSONS = ("Carter", "Washington")
LOCATIONS = ("Plains, Georgia", "Georgia, Washington", "Westmoreland, Virginia")
SPACE = " "
SKIP_WEIGHT = 0.9

EXPECTED_ROWS = (
    ({"x_pers": (1, 7), "x_loc": (13, 28)}, 0.9),
    ({"x_pers": (30, 40), "x_loc": (46, 68)}, 0.9),
    ({"x_pers": (1, 7), "x_loc": (21, 40)}, 0.81),
    ({"x_pers": (1, 7), "x_loc": (46, 68)}, 0.59049),
)


def expected_relation() -> KRelation:
    return KRelation(VITERBI, ("x_pers", "x_loc"), [(VTuple(t), w) for t, w in EXPECTED_ROWS])


def _trie(b: Builder, start: int, end: int, words: Iterable[str]) -> None:
    """Deterministic trie from ``start`` accepting exactly ``words`` into ``end``."""
    children: dict = {}
    for word in words:
        node = start
        for i, ch in enumerate(word):
            if i == len(word) - 1:
                b.edge(node, sym(ch), end)
                break
            key = (node, ch)
            if key not in children:
                children[key] = b.state()
                b.edge(node, sym(ch), children[key])
            node = children[key]


def _word_loop(b: Builder, hub: int, letters: Iterable[str], back_weight=None) -> None:
    """hub -non-space-> inner, inner -non-space-> inner, inner -space-> hub."""
    inner = b.state()
    for a in letters:
        b.edge(hub, sym(a), inner)
        b.edge(inner, sym(a), inner)
    b.edge(inner, sym(SPACE), hub, back_weight)


def pair_extractor(semiring: Semiring = VITERBI, skip_weight=None, alphabet: Optional[Iterable[str]] = None,
                   document: str = DOCUMENT) -> WeightedVSetAutomaton:
    """Person/location extractor.  Over a semiring other than Viterbi pass ``skip_weight``."""
    if skip_weight is None:
        skip_weight = SKIP_WEIGHT if semiring is VITERBI else semiring.one
    sigma = sorted(set(alphabet) if alphabet is not None else set(document) | {SPACE, ","})
    letters = [a for a in sigma if a != SPACE]
    b = Builder(semiring, sigma, ("x_pers", "x_loc"))
    q = [b.state() for _ in range(11)]
    b.set_initial(q[0])
    _word_loop(b, q[0], letters)
    b.edge(q[0], open_("x_pers"), q[2])
    _trie(b, q[2], q[3], PERSONS)
    b.edge(q[3], close_("x_pers"), q[4])
    b.edge(q[4], sym(SPACE), q[5])
    _word_loop(b, q[5], letters, skip_weight)
    b.edge(q[5], open_("x_loc"), q[7])
    _trie(b, q[7], q[8], LOCATIONS)
    b.edge(q[8], close_("x_loc"), q[9])
    b.set_final(q[9])
    # A location may be followed by a comma as well as by a space.
    b.edge(q[9], sym(SPACE), q[10])
    b.edge(q[9], sym(","), q[10])
    for a in sigma:
        b.edge(q[10], sym(a), q[10])
    b.set_final(q[10])
    return b.build()


def gap_word_factor(alphabet: Optional[Iterable[str]] = None, document: str = DOCUMENT) -> WeightedVSetAutomaton:
    """Boolean extractor of (x_pers, y, x_loc) with y a whole word strictly between the two spans.

    x_pers is one word, x_loc starts at a word boundary and may contain spaces.
    """
    sigma = sorted(set(alphabet) if alphabet is not None else set(document) | {SPACE, ","})
    letters = [a for a in sigma if a != SPACE]
    b = Builder(BOOLEAN, sigma, ("x_pers", "y", "x_loc"))
    q = [b.state() for _ in range(17)]
    b.set_initial(q[0])
    _word_loop(b, q[0], letters)
    b.edge(q[0], open_("x_pers"), q[1])
    for a in letters:
        b.edge(q[1], sym(a), q[2])
        b.edge(q[2], sym(a), q[2])
    b.edge(q[2], close_("x_pers"), q[3])
    b.edge(q[3], sym(SPACE), q[4])
    _word_loop(b, q[4], letters)
    b.edge(q[4], open_("y"), q[5])
    for a in letters:
        b.edge(q[5], sym(a), q[6])
        b.edge(q[6], sym(a), q[6])
    b.edge(q[6], close_("y"), q[7])
    b.edge(q[7], sym(SPACE), q[8])
    _word_loop(b, q[8], letters)
    b.edge(q[8], open_("x_loc"), q[9])
    for a in letters:
        b.edge(q[9], sym(a), q[10])
    for a in sigma:
        b.edge(q[10], sym(a), q[10])
    b.edge(q[10], close_("x_loc"), q[11])
    b.set_final(q[11])
    for a in sigma:
        b.edge(q[11], sym(a), q[12])
        b.edge(q[12], sym(a), q[12])
    b.set_final(q[12])
    return b.build()


def gap_soft_spanner():
    from .softspanner import SoftSpanner

    return SoftSpanner(pair_extractor(BOOLEAN), [(gap_word_factor(), math.log(SKIP_WEIGHT))])


def fixture_files() -> dict:
    """Contents of the shipped data files, as the builders above produce them."""
    from .serialize import dumps

    return {
        "presidents.txt": DOCUMENT,
        "pair_extractor.json": dumps(pair_extractor().to_json()) + "\n",
        "pair_extractor_boolean.json": dumps(pair_extractor(BOOLEAN).to_json()) + "\n",
        "gap_word_factor.json": dumps(gap_word_factor().to_json()) + "\n",
        "gap_soft_spanner.json": dumps({"base": "pair_extractor_boolean.json",
                                 "factors": [{"spanner": "gap_word_factor.json", "weight": math.log(SKIP_WEIGHT)}]}) + "\n",
    }


def data_path(name: str) -> str:
    import os

    return os.path.join(os.path.dirname(__file__), "data", name)
