import pytest

from spanweave.automaton import Builder, close_, empty_automaton, open_, sym
from spanweave.core import KRelation, VTuple
from spanweave.errors import CapabilityError, ResourceError
from spanweave.enumeration import enumerate_ranked, enumerate_support, top_k
from spanweave.evaluation import max_tuple
from spanweave.fixtures import DOCUMENT, expected_relation, pair_extractor
from spanweave.oracle import all_documents, oracle_relation, random_automaton
from spanweave.semiring import COUNTING, REAL, TROPICAL, VITERBI

EXTRACTOR = pair_extractor()


def test_support_worked_example():
    rows = list(enumerate_support(EXTRACTOR, DOCUMENT))
    assert len(rows) == 4
    assert KRelation(VITERBI, EXTRACTOR.variables, rows).close_to(expected_relation())


def test_empty_streams():
    e = empty_automaton(VITERBI, "ab", "x")
    assert list(enumerate_support(e, "ab")) == []
    assert list(enumerate_ranked(e, "ab")) == []


@pytest.mark.parametrize("seed", range(12))
def test_support_matches_oracle(seed):
    s = (COUNTING, VITERBI, TROPICAL)[seed % 3]
    a = random_automaton(seed, n_states=5, variables=["x", "y"][: seed % 3], semiring=s)
    for d in all_documents("ab", 3):
        rows = list(enumerate_support(a, d))
        assert len({t for t, _ in rows}) == len(rows)
        assert KRelation(s, a.variables, rows) == oracle_relation(a, d)


def test_support_requires_positive():
    b = Builder(REAL, "a", (), 2)
    b.set_initial(0)
    b.edge(0, sym("a"), 1, 2.0)
    b.set_final(1)
    a = b.build()
    with pytest.raises(CapabilityError):
        list(enumerate_support(a, "a"))
    assert list(enumerate_support(a, "a", force=True)) == [(VTuple(), 2.0)]
    with pytest.raises(ResourceError):
        list(enumerate_support(a, "a", force=True, cap=1))


def test_ranked_worked_example():
    weights = [w for _, w in enumerate_ranked(EXTRACTOR, DOCUMENT)]
    assert weights == pytest.approx([0.9, 0.9, 0.81, 0.59049], abs=1e-12)


def test_ranked_single_tuple():
    b = Builder(VITERBI, "a", "x", 4)
    b.set_initial(0)
    b.edge(0, open_("x"), 1, 0.5)
    b.edge(1, sym("a"), 2)
    b.edge(2, close_("x"), 3)
    b.set_final(3)
    assert list(enumerate_ranked(b.build(), "a")) == [(VTuple({"x": (1, 2)}), 0.5)]


@pytest.mark.parametrize("seed", range(12))
def test_ranked_random(seed):
    a = random_automaton(seed, n_states=6, variables=["x", "y"][: seed % 3], semiring=VITERBI)
    for d in all_documents("ab", 4):
        ranked = list(enumerate_ranked(a, d))
        weights = [w for _, w in ranked]
        assert all(weights[i + 1] <= weights[i] * (1 + 1e-12) for i in range(len(weights) - 1))
        assert KRelation(VITERBI, a.variables, ranked).close_to(KRelation(VITERBI, a.variables,
                                                                          list(enumerate_support(a, d))))
        best = max_tuple(a, d)
        assert (best is None) == (not ranked)
        if ranked:
            assert best.weight == pytest.approx(weights[0])


@pytest.mark.parametrize("seed", range(6))
def test_ranked_tropical(seed):
    a = random_automaton(seed, n_states=5, variables=["x"], semiring=TROPICAL)
    for d in all_documents("ab", 3):
        weights = [w for _, w in enumerate_ranked(a, d)]
        assert weights == sorted(weights)
        assert sorted(weights) == sorted(w for _, w in oracle_relation(a, d).items())


def test_ranked_needs_bipotent():
    with pytest.raises(CapabilityError):
        list(enumerate_ranked(random_automaton(0, semiring=COUNTING), "a"))


def test_top_k():
    assert top_k(EXTRACTOR, DOCUMENT, 0) == []
    (t, w), = top_k(EXTRACTOR, DOCUMENT, 1)
    assert w == pytest.approx(0.9)
    assert len(top_k(EXTRACTOR, DOCUMENT, 10)) == 4
    with pytest.raises(ValueError):
        top_k(EXTRACTOR, DOCUMENT, -1)
