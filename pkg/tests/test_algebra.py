import pytest

from spanweave.algebra import (RecognizableRelation, auto_join, auto_project, auto_union, b_projection,
                               b_unambiguous_join, k_extension, string_select, universal_language,
                               word_language)
from spanweave.automaton import Builder, close_, empty_automaton, open_, reweight, sym, universal_automaton
from spanweave.core import KRelation, VTuple, krel_join, krel_project, krel_select, krel_union
from spanweave.errors import AmbiguityError, FormatError, SchemaError
from spanweave.fixtures import DOCUMENT, expected_relation, pair_extractor
from spanweave.oracle import accepts, all_documents, oracle_relation, random_automaton, random_language
from spanweave.semiring import BOOLEAN, COUNTING, TROPICAL, VITERBI
from spanweave.suites import reorder_pair

DOCS = all_documents("ab", 3)


def single(semiring, var, weight, letter="a"):
    b = Builder(semiring, "ab", (var,), 4)
    b.set_initial(0)
    b.edge(0, open_(var), 1, weight)
    b.edge(1, sym(letter), 2)
    b.edge(2, close_(var), 3)
    b.set_final(3)
    return b.build()


def test_union_with_empty_is_identity():
    a = pair_extractor()
    u = auto_union(a, empty_automaton(VITERBI, a.alphabet, a.variables))
    assert oracle_relation(u, DOCUMENT).close_to(expected_relation())


def test_union_of_copies_doubles_counts():
    a = single(COUNTING, "x", 1)
    assert oracle_relation(auto_union(a, a), "a")[VTuple({"x": (1, 2)})] == 2


def test_union_schema_mismatch():
    with pytest.raises(SchemaError):
        auto_union(single(COUNTING, "x", 1), single(COUNTING, "y", 1))
    with pytest.raises(SchemaError):
        auto_union(single(COUNTING, "x", 1), single(TROPICAL, "x", 1))


def test_project_extractor_to_person():
    p = auto_project(pair_extractor(), ["x_pers"])
    want = KRelation(VITERBI, ["x_pers"], {VTuple({"x_pers": (1, 7)}): 0.9, VTuple({"x_pers": (30, 40)}): 0.9})
    assert oracle_relation(p, DOCUMENT).close_to(want)
    assert oracle_relation(auto_project(pair_extractor(), ["x_pers", "x_loc"]), DOCUMENT).close_to(
        expected_relation())


def test_join_with_universal_is_identity():
    a = pair_extractor()
    j = auto_join(a, universal_automaton(VITERBI, a.alphabet))
    assert oracle_relation(j, DOCUMENT).close_to(expected_relation())


def test_join_disjoint_single_tuples():
    j = auto_join(single(VITERBI, "x", 0.9), single(VITERBI, "y", 0.9))
    rel = oracle_relation(j, "a")
    assert list(rel.items()) == [(VTuple({"x": (1, 2), "y": (1, 2)}), pytest.approx(0.81))]


@pytest.mark.parametrize("semiring", [COUNTING, VITERBI, TROPICAL, BOOLEAN], ids=lambda s: s.name)
def test_join_reordered_operations(semiring):
    a1, a2 = reorder_pair(semiring)
    j = auto_join(a1, a2)
    for d in ("a", "aa", "ab"):
        want = krel_join(oracle_relation(a1, d), oracle_relation(a2, d))
        assert oracle_relation(j, d) == want
    assert len(oracle_relation(j, "a")) == 1


@pytest.mark.parametrize("seed", range(8))
def test_random_homomorphisms(seed):
    s = (COUNTING, VITERBI, TROPICAL, BOOLEAN)[seed % 4]
    a1 = random_automaton(2 * seed, n_states=4, variables=["x"], semiring=s)
    a1b = random_automaton(2 * seed + 1, n_states=4, variables=["x"], semiring=s)
    a2 = random_automaton(100 + seed, n_states=5, variables=["x", "y"], semiring=s)
    u, j, p = auto_union(a1, a1b), auto_join(a1, a2), auto_project(a2, ["y"])
    for d in DOCS:
        r1, r1b, r2 = oracle_relation(a1, d), oracle_relation(a1b, d), oracle_relation(a2, d)
        assert oracle_relation(u, d).close_to(krel_union(r1, r1b))
        assert oracle_relation(j, d).close_to(krel_join(r1, r2))
        assert oracle_relation(p, d).close_to(krel_project(r2, ["y"]))


def _ambiguous():
    b = Builder(BOOLEAN, "ab", "x", 5)
    b.set_initial(0)
    b.edge(0, open_("x"), 1)
    b.edge(0, open_("x"), 2)
    b.edge(1, sym("a"), 3)
    b.edge(2, sym("a"), 3)
    b.edge(3, close_("x"), 4)
    b.set_final(4)
    return b.build()


def test_k_extension_counts_each_tuple_once():
    amb = _ambiguous()
    t = VTuple({"x": (1, 2)})
    assert oracle_relation(reweight(amb, COUNTING, lambda w: 1), "a")[t] == 2
    assert oracle_relation(k_extension(amb, COUNTING), "a")[t] == 1


def test_k_extension_of_deterministic_input():
    a = single(BOOLEAN, "x", True)
    k = k_extension(a, VITERBI)
    assert oracle_relation(k, "a") == KRelation(VITERBI, "x", {VTuple({"x": (1, 2)}): 1.0})


@pytest.mark.parametrize("seed", range(6))
def test_k_extension_random(seed):
    a = random_automaton(seed, n_states=5, variables=["x"], semiring=BOOLEAN)
    k = k_extension(a, COUNTING)
    for d in DOCS:
        rel = oracle_relation(k, d)
        assert rel.support == oracle_relation(a, d).support
        assert all(w == 1 for _, w in rel.items())


def test_b_unambiguous_join():
    x = single(BOOLEAN, "x", True)
    y = single(BOOLEAN, "y", True)
    j = b_unambiguous_join(x, y)
    assert oracle_relation(j, "a").support == {VTuple({"x": (1, 2), "y": (1, 2)})}
    with pytest.raises(AmbiguityError):
        b_unambiguous_join(_ambiguous(), universal_automaton(BOOLEAN, "ab"))


def test_b_unambiguous_join_with_extractor_skeleton():
    base = pair_extractor(BOOLEAN)
    words = k_extension(auto_project(base, ["x_pers"]), BOOLEAN)
    j = b_unambiguous_join(base, words)
    counts = oracle_relation(reweight(j, COUNTING, lambda w: 1), DOCUMENT)
    assert len(counts) == 4 and all(w == 1 for _, w in counts.items())


def test_b_projection():
    b = b_projection(pair_extractor())
    assert b.semiring is BOOLEAN
    assert oracle_relation(b, DOCUMENT).support == expected_relation().support
    assert len(oracle_relation(b_projection(empty_automaton(VITERBI, "ab", "x")), "a")) == 0
    a = random_automaton(3, n_states=5, variables=["x"], semiring=COUNTING)
    for d in DOCS:
        assert oracle_relation(b_projection(a), d).support == oracle_relation(a, d).support


def test_select_always_true():
    a = pair_extractor()
    sigma = universal_language(a.alphabet)
    sel = string_select(a, RecognizableRelation(2, [[sigma, sigma]]), ["x_pers", "x_loc"])
    assert oracle_relation(sel, DOCUMENT).close_to(expected_relation())


def test_select_carter():
    a = pair_extractor()
    rel = RecognizableRelation(2, [[word_language("Carter", a.alphabet), universal_language(a.alphabet)]])
    got = oracle_relation(string_select(a, rel, ["x_pers", "x_loc"]), DOCUMENT)
    want = krel_select(expected_relation(), lambda t: t.span("x_pers").text(DOCUMENT) == "Carter")
    assert got.close_to(want) and len(got) == 3


@pytest.mark.parametrize("seed", range(6))
def test_select_random_language(seed):
    a = random_automaton(seed, n_states=5, variables=["x"], semiring=COUNTING)
    lang = random_language(seed)
    sel = string_select(a, RecognizableRelation(1, [[lang]]), ["x"])
    for d in DOCS:
        want = krel_select(oracle_relation(a, d), lambda t: accepts(lang, t.span("x").text(d)))
        assert oracle_relation(sel, d) == want


def test_select_errors():
    a = pair_extractor()
    with pytest.raises(FormatError):
        string_select(a, RecognizableRelation(1, [[universal_language(a.alphabet)]]), ["x_pers", "x_loc"])
    with pytest.raises(SchemaError):
        string_select(a, RecognizableRelation(1, [[universal_language(a.alphabet)]]), ["zz"])
    with pytest.raises(FormatError):
        RecognizableRelation(1, [[a]])
