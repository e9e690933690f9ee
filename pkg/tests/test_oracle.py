import itertools
import random

import pytest

from spanweave.automaton import Builder, check_functional, open_, sym
from spanweave.errors import FormatError, ParseError, ResourceError
from spanweave.evaluation import answer_test, threshold
from spanweave.fixtures import DOCUMENT, expected_relation, pair_extractor
from spanweave.oracle import (CnfFormula, accepts, all_documents, assignment_tuple, delay_instance,
                              max3sat_automaton, oracle_relation, parse_dimacs, random_automaton, random_cnf,
                              random_language)
from spanweave.semiring import COUNTING, VITERBI


def test_oracle_worked_example():
    assert oracle_relation(pair_extractor(), DOCUMENT).close_to(expected_relation(), 1e-12)


def test_oracle_empty_document_without_ops_path():
    b = Builder(COUNTING, "ab", "x", 3)
    b.set_initial(0)
    b.edge(0, sym("a"), 1)
    b.edge(1, open_("x"), 2)
    b.set_final(2)
    assert len(oracle_relation(b.build(trim_result=False), "")) == 0


def test_oracle_cap():
    a = random_automaton(0, n_states=6, variables=["x"], letter_density=1.0)
    with pytest.raises(ResourceError):
        oracle_relation(a, "abababab", cap_runs=100)


def test_worked_reduction_example():
    f = CnfFormula(4, [(1, -2, 4), (2, 3, 4)])
    a = max3sat_automaton(f)
    assert check_functional(a)
    assert answer_test(a, "σσσσ", assignment_tuple((1, 1, 0, 0))) == 2
    assert f.satisfied((1, 1, 0, 0)) == 2


def test_unsatisfying_assignment_is_absent():
    f = CnfFormula(3, [(1, 2, 3)])
    a = max3sat_automaton(f)
    t = assignment_tuple((0, 0, 0))
    assert answer_test(a, "σσσ", t) == 0
    assert t not in oracle_relation(a, "σσσ")


@pytest.mark.parametrize("seed", range(10))
def test_reduction_exhaustive(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 4)
    f = random_cnf(rng, n, rng.randint(1, 6))
    a = max3sat_automaton(f)
    for tau in itertools.product((0, 1), repeat=n):
        assert answer_test(a, "σ" * n, assignment_tuple(tau)) == f.satisfied(tau)
    assert threshold(a, "σ" * n, len(f.clauses), force_enumerate=True) == f.satisfiable()


def _dpll(n, clauses, tau=()):
    # plain backtracking over the variable order
    if any(all((tau[abs(l) - 1] == 1) != (l > 0) for l in c) for c in clauses
           if all(abs(l) <= len(tau) for l in c)):
        return False
    if len(tau) == n:
        return True
    return _dpll(n, clauses, tau + (0,)) or _dpll(n, clauses, tau + (1,))


@pytest.mark.parametrize("seed", range(5))
def test_satisfiable_agrees_with_backtracking(seed):
    rng = random.Random(100 + seed)
    n = rng.randint(5, 10)
    f = random_cnf(rng, n, rng.randint(10, 40) if n > 5 else 20)
    assert f.satisfiable() == _dpll(n, f.clauses)


def test_threshold_on_unsatisfiable_formula():
    clauses = [tuple(v if b else -v for v, b in zip((1, 2, 3), bits)) for bits in itertools.product((0, 1), repeat=3)]
    f = CnfFormula(3, clauses)
    assert not f.satisfiable()
    a = max3sat_automaton(f)
    assert not threshold(a, "σσσ", 8, force_enumerate=True)
    assert threshold(a, "σσσ", 7, force_enumerate=True)


def test_cnf_validation():
    with pytest.raises(FormatError):
        CnfFormula(3, [(1, 2)])
    with pytest.raises(FormatError):
        CnfFormula(3, [(1, -1, 2)])
    with pytest.raises(FormatError):
        CnfFormula(3, [(1, 2, 4)])
    with pytest.raises(ResourceError):
        max3sat_automaton(CnfFormula(17, [(1, 2, 3)]))


def test_parse_dimacs():
    f = parse_dimacs("c comment\np cnf 4 2\n1 -2 4 0\n2 3 4 0\n")
    assert f == CnfFormula(4, [(1, -2, 4), (2, 3, 4)])
    with pytest.raises(ParseError):
        parse_dimacs("1 2 3 0")
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 3 1\n1 x 3 0")


def test_random_automaton_is_deterministic():
    a = random_automaton(42, n_states=5, variables=["x", "y"], semiring=VITERBI)
    b = random_automaton(42, n_states=5, variables=["x", "y"], semiring=VITERBI)
    assert a == b and a.to_json() == b.to_json()


def test_random_automaton_without_variables():
    a = random_automaton(1, variables=[])
    assert not a.variables and a.n_states > 0


@pytest.mark.parametrize("seed", range(20))
def test_random_functional_automata_are_functional(seed):
    a = random_automaton(seed, n_states=6, variables=["x", "y"], eps_edges=2)
    assert check_functional(a)


def test_random_language_and_accepts():
    lang = random_language(3)
    words = all_documents("ab", 4)
    accepted = [w for w in words if accepts(lang, w)]
    assert accepted and all(accepts(lang, w) for w in accepted)


def test_delay_instance_keeps_all_states():
    a = delay_instance(7)
    assert a.n_states == 50 and check_functional(a)
