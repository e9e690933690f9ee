import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from spanweave.errors import CapabilityError, InvalidValueError, ParseError
from spanweave.semiring import (ACCESS, BOOLEAN, COUNTING, LOG, LUKASIEWICZ, PROBABILITY, REAL, SEMIRINGS,
                                TROPICAL, VITERBI, Access, add, axiom_check, compare, get_semiring, mul,
                                parse_value, random_triples)


def test_tropical_add_is_min():
    assert add(TROPICAL, 3, 5) == 3


def test_log_add():
    assert math.isclose(add(LOG, 0.0, 0.0), math.log(2))


def test_viterbi_add_and_mul():
    assert add(VITERBI, 0.9, 0.81) == 0.9
    assert math.isclose(mul(VITERBI, 0.9, 0.9), 0.81)


def test_lukasiewicz_mul():
    assert math.isclose(mul(LUKASIEWICZ, 0.7, 0.6), 0.3)


def test_access_mul_is_max_level():
    assert mul(ACCESS, Access.C, Access.S) is Access.S
    assert add(ACCESS, Access.C, Access.S) is Access.C


def test_compare():
    assert compare(COUNTING, 2, 5) == -1
    assert compare(TROPICAL, math.inf, 0) == -1
    assert compare(VITERBI, 0.59049, 0.81) == -1
    assert compare(VITERBI, 0.81, 0.81) == 0
    assert compare(ACCESS, Access.T, Access.P) == -1


def test_values_outside_domain_are_rejected():
    with pytest.raises(InvalidValueError):
        add(VITERBI, 1.5, 0.1)
    with pytest.raises(InvalidValueError):
        mul(COUNTING, -1, 2)
    with pytest.raises(InvalidValueError):
        add(TROPICAL, 1.5, 2)


def test_lukasiewicz_half_triple_distributes():
    report = axiom_check(LUKASIEWICZ, [(0.5, 0.5, 0.5)])
    assert report.passed, report.violation


def test_probability_absorption_with_zero():
    report = axiom_check(PROBABILITY, [(0.0, 3.5, 0.0), (2.0, 0.0, 7.25)])
    assert report.passed


@pytest.mark.parametrize("name", sorted(SEMIRINGS))
def test_random_axioms(name):
    s = SEMIRINGS[name]
    report = axiom_check(s, random_triples(s, 1000, random.Random(name)))
    assert report.passed, report.violation
    assert report.checked == 1000


def test_axiom_check_catches_a_broken_semiring():
    import dataclasses

    broken = dataclasses.replace(COUNTING, name="broken", plus=lambda a, b: a + b + 1)
    report = axiom_check(broken, [(1, 2, 3)])
    assert not report.passed


def test_flags():
    for s in (BOOLEAN, COUNTING, PROBABILITY, VITERBI, ACCESS, TROPICAL):
        assert s.is_positive
    assert not REAL.is_positive and not LUKASIEWICZ.is_positive
    bipotent = {n for n, s in SEMIRINGS.items() if s.is_bipotent}
    assert bipotent == {"boolean", "viterbi", "access", "tropical", "lukasiewicz"}


def test_get_semiring_unknown():
    with pytest.raises(ParseError):
        get_semiring("nope")


def test_parse_value():
    assert parse_value(TROPICAL, "inf") == math.inf
    assert parse_value(TROPICAL, "4") == 4
    assert parse_value(ACCESS, "S") is Access.S
    assert parse_value(VITERBI, "0.5") == 0.5
    assert parse_value(BOOLEAN, "true") is True


@pytest.mark.parametrize("name", sorted(SEMIRINGS))
def test_encode_decode_round_trip(name):
    s = SEMIRINGS[name]
    rng = random.Random(1)
    for _ in range(50):
        v = s.sample(rng)
        assert s.decode(s.encode(v)) == v


def test_compare_on_unordered_use_raises():
    import dataclasses

    unordered = dataclasses.replace(REAL, name="unordered", is_ordered=False, order_key=None)
    with pytest.raises(CapabilityError):
        compare(unordered, 1.0, 2.0)


# products of tiny floats underflow to 0.0 and would look like zero divisors
unit = st.one_of(st.just(0.0), st.floats(min_value=1e-100, max_value=1.0))
naturals = st.integers(min_value=0, max_value=10**6)


@settings(max_examples=300)
@given(naturals, naturals, naturals)
def test_counting_laws(a, b, c):
    assert axiom_check(COUNTING, [(a, b, c)]).passed


@settings(max_examples=300)
@given(unit, unit, unit)
def test_viterbi_laws(a, b, c):
    assert axiom_check(VITERBI, [(a, b, c)]).passed


@settings(max_examples=300)
@given(unit, unit, unit)
def test_lukasiewicz_laws(a, b, c):
    assert axiom_check(LUKASIEWICZ, [(a, b, c)]).passed


@settings(max_examples=300)
@given(st.one_of(st.just(math.inf), naturals), st.one_of(st.just(math.inf), naturals), naturals)
def test_tropical_laws(a, b, c):
    assert axiom_check(TROPICAL, [(a, b, c)]).passed


@settings(max_examples=300)
@given(st.sampled_from(list(Access)), st.sampled_from(list(Access)), st.sampled_from(list(Access)))
def test_access_laws(a, b, c):
    assert axiom_check(ACCESS, [(a, b, c)]).passed


@settings(max_examples=300)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50))
def test_log_laws(a, b, c):
    assert axiom_check(LOG, [(a, b, c)]).passed


@settings(max_examples=300)
@given(st.floats(-100, 100), st.floats(-100, 100), st.floats(-100, 100))
def test_real_laws(a, b, c):
    assert axiom_check(REAL, [(a, b, c)]).passed
