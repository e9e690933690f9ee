import pytest

from spanweave.core import (KRelation, Span, VTuple, krel_join, krel_project, krel_select, krel_union,
                            relation_from_rows)
from spanweave.errors import ParseError, SchemaError
from spanweave.fixtures import DOCUMENT, expected_relation
from spanweave.semiring import BOOLEAN, COUNTING, REAL, VITERBI

T = VTuple({"x": (1, 2)})


def test_span_text_and_validity():
    s = Span(1, 7)
    assert s.text(DOCUMENT) == "Carter"
    assert s.valid_for(DOCUMENT)
    assert Span(3, 3).text("abc") == ""
    assert Span(4, 4).valid_for("abc")
    assert not Span(2, 5).valid_for("abc")


def test_vtuple_is_canonical():
    assert VTuple({"y": (1, 2), "x": (3, 4)}) == VTuple([("x", (3, 4)), ("y", (1, 2))])
    assert hash(VTuple({"y": (1, 2), "x": (3, 4)})) == hash(VTuple({"x": (3, 4), "y": (1, 2)}))
    with pytest.raises(SchemaError):
        VTuple([("x", (1, 1)), ("x", (2, 2))])


def test_vtuple_json_round_trip():
    t = VTuple({"x_pers": (1, 7), "x_loc": (13, 28)})
    assert VTuple.from_json(t.to_json()) == t
    with pytest.raises(ParseError):
        VTuple.from_json({"x": "bad"})


def test_relation_drops_zero_and_merges():
    r = KRelation(COUNTING, ["x"], [(T, 2), (T, 3), (VTuple({"x": (2, 2)}), 0)])
    assert len(r) == 1 and r[T] == 5
    assert r[VTuple({"x": (2, 2)})] == 0


def test_relation_schema_checked():
    with pytest.raises(SchemaError):
        KRelation(COUNTING, ["x"], [(VTuple({"y": (1, 1)}), 1)])


def test_union_examples():
    assert krel_union(KRelation(VITERBI, ["x"], {T: 0.6}), KRelation(VITERBI, ["x"], {T: 0.8}))[T] == 0.8
    assert krel_union(KRelation(COUNTING, ["x"], {T: 2}), KRelation(COUNTING, ["x"], {T: 3}))[T] == 5
    assert len(krel_union(KRelation(REAL, ["x"], {T: 1.5}), KRelation(REAL, ["x"], {T: -1.5}))) == 0


def test_union_semiring_mismatch():
    with pytest.raises(SchemaError):
        krel_union(KRelation(REAL, ["x"]), KRelation(COUNTING, ["x"]))


def test_project_examples():
    a, b, c = (1, 2), (2, 3), (3, 4)
    r = KRelation(COUNTING, ["x", "y"], {VTuple({"x": a, "y": b}): 2, VTuple({"x": a, "y": c}): 3})
    assert krel_project(r, ["x"]) == KRelation(COUNTING, ["x"], {VTuple({"x": a}): 5})
    assert krel_project(r, ["x", "y"]) == r
    table = krel_project(expected_relation(), ["x_pers"])
    assert table == KRelation(VITERBI, ["x_pers"], {VTuple({"x_pers": (1, 7)}): 0.9,
                                                  VTuple({"x_pers": (30, 40)}): 0.9})


def test_join_examples():
    unit = KRelation(VITERBI, [], {VTuple(): 1.0})
    table = expected_relation()
    assert krel_join(table, unit) == table
    r1 = KRelation(VITERBI, ["x"], {VTuple({"x": (1, 2)}): 0.9})
    r2 = KRelation(VITERBI, ["y"], {VTuple({"y": (2, 3)}): 0.9})
    joined = krel_join(r1, r2)
    assert list(joined.items()) == [(VTuple({"x": (1, 2), "y": (2, 3)}), pytest.approx(0.81))]


def test_boolean_join_matches_set_join():
    import random

    rng = random.Random(3)
    spans = [(i, j) for i in range(1, 4) for j in range(i, 4)]
    for _ in range(50):
        r1 = {VTuple({"x": rng.choice(spans), "y": rng.choice(spans)}) for _ in range(4)}
        r2 = {VTuple({"y": rng.choice(spans), "z": rng.choice(spans)}) for _ in range(4)}
        want = {t.merge(u) for t in r1 for u in r2 if t.compatible(u)}
        got = krel_join(KRelation(BOOLEAN, "xy", {t: True for t in r1}),
                        KRelation(BOOLEAN, "yz", {u: True for u in r2}))
        assert got.support == want


def test_select_examples():
    table = expected_relation()
    assert krel_select(table, lambda t: True) == table
    assert len(krel_select(table, lambda t: False)) == 0
    carter = krel_select(table, lambda t: t.span("x_pers").text(DOCUMENT) == "Carter")
    assert sorted(w for _, w in carter.items()) == pytest.approx([0.59049, 0.81, 0.9])
    assert all(t.span("x_pers") == (1, 7) for t in carter)


def test_relation_json_round_trip():
    table = expected_relation()
    assert KRelation.from_json(table.to_json()) == table


def test_relation_from_rows():
    r = relation_from_rows(COUNTING, ["x"], [({"x": (1, 2)}, 4)])
    assert r[T] == 4


def test_close_to_and_diff():
    r1 = KRelation(VITERBI, ["x"], {T: 0.5})
    r2 = KRelation(VITERBI, ["x"], {T: 0.5 + 1e-12})
    assert r1.close_to(r2) and not r1.diff(r2)
    r3 = KRelation(VITERBI, ["x"], {T: 0.6})
    assert r1.diff(r3) == [(T, 0.5, 0.6)]
