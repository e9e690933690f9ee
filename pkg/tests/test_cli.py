import json
import subprocess
import sys

import pytest

from spanweave.cli import main
from spanweave.fixtures import data_path

EXTRACTOR = data_path("pair_extractor.json")
DOC = data_path("presidents.txt")
SOFT = data_path("gap_soft_spanner.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj, encoding="utf-8")
    return str(p)


def test_validate_extractor(capsys):
    code, out, _ = run(capsys, "validate", EXTRACTOR)
    assert code == 0
    assert "functional: true, semiring: viterbi" in out


def test_validate_errors(capsys, tmp_path):
    cyc = write(tmp_path, "cyc.json", {
        "semiring": "counting", "alphabet": ["a"], "vars": [], "states": 2, "initial": {"0": 1},
        "final": {"1": 1}, "transitions": [{"from": 0, "label": {"eps": True}, "to": 1, "weight": 1},
                                           {"from": 1, "label": {"eps": True}, "to": 0, "weight": 1}]})
    code, _, err = run(capsys, "validate", cyc)
    assert code == 3 and "epsilon cycle at states" in err
    zero = write(tmp_path, "zero.json", {
        "semiring": "counting", "alphabet": ["a"], "vars": [], "states": 2, "initial": {"0": 1},
        "final": {"1": 1}, "transitions": [{"from": 0, "label": {"sym": "a"}, "to": 1, "weight": 0}]})
    assert run(capsys, "validate", zero)[0] == 3
    assert run(capsys, "validate", write(tmp_path, "bad.json", "{"))[0] == 2
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "validate", EXTRACTOR, "--semiring", "counting")[0] == 4


def test_eval_tuple(capsys):
    code, out, _ = run(capsys, "eval", "-a", EXTRACTOR, "-d", DOC, "-t", '{"x_pers": [1, 7], "x_loc": [46, 68]}')
    assert code == 0 and float(out) == pytest.approx(0.59049)


def test_eval_whole_relation(capsys):
    code, out, _ = run(capsys, "eval", "-a", EXTRACTOR, "-d", DOC)
    assert code == 0 and len(jsonl(out)) == 4


def test_enum_ranked_and_tsv(capsys):
    code, out, _ = run(capsys, "enum", "-a", EXTRACTOR, "-d", DOC, "--ranked")
    assert [r["weight"] for r in jsonl(out)] == pytest.approx([0.9, 0.9, 0.81, 0.59049])
    code, out, _ = run(capsys, "enum", "-a", EXTRACTOR, "-d", DOC, "--ranked", "--top", "2", "--format", "tsv")
    lines = out.splitlines()
    assert lines[0] == "x_loc\tx_pers\tweight" and len(lines) == 3


def test_maxtuple_and_threshold(capsys):
    code, out, _ = run(capsys, "maxtuple", "-a", EXTRACTOR, "-d", DOC)
    assert code == 0 and jsonl(out)[0]["weight"] == pytest.approx(0.9)
    assert run(capsys, "threshold", "-a", EXTRACTOR, "-d", DOC, "-w", "0.85")[:2] == (0, "true\n")
    assert run(capsys, "threshold", "-a", EXTRACTOR, "-d", DOC, "-w", "0.95")[:2] == (1, "false\n")
    assert run(capsys, "threshold", "-a", EXTRACTOR, "-d", DOC, "-w", "1.5")[0] == 3


def test_capability_and_resource_exit_codes(capsys, tmp_path):
    a = str(tmp_path / "c.json")
    assert run(capsys, "gen", "random", "--seed", "3", "--semiring", "counting", "-o", a)[0] == 0
    d = write(tmp_path, "d.txt", "ab")
    assert run(capsys, "maxtuple", "-a", a, "-d", d)[0] == 4
    assert run(capsys, "maxtuple", "-a", a, "-d", d, "--force-enumerate")[0] == 0
    assert run(capsys, "enum", "-a", a, "-d", d, "--force-enumerate", "--cap-runs", "1")[0] == 5


def test_transform_project_then_eval(capsys, tmp_path):
    out = str(tmp_path / "p.json")
    code, _, err = run(capsys, "transform", "project", EXTRACTOR, "--vars", "x_pers", "-o", out)
    assert code == 0 and "before:" in err and "after:" in err
    rows = jsonl(run(capsys, "enum", "-a", out, "-d", DOC)[1])
    assert sorted((tuple(r["tuple"]["x_pers"]), r["weight"]) for r in rows) == [((1, 7), 0.9), ((30, 40), 0.9)]


def test_transform_join_with_universal(capsys, tmp_path):
    alphabet = sorted(json.load(open(EXTRACTOR))["alphabet"])
    universal = write(tmp_path, "u.json", {
        "semiring": "viterbi", "alphabet": alphabet, "vars": [], "states": 1, "initial": {"0": 1.0},
        "final": {"0": 1.0},
        "transitions": [{"from": 0, "label": {"sym": a}, "to": 0, "weight": 1.0} for a in alphabet]})
    out = str(tmp_path / "j.json")
    assert run(capsys, "transform", "join", EXTRACTOR, "--other", universal, "-o", out)[0] == 0
    before = jsonl(run(capsys, "enum", "-a", EXTRACTOR, "-d", DOC)[1])
    after = jsonl(run(capsys, "enum", "-a", out, "-d", DOC)[1])
    key = lambda r: json.dumps(r["tuple"], sort_keys=True)  # noqa: E731
    assert {key(r): r["weight"] for r in before} == pytest.approx({key(r): r["weight"] for r in after})


def test_transform_k_extend(capsys, tmp_path):
    out = str(tmp_path / "k.json")
    assert run(capsys, "transform", "k-extend", data_path("pair_extractor_boolean.json"), "--semiring", "viterbi",
               "-o", out)[0] == 0
    a = json.load(open(out))
    assert a["semiring"] == "viterbi" and {t["weight"] for t in a["transitions"]} == {1.0}


def test_transform_misc(capsys, tmp_path):
    ext = str(tmp_path / "e.json")
    assert run(capsys, "transform", "to-extended", EXTRACTOR, "-o", ext)[0] == 0
    back = str(tmp_path / "b.json")
    assert run(capsys, "transform", "from-extended", ext, "-o", back)[0] == 0
    assert len(jsonl(run(capsys, "enum", "-a", back, "-d", DOC)[1])) == 4
    assert run(capsys, "validate", ext)[0] == 0
    for op in ("eliminate-eps", "functionalize", "b-project"):
        assert run(capsys, "transform", op, EXTRACTOR, "-o", str(tmp_path / f"{op}.json"))[0] == 0
    assert run(capsys, "transform", "union", EXTRACTOR)[0] == 4


def test_soft_commands(capsys, tmp_path):
    out = str(tmp_path / "compiled.json")
    assert run(capsys, "soft-compile", SOFT, "-o", out)[0] == 0
    assert json.load(open(out))["semiring"] == "real"
    code, text, _ = run(capsys, "soft-prob", SOFT, "-d", DOC, "--format", "json")
    rel = json.loads(text)
    assert code == 0 and sum(r["weight"] for r in rel["rows"]) == pytest.approx(1.0)


def test_gen_max3sat(capsys, tmp_path):
    cnf = write(tmp_path, "f.cnf", "p cnf 4 2\n1 -2 4 0\n2 3 4 0\n")
    out = str(tmp_path / "a.json")
    assert run(capsys, "gen", "max3sat", "--cnf", cnf, "-o", out)[0] == 0
    d = write(tmp_path, "d.txt", "σσσσ")
    code, text, _ = run(capsys, "eval", "-a", out, "-d", d, "-t",
                        '{"x1": [1, 2], "x2": [2, 3], "x3": [3, 3], "x4": [4, 4]}')
    assert code == 0 and text.strip() == "2"
    assert run(capsys, "threshold", "-a", out, "-d", d, "-w", "2", "--force-enumerate")[0] == 0


def test_gen_is_deterministic(capsys, tmp_path):
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    run(capsys, "gen", "random", "--seed", "9", "--vars", "x,y", "--states", "6", "-o", a)
    run(capsys, "gen", "random", "--seed", "9", "--vars", "x,y", "--states", "6", "-o", b)
    assert open(a, "rb").read() == open(b, "rb").read()


def test_suites(capsys):
    code, out, _ = run(capsys, "suite", "worked-example")
    assert code == 0 and "PASS" in out
    assert run(capsys, "suite", "paper-example")[0] == 0
    assert run(capsys, "suite", "axioms", "--cases", "500")[0] == 0
    assert run(capsys, "suite", "oracle", "--seed", "7", "--cases", "20")[0] == 0
    assert run(capsys, "suite", "homomorphism", "--cases", "8")[0] == 0


def test_suite_failure_dumps_counterexample(capsys, monkeypatch):
    from spanweave import suites

    def broken(seed, cases=None):
        res = suites.SuiteResult("broken")
        res.fail(seed=seed, document="ab", tuple=None, expected=1, got=2)
        return res

    monkeypatch.setitem(suites.SUITES, "oracle", broken)
    code, out, _ = run(capsys, "suite", "oracle")
    assert code == 1
    dump = json.loads(out[out.index("{"):])
    assert dump["counterexamples"][0]["expected"] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spanweave", "validate", EXTRACTOR], capture_output=True, text=True)
    assert proc.returncode == 0 and "semiring: viterbi" in proc.stdout
