"""Built-in verification suites, shared by the CLI and the acceptance tests.

Each suite returns a :class:`SuiteResult`; a failure carries a counterexample
record (seed, automaton, document, tuple, expected, got) as plain JSON data.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from .algebra import (RecognizableRelation, auto_join, auto_project, auto_union, k_extension,
                      string_select)
from .automaton import (Builder, WeightedVSetAutomaton, check_functional, close_, eliminate_epsilon,
                        evaluate_all_runs, from_extended, functionalize, open_, sym, to_extended)
from .core import KRelation, Span, VTuple, krel_join, krel_project, krel_select, krel_union
from .enumeration import enumerate_ranked, enumerate_support, top_k
from .evaluation import answer_test, dag_for, dag_path_relation, max_tuple, threshold
from .oracle import (accepts, all_documents, assignment_tuple, brute_force_soft_scores, delay_instance,
                     max3sat_automaton, oracle_relation, random_automaton, random_cnf, random_language)
from .semiring import (BOOLEAN, COUNTING, SEMIRINGS, TROPICAL, VITERBI, axiom_check, close,
                       random_triples)
from .softspanner import SoftSpanner, compile_soft, soft_probability, soft_scores

DEFAULT_SEED = 7
MAX_FAILURES = 5
RANK_SLACK = 1e-12


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    elapsed: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, **record) -> None:
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(_jsonable(record))
        else:
            self.failures[-1].setdefault("more", 0)
            self.failures[-1]["more"] += 1

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {status} ({self.cases} cases, {self.elapsed:.2f}s)"


def _jsonable(x):
    if isinstance(x, WeightedVSetAutomaton):
        return x.to_json()
    if isinstance(x, VTuple):
        return x.to_json()
    if isinstance(x, KRelation):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return repr(x)


def _timed(fn: Callable[..., SuiteResult]) -> Callable[..., SuiteResult]:
    def run(*args, **kwargs) -> SuiteResult:
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _check_rel(res: SuiteResult, what: str, got: KRelation, expected: KRelation, **ctx) -> bool:
    bad = got.diff(expected)
    if got.vars != expected.vars:
        res.fail(check=what, expected=expected, got=got, **ctx)
        return False
    if bad:
        t, g, e = bad[0]
        res.fail(check=what, tuple=t, expected=e, got=g, **ctx)
        return False
    return True


# ---------------------------------------------------------------- worked example

WORKED_EXAMPLE_ROWS = (
    ({"x_pers": (1, 7), "x_loc": (13, 28)}, 0.9),
    ({"x_pers": (30, 40), "x_loc": (46, 68)}, 0.9),
    ({"x_pers": (1, 7), "x_loc": (21, 40)}, 0.81),
    ({"x_pers": (1, 7), "x_loc": (46, 68)}, 0.59049),
)


@_timed
def worked_example(seed: int = DEFAULT_SEED, cases: Optional[int] = None) -> SuiteResult:
    """The four-row Viterbi table of the worked example, by three evaluation routes."""
    from .fixtures import DOCUMENT, pair_extractor

    res = SuiteResult("worked-example")
    a = pair_extractor()
    d = DOCUMENT
    expected = KRelation(VITERBI, ("x_pers", "x_loc"), [(VTuple(t), w) for t, w in WORKED_EXAMPLE_ROWS])
    routes = {
        "evaluate_all_runs": evaluate_all_runs(a, d),
        "enumerate_support": KRelation(VITERBI, a.variables, list(enumerate_support(a, d))),
        "answer_test": KRelation(VITERBI, a.variables, [(t, answer_test(a, d, t)) for t in expected]),
    }
    for name, rel in routes.items():
        res.cases += 1
        if rel.support != expected.support:
            res.fail(check=name, document=d, expected=expected, got=rel)
            continue
        for t, w in expected.items():
            if not close(rel[t], w, 0.0, 1e-12):
                res.fail(check=name, document=d, tuple=t, expected=w, got=rel[t])
    return res


# ---------------------------------------------------------------- semiring axioms

@_timed
def axioms(seed: int = DEFAULT_SEED, cases: int = 10_000) -> SuiteResult:
    res = SuiteResult("axioms")
    for name, s in sorted(SEMIRINGS.items()):
        report = axiom_check(s, random_triples(s, cases, random.Random(f"{seed}:{name}")))
        res.cases += report.checked
        res.notes.append(str(report))
        if not report.passed:
            res.fail(seed=seed, semiring=name, violation=report.violation)
    return res


# ---------------------------------------------------------------- oracle equivalence

ORACLE_SEMIRINGS = (COUNTING, VITERBI, TROPICAL)


def _random_functional(seed: int, semiring, rng: random.Random, max_states: int = 6,
                       pool=("x", "y")) -> WeightedVSetAutomaton:
    k = rng.randint(0, 2)
    v = sorted(rng.sample(list(pool), k))
    return random_automaton(seed, n_states=rng.randint(2 * k + 1, max(max_states, 2 * k + 1)),
                            variables=v, semiring=semiring)


def _absent_tuple(a: WeightedVSetAutomaton, d: str, rel: KRelation, rng: random.Random) -> Optional[VTuple]:
    spans = [Span(i, j) for i in range(1, len(d) + 2) for j in range(i, len(d) + 2)]
    for _ in range(10):
        t = VTuple({x: rng.choice(spans) for x in a.variables})
        if t not in rel:
            return t
    return None


@_timed
def oracle(seed: int = DEFAULT_SEED, cases: int = 200, max_len: int = 4) -> SuiteResult:
    """answer_test, enumerate_support and DAG path sums against the run oracle."""
    res = SuiteResult("oracle")
    docs = all_documents("ab", max_len)
    for case in range(cases):
        inst = seed * 100_003 + case
        rng = random.Random(inst)
        s = ORACLE_SEMIRINGS[case % len(ORACLE_SEMIRINGS)]
        a = _random_functional(inst, s, rng)
        for d in docs:
            res.cases += 1
            truth = oracle_relation(a, d)
            ctx = dict(seed=inst, automaton=a, document=d)
            enum = KRelation(s, a.variables, list(enumerate_support(a, d)))
            if not _check_rel(res, "enumerate_support", enum, truth, **ctx):
                continue
            if not _check_rel(res, "dag_path_relation", dag_path_relation(dag_for(a, d)), truth, **ctx):
                continue
            probes = list(truth)
            extra = _absent_tuple(a, d, truth, rng)
            if extra is not None:
                probes.append(extra)
            for t in probes:
                got = answer_test(a, d, t)
                if not s.eq(got, truth[t]):
                    res.fail(check="answer_test", tuple=t, expected=truth[t], got=got, **ctx)
                    break
    return res


# ---------------------------------------------------------------- algebra homomorphism

HOMOMORPHISM_SEMIRINGS = (COUNTING, VITERBI, TROPICAL, BOOLEAN)


def reorder_pair(semiring) -> tuple:
    """Two automata opening x and y in opposite orders at the same position."""
    def chain(first, second):
        b = Builder(semiring, "ab", ("x", "y"), 6)
        b.set_initial(0)
        b.set_final(5)
        labels = (open_(first), open_(second), sym("a"), close_(first), close_(second))
        for i, lab in enumerate(labels):
            b.edge(i, lab, i + 1, semiring.one)
        return b.build()

    return chain("x", "y"), chain("y", "x")


@_timed
def homomorphism(seed: int = DEFAULT_SEED, cases: int = 100, max_len: int = 4) -> SuiteResult:
    """Automaton-level union, projection, join and selection against K-relation algebra."""
    res = SuiteResult("homomorphism")
    docs = all_documents("ab", max_len)
    for s in HOMOMORPHISM_SEMIRINGS:
        p1, p2 = reorder_pair(s)
        j = auto_join(p1, p2)
        for d in ("a", "ab", "ba"):
            res.cases += 1
            _check_rel(res, "join (reordered operations)", oracle_relation(j, d),
                       krel_join(oracle_relation(p1, d), oracle_relation(p2, d)),
                       semiring=s.name, automaton=[p1, p2], document=d)
        res.cases += 1
        if len(oracle_relation(j, "a")) != 1:
            res.fail(check="join (reordered operations) must keep the tuple", semiring=s.name)
    for case in range(cases):
        inst = seed * 100_003 + case
        rng = random.Random(inst)
        s = HOMOMORPHISM_SEMIRINGS[case % len(HOMOMORPHISM_SEMIRINGS)]
        a1 = _random_functional(2 * inst, s, rng, pool=("x", "y", "z"))
        a2 = _random_functional(2 * inst + 1, s, rng, pool=("x", "y", "z"))
        a1b = random_automaton(2 * inst + 1, n_states=rng.randint(2 * len(a1.variables) + 1, 6),
                               variables=sorted(a1.variables), semiring=s)
        x = sorted(a1.variables)[:rng.randint(0, len(a1.variables))]
        u, jn, pr = auto_union(a1, a1b), auto_join(a1, a2), auto_project(a1, x)
        sel_var = sorted(a1.variables)[:1]
        lang = random_language(inst)
        sel = string_select(a1, RecognizableRelation(1, [[lang]]), sel_var) if sel_var else None
        for d in docs:
            res.cases += 1
            r1, r2, r1b = oracle_relation(a1, d), oracle_relation(a2, d), oracle_relation(a1b, d)
            ctx = dict(seed=inst, document=d)
            ok = (_check_rel(res, "union", oracle_relation(u, d), krel_union(r1, r1b),
                             automaton=[a1, a1b], **ctx)
                  and _check_rel(res, "join", oracle_relation(jn, d), krel_join(r1, r2),
                                 automaton=[a1, a2], **ctx)
                  and _check_rel(res, "project", oracle_relation(pr, d), krel_project(r1, x),
                                 automaton=a1, **ctx))
            if ok and sel is not None:
                want = krel_select(r1, lambda t: accepts(lang, t.span(sel_var[0]).text(d)))
                _check_rel(res, "select", oracle_relation(sel, d), want, automaton=[a1, lang], **ctx)
    return res


# ---------------------------------------------------------------- transforms

@_timed
def transforms(seed: int = DEFAULT_SEED, cases: int = 100, max_len: int = 4) -> SuiteResult:
    """eliminate_epsilon, functionalize and the extended round trip preserve the relation."""
    res = SuiteResult("transforms")
    docs = all_documents("ab", max_len)
    for case in range(cases):
        inst = seed * 100_003 + case
        rng = random.Random(inst)
        s = ORACLE_SEMIRINGS[case % len(ORACLE_SEMIRINGS)]
        k = rng.randint(0, 2)
        v = ["x", "y"][:k]
        if case % 2 == 0:
            ae = random_automaton(inst, n_states=rng.randint(2 * k + 1, 6), variables=v, semiring=s,
                                  eps_edges=3)
        else:
            ae = random_automaton(inst, n_states=rng.randint(2 * k + 1, 6), variables=v, semiring=s,
                                  eps_edges=2, functional=False, letter_density=0.2)
        an = random_automaton(inst, n_states=rng.randint(1, 6), variables=v, semiring=s,
                              functional=False, eps_edges=rng.randint(0, 2), letter_density=0.2)
        af = random_automaton(inst, n_states=rng.randint(2 * k + 1, 6), variables=v, semiring=s)
        e, f, rt = eliminate_epsilon(ae), functionalize(an), from_extended(to_extended(af))
        res.cases += 1
        if e.has_epsilon:
            res.fail(check="eliminate_epsilon left an epsilon edge", seed=inst, automaton=ae)
        if not check_functional(f):
            res.fail(check="functionalize output is not functional", seed=inst, automaton=an)
        for d in docs:
            res.cases += 1
            for what, out, src in (("eliminate_epsilon", e, ae), ("functionalize", f, an),
                                   ("to_extended/from_extended", rt, af)):
                _check_rel(res, what, oracle_relation(out, d), oracle_relation(src, d),
                           seed=inst, automaton=src, document=d)
    return res


# ---------------------------------------------------------------- MAX-3SAT

@_timed
def max3sat(seed: int = DEFAULT_SEED, cases: int = 50) -> SuiteResult:
    """Reduction automaton weights equal clause counts; threshold m decides satisfiability."""
    res = SuiteResult("max3sat")
    rng = random.Random(seed)
    for case in range(cases):
        n = rng.randint(3, 4)
        m = rng.randint(1, 6)
        f = random_cnf(rng, n, m)
        a = max3sat_automaton(f)
        d = "σ" * n
        for tau in itertools.product((0, 1), repeat=n):
            res.cases += 1
            got = answer_test(a, d, assignment_tuple(tau))
            want = f.satisfied(tau)
            if got != want:
                res.fail(check="answer_test", formula=f.clauses, n_vars=n, tuple=assignment_tuple(tau),
                         document=d, expected=want, got=got)
        res.cases += 1
        got = threshold(a, d, m, force_enumerate=True)
        if got != f.satisfiable():
            res.fail(check="threshold", formula=f.clauses, n_vars=n, document=d,
                     expected=f.satisfiable(), got=got)
    return res


# ---------------------------------------------------------------- ranked enumeration

@_timed
def ranked(seed: int = DEFAULT_SEED, cases: int = 100, max_len: int = 4) -> SuiteResult:
    """Ranked order, completeness and agreement with max_tuple on Viterbi instances."""
    from .fixtures import DOCUMENT, pair_extractor

    res = SuiteResult("ranked")
    table = [w for _, w in enumerate_ranked(pair_extractor(), DOCUMENT)]
    want = [w for _, w in WORKED_EXAMPLE_ROWS]
    res.cases += 1
    if len(table) != len(want) or not all(close(g, w, 0.0, 1e-12) for g, w in zip(table, want)):
        res.fail(check="ranked order on the worked example", document=DOCUMENT, expected=want, got=table)
    docs = all_documents("ab", max_len)
    for case in range(cases):
        inst = seed * 100_003 + case
        rng = random.Random(inst)
        a = _random_functional(inst, VITERBI, rng)
        for d in docs:
            res.cases += 1
            ctx = dict(seed=inst, automaton=a, document=d)
            stream = list(enumerate_ranked(a, d))
            weights = [w for _, w in stream]
            # equal products may differ in the last ulp depending on multiplication order
            if any(weights[i + 1] > weights[i] * (1 + RANK_SLACK) for i in range(len(weights) - 1)):
                res.fail(check="non-increasing weights", expected="non-increasing", got=weights, **ctx)
                continue
            if len({t for t, _ in stream}) != len(stream):
                res.fail(check="duplicate emission", got=[t for t, _ in stream], **ctx)
                continue
            support = KRelation(VITERBI, a.variables, list(enumerate_support(a, d)))
            if not _check_rel(res, "ranked vs support", KRelation(VITERBI, a.variables, stream), support, **ctx):
                continue
            best = max_tuple(a, d)
            if (best is None) != (not stream) or (best and not close(best.weight, weights[0])):
                res.fail(check="max_tuple vs first emission", expected=weights[:1],
                         got=None if best is None else best.weight, **ctx)
            k = rng.randint(0, 3)
            if [w for _, w in top_k(a, d, k)] != weights[:k]:
                res.fail(check="top_k prefix", expected=weights[:k], **ctx)
    return res


# ---------------------------------------------------------------- soft spanners

def _random_unambiguous(seed: int, rng: random.Random, pool) -> WeightedVSetAutomaton:
    k = rng.randint(0, 2)
    v = sorted(rng.sample(list(pool), k))
    a = random_automaton(seed, n_states=rng.randint(2 * k + 1, 5), variables=v, semiring=BOOLEAN)
    return k_extension(a, BOOLEAN)


@_timed
def soft(seed: int = DEFAULT_SEED, cases: int = 50, max_len: int = 3) -> SuiteResult:
    """Compiled log-weights and probabilities against brute-force factor counting."""
    from .fixtures import DOCUMENT, gap_soft_spanner

    res = SuiteResult("soft")
    q = gap_soft_spanner()
    compiled = compile_soft(q)
    scores = soft_scores(q, DOCUMENT, compiled)
    truth = brute_force_soft_scores(q.base, q.factors, DOCUMENT)
    table = {VTuple(t): w for t, w in WORKED_EXAMPLE_ROWS}
    res.cases += 1
    if set(scores) != set(table) or any(not close(scores[t], w) for t, w in table.items()):
        res.fail(check="exp(log-weight) vs the worked-example annotations", document=DOCUMENT,
                 expected=list(table.items()), got=list(scores.items()))
    probs = soft_probability(q, DOCUMENT, compiled)
    total = math.fsum(w for _, w in probs.items())
    z = math.fsum(truth.values())
    row1 = VTuple(WORKED_EXAMPLE_ROWS[0][0])
    res.cases += 1
    if abs(total - 1.0) > 1e-9 or not close(probs[row1], truth[row1] / z):
        res.fail(check="soft_probability", document=DOCUMENT, tuple=row1,
                 expected={"sum": 1.0, "row1": truth[row1] / z}, got={"sum": total, "row1": probs[row1]})
    for case in range(cases):
        inst = seed * 100_003 + case
        rng = random.Random(inst)
        base = _random_unambiguous(3 * inst, rng, ("x", "y"))
        factors = [(_random_unambiguous(3 * inst + 1 + i, rng, ("x", "y", "z")), rng.uniform(-2.0, 2.0))
                   for i in range(rng.randint(1, 2))]
        q = SoftSpanner(base, factors)
        compiled = compile_soft(q)
        for d in all_documents("ab", max_len):
            res.cases += 1
            got = soft_scores(q, d, compiled)
            want = brute_force_soft_scores(base, factors, d)
            ctx = dict(seed=inst, automaton=[base] + [f for f, _ in factors], document=d)
            if set(got) != set(want):
                res.fail(check="soft support", expected=sorted(want), got=sorted(got), **ctx)
                continue
            bad = [t for t in want if not close(got[t], want[t])]
            if bad:
                res.fail(check="exp(log-weight)", tuple=bad[0], expected=want[bad[0]], got=got[bad[0]], **ctx)
                continue
            if got:
                total = math.fsum(w for _, w in soft_probability(q, d, compiled).items())
                if abs(total - 1.0) > 1e-9:
                    res.fail(check="probabilities sum to 1", expected=1.0, got=total, **ctx)
    return res


# ---------------------------------------------------------------- delay budget

@_timed
def delay(seed: int = DEFAULT_SEED, cases: int = 200, n_states: int = 50, doc_len: int = 200,
          budget: float = 1.0) -> SuiteResult:
    """Largest gap between consecutive emissions stays under ``budget`` seconds.

    ``cases`` emissions are timed for each of the unranked and ranked streams;
    the gap before the first emission includes preprocessing.
    """
    res = SuiteResult("delay")
    a = delay_instance(seed, n_states)
    rng = random.Random(seed)
    d = "".join(rng.choice("ab") for _ in range(doc_len))
    for name, stream in (("enumerate_support", enumerate_support(a, d)),
                         ("enumerate_ranked", enumerate_ranked(a, d))):
        gaps = []
        t = time.perf_counter()
        for _ in itertools.islice(stream, cases):
            now = time.perf_counter()
            gaps.append(now - t)
            t = now
        res.cases += len(gaps)
        worst = max(gaps, default=0.0)
        res.notes.append(f"{name}: {len(gaps)} emissions, max delay {worst:.4f}s, "
                         f"mean {sum(gaps) / max(len(gaps), 1):.4f}s")
        if len(gaps) < cases:
            res.fail(check=f"{name} emitted too few tuples", seed=seed, expected=cases, got=len(gaps))
        if worst > budget:
            res.fail(check=f"{name} delay budget", seed=seed, expected=budget, got=worst)
    res.notes.append(f"instance: {a.stats()}, document length {len(d)}")
    return res


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "worked-example": worked_example,
    # kept for the documented command line
    "paper-example": worked_example,
    "axioms": axioms,
    "oracle": oracle,
    "homomorphism": homomorphism,
    "transforms": transforms,
    "max3sat": max3sat,
    "ranked": ranked,
    "soft": soft,
    "delay": delay,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, cases: Optional[int] = None) -> SuiteResult:
    fn = SUITES[name]
    return fn(seed) if cases is None else fn(seed, cases)
