"""The ``spanweave`` command line.

Exit codes: 0 ok, 1 suite failure or a false threshold, 2 parse error,
3 invariant violation, 4 capability or precondition error, 5 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import algebra, automaton as am, serialize as io
from .automaton import DEFAULT_RUN_CAP, ExtendedVSetAutomaton, WeightedVSetAutomaton
from .errors import ParseError, SchemaError, SpanweaveError
from .semiring import SEMIRINGS, get_semiring, parse_value

TRANSFORMS = ("eliminate-eps", "functionalize", "to-extended", "from-extended", "union", "project", "join",
              "select", "b-project", "k-extend", "soft-compile")


def _out(text: str) -> None:
    sys.stdout.write(text + "\n")


def _err(text: str) -> None:
    sys.stderr.write(text + "\n")


def _check_semiring(args, a) -> None:
    if args.semiring and a.semiring.name != args.semiring:
        raise SchemaError(f"automaton is over {a.semiring.name}, not {args.semiring}")


def _plain(args, path: str) -> WeightedVSetAutomaton:
    a = io.load_plain(path)
    _check_semiring(args, a)
    return a


def _tuple_row(t, w, s, fmt: str, variables) -> str:
    if fmt == "tsv":
        cells = [f"{t.span(x).start},{t.span(x).end}" for x in sorted(variables)]
        return "\t".join(cells + [json.dumps(s.encode(w))])
    return json.dumps({"tuple": t.to_json(), "weight": s.encode(w)}, sort_keys=True, ensure_ascii=False)


def _emit_rows(rows, s, fmt: str, variables) -> None:
    if fmt == "tsv":
        _out("\t".join(sorted(variables) + ["weight"]))
    for t, w in rows:
        _out(_tuple_row(t, w, s, fmt, variables))


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    a = io.load_automaton(args.path)
    _check_semiring(args, a)
    s = a.semiring
    if isinstance(a, ExtendedVSetAutomaton):
        kind = "extended automaton"
        functional = am.check_functional(am.from_extended(a))
    else:
        kind = "automaton"
        functional = am.check_functional(a)
    _out(f"valid: {kind}")
    _out(f"functional: {str(functional).lower()}, semiring: {s.name}")
    _out(f"size: {a.stats()}")
    _out(f"variables: {', '.join(sorted(a.variables)) or '(none)'}")
    _out("flags: " + ", ".join(f"{k}={str(v).lower()}" for k, v in (
        ("positive", s.is_positive), ("bipotent", s.is_bipotent),
        ("ordered", s.is_ordered), ("positively_ordered", s.is_positively_ordered))))
    return 0


def cmd_eval(args) -> int:
    from .evaluation import answer_test

    a = _plain(args, args.automaton)
    d = io.read_document(args.doc)
    if args.tuple is None:
        from .enumeration import enumerate_support

        _emit_rows(enumerate_support(a, d, force=args.force_enumerate, cap=args.cap_runs),
                   a.semiring, args.format, a.variables)
        return 0
    _out(json.dumps(a.semiring.encode(answer_test(a, d, io.load_tuple(args.tuple)))))
    return 0


def cmd_maxtuple(args) -> int:
    from .evaluation import max_tuple

    a = _plain(args, args.automaton)
    best = max_tuple(a, io.read_document(args.doc), args.force_enumerate, args.cap_runs)
    if best is None:
        _out("null")
    else:
        _out(_tuple_row(best.tuple, best.weight, a.semiring, args.format, a.variables))
    return 0


def cmd_threshold(args) -> int:
    from .evaluation import threshold

    a = _plain(args, args.automaton)
    w = parse_value(a.semiring, args.weight)
    ok = threshold(a, io.read_document(args.doc), w, args.force_enumerate, args.cap_runs)
    _out(str(ok).lower())
    return 0 if ok else 1


def cmd_enum(args) -> int:
    from .enumeration import enumerate_ranked, enumerate_support
    import itertools

    a = _plain(args, args.automaton)
    d = io.read_document(args.doc)
    if args.ranked:
        stream = enumerate_ranked(a, d)
    else:
        stream = enumerate_support(a, d, force=args.force_enumerate, cap=args.cap_runs)
    if args.top is not None:
        stream = itertools.islice(stream, args.top)
    _emit_rows(stream, a.semiring, args.format, a.variables)
    return 0


def _variables(text: Optional[str]) -> List[str]:
    if not text:
        return []
    return [v.strip() for v in text.split(",") if v.strip()]


def cmd_transform(args) -> int:
    op = args.op
    if op == "soft-compile":
        return cmd_soft_compile(args, path=args.input)
    if op == "from-extended":
        src = io.load_automaton(args.input)
        if not isinstance(src, ExtendedVSetAutomaton):
            raise SchemaError("from-extended needs an extended automaton")
        _check_semiring(args, src)
        out = am.from_extended(src)
    else:
        if op == "k-extend":
            # here --semiring names the target, the input is Boolean
            src = io.load_plain(args.input)
        else:
            src = _plain(args, args.input)
        if op in ("union", "join") and not args.other:
            raise SchemaError(f"{op} needs --other")
        if op == "eliminate-eps":
            out = am.eliminate_epsilon(src)
        elif op == "functionalize":
            out = am.functionalize(src)
        elif op == "to-extended":
            out = am.to_extended(src)
        elif op == "union":
            out = algebra.auto_union(src, io.load_plain(args.other))
        elif op == "join":
            out = algebra.auto_join(src, io.load_plain(args.other))
        elif op == "project":
            out = algebra.auto_project(src, _variables(args.vars))
        elif op == "select":
            if not args.relation:
                raise SchemaError("select needs --relation")
            out = algebra.string_select(src, io.load_recognizable(args.relation), _variables(args.vars))
        elif op == "b-project":
            out = algebra.b_projection(src)
        elif op == "k-extend":
            target = args.target or args.semiring
            if not target:
                raise SchemaError("k-extend needs --semiring (or --to) naming the target semiring")
            out = algebra.k_extension(src, get_semiring(target))
        else:  # pragma: no cover - argparse restricts the choices
            raise SchemaError(f"unknown transform {op}")
    _err(f"before: {src.stats()}")
    _err(f"after: {out.stats()}")
    io.write_json(out.to_json(), args.output)
    return 0


def cmd_gen(args) -> int:
    from . import oracle

    if args.kind == "max3sat":
        if not args.cnf:
            raise ParseError("gen max3sat needs --cnf FILE")
        try:
            with open(args.cnf, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {args.cnf}: {exc.strerror}") from None
        a = oracle.max3sat_automaton(oracle.parse_dimacs(text))
    else:
        s = get_semiring(args.semiring or "counting")
        a = oracle.random_automaton(
            args.seed, n_states=args.states, variables=_variables(args.vars),
            alphabet=sorted(args.alphabet), semiring=s, eps_edges=args.eps,
            functional=not args.nonfunctional)
    io.write_json(a.to_json(), args.output)
    return 0


def cmd_soft_compile(args, path: Optional[str] = None) -> int:
    from .softspanner import compile_soft

    out = compile_soft(io.load_soft(path or args.soft))
    io.write_json(out.to_json(), args.output)
    return 0


def cmd_soft_prob(args) -> int:
    from .softspanner import soft_probability

    q = io.load_soft(args.soft)
    rel = soft_probability(q, io.read_document(args.doc), cap=args.cap_runs)
    if args.format == "json":
        io.write_json(rel.to_json(), None)
    else:
        _emit_rows(rel.items(), rel.semiring, args.format, rel.vars)
    return 0


def cmd_suite(args) -> int:
    from .suites import DEFAULT_SEED, run_suite

    seed = DEFAULT_SEED if args.seed is None else args.seed
    res = run_suite(args.name, seed, args.cases)
    _out(res.summary())
    for note in res.notes:
        _out(f"  {note}")
    if res.failures:
        _out(io.dumps({"suite": res.name, "seed": seed, "counterexamples": res.failures}))
        return 1
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--semiring", choices=sorted(SEMIRINGS),
                        help="expected semiring of the input (generator semiring for gen random)")
    common.add_argument("--seed", type=int, default=None, help="random seed for generators and suites")
    common.add_argument("--cap-runs", type=int, default=DEFAULT_RUN_CAP,
                        help="cap on explored runs for exponential fallbacks")
    common.add_argument("--format", choices=("jsonl", "tsv", "json"), default="jsonl",
                        help="output format for tuple listings")

    p = argparse.ArgumentParser(prog="spanweave", description="Weighted document spanners over semirings.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        sp.set_defaults(func=fn)
        return sp

    sp = add("validate", cmd_validate, "check an automaton file and report its properties")
    sp.add_argument("path")

    def doc_args(sp, force=True):
        sp.add_argument("--automaton", "-a", required=True)
        sp.add_argument("--doc", "-d", required=True, help="document file, read exactly as UTF-8")
        if force:
            sp.add_argument("--force-enumerate", action="store_true",
                            help="allow the exponential enumeration fallback")

    sp = add("eval", cmd_eval, "weight of one tuple, or the whole relation without --tuple")
    doc_args(sp)
    sp.add_argument("--tuple", "-t", help="tuple as inline JSON or a JSON file")

    sp = add("maxtuple", cmd_maxtuple, "a tuple of maximal weight")
    doc_args(sp)

    sp = add("threshold", cmd_threshold, "is some tuple at least as heavy as --weight (exit 1 if not)")
    doc_args(sp)
    sp.add_argument("--weight", "-w", required=True)

    sp = add("enum", cmd_enum, "enumerate the annotated relation")
    doc_args(sp)
    sp.add_argument("--ranked", action="store_true", help="non-increasing weight order")
    sp.add_argument("--top", type=int, default=None, help="stop after this many tuples")

    sp = add("transform", cmd_transform, "apply an automaton transformation")
    sp.add_argument("op", choices=TRANSFORMS)
    sp.add_argument("input", help="input automaton (soft spanner for soft-compile)")
    sp.add_argument("--other", help="second automaton for union and join")
    sp.add_argument("--vars", help="comma-separated variables for project and select")
    sp.add_argument("--relation", help="recognizable relation JSON for select")
    sp.add_argument("--to", dest="target", choices=sorted(SEMIRINGS), help="target semiring for k-extend (same as --semiring)")
    sp.add_argument("--output", "-o", default=None)

    sp = add("gen", cmd_gen, "generate automata")
    sp.add_argument("kind", choices=("max3sat", "random"))
    sp.add_argument("--cnf", help="DIMACS CNF file for max3sat")
    sp.add_argument("--states", type=int, default=4)
    sp.add_argument("--vars", default="x")
    sp.add_argument("--alphabet", default="ab")
    sp.add_argument("--eps", type=int, default=0, help="number of epsilon edges")
    sp.add_argument("--nonfunctional", action="store_true")
    sp.add_argument("--output", "-o", default=None)

    sp = add("soft-compile", cmd_soft_compile, "compile a soft spanner to a real-weighted automaton")
    sp.add_argument("soft")
    sp.add_argument("--output", "-o", default=None)

    sp = add("soft-prob", cmd_soft_prob, "probability of each tuple under a soft spanner")
    sp.add_argument("soft")
    sp.add_argument("--doc", "-d", required=True)

    from .suites import SUITES

    sp = add("suite", cmd_suite, "run a built-in verification suite")
    sp.add_argument("name", choices=sorted(SUITES))
    sp.add_argument("--cases", type=int, default=None)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen" and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except SpanweaveError as exc:
        _err(f"error: {exc}")
        return exc.exit_code
    except RecursionError:
        _err("error: input too deeply nested")
        return 5


if __name__ == "__main__":
    sys.exit(main())
