"""JSON loading and saving for automata, relations and soft spanners.

An *automaton reference* inside a relation or soft-spanner file is either an
inline automaton object or a path, resolved against the referring file.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Any, Optional, Union

from .algebra import RecognizableRelation
from .automaton import ExtendedVSetAutomaton, WeightedVSetAutomaton
from .core import KRelation, VTuple
from .errors import ParseError

Automaton = Union[WeightedVSetAutomaton, ExtendedVSetAutomaton]


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None


def read_document(path: str) -> str:
    """Document text, read exactly (a trailing newline is part of the document)."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 ({exc})") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False)


def write_json(obj: Any, path: Optional[str]) -> None:
    text = dumps(obj) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def automaton_from_obj(obj: Any) -> Automaton:
    if isinstance(obj, dict) and "kind" in obj:
        return ExtendedVSetAutomaton.from_json(obj)
    return WeightedVSetAutomaton.from_json(obj)


def load_automaton(path: str) -> Automaton:
    return automaton_from_obj(read_json(path))


def load_plain(path: str) -> WeightedVSetAutomaton:
    a = load_automaton(path)
    if isinstance(a, ExtendedVSetAutomaton):
        from .automaton import from_extended

        return from_extended(a)
    return a


def resolve_ref(ref: Any, base_dir: str) -> WeightedVSetAutomaton:
    if isinstance(ref, str):
        return load_plain(os.path.join(base_dir, ref))
    a = automaton_from_obj(ref)
    if isinstance(a, ExtendedVSetAutomaton):
        from .automaton import from_extended

        return from_extended(a)
    return a


def recognizable_from_obj(obj: Any, base_dir: str = ".") -> RecognizableRelation:
    try:
        arity = obj["arity"]
        products = [[resolve_ref(r, base_dir) for r in p] for p in obj["products"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed recognizable relation: {exc}") from None
    return RecognizableRelation(arity, products)


def load_recognizable(path: str) -> RecognizableRelation:
    return recognizable_from_obj(read_json(path), os.path.dirname(path) or ".")


def soft_from_obj(obj: Any, base_dir: str = "."):
    from .softspanner import SoftSpanner

    try:
        base = resolve_ref(obj["base"], base_dir)
        factors = [(resolve_ref(f["spanner"], base_dir), f["weight"]) for f in obj["factors"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed soft spanner: {exc}") from None
    return SoftSpanner(base, factors)


def soft_to_obj(q) -> dict:
    return {"base": q.base.to_json(),
            "factors": [{"spanner": s.to_json(), "weight": w} for s, w in q.factors]}


def load_soft(path: str):
    return soft_from_obj(read_json(path), os.path.dirname(path) or ".")


def load_tuple(arg: str) -> VTuple:
    """A tuple given inline as JSON or as a path to a JSON file."""
    text = arg.strip()
    if text.startswith("{"):
        try:
            return VTuple.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid tuple JSON: {exc}") from None
    return VTuple.from_json(read_json(arg))


def load_relation(path: str) -> KRelation:
    return KRelation.from_json(read_json(path))
