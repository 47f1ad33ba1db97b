"""JSONL datasets of (utterance, meaning representation[, table]) examples."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .asdl import Grammar
from .converters import get_converter
from .errors import ConversionError, ParseError, SemparseError
from .table import TableContext
from .trees import AbstractTree, validate_ast


def tokenize_utterance(text: str) -> list[str]:
    return text.lower().split()


@dataclass(frozen=True)
class Example:
    utterance: tuple
    mr_text: str
    tree: AbstractTree
    table: Optional[TableContext] = None


def parse_line(line: str, lineno: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", lineno)
    for key in ("utterance", "mr"):
        if not isinstance(obj.get(key), str):
            raise ParseError(f"missing or non-string field {key!r}", lineno)
    if "table" in obj and obj["table"] is not None:
        try:
            obj["table"] = TableContext.from_json(obj["table"])
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"bad table: {e}", lineno) from None
    else:
        obj["table"] = None
    if not tokenize_utterance(obj["utterance"]):
        raise ParseError("empty utterance", lineno)
    return obj


def read_records(path) -> list[tuple[int, dict]]:
    """(line number, record) pairs; blank lines are skipped."""
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"no such file: {path}")
    out = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                out.append((lineno, parse_line(line, lineno)))
    return out


def load_dataset(path, format: str, grammar: Grammar) -> list[Example]:
    """Load and eagerly convert every example; all conversion failures are reported together."""
    conv = get_converter(format)
    examples, failures = [], []
    for lineno, rec in read_records(path):
        table = rec["table"]
        try:
            tree = conv.to_ast(rec["mr"], grammar, table)
            problems = validate_ast(grammar, tree)
            if problems:
                raise ConversionError("; ".join(map(str, problems)))
        except SemparseError as e:
            failures.append((lineno, f"{type(e).__name__}: {e}"))
            continue
        examples.append(Example(tuple(tokenize_utterance(rec["utterance"])), rec["mr"], tree, table))
    if failures:
        detail = "; ".join(f"line {n}: {msg}" for n, msg in failures)
        raise ConversionError(f"{len(failures)} example(s) failed to convert: {detail}",
                              lines=[n for n, _ in failures])
    return examples


def write_dataset(path, rows) -> None:
    """Write dicts with utterance/mr[/table] keys as JSONL."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for row in rows:
            row = dict(row)
            if isinstance(row.get("table"), TableContext):
                row["table"] = row["table"].to_json()
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
