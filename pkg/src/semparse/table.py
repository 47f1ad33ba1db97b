"""Tables attached to SQL examples."""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class TableContext:
    column_names: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...] = ()

    def __init__(self, column_names, rows=()):
        cols = tuple(str(c) for c in column_names)
        if not cols:
            raise ValueError("a table needs at least one column")
        if any(not c.strip() for c in cols):
            raise ValueError("column names must be non-empty")
        body = tuple(tuple(str(v) for v in row) for row in rows)
        for i, row in enumerate(body):
            if len(row) != len(cols):
                raise ValueError(f"row {i} has {len(row)} cells, table has {len(cols)} columns")
        object.__setattr__(self, "column_names", cols)
        object.__setattr__(self, "rows", body)

    @property
    def width(self) -> int:
        return len(self.column_names)

    def column_tokens(self, k: int) -> list[str]:
        return self.column_names[k].lower().split()

    def to_json(self) -> dict:
        return {"columns": list(self.column_names), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, obj) -> "TableContext":
        return cls(obj["columns"], obj.get("rows", ()))


def load_table(path) -> TableContext:
    with open(path, encoding="utf-8") as f:
        return TableContext.from_json(json.load(f))


@dataclass(frozen=True)
class ExecutionResult:
    values: tuple

    def __init__(self, values=()):
        object.__setattr__(self, "values", tuple(values))

    @property
    def empty(self) -> bool:
        return len(self.values) == 0
