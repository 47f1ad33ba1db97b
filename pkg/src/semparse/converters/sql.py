"""WikiSQL-style queries <-> ASTs of the SQL grammar, plus a tiny executor.

Supported queries::

    SELECT [AGG(]column[)] FROM Table [WHERE column OP value [AND ...]]

with AGG one of MAX MIN COUNT SUM AVG and OP one of ``=``, ``>``, ``<`` and
``OP`` (WikiSQL's catch-all operator).  Column names may contain spaces and
are resolved against the table, case-insensitively.  Condition values are
free text; surrounding quotes are dropped.
"""

from __future__ import annotations

import re
from typing import Optional

from ..asdl import Grammar
from ..errors import ColumnIndexOutOfRange, InvalidTree, UnknownColumn, UnsupportedSyntax
from ..table import ExecutionResult, TableContext
from ..trees import AbstractTree, build

AGGREGATES = {"MAX": "Max", "MIN": "Min", "COUNT": "Count", "SUM": "Sum", "AVG": "Avg"}
OPERATORS = {"=": "Equal", ">": "GreaterThan", "<": "LessThan", "OP": "Other"}
_AGG_NAMES = {v: k for k, v in AGGREGATES.items()}
_OP_NAMES = {v: k for k, v in OPERATORS.items()}

_QUERY_RE = re.compile(
    r"^\s*SELECT\s+(?P<select>.+?)\s+FROM\s+(?P<table>\S+)(?:\s+WHERE\s+(?P<where>.+?))?\s*;?\s*$",
    re.IGNORECASE | re.DOTALL,
)
_AGG_RE = re.compile(r"^(?P<agg>[A-Za-z]+)\s*\(\s*(?P<col>.+?)\s*\)$")
_OP_RE = re.compile(r"\s*(=|>|<|OP\b)\s*", re.IGNORECASE)
_AND_RE = re.compile(r"\s+AND\s+", re.IGNORECASE)


def _norm(s: str) -> str:
    return " ".join(s.split()).casefold()


def _strip_quotes(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
        return value[1:-1].strip()
    return value


def resolve_column(name: str, table: TableContext) -> int:
    key = _norm(_strip_quotes(name))
    for k, col in enumerate(table.column_names):
        if _norm(col) == key:
            return k
    raise UnknownColumn(f"no column {name!r} in table {list(table.column_names)}")


def _match_column(text: str, pos: int, table: TableContext) -> Optional[tuple[int, int]]:
    """Longest column name at ``text[pos:]`` followed by an operator."""
    best = None
    folded = text.casefold()
    for k, col in enumerate(table.column_names):
        c = " ".join(col.split()).casefold()
        if folded.startswith(c, pos):
            end = pos + len(c)
            m = _OP_RE.match(text, end)
            if m and (end == len(text) or not text[end].isalnum() or m.start(1) > end):
                if best is None or len(c) > best[1] - pos:
                    best = (k, end)
    return best


def _parse_conditions(where: str, table: TableContext):
    text = " ".join(where.split())
    conds = []
    pos = 0
    while True:
        hit = _match_column(text, pos, table)
        if hit is None:
            raise UnknownColumn(f"cannot resolve a column at {text[pos:]!r}")
        k, end = hit
        m = _OP_RE.match(text, end)
        op = OPERATORS[m.group(1).upper()]
        vstart = m.end()
        # the value runs until an AND that starts another condition
        vend, nxt = len(text), None
        for am in _AND_RE.finditer(text, vstart):
            if _match_column(text, am.end(), table) is not None:
                vend, nxt = am.start(), am.end()
                break
        value = _strip_quotes(text[vstart:vend])
        if not value:
            raise UnsupportedSyntax(f"condition on {table.column_names[k]!r} has no value")
        conds.append((op, k, value))
        if nxt is None:
            return conds
        pos = nxt


def sql_to_ast(query: str, table: TableContext, grammar: Grammar) -> AbstractTree:
    m = _QUERY_RE.match(query)
    if m is None:
        raise UnsupportedSyntax(f"not a single-table SELECT query: {query!r}")
    select = m.group("select").strip()
    agg = None
    am = _AGG_RE.match(select)
    if am is not None:
        agg_name = am.group("agg").upper()
        if agg_name not in AGGREGATES:
            raise UnsupportedSyntax(f"unknown aggregate {am.group('agg')!r}")
        agg, select = AGGREGATES[agg_name], am.group("col")
    if select == "*":
        raise UnsupportedSyntax("SELECT * is not expressible")
    col = resolve_column(select, table)
    conds = _parse_conditions(m.group("where"), table) if m.group("where") else []
    C = grammar.constructor
    return build(
        C("Select"),
        build(C(agg)) if agg else None,
        str(col),
        [build(C("Condition"), build(C(op)), str(k), value) for op, k, value in conds],
    )


def _column(tree, name, table):
    k = int(tree[name].value.tokens[0])
    if not 0 <= k < table.width:
        raise ColumnIndexOutOfRange(f"column {k} out of range for a {table.width}-column table")
    return k


def ast_to_sql(tree: AbstractTree, table: TableContext) -> str:
    if tree.constructor.name != "Select":
        raise InvalidTree(f"expected a Select tree, got {tree.constructor.name}")
    col = table.column_names[_column(tree, "column_idx", table)]
    agg = tree["agg"].value
    select = f"{_AGG_NAMES[agg.constructor.name]}({col})" if agg is not None else col
    out = f"SELECT {select} FROM Table"
    conds = []
    for cond in tree["conditions"].values:
        op = _OP_NAMES[cond["op"].value.constructor.name]
        ccol = table.column_names[_column(cond, "column_idx", table)]
        conds.append(f"{ccol} {op} {cond['value'].value.text}")
    if conds:
        out += " WHERE " + " AND ".join(conds)
    return out


def canonicalize_sql(query: str, table: TableContext) -> str:
    """Canonical spelling of a query, by textual rewriting only.

    Keywords are upper-cased, whitespace collapsed, column names spelled as
    stored in the table and value quotes dropped.  Values containing the word
    ``and`` are outside what this normalizer handles.
    """
    m = _QUERY_RE.match(query)
    if m is None:
        raise UnsupportedSyntax(f"not a single-table SELECT query: {query!r}")

    def colname(s):
        return table.column_names[resolve_column(s, table)]

    select = " ".join(m.group("select").split())
    am = _AGG_RE.match(select)
    if am is not None:
        select = f"{am.group('agg').upper()}({colname(am.group('col'))})"
    else:
        select = colname(select)
    out = f"SELECT {select} FROM Table"
    if m.group("where"):
        parts = []
        for cond in _AND_RE.split(" ".join(m.group("where").split())):
            cm = re.match(r"^(.*?)\s*(=|>|<|\bOP\b)\s*(.*)$", cond, re.IGNORECASE)
            if cm is None:
                raise UnsupportedSyntax(f"cannot read condition {cond!r}")
            parts.append(f"{colname(cm.group(1))} {cm.group(2).upper()} {_strip_quotes(cm.group(3))}")
        out += " WHERE " + " AND ".join(parts)
    return out


def _number(cell) -> Optional[float]:
    try:
        return float(str(cell).replace(",", ""))
    except ValueError:
        return None


def _holds(op: str, cell: str, value: str) -> bool:
    if op == "Equal":
        return _norm(cell) == _norm(value)
    if op in ("GreaterThan", "LessThan"):
        a, b = _number(cell), _number(value)
        if a is None or b is None:
            return False
        return a > b if op == "GreaterThan" else a < b
    return False


def execute_sql(tree: AbstractTree, table: TableContext) -> ExecutionResult:
    """Run a Select tree against ``table``.

    Equality is case- and whitespace-insensitive; ``>``/``<`` compare only
    when both sides are numbers; ``OP`` never matches.  MAX/MIN/SUM/AVG skip
    non-numeric cells.
    """
    sel = _column(tree, "column_idx", table)
    conds = [
        (c["op"].value.constructor.name, _column(c, "column_idx", table), c["value"].value.text)
        for c in tree["conditions"].values
    ]
    rows = [r for r in table.rows if all(_holds(op, r[k], v) for op, k, v in conds)]
    cells = [r[sel] for r in rows]
    agg = tree["agg"].value
    if agg is None:
        return ExecutionResult(cells)
    name = agg.constructor.name
    if name == "Count":
        return ExecutionResult([len(cells)])
    nums = [x for x in map(_number, cells) if x is not None]
    if not nums:
        return ExecutionResult()
    if name == "Max":
        return ExecutionResult([max(nums)])
    if name == "Min":
        return ExecutionResult([min(nums)])
    if name == "Sum":
        return ExecutionResult([sum(nums)])
    return ExecutionResult([sum(nums) / len(nums)])
