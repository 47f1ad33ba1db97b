"""Conversions between ASTs and concrete meaning representations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..asdl import Grammar
from ..errors import MissingTable
from ..table import TableContext
from ..trees import AbstractTree
from .lambda_calculus import ast_to_lambda, canonicalize_lambda, lambda_to_ast
from .pyexpr import ast_to_pyexpr, canonicalize_pyexpr, pyexpr_to_ast
from .sql import ast_to_sql, canonicalize_sql, execute_sql, sql_to_ast


@dataclass(frozen=True)
class Converter:
    """Uniform ``to_ast``/``to_mr`` pair for one meaning-representation format."""

    name: str
    grammar_name: str
    needs_table: bool
    _to_ast: Callable
    _to_mr: Callable

    def to_ast(self, text: str, grammar: Grammar, table: Optional[TableContext] = None) -> AbstractTree:
        if self.needs_table:
            if table is None:
                raise MissingTable(f"{self.name} conversion needs a table")
            return self._to_ast(text, table, grammar)
        return self._to_ast(text, grammar)

    def to_mr(self, tree: AbstractTree, table: Optional[TableContext] = None) -> str:
        if self.needs_table:
            if table is None:
                raise MissingTable(f"{self.name} conversion needs a table")
            return self._to_mr(tree, table)
        return self._to_mr(tree)


CONVERTERS = {
    "lambda": Converter("lambda", "lambda_calculus", False, lambda_to_ast, ast_to_lambda),
    "sql": Converter("sql", "wikisql", True, sql_to_ast, ast_to_sql),
    "pyexpr": Converter("pyexpr", "pyexpr", False, pyexpr_to_ast, ast_to_pyexpr),
}


def get_converter(name: str) -> Converter:
    try:
        return CONVERTERS[name]
    except KeyError:
        raise ValueError(f"unknown MR format {name!r}; choose from {sorted(CONVERTERS)}") from None


__all__ = [
    "CONVERTERS",
    "Converter",
    "ast_to_lambda",
    "ast_to_pyexpr",
    "ast_to_sql",
    "canonicalize_lambda",
    "canonicalize_pyexpr",
    "canonicalize_sql",
    "execute_sql",
    "get_converter",
    "lambda_to_ast",
    "pyexpr_to_ast",
    "sql_to_ast",
]
