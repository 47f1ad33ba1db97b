"""Grammars bundled with semparse.

``minimal`` is a one-production toy, ``lambda_calculus`` covers Geo/Atis
logical forms, ``wikisql`` single-table SQL and ``pyexpr`` a small Python
expression subset.
"""

from importlib import resources

from ..asdl import Grammar, parse_grammar

ROOT_TYPES = {
    "minimal": "expr",
    "lambda_calculus": "expr",
    "wikisql": "stmt",
    "pyexpr": "stmt",
}


def grammar_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.asdl")


def grammar_text(name: str) -> str:
    return grammar_path(name).read_text(encoding="utf-8")


def load_bundled(name: str) -> Grammar:
    if name not in ROOT_TYPES:
        raise KeyError(f"no bundled grammar named {name!r}")
    return parse_grammar(grammar_text(name), ROOT_TYPES[name])
