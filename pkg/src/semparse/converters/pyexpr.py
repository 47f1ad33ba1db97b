"""Python expression statements <-> ASTs of the pyexpr grammar.

Covers names, attribute access, calls with positional and keyword
arguments, and string/number literals.  Canonical text uses single-quoted
strings and ``key=value`` keywords without spaces.
"""

from __future__ import annotations

import ast as pyast
import keyword
import warnings

from ..asdl import Grammar
from ..errors import InvalidTree, UnsupportedConstruct
from ..trees import AbstractTree, build


def _convert(node, grammar):
    C = grammar.constructor
    if isinstance(node, pyast.Name):
        return build(C("Name"), node.id)
    if isinstance(node, pyast.Attribute):
        return build(C("Attribute"), _convert(node.value, grammar), node.attr)
    if isinstance(node, pyast.Constant):
        v = node.value
        if isinstance(v, str):
            if not v.split():
                raise UnsupportedConstruct("empty or blank string literal")
            return build(C("Str"), v)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return build(C("Num"), repr(v))
        raise UnsupportedConstruct(f"literal {v!r}")
    if isinstance(node, pyast.Call):
        if any(isinstance(a, pyast.Starred) for a in node.args):
            raise UnsupportedConstruct("*args in call")
        kws = []
        for kw in node.keywords:
            if kw.arg is None:
                raise UnsupportedConstruct("**kwargs in call")
            kws.append(build(C("keyword"), kw.arg, _convert(kw.value, grammar)))
        return build(C("Call"), _convert(node.func, grammar),
                     [_convert(a, grammar) for a in node.args], kws)
    raise UnsupportedConstruct(f"{type(node).__name__} is outside the supported subset")


def pyexpr_to_ast(code: str, grammar: Grammar) -> AbstractTree:
    with warnings.catch_warnings():
        # e.g. "'a'()" is valid syntax but warns
        warnings.simplefilter("ignore", SyntaxWarning)
        try:
            module = pyast.parse(code.strip(), mode="exec")
        except SyntaxError as e:
            raise UnsupportedConstruct(f"not valid Python: {e.msg}") from None
    if len(module.body) != 1 or not isinstance(module.body[0], pyast.Expr):
        raise UnsupportedConstruct("expected exactly one expression statement")
    return build(grammar.constructor("Expr"), _convert(module.body[0].value, grammar))


def _quote(text: str) -> str:
    return "'" + text.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _identifier(tok: str) -> str:
    if not tok.isidentifier() or keyword.iskeyword(tok):
        raise InvalidTree(f"{tok!r} is not a Python identifier")
    return tok


def _render(tree: AbstractTree) -> str:
    name = tree.constructor.name
    if name == "Name":
        return _identifier(tree["id"].value.tokens[0])
    if name == "Str":
        return _quote(tree["s"].value.text)
    if name == "Num":
        return tree["n"].value.tokens[0]
    if name == "Attribute":
        inner = tree["value"].value
        base = _render(inner)
        if inner.constructor.name == "Num":
            base = f"({base})"
        return f"{base}.{_identifier(tree['attr'].value.tokens[0])}"
    if name == "Call":
        func = tree["func"].value
        base = _render(func)
        if func.constructor.name == "Num":
            base = f"({base})"
        args = [_render(a) for a in tree["args"].values]
        args += [
            f"{_identifier(k['arg'].value.tokens[0])}={_render(k['value'].value)}"
            for k in tree["keywords"].values
        ]
        return f"{base}({', '.join(args)})"
    raise InvalidTree(f"constructor {name!r} is not an expression of the pyexpr grammar")


def ast_to_pyexpr(tree: AbstractTree) -> str:
    if tree.constructor.name != "Expr":
        raise InvalidTree(f"expected an Expr statement, got {tree.constructor.name}")
    return _render(tree["value"].value)


def canonicalize_pyexpr(code: str, grammar: Grammar) -> str:
    return ast_to_pyexpr(pyexpr_to_ast(code, grammar))
