"""Lambda-calculus logical forms <-> ASTs of the lambda-calculus grammar.

Surface conventions follow the Geo/Atis preprocessed releases::

    lambda $0 e (and (state $0) (next_to $0 texas:s))

Atoms are classified by shape: ``$<digits>`` is a variable, anything with a
``:`` an entity, a numeric literal a number.  Heads that are not special
forms become predicates of ``Apply``; any other argument atom is read as a
variable.  A top-level compound form with arguments is written without its
outer parentheses; ``(state)`` keeps them so it does not read as an atom.
"""

from __future__ import annotations

import re
from typing import Union

from ..asdl import Grammar
from ..errors import InvalidTree, UnbalancedParens, UnknownForm
from ..trees import AbstractTree, build

SExpr = Union[str, list]

_VAR_RE = re.compile(r"^\$\d+$")
_NUM_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

# head -> (constructor, binds a variable, number of expr slots)
_BINDERS = {
    "argmax": ("Argmax", 2),
    "argmin": ("Argmin", 2),
    "sum": ("Sum", 2),
    "count": ("Count", 1),
    "exists": ("Exists", 1),
    "max": ("Max", 1),
    "min": ("Min", 1),
    "the": ("The", 1),
}
_COMPARE = {"=": "Equal", "<": "LessThan", ">": "GreaterThan"}
_VARIADIC = {"and": "And", "or": "Or"}
_HEADS = {v[0]: k for k, v in _BINDERS.items()}
_HEADS.update({v: k for k, v in _COMPARE.items()})
_HEADS.update({v: k for k, v in _VARIADIC.items()})


def tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def read_sexpr(text: str) -> SExpr:
    """Parse to nested lists; several top-level items form an implicit list."""
    toks = tokenize(text)
    if not toks:
        raise UnbalancedParens("empty logical form")
    stack: list[list] = [[]]
    for tok in toks:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise UnbalancedParens(f"unmatched ')' in {text!r}")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise UnbalancedParens(f"{len(stack) - 1} unclosed '(' in {text!r}")
    items = stack[0]
    return items[0] if len(items) == 1 else items


def write_sexpr(expr: SExpr, top: bool = True) -> str:
    if isinstance(expr, str):
        return expr
    inner = " ".join(write_sexpr(e, top=False) for e in expr)
    if top and len(expr) >= 2:
        return inner
    return f"({inner})"


def canonicalize_lambda(text: str) -> str:
    """Whitespace- and outer-paren-normalized form of a logical form."""
    return write_sexpr(read_sexpr(text))


def _atom(grammar, tok):
    C = grammar.constructor
    if _VAR_RE.match(tok):
        return build(C("Variable"), tok)
    if ":" in tok:
        return build(C("Entity"), tok)
    if _NUM_RE.match(tok):
        return build(C("Number"), tok)
    return build(C("Variable"), tok)


def _to_ast(grammar, expr):
    if isinstance(expr, str):
        return _atom(grammar, expr)
    if not expr:
        raise UnknownForm("empty form ()")
    head, args = expr[0], expr[1:]
    if not isinstance(head, str):
        raise UnknownForm(f"form head must be an atom: {write_sexpr(expr)}")
    C = grammar.constructor

    def need(n):
        if len(args) != n:
            raise UnknownForm(f"{head} takes {n} arguments, got {len(args)}: {write_sexpr(expr)}")

    def var(x):
        if not isinstance(x, str):
            raise UnknownForm(f"{head} expects a variable, got {write_sexpr(x)}")
        return x

    if head == "lambda":
        need(3)
        return build(C("Lambda"), var(args[0]), var(args[1]), _to_ast(grammar, args[2]))
    if head in _BINDERS:
        name, slots = _BINDERS[head]
        need(1 + slots)
        return build(C(name), var(args[0]), *[_to_ast(grammar, a) for a in args[1:]])
    if head in _COMPARE:
        need(2)
        return build(C("Compare"), build(C(_COMPARE[head])),
                     _to_ast(grammar, args[0]), _to_ast(grammar, args[1]))
    if head in _VARIADIC:
        return build(C(_VARIADIC[head]), [_to_ast(grammar, a) for a in args])
    if head == "not":
        need(1)
        return build(C("Not"), _to_ast(grammar, args[0]))
    return build(C("Apply"), head, [_to_ast(grammar, a) for a in args])


def lambda_to_ast(text: str, grammar: Grammar) -> AbstractTree:
    return _to_ast(grammar, read_sexpr(text))


def _tok(tree, name):
    return tree[name].values[0].tokens[0]


def _from_ast(tree: AbstractTree) -> SExpr:
    name = tree.constructor.name
    if name in ("Variable", "Entity", "Number"):
        return tree.fields[0].values[0].tokens[0]
    if name == "Lambda":
        return ["lambda", _tok(tree, "variable"), _tok(tree, "type"), _from_ast(tree["body"].value)]
    if name == "Apply":
        return [_tok(tree, "predicate")] + [_from_ast(a) for a in tree["arguments"].values]
    if name in ("And", "Or"):
        return [_HEADS[name]] + [_from_ast(a) for a in tree["arguments"].values]
    if name == "Not":
        return ["not", _from_ast(tree["argument"].value)]
    if name == "Compare":
        op = tree["op"].value.constructor.name
        return [_HEADS[op], _from_ast(tree["left"].value), _from_ast(tree["right"].value)]
    if name in _HEADS:
        out = [_HEADS[name], _tok(tree, "variable")]
        out += [_from_ast(rf.value) for rf in tree.fields[1:]]
        return out
    raise InvalidTree(f"constructor {name!r} is not part of the lambda-calculus grammar")


def ast_to_lambda(tree: AbstractTree) -> str:
    try:
        return write_sexpr(_from_ast(tree))
    except (IndexError, KeyError, AttributeError) as e:
        raise InvalidTree(f"malformed lambda-calculus tree: {e!r}") from None
