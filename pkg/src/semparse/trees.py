"""Realized abstract syntax trees: representation, validation, generation."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .asdl import Cardinality, Constructor, Field, Grammar, TypeName
from .errors import ForeignConstructor, NonTerminatingGrammar

# primitive types whose values are token sequences closed by </f>
MULTI_TOKEN_TYPES = frozenset({"string"})


def is_multi_token(type_: TypeName) -> bool:
    return type_.is_primitive and type_.name in MULTI_TOKEN_TYPES


@dataclass(frozen=True)
class PrimitiveValue:
    tokens: tuple[str, ...]

    def __init__(self, tokens):
        if isinstance(tokens, str):
            tokens = (tokens,)
        object.__setattr__(self, "tokens", tuple(tokens))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class RealizedField:
    field: Field
    values: tuple[Union["AbstractTree", PrimitiveValue], ...] = ()

    def __init__(self, field, values=()):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "values", tuple(values))

    @property
    def value(self):
        """The sole value of a single/optional field, or None when empty."""
        return self.values[0] if self.values else None


@dataclass(frozen=True)
class AbstractTree:
    constructor: Constructor
    fields: tuple[RealizedField, ...] = ()

    def __init__(self, constructor, fields=()):
        object.__setattr__(self, "constructor", constructor)
        object.__setattr__(self, "fields", tuple(fields))

    def __getitem__(self, name: str) -> RealizedField:
        for rf in self.fields:
            if rf.field.name == name:
                return rf
        raise KeyError(name)

    def to_sexpr(self) -> str:
        return to_sexpr(self)

    def size(self) -> int:
        n = 1
        for rf in self.fields:
            for v in rf.values:
                if isinstance(v, AbstractTree):
                    n += v.size()
        return n


def build(constructor: Constructor, *values, **named) -> AbstractTree:
    """Convenience builder.

    Each field takes a tree, a token string, a PrimitiveValue, ``None`` (empty
    optional) or a list (sequential).  Values are given positionally in field
    order or by field name.
    """
    if len(values) > len(constructor.fields):
        raise TypeError(f"{constructor.name} takes {len(constructor.fields)} fields")
    given = dict(zip((f.name for f in constructor.fields), values))
    given.update(named)
    out = []
    for f in constructor.fields:
        v = given.get(f.name)
        if v is None:
            vals = []
        elif isinstance(v, (list, tuple)):
            vals = list(v)
        else:
            vals = [v]
        out.append(RealizedField(f, [_coerce(f, x) for x in vals]))
    return AbstractTree(constructor, out)


def _coerce(field, value):
    if field.type.is_primitive and isinstance(value, str):
        return PrimitiveValue(value.split() if is_multi_token(field.type) else (value,))
    return value


@dataclass(frozen=True)
class Violation:
    kind: str
    path: str
    message: str

    def __str__(self):
        return f"{self.kind} at {self.path or '<root>'}: {self.message}"


def _join(path, name):
    return f"{path}.{name}" if path else name


def validate_ast(grammar: Grammar, tree: AbstractTree, path: str = "") -> list[Violation]:
    """Every typing/cardinality violation in ``tree``; empty means valid."""
    if not isinstance(tree, AbstractTree):
        return [Violation("TypeViolation", path, f"expected a tree, got {type(tree).__name__}")]
    if not grammar.has_constructor(tree.constructor):
        raise ForeignConstructor(
            f"constructor {tree.constructor.name!r} at {path or '<root>'} is not in the grammar"
        )
    out: list[Violation] = []
    ctor = tree.constructor
    if len(tree.fields) != len(ctor.fields):
        out.append(Violation(
            "ArityViolation", path,
            f"{ctor.name} has {len(ctor.fields)} fields, node has {len(tree.fields)}",
        ))
    for rf, field in zip(tree.fields, ctor.fields):
        fpath = _join(path, field.name)
        if rf.field != field:
            out.append(Violation("FieldMismatch", fpath, f"expected field {field}, found {rf.field}"))
            continue
        n = len(rf.values)
        card = field.cardinality
        if card is Cardinality.SINGLE and n != 1:
            out.append(Violation("CardinalityViolation", fpath, f"single field holds {n} values"))
        elif card is Cardinality.OPTIONAL and n > 1:
            out.append(Violation("CardinalityViolation", fpath, f"optional field holds {n} values"))
        for i, v in enumerate(rf.values):
            vpath = f"{fpath}[{i}]" if card is Cardinality.SEQUENTIAL else fpath
            if field.type.is_composite:
                if not isinstance(v, AbstractTree):
                    out.append(Violation("TypeViolation", vpath, f"expected {field.type} tree"))
                    continue
                if v.constructor.type != field.type:
                    out.append(Violation(
                        "TypeViolation", vpath,
                        f"{v.constructor.name} has type {v.constructor.type}, field wants {field.type}",
                    ))
                out.extend(validate_ast(grammar, v, vpath))
            else:
                if not isinstance(v, PrimitiveValue):
                    out.append(Violation("TypeViolation", vpath, f"expected {field.type} value"))
                    continue
                if not v.tokens:
                    out.append(Violation("TokenViolation", vpath, "primitive value has no tokens"))
                elif not is_multi_token(field.type) and len(v.tokens) != 1:
                    out.append(Violation(
                        "TokenViolation", vpath, f"{field.type} holds {len(v.tokens)} tokens"
                    ))
                if any(not isinstance(t, str) or not t for t in v.tokens):
                    out.append(Violation("TokenViolation", vpath, "empty or non-string token"))
    return out


def trees_equal(a, b) -> bool:
    return a == b


# --- canonical s-expression ------------------------------------------------

def _value_sexpr(v):
    if isinstance(v, AbstractTree):
        return to_sexpr(v)
    return json.dumps(v.text, ensure_ascii=False)


def to_sexpr(tree: AbstractTree) -> str:
    parts = [tree.constructor.name]
    for rf in tree.fields:
        card = rf.field.cardinality
        if card is Cardinality.SEQUENTIAL:
            inner = " ".join(_value_sexpr(v) for v in rf.values)
            body = f"[ {inner} ]" if inner else "[ ]"
        elif not rf.values:
            body = "nil"
        else:
            body = _value_sexpr(rf.values[0])
        parts.append(f"{rf.field.name}:{body}")
    return f"({' '.join(parts)})"


# --- random generation -----------------------------------------------------

def _min_heights(grammar: Grammar) -> dict[str, int]:
    """Least fixpoint of the minimal tree height per composite type."""
    height: dict[str, int] = {}
    changed = True
    while changed:
        changed = False
        for c in grammar.constructors:
            h = _ctor_height(c, height)
            if h is not None and h < height.get(c.type.name, h + 1):
                height[c.type.name] = h
                changed = True
    return height


def _ctor_height(c: Constructor, height):
    h = 1
    for f in c.fields:
        if f.type.is_composite and f.cardinality is Cardinality.SINGLE:
            if f.type.name not in height:
                return None
            h = max(h, height[f.type.name] + 1)
    return h


TokenPool = Union[Sequence[str], Mapping[str, Sequence[str]]]


def random_ast(grammar: Grammar, max_depth: int, seed: int, token_pool: TokenPool) -> AbstractTree:
    """Draw a random valid tree rooted at ``grammar.root_type``.

    ``token_pool`` is either one list of tokens or a mapping from primitive
    type name to tokens (with an optional ``"*"`` fallback entry).
    """
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    if not token_pool:
        raise ValueError("token_pool must be non-empty")
    heights = _min_heights(grammar)
    for t in grammar.composite_types:
        if t.name not in heights:
            raise NonTerminatingGrammar(f"type {t.name!r} admits no finite tree")
    rng = random.Random(seed)
    return _Generator(grammar, heights, rng, token_pool, max_depth).tree(grammar.root_type, 1)


class _Generator:
    def __init__(self, grammar, heights, rng, pool, max_depth):
        self.grammar = grammar
        self.heights = heights
        self.rng = rng
        self.pool = pool
        self.max_depth = max_depth

    def tokens_for(self, type_):
        if isinstance(self.pool, Mapping):
            pool = self.pool.get(type_.name) or self.pool.get("*")
            if not pool:
                raise ValueError(f"token pool has no entry for type {type_.name!r}")
            return pool
        return self.pool

    def primitive(self, type_):
        pool = self.tokens_for(type_)
        n = self.rng.randint(1, 3) if is_multi_token(type_) else 1
        return PrimitiveValue([self.rng.choice(pool) for _ in range(n)])

    def tree(self, type_, depth):
        ctors = self.grammar.constructors_of(type_)
        shallow = depth >= self.max_depth
        if shallow:
            best = self.heights[type_.name]
            ctors = [c for c in ctors if _ctor_height(c, self.heights) == best]
        ctor = self.rng.choice(ctors)
        fields = []
        for f in ctor.fields:
            if f.cardinality is Cardinality.SINGLE:
                n = 1
            elif shallow and f.type.is_composite:
                n = 0
            elif f.cardinality is Cardinality.OPTIONAL:
                n = self.rng.randint(0, 1)
            else:
                n = self.rng.randint(0, 3)
            if f.type.is_composite:
                vals = [self.tree(f.type, depth + 1) for _ in range(n)]
            else:
                vals = [self.primitive(f.type) for _ in range(n)]
            fields.append(RealizedField(f, vals))
        return AbstractTree(ctor, fields)
