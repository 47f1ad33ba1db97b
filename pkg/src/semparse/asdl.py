"""Reading, representing and rendering ASDL grammars.

The accepted text format is the sum-type subset of ASDL::

    expr = Call(expr func, expr* args, keyword* keywords)
         | Name(identifier id)
    cmp_op = Equal | LessThan | GreaterThan

Productions may span several lines; a new production starts wherever a type
name is followed by ``=``.  Lines starting with ``#`` or ``--`` are comments.
Any type that appears in a field but is never defined by a production is
registered as primitive.  ``attributes(...)`` clauses are parsed and dropped,
and an optional ``module Name { ... }`` wrapper is accepted.
"""

from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .errors import (
    DuplicateConstructor,
    DuplicateType,
    GrammarSyntaxError,
    PrimitiveTypeQuery,
    UnknownRootType,
    UnknownType,
)


class Cardinality(enum.Enum):
    SINGLE = "single"
    OPTIONAL = "optional"
    SEQUENTIAL = "sequential"

    @property
    def suffix(self) -> str:
        return {"single": "", "optional": "?", "sequential": "*"}[self.value]


class Kind(enum.Enum):
    COMPOSITE = "composite"
    PRIMITIVE = "primitive"


@dataclass(frozen=True)
class TypeName:
    name: str
    kind: Kind

    @property
    def is_composite(self) -> bool:
        return self.kind is Kind.COMPOSITE

    @property
    def is_primitive(self) -> bool:
        return self.kind is Kind.PRIMITIVE

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Field:
    name: str
    type: TypeName
    cardinality: Cardinality = Cardinality.SINGLE

    def __str__(self):
        return f"{self.type.name}{self.cardinality.suffix} {self.name}"


@dataclass(frozen=True)
class Constructor:
    name: str
    type: TypeName
    fields: tuple[Field, ...] = ()

    def __str__(self):
        if not self.fields:
            return self.name
        return f"{self.name}({', '.join(str(f) for f in self.fields)})"


class Grammar:
    """An immutable, validated ASDL grammar with a designated root type."""

    def __init__(self, types, constructors, root_type):
        self._types = {t.name: t for t in types}
        self._constructors = tuple(constructors)
        self._by_name = {c.name: c for c in self._constructors}
        by_type: dict[str, list[Constructor]] = {}
        for c in self._constructors:
            by_type.setdefault(c.type.name, []).append(c)
        self._by_type = {k: tuple(v) for k, v in by_type.items()}
        if root_type not in self._types:
            raise UnknownRootType(f"root type {root_type!r} is not defined")
        self._root = self._types[root_type]
        if not self._root.is_composite:
            raise UnknownRootType(f"root type {root_type!r} is primitive")

    @property
    def root_type(self) -> TypeName:
        return self._root

    @property
    def types(self) -> tuple[TypeName, ...]:
        return tuple(self._types.values())

    @property
    def composite_types(self) -> tuple[TypeName, ...]:
        return tuple(t for t in self._types.values() if t.is_composite)

    @property
    def primitive_types(self) -> tuple[TypeName, ...]:
        return tuple(t for t in self._types.values() if t.is_primitive)

    @property
    def constructors(self) -> tuple[Constructor, ...]:
        return self._constructors

    def type(self, name: str) -> TypeName:
        try:
            return self._types[name]
        except KeyError:
            raise UnknownType(name) from None

    def constructor(self, name: str) -> Constructor:
        return self._by_name[name]

    def has_constructor(self, constructor: Constructor) -> bool:
        return self._by_name.get(constructor.name) == constructor

    def constructors_of(self, type_: TypeName | str) -> tuple[Constructor, ...]:
        t = self.type(type_ if isinstance(type_, str) else type_.name)
        if t.is_primitive:
            raise PrimitiveTypeQuery(f"{t.name} is a primitive type")
        return self._by_type[t.name]

    def render(self) -> str:
        return render_grammar(self)

    def fingerprint(self) -> str:
        return grammar_fingerprint(self)

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return (
            self._constructors == other._constructors
            and self._types == other._types
            and self._root == other._root
        )

    def __hash__(self):
        return hash((self._constructors, self._root))

    def __repr__(self):
        return (
            f"<Grammar root={self._root.name} types={len(self._types)} "
            f"constructors={len(self._constructors)}>"
        )


def constructors_of(grammar: Grammar, type_: TypeName | str) -> tuple[Constructor, ...]:
    return grammar.constructors_of(type_)


# --- tokenizer -------------------------------------------------------------

class _Tok(NamedTuple):
    kind: str
    value: str
    lineno: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>(?:\#|--)[^\n]*)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[=|(),*?{}])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> Iterator[_Tok]:
    lineno = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise GrammarSyntaxError(f"unexpected character {text[pos]!r}", lineno)
        kind = m.lastgroup
        if kind == "nl":
            lineno += 1
        elif kind in ("id", "op"):
            yield _Tok(kind, m.group(), lineno)
        pos = m.end()


class _Parser:
    def __init__(self, text):
        self.toks = list(_tokenize(text))
        self.pos = 0

    def peek(self, offset=0):
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else None

    def at(self, value, offset=0):
        tok = self.peek(offset)
        return tok is not None and tok.value == value

    def next(self):
        tok = self.peek()
        if tok is None:
            last = self.toks[-1].lineno if self.toks else None
            raise GrammarSyntaxError("unexpected end of grammar", last)
        self.pos += 1
        return tok

    def expect(self, value):
        tok = self.next()
        if tok.value != value:
            raise GrammarSyntaxError(f"expected {value!r}, found {tok.value!r}", tok.lineno)
        return tok

    def ident(self, what):
        tok = self.next()
        if tok.kind != "id":
            raise GrammarSyntaxError(f"expected {what}, found {tok.value!r}", tok.lineno)
        return tok

    def parse(self):
        """Returns [(type_name, lineno, [(ctor_name, lineno, [(ftype, card, fname)])])]."""
        wrapped = False
        if self.at("module") and self.peek(1) is not None and self.peek(1).kind == "id" and self.at("{", 2):
            self.pos += 3
            wrapped = True
        defs = []
        while self.peek() is not None and not (wrapped and self.at("}")):
            defs.append(self.definition())
        if wrapped:
            self.expect("}")
            if self.peek() is not None:
                tok = self.peek()
                raise GrammarSyntaxError(f"trailing input {tok.value!r}", tok.lineno)
        return defs

    def definition(self):
        name = self.ident("type name")
        self.expect("=")
        if self.at("("):
            raise GrammarSyntaxError(
                f"product type {name.value!r} is not supported; wrap it in a constructor",
                name.lineno,
            )
        ctors = [self.constructor()]
        while self.at("|"):
            self.next()
            ctors.append(self.constructor())
        if self.at("attributes"):
            self.next()
            self.fields()
        return name.value, name.lineno, ctors

    def constructor(self):
        name = self.ident("constructor name")
        # a following "x =" begins the next definition, not a field list
        fields = self.fields() if self.at("(") else []
        return name.value, name.lineno, fields

    def fields(self):
        self.expect("(")
        out = []
        if self.at(")"):
            self.next()
            return out
        while True:
            ftype = self.ident("field type")
            card = Cardinality.SINGLE
            if self.at("*"):
                self.next()
                card = Cardinality.SEQUENTIAL
            elif self.at("?"):
                self.next()
                card = Cardinality.OPTIONAL
            fname = self.ident("field name")
            out.append((ftype.value, card, fname.value, fname.lineno))
            tok = self.next()
            if tok.value == ")":
                return out
            if tok.value != ",":
                raise GrammarSyntaxError(f"expected ',' or ')', found {tok.value!r}", tok.lineno)


def parse_grammar(text: str, root_type: str | None = None) -> Grammar:
    """Parse ASDL text into a :class:`Grammar`.

    ``root_type`` defaults to the first declared type.
    """
    if not text or not text.strip():
        raise GrammarSyntaxError("empty grammar")
    defs = _Parser(text).parse()
    if not defs:
        raise GrammarSyntaxError("grammar defines no types")

    composite: dict[str, TypeName] = {}
    for name, lineno, _ in defs:
        if name in composite:
            raise DuplicateType(f"line {lineno}: type {name!r} defined twice")
        composite[name] = TypeName(name, Kind.COMPOSITE)

    types = dict(composite)
    for _, _, ctors in defs:
        for _, _, fields in ctors:
            for ftype, _, _, _ in fields:
                if ftype not in types:
                    types[ftype] = TypeName(ftype, Kind.PRIMITIVE)

    constructors = []
    names = set()
    for tname, _, ctors in defs:
        for cname, lineno, fields in ctors:
            if cname in names:
                raise DuplicateConstructor(f"line {lineno}: constructor {cname!r} defined twice")
            names.add(cname)
            fnames = set()
            built = []
            for ftype, card, fname, flineno in fields:
                if fname in fnames:
                    raise GrammarSyntaxError(
                        f"duplicate field {fname!r} in constructor {cname!r}", flineno
                    )
                fnames.add(fname)
                built.append(Field(fname, types[ftype], card))
            constructors.append(Constructor(cname, composite[tname], tuple(built)))

    if root_type is None:
        root_type = defs[0][0]
    if root_type not in types:
        raise UnknownRootType(f"root type {root_type!r} is not defined")
    return Grammar(types.values(), constructors, root_type)


def render_grammar(grammar: Grammar) -> str:
    """Canonical text form: one production per line, declaration order."""
    lines = []
    for t in grammar.composite_types:
        ctors = grammar.constructors_of(t)
        lines.append(f"{t.name} = " + " | ".join(str(c) for c in ctors))
    return "\n".join(lines) + "\n"


def grammar_fingerprint(grammar: Grammar) -> str:
    canon = f"root {grammar.root_type.name}\n{render_grammar(grammar)}"
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def load_grammar(path, root_type: str | None = None) -> Grammar:
    with open(path, encoding="utf-8") as f:
        return parse_grammar(f.read(), root_type)
