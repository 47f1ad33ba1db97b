"""Top-down, left-to-right transition system over ASDL trees.

A derivation starts from a virtual ``root`` field typed with the grammar's
root type.  Each action expands the *frontier field*, the leftmost field that
is still open:

* ``ApplyConstr[c]`` attaches a node built with constructor ``c`` to a
  composite frontier field of the same type;
* ``Reduce`` closes an optional or sequential field;
* ``GenToken[v]`` fills a primitive field.  ``string`` fields take a run of
  tokens closed by ``GenToken[</f>]``;
* ``SelColumn[k]`` fills an ``idx`` field with column ``k`` of the attached
  table.

Hypotheses are persistent: applying an action returns a new hypothesis and
leaves the old one untouched, so beams can branch freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence, Union

from .asdl import Cardinality, Constructor, Field, Grammar
from .errors import (
    CompleteHypothesis,
    IllegalAction,
    IncompleteSequence,
    InvalidTree,
    TrailingActions,
)
from .table import TableContext
from .trees import AbstractTree, PrimitiveValue, RealizedField, is_multi_token, validate_ast

END_TOKEN = "</f>"
COLUMN_TYPE = "idx"
ROOT_FIELD = "root"
ROOT_OWNER = "<root>"

# A filled optional field closes by itself; flip to demand an explicit Reduce.
AUTO_CLOSE_OPTIONAL = True


# --- actions ---------------------------------------------------------------

@dataclass(frozen=True)
class ApplyConstr:
    constructor: Constructor

    def __str__(self):
        return f"APPLY {self.constructor.name}"


@dataclass(frozen=True)
class Reduce:
    def __str__(self):
        return "REDUCE"


REDUCE = Reduce()


@dataclass(frozen=True)
class GenToken:
    token: str

    def __post_init__(self):
        if not isinstance(self.token, str) or not self.token:
            raise ValueError("GenToken needs a non-empty token")

    def __str__(self):
        return f"GENTOKEN {_quote(self.token)}"


@dataclass(frozen=True)
class SelColumn:
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 0:
            raise ValueError("SelColumn index must be a non-negative integer")

    def __str__(self):
        return f"SELCOL {self.index}"


Action = Union[ApplyConstr, Reduce, GenToken, SelColumn]


def _quote(token: str) -> str:
    if token.startswith('"') or any(ch.isspace() for ch in token):
        return json.dumps(token, ensure_ascii=False)
    return token


def format_action(action: Action) -> str:
    return str(action)


def format_actions(actions: Iterable[Action]) -> str:
    return "".join(f"{a}\n" for a in actions)


def parse_action(line: str, grammar: Grammar) -> Action:
    line = line.strip()
    verb, _, rest = line.partition(" ")
    if verb == "REDUCE" and not rest:
        return REDUCE
    if verb == "APPLY":
        return ApplyConstr(grammar.constructor(rest))
    if verb == "GENTOKEN":
        return GenToken(json.loads(rest) if rest.startswith('"') else rest)
    if verb == "SELCOL":
        return SelColumn(int(rest))
    raise ValueError(f"not an action: {line!r}")


def parse_actions(text: str, grammar: Grammar) -> list[Action]:
    return [parse_action(ln, grammar) for ln in text.splitlines() if ln.strip()]


@dataclass(frozen=True)
class ActionSpace:
    """The legal actions at a frontier; GenToken is an open class."""

    constructors: tuple[Constructor, ...] = ()
    reduce: bool = False
    tokens: bool = False
    end_token: bool = False
    columns: int = 0

    def __contains__(self, action) -> bool:
        if isinstance(action, ApplyConstr):
            return action.constructor in self.constructors
        if isinstance(action, Reduce):
            return self.reduce
        if isinstance(action, GenToken):
            return self.end_token if action.token == END_TOKEN else self.tokens
        if isinstance(action, SelColumn):
            return action.index < self.columns
        return False

    def enumerate(self, candidate_tokens: Iterable[str] = ()) -> list[Action]:
        """Concrete legal actions, instantiating GenToken over ``candidate_tokens``."""
        out: list[Action] = [ApplyConstr(c) for c in self.constructors]
        out.extend(SelColumn(k) for k in range(self.columns))
        if self.tokens:
            seen = set()
            for t in candidate_tokens:
                if t != END_TOKEN and t not in seen:
                    seen.add(t)
                    out.append(GenToken(t))
        if self.end_token:
            out.append(GenToken(END_TOKEN))
        if self.reduce:
            out.append(REDUCE)
        return out


# --- hypotheses --------------------------------------------------------------

@dataclass(frozen=True)
class FrontierRef:
    node_path: str
    field: Field
    owner: Optional[Constructor]
    parent_step: int

    @property
    def key(self) -> tuple[str, str]:
        """(constructor, field) pair identifying the field for embeddings."""
        return (self.owner.name if self.owner else ROOT_OWNER, self.field.name)

    def __str__(self):
        return f"{self.node_path} ({self.field})"


@dataclass(frozen=True)
class _Frame:
    constructor: Optional[Constructor]
    fields: tuple[Field, ...]
    closed: tuple[tuple, ...]
    current: tuple
    step: int
    path: str

    @property
    def field(self) -> Field:
        return self.fields[len(self.closed)]

    @property
    def field_path(self) -> str:
        name = self.field.name
        return f"{self.path}.{name}" if self.path else name


class Hypothesis:
    """A partial derivation.  Treat as immutable."""

    __slots__ = ("grammar", "table", "frames", "history", "score", "pending", "tree")

    def __init__(self, grammar, table, frames, history, score, pending, tree):
        self.grammar = grammar
        self.table = table
        self.frames = frames
        self.history = history
        self.score = score
        self.pending = pending
        self.tree = tree

    @property
    def actions(self) -> tuple[Action, ...]:
        return tuple(a for a, _ in self.history)

    @property
    def frontier(self) -> Optional[FrontierRef]:
        if not self.frames:
            return None
        top = self.frames[-1]
        return FrontierRef(top.field_path, top.field, top.constructor, top.step)

    @property
    def pending_tokens(self) -> tuple[str, ...]:
        return self.pending

    @property
    def t(self) -> int:
        """Index of the next action."""
        return len(self.history)

    def is_complete(self) -> bool:
        return not self.frames

    def partial_tree(self) -> Optional[AbstractTree]:
        """The derivation so far, open fields holding what they have."""
        if self.tree is not None:
            return self.tree
        node = None
        for frame in reversed(self.frames):
            current = frame.current + ((node,) if node is not None else ())
            if frame.constructor is None:
                return node
            vals = list(frame.closed) + [current]
            vals += [()] * (len(frame.fields) - len(vals))
            node = AbstractTree(frame.constructor, [RealizedField(f, v) for f, v in zip(frame.fields, vals)])
        return node

    def __repr__(self):
        return f"<Hypothesis t={self.t} score={self.score:.4f} frontier={self.frontier}>"


def init_hypothesis(grammar: Grammar, table: Optional[TableContext] = None) -> Hypothesis:
    root = Field(ROOT_FIELD, grammar.root_type, Cardinality.SINGLE)
    frame = _Frame(None, (root,), (), (), -1, "")
    return Hypothesis(grammar, table, (frame,), (), 0.0, (), None)


def is_complete(hyp: Hypothesis) -> bool:
    return hyp.is_complete()


def _field_full(field: Field, n: int) -> bool:
    if field.cardinality is Cardinality.SINGLE:
        return n >= 1
    if field.cardinality is Cardinality.OPTIONAL:
        return AUTO_CLOSE_OPTIONAL and n >= 1
    return False


def _can_add(field: Field, n: int) -> bool:
    return field.cardinality is Cardinality.SEQUENTIAL or n == 0


def _reduce_allowed(field: Field, n: int, pending) -> bool:
    return field.cardinality is not Cardinality.SINGLE and not pending


def valid_actions(hyp: Hypothesis) -> ActionSpace:
    if hyp.is_complete():
        raise CompleteHypothesis("derivation is already complete")
    top = hyp.frames[-1]
    field = top.field
    n = len(top.current)
    reduce = _reduce_allowed(field, n, hyp.pending)
    if not _can_add(field, n):
        return ActionSpace(reduce=reduce)
    if field.type.is_composite:
        return ActionSpace(constructors=hyp.grammar.constructors_of(field.type), reduce=reduce)
    if field.type.name == COLUMN_TYPE and hyp.table is not None:
        return ActionSpace(columns=hyp.table.width, reduce=reduce)
    return ActionSpace(
        tokens=True,
        end_token=is_multi_token(field.type) and bool(hyp.pending),
        reduce=reduce,
    )


def _illegal_reason(space: ActionSpace, field: Field, action) -> tuple[str, str]:
    if isinstance(action, ApplyConstr):
        if not field.type.is_composite:
            return "apply-on-primitive", f"{action.constructor.name} applied to primitive field {field}"
        if action.constructor.type != field.type:
            return "type-mismatch", (
                f"{action.constructor.name} builds {action.constructor.type}, frontier {field} wants {field.type}"
            )
        return "field-full", f"field {field} takes no more values"
    if isinstance(action, Reduce):
        if field.cardinality is Cardinality.SINGLE:
            return "reduce-single", f"cannot Reduce single field {field}"
        return "reduce-half-built", f"cannot Reduce {field} while a value is half built"
    if isinstance(action, GenToken):
        if field.type.is_composite:
            return "token-on-composite", f"GenToken on composite field {field}"
        if action.token == END_TOKEN:
            return "misplaced-terminator", f"{END_TOKEN} not allowed at {field}"
        if space.columns:
            return "column-expected", f"field {field} is filled with SelColumn"
        return "field-full", f"field {field} takes no more values"
    if isinstance(action, SelColumn):
        if not space.columns:
            return "no-column-frontier", f"SelColumn needs an idx frontier with a table, got {field}"
        return "column-out-of-range", f"column {action.index} >= table width {space.columns}"
    return "unknown-action", f"not an action: {action!r}"


def _push_value(frames, value):
    top = frames[-1]
    current = top.current + (value,)
    frames = frames[:-1] + (replace(top, current=current),)
    if _field_full(top.field, len(current)):
        return _close_field(frames)
    return frames, None


def _close_field(frames):
    top = frames[-1]
    closed = top.closed + (top.current,)
    if len(closed) < len(top.fields):
        return frames[:-1] + (replace(top, closed=closed, current=()),), None
    if top.constructor is None:
        return (), closed[0][0]
    node = AbstractTree(top.constructor, [RealizedField(f, v) for f, v in zip(top.fields, closed)])
    return _push_value(frames[:-1], node)


def _open_node(frames, ctor, step):
    if not ctor.fields:
        return _push_value(frames, AbstractTree(ctor, ()))
    top = frames[-1]
    path = top.field_path if top.constructor is not None else ""
    if top.field.cardinality is Cardinality.SEQUENTIAL:
        path = f"{path}[{len(top.current)}]"
    return frames + (_Frame(ctor, ctor.fields, (), (), step, path),), None


def apply_action(hyp: Hypothesis, action: Action, logprob: float = 0.0) -> Hypothesis:
    """Return the hypothesis after ``action``; ``logprob`` is added to the score."""
    space = valid_actions(hyp)
    top = hyp.frames[-1]
    field = top.field
    if action not in space:
        rule, msg = _illegal_reason(space, field, action)
        raise IllegalAction(msg, rule=rule)
    frontier = hyp.frontier
    pending = hyp.pending
    if isinstance(action, ApplyConstr):
        frames, tree = _open_node(hyp.frames, action.constructor, hyp.t)
    elif isinstance(action, Reduce):
        frames, tree = _close_field(hyp.frames)
    elif isinstance(action, SelColumn):
        frames, tree = _push_value(hyp.frames, PrimitiveValue((str(action.index),)))
    elif is_multi_token(field.type):
        if action.token == END_TOKEN:
            frames, tree = _push_value(hyp.frames, PrimitiveValue(pending))
            pending = ()
        else:
            frames, tree = hyp.frames, None
            pending = pending + (action.token,)
    else:
        frames, tree = _push_value(hyp.frames, PrimitiveValue((action.token,)))
    return Hypothesis(
        hyp.grammar, hyp.table, frames, hyp.history + ((action, frontier),),
        hyp.score + logprob, pending, tree,
    )


# --- oracle ------------------------------------------------------------------

def extract_actions(grammar: Grammar, tree: AbstractTree,
                    table: Optional[TableContext] = None) -> list[Action]:
    """The unique action sequence that derives ``tree`` (pre-order)."""
    problems = validate_ast(grammar, tree)
    if problems:
        raise InvalidTree("; ".join(str(p) for p in problems))
    out: list[Action] = []
    _emit(tree, table, out, "")
    return out


def _emit(node, table, out, path):
    out.append(ApplyConstr(node.constructor))
    for rf in node.fields:
        f = rf.field
        for v in rf.values:
            if f.type.is_composite:
                _emit(v, table, out, f"{path}.{f.name}")
            elif f.type.name == COLUMN_TYPE and table is not None:
                tok = v.tokens[0]
                if not tok.isdigit() or int(tok) >= table.width:
                    raise InvalidTree(f"{path}.{f.name}: column {tok!r} not in a {table.width}-column table")
                out.append(SelColumn(int(tok)))
            elif is_multi_token(f.type):
                if END_TOKEN in v.tokens:
                    raise InvalidTree(f"{path}.{f.name}: value contains the reserved token {END_TOKEN}")
                out.extend(GenToken(t) for t in v.tokens)
                out.append(GenToken(END_TOKEN))
            else:
                out.append(GenToken(v.tokens[0]))
        if f.cardinality is Cardinality.SEQUENTIAL:
            out.append(REDUCE)
        elif f.cardinality is Cardinality.OPTIONAL and (not rf.values or not AUTO_CLOSE_OPTIONAL):
            out.append(REDUCE)


def replay(grammar: Grammar, actions: Sequence[Action],
           table: Optional[TableContext] = None) -> Hypothesis:
    """Fold ``actions`` from the initial hypothesis, reporting the failing index."""
    hyp = init_hypothesis(grammar, table)
    for i, a in enumerate(actions):
        if hyp.is_complete():
            raise TrailingActions(f"derivation completed before action {i} ({a})")
        try:
            hyp = apply_action(hyp, a)
        except IllegalAction as e:
            raise IllegalAction(f"action {i} ({a}): {e}", rule=e.rule, index=i) from None
    return hyp


def reconstruct(grammar: Grammar, actions: Sequence[Action],
                table: Optional[TableContext] = None) -> AbstractTree:
    if not actions:
        raise IncompleteSequence("no actions")
    hyp = replay(grammar, actions, table)
    if not hyp.is_complete():
        raise IncompleteSequence(f"derivation still open at {hyp.frontier} after {len(actions)} actions")
    return hyp.tree
