import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import READ_CSV_CODE, GRAMMAR_NAMES, POOLS
from semparse.asdl import Cardinality, parse_grammar
from semparse.converters import pyexpr_to_ast
from semparse.errors import ForeignConstructor, NonTerminatingGrammar
from semparse.grammars import load_bundled
from semparse.trees import (
    AbstractTree,
    PrimitiveValue,
    RealizedField,
    build,
    random_ast,
    to_sexpr,
    trees_equal,
    validate_ast,
)


def read_csv_tree(g):
    C = g.constructor
    return build(C("Expr"), build(
        C("Call"),
        build(C("Attribute"), build(C("Name"), "pandas"), "read_csv"),
        [build(C("Str"), "file.csv")],
        [build(C("keyword"), "nrows", build(C("Num"), "1000"))],
    ))


def test_read_csv_tree_is_valid_and_matches_converter():
    g = load_bundled("pyexpr")
    t = read_csv_tree(g)
    assert validate_ast(g, t) == []
    assert trees_equal(t, pyexpr_to_ast(READ_CSV_CODE, g))


def test_read_csv_sexpr_golden():
    g = load_bundled("pyexpr")
    assert to_sexpr(read_csv_tree(g)) == (
        '(Expr value:(Call func:(Attribute value:(Name id:"pandas") attr:"read_csv") '
        'args:[ (Str s:"file.csv") ] keywords:[ (keyword arg:"nrows" value:(Num n:"1000")) ]))'
    )


def test_missing_single_value_reports_path():
    g = load_bundled("minimal")
    t = AbstractTree(g.constructor("Name"), [RealizedField(g.constructor("Name").fields[0], [])])
    (v,) = validate_ast(g, t)
    assert v.kind == "CardinalityViolation"
    assert v.path == "id"


def test_nested_path_uses_indices():
    g = load_bundled("pyexpr")
    C = g.constructor
    bad_str = AbstractTree(C("Str"), [RealizedField(C("Str").fields[0], [])])
    t = build(C("Expr"), build(C("Call"), build(C("Name"), "f"), [build(C("Name"), "x"), bad_str], []))
    (v,) = validate_ast(g, t)
    assert v.path == "value.args[1].s"


def test_wrong_type_and_token_violations():
    g = load_bundled("pyexpr")
    C = g.constructor
    kw = build(C("keyword"), "k", build(C("Name"), "v"))
    t = build(C("Expr"), kw)
    assert [v.kind for v in validate_ast(g, t)] == ["TypeViolation"]
    t = build(C("Expr"), build(C("Name"), PrimitiveValue(("two", "tokens"))))
    assert [v.kind for v in validate_ast(g, t)] == ["TokenViolation"]


def test_string_fields_take_many_tokens():
    g = load_bundled("pyexpr")
    t = build(g.constructor("Str"), "hello big world")
    assert t["s"].value.tokens == ("hello", "big", "world")
    assert validate_ast(g, build(g.constructor("Expr"), t)) == []


def test_foreign_constructor():
    g = load_bundled("minimal")
    other = load_bundled("pyexpr")
    with pytest.raises(ForeignConstructor):
        validate_ast(g, build(other.constructor("Str"), "x"))


def test_trees_equal_leaf_mismatch_and_reflexive():
    g = load_bundled("pyexpr")
    a = pyexpr_to_ast(READ_CSV_CODE, g)
    b = pyexpr_to_ast(READ_CSV_CODE.replace("1000", "100"), g)
    assert trees_equal(a, a)
    assert trees_equal(a, pyexpr_to_ast(READ_CSV_CODE, g))
    assert not trees_equal(a, b)


def test_minimal_random_ast_is_a_name():
    g = load_bundled("minimal")
    for seed in range(20):
        t = random_ast(g, 3, seed, ["x", "y"])
        assert t.constructor.name == "Name"
        assert t["id"].value.tokens[0] in ("x", "y")


@pytest.mark.parametrize("name", GRAMMAR_NAMES)
def test_random_ast_deterministic_and_valid(name):
    g = load_bundled(name)
    for seed in range(200):
        t = random_ast(g, 4, seed, POOLS[name])
        assert validate_ast(g, t) == []
        assert trees_equal(t, random_ast(g, 4, seed, POOLS[name]))


def test_random_ast_seeds_differ():
    g = load_bundled("lambda_calculus")
    trees = {to_sexpr(random_ast(g, 4, s, POOLS["lambda_calculus"])) for s in range(50)}
    assert len(trees) > 25


def test_random_ast_respects_depth_bound_loosely():
    g = load_bundled("pyexpr")
    for seed in range(100):
        t = random_ast(g, 2, seed, POOLS["pyexpr"])
        assert _depth(t) <= 4


def _depth(t):
    kids = [v for rf in t.fields for v in rf.values if isinstance(v, AbstractTree)]
    return 1 + max((_depth(k) for k in kids), default=0)


def test_non_terminating_grammar():
    g = parse_grammar("a = X(a next)", "a")
    with pytest.raises(NonTerminatingGrammar):
        random_ast(g, 3, 0, ["t"])


def test_random_ast_argument_checks():
    g = load_bundled("minimal")
    with pytest.raises(ValueError):
        random_ast(g, 0, 0, ["x"])
    with pytest.raises(ValueError):
        random_ast(g, 2, 0, [])


# --- mutation testing ----------------------------------------------------------

def _nodes(t, acc):
    acc.append(t)
    for rf in t.fields:
        for v in rf.values:
            if isinstance(v, AbstractTree):
                _nodes(v, acc)
    return acc


def _replace(t, target, new):
    if t is target:
        return new
    fields = [RealizedField(rf.field, [_replace(v, target, new) if isinstance(v, AbstractTree) else v
                                       for v in rf.values]) for rf in t.fields]
    return AbstractTree(t.constructor, fields)


def mutate(g, tree, rng):
    """Corrupt exactly one field of one node; returns None when nothing applies."""
    nodes = [n for n in _nodes(tree, []) if n.fields]
    if not nodes:
        return None
    node = rng.choice(nodes)
    i = rng.randrange(len(node.fields))
    rf = node.fields[i]
    f = rf.field
    options = []
    if f.cardinality is Cardinality.SINGLE:
        options.append([])
    if f.cardinality is not Cardinality.SEQUENTIAL and rf.values:
        options.append(list(rf.values) * 2)
    if f.type.is_composite:
        wrong = [c for c in g.constructors if c.type != f.type and not c.fields]
        if wrong:
            options.append([AbstractTree(wrong[0], [])] + list(rf.values)[1:] if rf.values else None)
        options.append([PrimitiveValue(("tok",))] * max(1, len(rf.values)))
    else:
        options.append([PrimitiveValue(())] * max(1, len(rf.values)))
        if f.type.name != "string":
            options.append([PrimitiveValue(("a", "b"))] * max(1, len(rf.values)))
    options = [o for o in options if o is not None]
    vals = rng.choice(options)
    fields = list(node.fields)
    fields[i] = RealizedField(f, vals)
    return _replace(tree, node, AbstractTree(node.constructor, fields))


@pytest.mark.parametrize("name", GRAMMAR_NAMES)
def test_mutations_are_detected(name):
    g = load_bundled(name)
    rng = random.Random(7)
    checked = 0
    for seed in range(300):
        t = random_ast(g, 4, seed, POOLS[name])
        bad = mutate(g, t, rng)
        if bad is None:
            continue
        checked += 1
        assert validate_ast(g, bad), to_sexpr(t)
    assert checked > 100


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_trees_equal_is_an_equivalence(a, b):
    g = load_bundled("lambda_calculus")
    pool = POOLS["lambda_calculus"]
    ta, tb = random_ast(g, 3, a, pool), random_ast(g, 3, b, pool)
    assert trees_equal(ta, ta)
    assert trees_equal(ta, tb) == trees_equal(tb, ta)
    assert trees_equal(ta, tb) == (to_sexpr(ta) == to_sexpr(tb))
