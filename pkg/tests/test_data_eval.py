import json

import pytest

from helpers import DATA
from semparse.converters import sql_to_ast
from semparse.data import Example, load_dataset, parse_line, read_records, tokenize_utterance, write_dataset
from semparse.errors import ConversionError, ParseError
from semparse.evaluation import evaluate
from semparse.grammars import load_bundled
from semparse.table import TableContext


def test_tokenize():
    assert tokenize_utterance("  Which States\tBorder TEXAS ") == ["which", "states", "border", "texas"]


def test_load_dataset_preserves_order():
    g = load_bundled("lambda_calculus")
    exs = load_dataset(DATA / "lambda_overfit.jsonl", "lambda", g)
    rows = [json.loads(l) for l in (DATA / "lambda_overfit.jsonl").read_text().splitlines()]
    assert len(exs) == 50
    assert [e.mr_text for e in exs] == [r["mr"] for r in rows]
    assert exs[0].utterance == tuple(rows[0]["utterance"].split())
    assert all(e.table is None for e in exs)


def test_sql_dataset_has_tables():
    g = load_bundled("wikisql")
    exs = load_dataset(DATA / "wikisql_fixture.jsonl", "sql", g)
    assert len(exs) == 20
    assert all(isinstance(e.table, TableContext) and e.table.width > 0 for e in exs)


def test_conversion_errors_list_every_line(tmp_path):
    path = tmp_path / "d.jsonl"
    write_dataset(path, [
        {"utterance": "ok", "mr": "(state:t $0)"},
        {"utterance": "bad", "mr": "(state:t $0"},
        {"utterance": "ok", "mr": "texas:s"},
        {"utterance": "bad", "mr": "(count $0)"},
    ])
    with pytest.raises(ConversionError) as info:
        load_dataset(path, "lambda", load_bundled("lambda_calculus"))
    assert info.value.lines == [2, 4]


@pytest.mark.parametrize("line,fragment", [
    ("{not json", "invalid JSON"),
    ('["a"]', "JSON object"),
    ('{"utterance": "x"}', "mr"),
    ('{"utterance": "  ", "mr": "x"}', "empty utterance"),
    ('{"utterance": "x", "mr": "y", "table": {"rows": []}}', "bad table"),
])
def test_parse_line_errors(line, fragment):
    with pytest.raises(ParseError) as info:
        parse_line(line, 7)
    assert info.value.lineno == 7
    assert fragment in str(info.value)


def test_read_records_skips_blank_lines_and_reports_line_numbers(tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_text('{"utterance": "a", "mr": "b"}\n\n{"utterance": "c"}\n')
    with pytest.raises(ParseError) as info:
        read_records(path)
    assert info.value.lineno == 3
    with pytest.raises(ParseError):
        read_records(tmp_path / "missing.jsonl")


def test_write_dataset_round_trip(tmp_path):
    table = TableContext(["a", "b"], [["1", "2"]])
    write_dataset(tmp_path / "x.jsonl", [{"utterance": "q", "mr": "SELECT a FROM Table", "table": table}])
    ((n, rec),) = read_records(tmp_path / "x.jsonl")
    assert n == 1 and rec["table"].column_names == table.column_names


# --- evaluation ----------------------------------------------------------------

@pytest.fixture(scope="module")
def sql_examples():
    g = load_bundled("wikisql")
    return g, load_dataset(DATA / "wikisql_fixture.jsonl", "sql", g)


def test_gold_against_itself(sql_examples):
    g, exs = sql_examples
    report = evaluate(exs, [e.tree for e in exs])
    assert report.exact_match_accuracy == 1.0
    assert report.execution_accuracy == 1.0
    assert report.num_examples == 20 and report.num_failed == 0


def test_lambda_has_no_execution_accuracy():
    g = load_bundled("lambda_calculus")
    exs = load_dataset(DATA / "lambda_overfit.jsonl", "lambda", g)[:5]
    report = evaluate(exs, [e.tree for e in exs])
    assert report.execution_accuracy is None and report.exact_match_accuracy == 1.0


def test_value_differing_prediction():
    g = load_bundled("wikisql")
    table = TableContext(["Player", "Team"], [["Ann", "Red"], ["Bob", "Blue"]])
    gold = sql_to_ast("SELECT Player FROM Table WHERE Team = Red", table, g)
    same_answer = sql_to_ast("SELECT Player FROM Table WHERE Team = RED", table, g)
    other_answer = sql_to_ast("SELECT Player FROM Table WHERE Team = Blue", table, g)
    ex = Example(("who", "is", "red"), "SELECT Player FROM Table WHERE Team = Red", gold, table)
    r = evaluate([ex, ex], [same_answer, other_answer])
    assert [o.exact_match for o in r.per_example_outcomes] == [False, False]
    assert [o.execution_match for o in r.per_example_outcomes] == [True, False]
    assert r.exact_match_accuracy == 0.0 and r.execution_accuracy == 0.5


def test_indeterminate_gold_is_excluded():
    g = load_bundled("wikisql")
    table = TableContext(["Player", "Team"], [["Ann", "Red"]])
    empty_gold = sql_to_ast("SELECT Player FROM Table WHERE Team = Green", table, g)
    ok_gold = sql_to_ast("SELECT Player FROM Table", table, g)
    exs = [Example(("a",), "", empty_gold, table), Example(("b",), "", ok_gold, table)]
    r = evaluate(exs, [empty_gold, ok_gold])
    assert r.num_indeterminate == 1
    assert r.per_example_outcomes[0].status == "indeterminate"
    assert r.execution_accuracy == 1.0


def test_failed_predictions_count_as_misses(sql_examples):
    g, exs = sql_examples
    preds = [None] + [e.tree for e in exs[1:]]
    r = evaluate(exs, preds)
    assert r.num_failed == 1
    assert r.exact_match_accuracy == pytest.approx(19 / 20)
    assert r.per_example_outcomes[0].status == "fail"
    with pytest.raises(ValueError):
        evaluate(exs, preds[:-1])


def test_report_json_schema(sql_examples):
    g, exs = sql_examples
    r = evaluate(exs[:2], [e.tree for e in exs[:2]], [e.mr_text for e in exs[:2]])
    obj = json.loads(r.to_json())
    assert sorted(obj) == ["exact_match_accuracy", "execution_accuracy", "num_examples", "num_failed",
                           "num_indeterminate", "per_example_outcomes"]
    assert sorted(obj["per_example_outcomes"][0]) == ["exact_match", "execution_match", "gold", "index",
                                                      "predicted", "status", "utterance"]
    assert obj["per_example_outcomes"][1]["predicted"] == exs[1].mr_text
    assert r.to_json() == r.to_json()
    assert "exact_match: 1.0000" in r.summary()
