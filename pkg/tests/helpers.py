"""Shared fixtures data for the test-suite."""

from __future__ import annotations

import json
from pathlib import Path

from semparse.table import TableContext

DATA = Path(__file__).parent / "data"
GRAMMAR_NAMES = ("minimal", "lambda_calculus", "wikisql", "pyexpr")

READ_CSV_CODE = "pandas.read_csv('file.csv', nrows=1000)"

# token pools that keep random trees inside each converter's surface syntax
POOLS = {
    "minimal": ["x", "y", "foo"],
    "lambda_calculus": {
        "var": ["$0", "$1", "$2"],
        "ent": ["texas:s", "austin_tx:c", "dallas:ci", "ua:al"],
        "num": ["0", "5", "12.5", "1000"],
        "pred": ["state:t", "next_to:t", "loc:t", "population:i", "flight"],
        "var_type": ["e", "i"],
    },
    "wikisql": {
        "idx": ["0", "1", "2"],
        "string": ["texas", "12", "Calvin", "Mccarty", "blue", "x-ray"],
    },
    "pyexpr": {
        "identifier": ["pandas", "read_csv", "np", "x", "nrows", "sep"],
        "string": ["file.csv", "hello", "a", "b.txt"],
        "object": ["0", "7", "1000", "2.5"],
    },
}

RANDOM_TABLE = TableContext(["Player", "No.", "Position"], [["a", "1", "x"]])

# criterion number -> (passed, detail); filled by test_acceptance, printed by conftest
ACCEPTANCE: dict = {}


def sql_tables() -> list[TableContext]:
    return [TableContext.from_json(t) for t in json.loads((DATA / "sql_tables.json").read_text())]


def sql_forms() -> list[tuple[TableContext, str]]:
    tables = sql_tables()
    rows = [json.loads(l) for l in (DATA / "sql_forms.jsonl").read_text().splitlines() if l.strip()]
    return [(tables[r["table"]], r["sql"]) for r in rows]


def lambda_forms() -> list[str]:
    return [l.strip() for l in (DATA / "lambda_forms.txt").read_text().splitlines() if l.strip()]


# --- model helpers -------------------------------------------------------------

def tiny_config(**overrides):
    from semparse.model import ScorerConfig

    base = dict(embed_dim=4, hidden_dim=5, field_embed_dim=3, action_embed_dim=3,
                dropout_rate=0.0, vocab_cutoff=1, scalar_precision="double", init_scale=0.5)
    base.update(overrides)
    return ScorerConfig(**base)


def finite_difference_errors(scorer, plan, eps=1e-5):
    """Per-tensor relative error ||analytic - numeric|| / max(||analytic||, ||numeric||)."""
    import numpy as np

    _, grads = scorer.loss_and_grad(plan)
    errors = {}
    for name, p in scorer.params.items():
        flat = p.reshape(-1)
        num = np.zeros(flat.size)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = scorer.loss_and_grad(plan, grad=False)[0]
            flat[i] = orig - eps
            down = scorer.loss_and_grad(plan, grad=False)[0]
            flat[i] = orig
            num[i] = (up - down) / (2 * eps)
        ana = grads[name].reshape(-1)
        scale = max(np.linalg.norm(ana), np.linalg.norm(num))
        errors[name] = 0.0 if scale == 0 else float(np.linalg.norm(ana - num) / scale)
    return errors


def random_examples(grammar_name, n, seed=0, max_depth=4):
    """Random (utterance, tree, table) examples whose utterances share tokens with the trees."""
    import random

    from semparse.grammars import load_bundled
    from semparse.trees import random_ast
    from semparse.data import Example

    g = load_bundled(grammar_name)
    rng = random.Random(seed)
    pool = POOLS[grammar_name]
    words = sorted({w for v in (pool.values() if isinstance(pool, dict) else [pool]) for w in v})
    table = RANDOM_TABLE if grammar_name == "wikisql" else None
    out = []
    for i in range(n):
        t = random_ast(g, max_depth, seed * 100_003 + i, pool)
        utt = tuple(rng.choice(words + ["the", "of", "show"]) for _ in range(rng.randint(2, 7)))
        out.append(Example(utt, "", t, table))
    return g, out
