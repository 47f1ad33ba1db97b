"""Exact-match and execution accuracy over a dataset."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .converters.sql import execute_sql
from .data import Example
from .errors import SemparseError
from .trees import AbstractTree, trees_equal


@dataclass
class Outcome:
    index: int
    utterance: str
    gold: str
    predicted: Optional[str]
    exact_match: bool
    execution_match: Optional[bool] = None
    status: str = "ok"


@dataclass
class EvalReport:
    exact_match_accuracy: float
    execution_accuracy: Optional[float]
    num_examples: int
    num_failed: int
    num_indeterminate: int
    per_example_outcomes: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def summary(self) -> str:
        lines = [f"examples: {self.num_examples}", f"exact_match: {self.exact_match_accuracy:.4f}"]
        if self.execution_accuracy is not None:
            lines.append(f"execution_accuracy: {self.execution_accuracy:.4f}")
            if self.num_indeterminate:
                lines.append(f"execution_indeterminate: {self.num_indeterminate}")
        if self.num_failed:
            lines.append(f"no_prediction: {self.num_failed}")
        return "\n".join(lines)


def _execute(tree, table):
    try:
        return execute_sql(tree, table)
    except SemparseError:
        return None


def evaluate(examples: Sequence[Example], predictions: Sequence[Optional[AbstractTree]],
             predicted_text: Optional[Sequence[Optional[str]]] = None) -> EvalReport:
    """Compare predicted trees to gold trees.

    Execution accuracy is reported when any example has a table.  Examples
    whose gold query returns an empty result are ``indeterminate`` and left
    out of the execution denominator.
    """
    if len(examples) != len(predictions):
        raise ValueError(f"{len(examples)} examples but {len(predictions)} predictions")
    if predicted_text is None:
        predicted_text = [None] * len(examples)
    outcomes = []
    em_hits = ex_hits = ex_total = failed = indeterminate = 0
    with_tables = any(ex.table is not None for ex in examples)
    for i, (ex, pred, text) in enumerate(zip(examples, predictions, predicted_text)):
        em = pred is not None and trees_equal(pred, ex.tree)
        em_hits += em
        status = "ok" if pred is not None else "fail"
        failed += pred is None
        exm = None
        if ex.table is not None:
            gold_res = _execute(ex.tree, ex.table)
            if gold_res is None or gold_res.empty:
                status = "indeterminate" if pred is not None else status
                indeterminate += 1
            else:
                pred_res = _execute(pred, ex.table) if pred is not None else None
                exm = pred_res is not None and pred_res == gold_res
                ex_hits += exm
                ex_total += 1
        outcomes.append(Outcome(i, " ".join(ex.utterance), ex.mr_text, text, bool(em), exm, status))
    n = len(examples)
    return EvalReport(
        exact_match_accuracy=em_hits / n if n else 0.0,
        execution_accuracy=(ex_hits / ex_total if ex_total else 0.0) if with_tables else None,
        num_examples=n,
        num_failed=failed,
        num_indeterminate=indeterminate,
        per_example_outcomes=outcomes,
    )
