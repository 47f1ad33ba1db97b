"""Mini-batch Adam training with global-norm clipping."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..asdl import Grammar
from ..converters import Converter
from ..data import Example, tokenize_utterance
from ..errors import ConversionFailure, SemparseError
from ..search import greedy_decode
from ..transition import extract_actions
from ..trees import validate_ast
from .scorer import Scorer


@dataclass
class TrainConfig:
    epochs: int = 50
    batch_size: int = 10
    learning_rate: float = 0.005
    clip_norm: float = 5.0
    seed: int = 0
    eval_every: int = 1
    target_em: Optional[float] = None
    max_seconds: Optional[float] = None
    max_actions: int = 200


@dataclass
class EpochStats:
    epoch: int
    loss: float
    train_em: Optional[float]

    def log_line(self) -> str:
        em = "nan" if self.train_em is None else f"{self.train_em:.4f}"
        return f"{self.epoch}, {self.loss:.6f}, {em}"


@dataclass
class TrainResult:
    scorer: Scorer
    history: list = field(default_factory=list)


class Adam:
    def __init__(self, params: dict, lr: float, b1: float = 0.9, b2: float = 0.999, eps: float = 1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def update(self, params: dict, grads: dict):
        self.t += 1
        c1 = 1.0 - self.b1 ** self.t
        c2 = 1.0 - self.b2 ** self.t
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            params[k] -= (self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)).astype(params[k].dtype)


def clip_global_norm(grads: dict, max_norm: float) -> float:
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values())))
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for g in grads.values():
            g *= scale
    return norm


def convert_pairs(pairs: Sequence, grammar: Grammar, converter: Converter) -> list[Example]:
    """(utterance, mr[, table]) tuples -> Examples; every failure is reported together."""
    out, failures = [], []
    for i, pair in enumerate(pairs):
        utt, mr = pair[0], pair[1]
        table = pair[2] if len(pair) > 2 else None
        tokens = tuple(tokenize_utterance(utt)) if isinstance(utt, str) else tuple(utt)
        try:
            tree = converter.to_ast(mr, grammar, table)
            problems = validate_ast(grammar, tree)
            if problems:
                raise SemparseError("; ".join(map(str, problems)))
        except SemparseError as e:
            failures.append((i, mr, str(e)))
            continue
        out.append(Example(tokens, mr, tree, table))
    if failures:
        raise ConversionFailure(f"{len(failures)} example(s) failed to convert", failures)
    return out


def prepare_plans(scorer: Scorer, examples: Sequence[Example]) -> list:
    plans, failures = [], []
    for i, ex in enumerate(examples):
        try:
            actions = extract_actions(scorer.grammar, ex.tree, ex.table)
            plans.append(scorer.make_plan(ex.utterance, actions, ex.table))
        except SemparseError as e:
            failures.append((i, ex.mr_text, str(e)))
    if failures:
        raise ConversionFailure(f"{len(failures)} example(s) have no usable oracle", failures)
    return plans


def exact_match(scorer: Scorer, examples: Sequence[Example], max_actions: int = 200) -> float:
    hits = sum(greedy_decode(scorer, ex.utterance, ex.table, max_actions) == ex.tree for ex in examples)
    return hits / len(examples)


def train(scorer: Scorer, examples: Sequence[Example], config: TrainConfig = TrainConfig(),
          log: Optional[Callable[[EpochStats], None]] = None) -> TrainResult:
    """Train ``scorer`` in place; oracles are extracted once up front."""
    if not examples:
        raise ValueError("cannot train on an empty dataset")
    plans = prepare_plans(scorer, examples)
    rng = np.random.default_rng(config.seed)
    opt = Adam(scorer.params, config.learning_rate)
    result = TrainResult(scorer)
    start = time.monotonic()
    n = len(plans)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for b in range(0, n, config.batch_size):
            batch = order[b:b + config.batch_size]
            grads = scorer.zeros_like_params()
            for i in batch:
                loss, g = scorer.loss_and_grad(plans[i], train=True, rng=rng)
                total += loss
                for k, v in g.items():
                    grads[k] += v
            for v in grads.values():
                v /= len(batch)
            clip_global_norm(grads, config.clip_norm)
            opt.update(scorer.params, grads)
            for k, v in scorer.params.items():
                if not np.all(np.isfinite(v)):
                    raise FloatingPointError(f"parameter {k} became non-finite in epoch {epoch}")
        evaluate = config.eval_every > 0 and ((epoch + 1) % config.eval_every == 0 or epoch + 1 == config.epochs)
        em = exact_match(scorer, examples, config.max_actions) if evaluate else None
        stats = EpochStats(epoch, total / n, em)
        result.history.append(stats)
        if log is not None:
            log(stats)
        if config.target_em is not None and em is not None and em >= config.target_em:
            break
        if config.max_seconds is not None and time.monotonic() - start > config.max_seconds:
            break
    return result
