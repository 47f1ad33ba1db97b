"""Grammar-constrained beam search and execution-guided answer pruning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .converters.sql import execute_sql
from .table import TableContext
from .transition import Hypothesis, apply_action, init_hypothesis, valid_actions
from .trees import AbstractTree


@dataclass(frozen=True)
class BeamConfig:
    beam_size: int = 5
    max_actions: int = 200
    length_normalize: bool = False

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.max_actions < 1:
            raise ValueError("max_actions must be >= 1")


class Candidate(NamedTuple):
    tree: AbstractTree
    score: float


@dataclass
class _Live:
    hyp: Hypothesis
    step: object
    states: tuple
    texts: tuple


def _final_score(hyp: Hypothesis, normalize: bool) -> float:
    return hyp.score / max(1, hyp.t) if normalize else hyp.score


def beam_search(scorer, utterance: Sequence[str], grammar=None, config: BeamConfig = BeamConfig(),
                table: Optional[TableContext] = None) -> list[Candidate]:
    """Up to ``beam_size`` completed trees, best first.

    Completed hypotheses leave the beam; search stops once ``beam_size`` of
    them exist, the beam empties, or ``max_actions`` steps have run.  Ties
    are broken by completion step, then by the action sequence text.
    """
    grammar = grammar if grammar is not None else scorer.grammar
    enc = scorer.encode(utterance, table)
    k = config.beam_size
    beam = [_Live(init_hypothesis(grammar, table), None, (), ())]
    finished = []
    for t in range(config.max_actions):
        if not beam or len(finished) >= k:
            break
        pool = []
        for live in beam:
            hyp = live.hyp
            frontier = hyp.frontier
            parent = live.states[frontier.parent_step] if frontier.parent_step >= 0 else None
            prev_action = hyp.history[-1][0] if hyp.history else None
            step = scorer.decode_step(live.step, prev_action, frontier, parent, enc)
            lps = scorer.action_logprobs(step, valid_actions(hyp), enc)
            ranked = sorted(lps.items(), key=lambda kv: (-kv[1], str(kv[0])))[:k]
            for action, lp in ranked:
                pool.append((hyp.score + lp, live.texts + (str(action),), live, step, action, lp))
        pool.sort(key=lambda c: (-c[0], c[1]))
        beam = []
        for _, texts, live, step, action, lp in pool:
            if len(beam) >= k:
                break
            new = apply_action(live.hyp, action, lp)
            if new.is_complete():
                finished.append((new, t, texts))
                if len(finished) >= k:
                    break
            else:
                beam.append(_Live(new, step, live.states + (step.h,), texts))
    finished.sort(key=lambda f: (-_final_score(f[0], config.length_normalize), f[1], f[2]))
    return [Candidate(h.tree, _final_score(h, config.length_normalize)) for h, _, _ in finished[:k]]


def greedy_decode(scorer, utterance, table=None, max_actions: int = 200) -> Optional[AbstractTree]:
    result = beam_search(scorer, utterance, None, BeamConfig(1, max_actions), table)
    return result[0].tree if result else None


def answer_prune(candidates: Sequence, table: TableContext) -> list:
    """Drop candidates whose query returns nothing; keep all if every one does."""
    kept = [c for c in candidates if not execute_sql(c[0], table).empty]
    return kept if kept else list(candidates)
