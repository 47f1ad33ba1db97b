"""Grammar-driven transition-based semantic parsing."""

from __future__ import annotations

from .asdl import Grammar, load_grammar, parse_grammar
from .converters import get_converter
from .data import Example, load_dataset
from .evaluation import EvalReport, evaluate
from .grammars import load_bundled
from .model import Scorer, ScorerConfig
from .search import BeamConfig, Candidate, answer_prune, beam_search, greedy_decode
from .table import TableContext
from .transition import (
    REDUCE,
    ApplyConstr,
    GenToken,
    SelColumn,
    apply_action,
    extract_actions,
    init_hypothesis,
    reconstruct,
    valid_actions,
)
from .trees import AbstractTree, random_ast, validate_ast

__version__ = "0.1.0"

__all__ = [
    "AbstractTree", "ApplyConstr", "BeamConfig", "Candidate", "EvalReport", "Example", "GenToken",
    "Grammar", "REDUCE", "Scorer", "ScorerConfig", "SelColumn", "TableContext", "answer_prune",
    "apply_action", "beam_search", "evaluate", "extract_actions", "get_converter", "greedy_decode",
    "init_hypothesis", "load_bundled", "load_dataset", "load_grammar", "parse_grammar", "random_ast",
    "reconstruct", "valid_actions", "validate_ast",
]
