"""Neural scorer, training loop and checkpoints."""

from .scorer import DecoderStep, EncoderStates, Scorer, ScorerConfig
from .vocab import UNK, Vocab

__all__ = ["DecoderStep", "EncoderStates", "Scorer", "ScorerConfig", "UNK", "Vocab"]
