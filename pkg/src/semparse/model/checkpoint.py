"""Checkpoints: one ``.npz`` holding parameters plus a JSON metadata record."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..asdl import Grammar
from ..errors import CheckpointMismatch
from .scorer import Scorer, ScorerConfig
from .vocab import Vocab

FORMAT = "semparse-checkpoint"
VERSION = 1


def save_checkpoint(scorer: Scorer, path) -> Path:
    meta = {
        "format": FORMAT,
        "version": VERSION,
        "config": scorer.config.to_dict(),
        "grammar_fingerprint": scorer.grammar.fingerprint(),
        "root_type": scorer.grammar.root_type.name,
        "src_vocab": scorer.src_vocab.to_list(),
        "tok_vocab": scorer.tok_vocab.to_list(),
    }
    path = Path(path)
    arrays = {f"param/{k}": v for k, v in scorer.params.items()}
    with path.open("wb") as fh:
        np.savez(fh, __meta__=np.array(json.dumps(meta, sort_keys=True)), **arrays)
    return path


def read_meta(path) -> dict:
    try:
        with np.load(path, allow_pickle=False) as z:
            meta = json.loads(str(z["__meta__"]))
    except (OSError, ValueError, KeyError) as e:
        raise CheckpointMismatch(f"{path}: not a readable checkpoint ({e})") from None
    if meta.get("format") != FORMAT:
        raise CheckpointMismatch(f"{path}: unknown checkpoint format")
    if meta.get("version") != VERSION:
        raise CheckpointMismatch(f"{path}: unsupported checkpoint version {meta.get('version')}")
    return meta


def load_checkpoint(path, grammar: Grammar) -> Scorer:
    """Rebuild a scorer; refuses checkpoints trained under a different grammar."""
    meta = read_meta(path)
    if meta["grammar_fingerprint"] != grammar.fingerprint():
        raise CheckpointMismatch(
            f"{path}: checkpoint grammar fingerprint {meta['grammar_fingerprint'][:12]} "
            f"does not match the supplied grammar ({grammar.fingerprint()[:12]})")
    with np.load(path, allow_pickle=False) as z:
        params = {k[len("param/"):]: z[k] for k in z.files if k.startswith("param/")}
    config = ScorerConfig(**meta["config"])
    return Scorer(grammar, config, Vocab.from_list(meta["src_vocab"]),
                  Vocab.from_list(meta["tok_vocab"]), params=params)
