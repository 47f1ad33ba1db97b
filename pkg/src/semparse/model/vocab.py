from __future__ import annotations

from collections import Counter
from typing import Iterable

UNK = "<unk>"


class Vocab:
    """Token <-> id mapping with a fixed set of leading special tokens."""

    def __init__(self, tokens: Iterable[str], specials: Iterable[str] = (UNK,)):
        self.itos: list[str] = []
        self.stoi: dict[str, int] = {}
        for t in list(specials) + list(tokens):
            if t not in self.stoi:
                self.stoi[t] = len(self.itos)
                self.itos.append(t)
        self.unk_id = self.stoi.get(UNK)

    @classmethod
    def build(cls, counts: Counter, cutoff: int, specials=(UNK,)) -> "Vocab":
        kept = sorted((t for t, n in counts.items() if n >= cutoff), key=lambda t: (-counts[t], t))
        return cls(kept, specials)

    def __len__(self):
        return len(self.itos)

    def __contains__(self, token):
        return token in self.stoi

    def __getitem__(self, token) -> int:
        return self.stoi.get(token, self.unk_id)

    def ids(self, tokens) -> list[int]:
        return [self[t] for t in tokens]

    def to_list(self) -> list[str]:
        return list(self.itos)

    @classmethod
    def from_list(cls, itos: list[str]) -> "Vocab":
        return cls(itos, specials=())

    def __eq__(self, other):
        return isinstance(other, Vocab) and self.itos == other.itos

    def __repr__(self):
        return f"Vocab({len(self)} tokens)"
