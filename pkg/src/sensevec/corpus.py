"""Corpus ingestion: vocabulary construction, training windows, pseudo-words.

A corpus is a stream of whitespace-separated UTF-8 tokens.  Sentence and
document boundaries are ignored; context windows are clipped only at the
two ends of the stream.  No lowercasing, stemming or subsampling is applied
here; any preprocessing composes externally.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np


class EmptyVocabularyError(ValueError):
    """No token survived the frequency filter."""


@dataclass
class Vocabulary:
    """Immutable word <-> dense-id map with per-word occurrence counts.

    Ids are 0..V-1 in descending frequency order (ties keep first-occurrence
    order), so downstream tree construction and export order are
    deterministic.  ``total_tokens`` counts retained-word occurrences only.
    """

    words: list[str]
    freq: np.ndarray  # (V,) int64 occurrence counts
    total_tokens: int
    id_of: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.freq = np.asarray(self.freq, dtype=np.int64)
        self.id_of = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, token: str) -> bool:
        return token in self.id_of

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        """Map tokens to ids, silently dropping out-of-vocabulary tokens."""
        id_of = self.id_of
        return np.fromiter(
            (id_of[t] for t in tokens if t in id_of), dtype=np.int32
        )


@dataclass
class TrainingPair:
    """One input word and its window of context word ids."""

    input: int
    context: list[int]


def build_vocabulary(tokens: Iterable[str], min_count: int = 1) -> Vocabulary:
    """Count tokens and keep those occurring at least ``min_count`` times.

    Deterministic for identical input streams.  Raises
    EmptyVocabularyError when nothing survives the filter.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts = Counter()
    for tok in tokens:
        counts[tok] += 1
    # Counter preserves first-occurrence order; a stable sort on -count
    # therefore breaks frequency ties by first occurrence.
    kept = [(w, c) for w, c in counts.items() if c >= min_count]
    if not kept:
        raise EmptyVocabularyError(
            f"no token occurs at least {min_count} times"
        )
    kept.sort(key=lambda wc: -wc[1])
    words = [w for w, _ in kept]
    freq = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(words=words, freq=freq, total_tokens=int(freq.sum()))


def iter_training_pairs(
    token_ids: Sequence[int], window: int
) -> Iterator[TrainingPair]:
    """Yield one (input, context) pair per position.

    The context of position i holds the ids at positions t with
    |t - i| <= window/2 and t != i, clipped at the sequence ends, so its
    length is ``window`` everywhere except near the boundaries.
    """
    if window < 2 or window % 2:
        raise ValueError("window must be an even integer >= 2")
    half = window // 2
    n = len(token_ids)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        ctx = [int(token_ids[t]) for t in range(lo, hi) if t != i]
        yield TrainingPair(input=int(token_ids[i]), context=ctx)


def make_pseudoword_corpus(
    tokens: Sequence[str],
    merges: Sequence[tuple[str, str, str]],
) -> tuple[list[str], list[tuple[int, str, int]]]:
    """Merge word pairs into artificial ambiguous tokens with gold labels.

    Each merge (a, b, new_token) replaces every occurrence of a or b by
    new_token.  The returned labels list holds one (position, pseudoword,
    source_label) triple per replaced occurrence, source_label 0 for a and
    1 for b, ordered by position.  With no merges this is the identity
    transform with an empty label list.
    """
    sub: dict[str, tuple[str, int]] = {}
    seen: set[str] = set()
    for a, b, new_token in merges:
        if a == b:
            raise ValueError(f"cannot merge {a!r} with itself")
        if a in seen or b in seen:
            raise ValueError("merged pairs must be disjoint")
        seen.update((a, b))
        sub[a] = (new_token, 0)
        sub[b] = (new_token, 1)
    out: list[str] = []
    labels: list[tuple[int, str, int]] = []
    for pos, tok in enumerate(tokens):
        hit = sub.get(tok)
        if hit is None:
            out.append(tok)
        else:
            new_token, source = hit
            out.append(new_token)
            labels.append((pos, new_token, source))
    return out, labels


def read_tokens(path) -> Iterator[str]:
    """Stream whitespace-separated tokens from a UTF-8 text file."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield from line.split()


def write_gold_labels(path, labels: Iterable[tuple[int, str, int]]) -> None:
    """Write pseudo-word gold labels as TSV (position, pseudoword, source_label)."""
    with open(path, "w", encoding="utf-8") as fh:
        for pos, word, source in labels:
            fh.write(f"{pos}\t{word}\t{source}\n")


def read_gold_labels(path) -> list[tuple[int, str, int]]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            pos, word, source = line.rstrip("\n").split("\t")
            labels.append((int(pos), word, int(source)))
    return labels
