"""Deterministic synthetic text for desk-scale experiments.

The generator emits runs of tokens, each run drawn from one of several
disjoint topic vocabularies mixed with a shared pool of function words.
Words from different topics never co-occur inside a run, so merging two
words from different topics creates a genuinely ambiguous pseudo-word whose
occurrences are disambiguable from their context.
"""

from __future__ import annotations

import numpy as np


def topic_corpus(
    n_tokens: int,
    n_topics: int = 10,
    content_per_topic: int = 150,
    n_function: int = 40,
    function_rate: float = 0.25,
    zipf_exponent: float = 1.2,
    run_len: tuple[int, int] = (40, 120),
    seed: int = 0,
) -> list[str]:
    """Generate ~n_tokens whitespace-safe tokens of topic-clustered text."""
    rng = np.random.default_rng(seed)
    content = [
        [f"t{t:02d}w{j:03d}" for j in range(content_per_topic)]
        for t in range(n_topics)
    ]
    function = [f"fn{j:02d}" for j in range(n_function)]
    ranks = np.arange(1, content_per_topic + 1, dtype=np.float64)
    content_p = ranks**-zipf_exponent
    content_p /= content_p.sum()
    franks = np.arange(1, n_function + 1, dtype=np.float64)
    function_p = franks**-1.0
    function_p /= function_p.sum()

    tokens: list[str] = []
    while len(tokens) < n_tokens:
        topic = int(rng.integers(n_topics))
        length = int(rng.integers(run_len[0], run_len[1] + 1))
        is_fn = rng.random(length) < function_rate
        content_ids = rng.choice(content_per_topic, size=length, p=content_p)
        function_ids = rng.choice(n_function, size=length, p=function_p)
        words = content[topic]
        for k in range(length):
            if is_fn[k]:
                tokens.append(function[function_ids[k]])
            else:
                tokens.append(words[content_ids[k]])
    return tokens[:n_tokens]


def pick_merge_pairs(
    n_pairs: int = 5,
    ranks: tuple[int, ...] = (3, 6, 10, 16, 24),
) -> list[tuple[str, str, str]]:
    """Frequency-balanced cross-topic merge pairs for pseudo-word tests.

    Pair m merges the rank-ranks[m] word of topic 2m with the same-rank
    word of topic 2m+1 (same Zipf rank, hence near-equal frequency).
    """
    merges = []
    for m in range(n_pairs):
        a = f"t{2 * m:02d}w{ranks[m]:03d}"
        b = f"t{2 * m + 1:02d}w{ranks[m]:03d}"
        merges.append((a, b, f"pseudo{m}"))
    return merges
