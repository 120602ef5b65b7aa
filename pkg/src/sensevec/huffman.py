"""Frequency-based Huffman tree for the hierarchical softmax output layer.

Each of the V-1 internal nodes owns one output vector.  A word's code is
the root-to-leaf sequence of internal node ids together with the branch
taken at each: +1 for the left child, -1 for the right.  The code set is a
prefix code, so the branch sigmoids multiply out to a distribution over the
vocabulary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass
class HuffmanCode:
    """Per-word root-to-leaf paths through the internal nodes.

    nodes[w] and signs[w] have equal length: the ids of the internal nodes
    visited and the +-1 branch direction taken at each.
    """

    nodes: list[np.ndarray]  # per word: (len,) int32 internal node ids
    signs: list[np.ndarray]  # per word: (len,) float64 in {+1.0, -1.0}

    @property
    def n_internal(self) -> int:
        return len(self.nodes) - 1

    def path_length(self, word: int) -> int:
        return len(self.nodes[word])


def build_huffman(freqs) -> HuffmanCode:
    """Build an optimal binary prefix code over word frequencies.

    Deterministic two-queue construction: leaves sorted by (weight, word id)
    feed one queue, merged nodes the other in creation order; ties between
    the queue fronts prefer the leaf queue (earlier creation).  The merged
    node's weight is the sum, and of the two merged nodes the earlier
    created becomes the left child (sign +1).
    """
    freqs = np.asarray(freqs, dtype=np.int64)
    n_words = len(freqs)
    if n_words < 2:
        raise ValueError("hierarchical softmax needs a vocabulary of >= 2 words")
    if np.min(freqs) <= 0:
        raise ValueError("all frequencies must be positive")

    order = sorted(range(n_words), key=lambda w: (int(freqs[w]), w))
    # entries: (weight, creation index, is_leaf, payload)
    leaves = deque(
        (int(freqs[w]), rank, True, w) for rank, w in enumerate(order)
    )
    merged: deque = deque()
    children: list[tuple] = []  # per internal node: (left entry, right entry)
    creation = n_words

    def pop_min():
        if leaves and merged:
            if (leaves[0][0], leaves[0][1]) <= (merged[0][0], merged[0][1]):
                return leaves.popleft()
            return merged.popleft()
        return leaves.popleft() if leaves else merged.popleft()

    for node_id in range(n_words - 1):
        first = pop_min()
        second = pop_min()
        left, right = (first, second) if first[1] < second[1] else (second, first)
        children.append((left, right))
        merged.append((first[0] + second[0], creation, False, node_id))
        creation += 1

    nodes: list[np.ndarray] = [None] * n_words  # type: ignore[list-item]
    signs: list[np.ndarray] = [None] * n_words  # type: ignore[list-item]
    root = n_words - 2
    stack = [(root, [], [])]
    while stack:
        node_id, path, path_signs = stack.pop()
        for entry, sign in zip(children[node_id], (+1.0, -1.0)):
            _, _, is_leaf, payload = entry
            if is_leaf:
                nodes[payload] = np.array(path + [node_id], dtype=np.int32)
                signs[payload] = np.array(path_signs + [sign], dtype=np.float64)
            else:
                stack.append((payload, path + [node_id], path_signs + [sign]))
    return HuffmanCode(nodes=nodes, signs=signs)
