import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sensevec.corpus import Vocabulary
from sensevec.huffman import build_huffman
from sensevec.model import SenseModel, init_model


def make_vocabulary(freqs: list[int], words: list[str] | None = None) -> Vocabulary:
    if words is None:
        words = [f"w{i}" for i in range(len(freqs))]
    freqs_arr = np.asarray(freqs, dtype=np.int64)
    return Vocabulary(words=words, freq=freqs_arr, total_tokens=int(freqs_arr.sum()))


def make_toy_model(
    n_words=6,
    n_senses=3,
    dim=8,
    alpha=0.3,
    seed=0,
    dtype=np.float64,
    randomize=True,
    scale=1.0,
) -> SenseModel:
    """Random small model; randomize=False keeps init (zero out_vecs)."""
    rng = np.random.default_rng(seed)
    freqs = rng.integers(5, 200, size=n_words).tolist()
    vocab = make_vocabulary(sorted(freqs, reverse=True))
    codes = build_huffman(vocab.freq)
    model = init_model(
        vocab, codes, dim=dim, n_senses=n_senses, alpha=alpha, seed=seed, dtype=dtype
    )
    if randomize:
        model.in_vecs = (scale * rng.normal(size=model.in_vecs.shape)).astype(dtype)
        model.out_vecs = (scale * rng.normal(size=model.out_vecs.shape)).astype(dtype)
        counts = rng.gamma(1.0, 20.0, size=model.counts.shape)
        counts *= (vocab.freq / counts.sum(axis=1))[:, None]
        model.counts = counts
    return model


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
