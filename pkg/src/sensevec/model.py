"""Model state: per-sense prototypes, output vectors, and sense-usage counts.

Each word w owns up to T sense prototypes (rows of ``in_vecs[w]``) and a
nonnegative count vector ``counts[w]`` recording the expected number of its
occurrences assigned to each sense.  The counts are the sufficient
statistics of independent Beta posteriors over the stick-breaking
proportions of a truncated Dirichlet-process prior with concentration
``alpha``: for sense k,

    a_k = 1 + counts[w, k]
    b_k = alpha + sum_{r > k} counts[w, r]

The final stick is pinned to 1 so the T sense probabilities normalize
exactly.  Counts always sum to the word's corpus frequency; training
updates preserve this invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Vocabulary
from .huffman import HuffmanCode
from .numerics import _digamma_core


@dataclass
class SenseModel:
    """All learned parameters plus the vocabulary and tree they index.

    in_vecs:  (V, T, D) sense prototypes (float32 by default for
              throughput; float64 available for gradient checks).
    out_vecs: (V-1, D) internal-node output vectors, same dtype.
    counts:   (V, T) float64 expected sense-assignment counts.
    """

    vocab: Vocabulary
    codes: HuffmanCode
    in_vecs: np.ndarray
    out_vecs: np.ndarray
    counts: np.ndarray
    alpha: float

    @property
    def n_words(self) -> int:
        return len(self.vocab)

    @property
    def n_senses(self) -> int:
        return self.in_vecs.shape[1]

    @property
    def dim(self) -> int:
        return self.in_vecs.shape[2]


def init_model(
    vocab: Vocabulary,
    codes: HuffmanCode,
    dim: int,
    n_senses: int,
    alpha: float,
    seed: int = 1,
    dtype=np.float32,
) -> SenseModel:
    """Conservative initialization: one allocated sense per word.

    counts[w, 0] = freq(w) and 0 elsewhere; prototypes drawn independently
    from Uniform(-0.5/dim, 0.5/dim) by the seeded generator; output vectors
    start at zero so every branch sigmoid is exactly 0.5 on the first step.
    """
    if dim < 1 or n_senses < 1:
        raise ValueError("dim and n_senses must be >= 1")
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    n_words = len(vocab)
    rng = np.random.default_rng(seed)
    bound = 0.5 / dim
    in_vecs = rng.uniform(-bound, bound, size=(n_words, n_senses, dim)).astype(dtype)
    out_vecs = np.zeros((n_words - 1, dim), dtype=dtype)
    counts = np.zeros((n_words, n_senses), dtype=np.float64)
    counts[:, 0] = vocab.freq
    return SenseModel(
        vocab=vocab,
        codes=codes,
        in_vecs=in_vecs,
        out_vecs=out_vecs,
        counts=counts,
        alpha=float(alpha),
    )


def beta_parameters(counts_row: np.ndarray, alpha: float):
    """Beta posterior parameters (a, b) for one word's stick proportions."""
    counts_row = np.asarray(counts_row, dtype=np.float64)
    a = 1.0 + counts_row
    # b_k = alpha + sum of counts of later senses
    b = np.empty_like(a)
    b[-1] = alpha
    if len(a) > 1:
        b[:-1] = alpha + np.cumsum(counts_row[:0:-1])[::-1]
    return a, b


def expected_log_pi(model: SenseModel, word: int) -> np.ndarray:
    """E_q[log p(z = k | word)] under the Beta stick posteriors.

    E[log beta_k] = psi(a_k) - psi(a_k + b_k) and E[log(1 - beta_k)] =
    psi(b_k) - psi(a_k + b_k); entry k accumulates the log-stick of k plus
    the log-remainders of all earlier sticks.  The last stick is pinned to
    1, so its own log term is 0.  Entries are <= 0 and exp-sum to <= 1.
    """
    return _expected_log_pi(model.counts[word], model.alpha)


def _expected_log_pi(counts_row: np.ndarray, alpha: float) -> np.ndarray:
    n_senses = counts_row.shape[0]
    if n_senses == 1:
        return np.zeros(1)  # single stick pinned to 1
    # one fused digamma call over the packed (a, b, a+b) buffer; this runs
    # once per training pair
    buf = np.empty(3 * n_senses)
    a = buf[:n_senses]
    b = buf[n_senses : 2 * n_senses]
    np.add(counts_row, 1.0, out=a)
    b[-1] = alpha
    b[:-1] = np.cumsum(counts_row[:0:-1])[::-1]
    b[:-1] += alpha
    np.add(a, b, out=buf[2 * n_senses :])
    psi = _digamma_core(buf)
    psi_ab = psi[2 * n_senses :]
    log_stick = psi[:n_senses] - psi_ab
    log_rest = psi[n_senses : 2 * n_senses] - psi_ab
    log_stick[-1] = 0.0
    log_stick[1:] += np.cumsum(log_rest[:-1])
    return log_stick


def prior_sense_probs(model: SenseModel, word: int) -> np.ndarray:
    """Predictive sense prior p(z = k | word), the Beta integrals in closed form.

    p(z = k) = E[beta_k] * prod_{r < k} E[1 - beta_r] with E[beta_k] =
    a_k / (a_k + b_k) and the last stick pinned to 1, so the T entries sum
    to 1 up to rounding.
    """
    return _prior_from_counts(model.counts[word], model.alpha)


def _prior_from_counts(counts_row: np.ndarray, alpha: float) -> np.ndarray:
    a, b = beta_parameters(counts_row, alpha)
    mean = a / (a + b)
    mean[-1] = 1.0
    rest = np.concatenate(([1.0], np.cumprod(1.0 - mean[:-1])))
    return mean * rest


def prior_sense_probs_all(model: SenseModel) -> np.ndarray:
    """(V, T) matrix of predictive sense priors, vectorized over words."""
    counts = model.counts
    a = 1.0 + counts
    tail = np.concatenate(
        (np.cumsum(counts[:, ::-1], axis=1)[:, ::-1][:, 1:], np.zeros((len(counts), 1))),
        axis=1,
    )
    b = model.alpha + tail
    mean = a / (a + b)
    mean[:, -1] = 1.0
    rest = np.concatenate(
        (np.ones((len(counts), 1)), np.cumprod(1.0 - mean[:, :-1], axis=1)), axis=1
    )
    return mean * rest


def sense_count(model: SenseModel, word: int, epsilon: float = 1e-3) -> int:
    """Number of senses whose predictive prior exceeds ``epsilon``."""
    if not 0.0 <= epsilon:
        raise ValueError("epsilon must be >= 0")
    return int(np.count_nonzero(prior_sense_probs(model, word) > epsilon))
