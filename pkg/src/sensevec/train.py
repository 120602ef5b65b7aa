"""Online variational EM training.

Each training pair (input word w, context y) is processed in two moves:

  local step   gamma_k proportional to exp(E[log p(z=k|w)] + sum_j log p(y_j|w,k)),
               the exact optimum of the per-pair variational problem;
  global step  counts[w] interpolate toward freq(w) * gamma with step
               lambda, then the prototype of every active sense and the
               output vectors on the context paths take a gradient step of
               size rho on the gamma-weighted log-likelihood.

Both step sizes follow the same linear decay from their initial value to a
small floor over epochs * pairs updates.  Single-worker mode is fully
deterministic given the seed; the optional multi-worker mode applies
unsynchronized updates to the shared arrays (races permitted, results
nondeterministic, count conservation only approximate).
"""

from __future__ import annotations

import sys
import threading
import time
from dataclasses import dataclass
from math import isfinite
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

from .corpus import build_vocabulary
from .huffman import HuffmanCode, build_huffman
from .model import SenseModel, _expected_log_pi, init_model
from .numerics import log_sigmoid, logsumexp, softmax

# Senses with posterior weight below this skip the vector-gradient
# accumulation; the count update always uses the full gamma.
GAMMA_CUTOFF = 1e-10


class TrainingDivergedError(RuntimeError):
    """A non-finite value appeared in the variational scores."""


@dataclass
class TrainingConfig:
    """Hyperparameters of one training run."""

    window: int = 10
    epochs: int = 1
    dim: int = 300
    n_senses: int = 30
    alpha: float = 0.15
    min_count: int = 20
    grad_rate: float = 0.025   # initial rho
    count_rate: float = 0.025  # initial lambda
    min_rate: float | None = None  # default 1e-4 * grad_rate; 0 decays to zero
    seed: int = 1
    workers: int = 1
    dtype: type = np.float32

    def __post_init__(self):
        if self.window < 2 or self.window % 2:
            raise ValueError("window must be an even integer >= 2")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0.0 < self.grad_rate <= 1.0:
            raise ValueError("grad_rate must be in (0, 1]")
        if not 0.0 < self.count_rate <= 1.0:
            raise ValueError("count_rate must be in (0, 1]")
        if self.min_rate is not None and self.min_rate < 0.0:
            raise ValueError("min_rate must be >= 0")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def rate_floor(self) -> float:
        return 1e-4 * self.grad_rate if self.min_rate is None else self.min_rate


def schedule_rate(i: int, n_total: int, base: float, floor: float) -> float:
    """Linear decay from ``base`` at i=0 to max(floor, 0) at i=n_total."""
    return max(floor, base * (1.0 - i / n_total))


def _context_arrays(codes: HuffmanCode, context: Sequence[int]):
    """Concatenated Huffman node ids and branch signs of all context words."""
    if len(context) == 1:
        y = context[0]
        return codes.nodes[y], codes.signs[y]
    nodes = codes.nodes
    signs = codes.signs
    return (
        np.concatenate([nodes[y] for y in context]),
        np.concatenate([signs[y] for y in context]),
    )


def _signed_scores(model: SenseModel, word: int, nodes, signs):
    """float64 prototype/output copies and the (T, L) signed score matrix."""
    in64 = model.in_vecs[word].astype(np.float64)
    out64 = model.out_vecs[nodes].astype(np.float64)
    return in64, out64, signs * (in64 @ out64.T)


def local_step(model: SenseModel, word: int, context: Sequence[int]) -> np.ndarray:
    """Optimal per-pair sense posterior gamma given the current globals."""
    scores = _expected_log_pi(model.counts[word], model.alpha)
    if len(context):
        nodes, signs = _context_arrays(model.codes, context)
        _, _, ss = _signed_scores(model, word, nodes, signs)
        scores = scores + np.sum(log_sigmoid(ss), axis=1)
    return softmax(scores)


def global_step(
    model: SenseModel,
    word: int,
    context: Sequence[int],
    gamma: np.ndarray,
    grad_rate: float,
    count_rate: float,
) -> None:
    """Count interpolation followed by the gamma-weighted gradient step.

    counts[word] move toward freq(word) * gamma by a factor count_rate
    (written in delta form, which preserves sum(counts) = freq exactly and
    is a bitwise no-op at the fixed point); then in_vecs[word] and the
    touched out_vecs rows take the gradient step of size grad_rate.  Counts
    update first, matching the listed order of the global step.
    """
    freq = float(model.vocab.freq[word])
    model.counts[word] += count_rate * (freq * gamma - model.counts[word])
    if len(context):
        nodes, signs = _context_arrays(model.codes, context)
        in64, out64, ss = _signed_scores(model, word, nodes, signs)
        _apply_gradients(model, word, nodes, signs, in64, out64, ss, gamma, grad_rate)


def _apply_gradients(model, word, nodes, signs, in64, out64, ss, gamma, grad_rate):
    """Gradient step on the prototype rows and the touched output rows.

    Senses below GAMMA_CUTOFF are skipped.  Node contributions repeated
    along the context (shared path prefixes) are segment-summed per unique
    node before the single output gemm, in original occurrence order.
    """
    active = gamma > GAMMA_CUTOFF
    all_active = bool(active.all())
    if all_active:
        gam, ss_act, in_act = gamma, ss, in64
    else:
        gam, ss_act, in_act = gamma[active], ss[active], in64[active]
    coeff = signs * expit(-ss_act)  # (Ta, L): sign_n * sigma(-sign_n * s_n)
    grad_in = coeff @ out64  # (Ta, D)

    order = np.argsort(nodes, kind="stable")
    sorted_nodes = nodes[order]
    change = np.flatnonzero(sorted_nodes[1:] != sorted_nodes[:-1]) + 1
    starts = np.concatenate(([0], change))
    coeff_unique = np.add.reduceat(coeff[:, order], starts, axis=1)  # (Ta, U)
    delta_out = coeff_unique.T @ (gam[:, np.newaxis] * in_act)  # (U, D)

    delta_in = grad_rate * (gam[:, np.newaxis] * grad_in)
    if all_active:
        model.in_vecs[word] += delta_in
    else:
        model.in_vecs[word][active] += delta_in
    model.out_vecs[sorted_nodes[starts]] += np.asarray(
        grad_rate * delta_out, dtype=model.out_vecs.dtype
    )


def local_elbo(
    model: SenseModel, word: int, context: Sequence[int], gamma: np.ndarray
) -> float:
    """Per-pair evidence bound sum_k gamma_k (score_k - log gamma_k).

    score_k is the prior expectation plus the context log-likelihood of
    sense k; 0 * log 0 counts as 0.  local_step's gamma maximizes this over
    the simplex, where the value equals logsumexp(scores).
    """
    scores = _expected_log_pi(model.counts[word], model.alpha)
    if len(context):
        nodes, signs = _context_arrays(model.codes, context)
        _, _, ss = _signed_scores(model, word, nodes, signs)
        scores = scores + np.sum(log_sigmoid(ss), axis=1)
    gamma = np.asarray(gamma, dtype=np.float64)
    mask = gamma > 0.0
    return float(np.sum(gamma[mask] * (scores[mask] - np.log(gamma[mask]))))


def train(
    tokens: Iterable[str], config: TrainingConfig, progress: bool = False
) -> SenseModel:
    """Build vocabulary, tree and model, then run the online EM over pairs.

    Makes ``config.epochs`` passes over the token stream; the pair at
    global index i of n_total = epochs * pairs trains with both rates at
    max(rate_floor, rate0 * (1 - i/n_total)).  Single-worker runs are
    bit-reproducible for a fixed seed.
    """
    tokens = tokens if isinstance(tokens, (list, tuple)) else list(tokens)
    vocab = build_vocabulary(tokens, config.min_count)
    ids = vocab.encode(tokens)
    codes = build_huffman(vocab.freq)
    model = init_model(
        vocab,
        codes,
        dim=config.dim,
        n_senses=config.n_senses,
        alpha=config.alpha,
        seed=config.seed,
        dtype=config.dtype,
    )
    if config.workers == 1:
        _train_single(model, ids, config, progress)
    else:
        _train_hogwild(model, ids, config, progress)
    return model


def _pair_step(model, counts, freqs, alpha, paths, path_signs, word, context,
               grad_rate, count_rate, pair_index) -> float:
    """One fused local+global step; returns the pair's variational bound.

    Identical arithmetic, in the same order, to local_step followed by
    global_step; computing the signed scores once is the only difference.
    """
    row = counts[word]
    scores = _expected_log_pi(row, alpha)
    if context:
        if len(context) == 1:
            nodes = paths[context[0]]
            signs = path_signs[context[0]]
        else:
            nodes = np.concatenate([paths[y] for y in context])
            signs = np.concatenate([path_signs[y] for y in context])
        in64 = model.in_vecs[word].astype(np.float64)
        out64 = model.out_vecs[nodes].astype(np.float64)
        ss = signs * (in64 @ out64.T)
        scores -= np.logaddexp(0.0, -ss).sum(axis=1)
    # fused softmax + logsumexp (same elementary ops as numerics.softmax)
    m = scores.max()
    e = np.exp(scores - m)
    tot = e.sum()
    norm = float(m + np.log(tot))
    if not isfinite(norm):
        raise TrainingDivergedError(
            f"non-finite variational score for word "
            f"{model.vocab.words[word]!r} at pair {pair_index}"
        )
    gamma = e / tot
    row += count_rate * (freqs[word] * gamma - row)
    if context:
        _apply_gradients(model, word, nodes, signs, in64, out64, ss, gamma, grad_rate)
    return norm


def _train_single(model: SenseModel, ids: np.ndarray, config: TrainingConfig,
                  progress: bool) -> None:
    seq = ids.tolist()
    n = len(seq)
    n_total = config.epochs * n
    half = config.window // 2
    floor = config.rate_floor
    grad0, count0 = config.grad_rate, config.count_rate
    counts = model.counts
    freqs = model.vocab.freq.astype(np.float64).tolist()
    alpha = model.alpha
    paths = model.codes.nodes
    path_signs = model.codes.signs
    reporter = _Progress(n_total) if progress else None

    i = 0
    for _ in range(config.epochs):
        for pos in range(n):
            word = seq[pos]
            lo = 0 if pos < half else pos - half
            context = seq[lo:pos] + seq[pos + 1 : pos + half + 1]
            decay = 1.0 - i / n_total
            norm = _pair_step(
                model, counts, freqs, alpha, paths, path_signs, word, context,
                max(floor, grad0 * decay), max(floor, count0 * decay), i,
            )
            i += 1
            if reporter is not None:
                reporter.step(i, max(floor, grad0 * decay), norm)
    if reporter is not None:
        reporter.close()


def _train_hogwild(model: SenseModel, ids: np.ndarray, config: TrainingConfig,
                   progress: bool) -> None:
    """Parallel mode: workers sweep disjoint contiguous chunks and update the
    shared arrays without synchronization (lost updates tolerated)."""
    seq = ids.tolist()
    n = len(seq)
    n_total = config.epochs * n
    half = config.window // 2
    floor = config.rate_floor
    grad0, count0 = config.grad_rate, config.count_rate
    counts = model.counts
    freqs = model.vocab.freq.astype(np.float64).tolist()
    alpha = model.alpha
    paths = model.codes.nodes
    path_signs = model.codes.signs
    shared = [0]  # racy global pair counter, used only for the rate schedule
    reporter = _Progress(n_total) if progress else None
    bounds = np.linspace(0, n, config.workers + 1).astype(int)
    failures: list[Exception] = []

    def sweep(start: int, stop: int) -> None:
        try:
            for _ in range(config.epochs):
                for pos in range(start, stop):
                    word = seq[pos]
                    lo = 0 if pos < half else pos - half
                    context = seq[lo:pos] + seq[pos + 1 : pos + half + 1]
                    i = shared[0]
                    shared[0] = i + 1
                    decay = 1.0 - min(i, n_total) / n_total
                    norm = _pair_step(
                        model, counts, freqs, alpha, paths, path_signs, word,
                        context, max(floor, grad0 * decay),
                        max(floor, count0 * decay), i,
                    )
                    if reporter is not None:
                        reporter.step(i + 1, max(floor, grad0 * decay), norm)
        except Exception as exc:  # surface worker failures to the caller
            failures.append(exc)

    threads = [
        threading.Thread(target=sweep, args=(int(bounds[j]), int(bounds[j + 1])))
        for j in range(config.workers)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if reporter is not None:
        reporter.close()
    if failures:
        raise failures[0]


class _Progress:
    """Throttled training progress on standard error."""

    _EVERY = 16384

    def __init__(self, n_total: int):
        self.n_total = n_total
        self.t0 = time.monotonic()
        self.elbo_sum = 0.0
        self.elbo_n = 0

    def step(self, i: int, rate: float, elbo: float) -> None:
        self.elbo_sum += elbo
        self.elbo_n += 1
        if i % self._EVERY:
            return
        dt = time.monotonic() - self.t0
        pace = i / dt if dt > 0 else 0.0
        avg = self.elbo_sum / self.elbo_n
        sys.stderr.write(
            f"\rpairs {i}/{self.n_total}  {pace:,.0f} pairs/s  "
            f"rate {rate:.5f}  avg elbo {avg:.3f}   "
        )
        sys.stderr.flush()

    def close(self) -> None:
        sys.stderr.write("\n")
        sys.stderr.flush()
