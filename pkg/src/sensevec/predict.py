"""Post-training inference over a read-only model.

Disambiguation weighs each sense's integrated prior (the analytic Beta
means, not the exponentiated digamma expectations used during training)
against the hierarchical-softmax likelihood of the observed context; all
products run in log space.  Every operation here treats the model as
immutable and is safe to call concurrently.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .corpus import TrainingPair
from .model import SenseModel, prior_sense_probs, prior_sense_probs_all
from .numerics import log_sigmoid, logsumexp, softmax
from .train import _context_arrays, _signed_scores


def _context_log_likelihoods(model: SenseModel, word: int, context) -> np.ndarray:
    """(T,) vector of sum_j log p(y_j | word, k) over the context words."""
    nodes, signs = _context_arrays(model.codes, context)
    _, _, ss = _signed_scores(model, word, nodes, signs)
    return np.sum(log_sigmoid(ss), axis=1)


def disambiguate(model: SenseModel, word: int, context: Sequence[int]) -> np.ndarray:
    """Posterior over senses of ``word`` given observed context word ids.

    p(z = k | word, context) is proportional to the predictive sense prior
    times prod_j p(y_j | word, k).  An empty context returns the prior
    itself.
    """
    prior = prior_sense_probs(model, word)
    if not len(context):
        return prior
    log_post = np.log(prior) + _context_log_likelihoods(model, word, context)
    return softmax(log_post)


def predictive_loglik(model: SenseModel, pairs: Sequence[TrainingPair]) -> float:
    """Average posterior-predictive log-likelihood per context word.

    For each pair, the mixture log Sum_k prior_k prod_j p(y_ij | x_i, k) is
    evaluated with log-sum-exp; the total is divided by the total number of
    context words.  Pairs with empty contexts are skipped; raises
    ValueError when every pair is empty.
    """
    total = 0.0
    n_context_words = 0
    for pair in pairs:
        if not len(pair.context):
            continue
        log_prior = np.log(prior_sense_probs(model, pair.input))
        loglik = _context_log_likelihoods(model, pair.input, pair.context)
        total += logsumexp(log_prior + loglik)
        n_context_words += len(pair.context)
    if n_context_words == 0:
        raise ValueError("no pair has a non-empty context")
    return total / n_context_words


def nearest_neighbors(
    model: SenseModel,
    word: int,
    sense: int,
    top_n: int = 10,
    epsilon: float = 1e-3,
) -> list[tuple[int, int, float]]:
    """Closest (word, sense) prototypes by cosine similarity.

    Candidates are every sense of every other word whose predictive prior
    exceeds ``epsilon``; all senses of the query word itself are excluded,
    as are prototypes with zero norm (no direction).  Ties break
    deterministically by (word id, sense index).
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    query = np.asarray(model.in_vecs[word, sense], dtype=np.float64)
    qnorm = np.linalg.norm(query)
    if qnorm == 0.0:
        raise ValueError("query prototype has zero norm")
    flat = np.asarray(model.in_vecs, dtype=np.float64).reshape(-1, model.dim)
    norms = np.linalg.norm(flat, axis=1)
    keep = (prior_sense_probs_all(model) > epsilon).ravel() & (norms > 0.0)
    keep[word * model.n_senses : (word + 1) * model.n_senses] = False
    idx = np.flatnonzero(keep)
    cos = (flat[idx] @ query) / (norms[idx] * qnorm)
    ranked = sorted(
        zip(cos.tolist(), idx.tolist()), key=lambda ci: (-ci[0], ci[1])
    )[:top_n]
    n_senses = model.n_senses
    return [(i // n_senses, i % n_senses, c) for c, i in ranked]


def nearest_context(tokens: Sequence, position: int, n: int = 4) -> list:
    """The ``n`` tokens nearest ``position``, excluding the position itself.

    Ordered by distance, the left neighbor before the right at equal
    distance.  Used to clip disambiguation contexts for the contextual
    similarity measures.
    """
    picked = []
    for d in range(1, len(tokens)):
        if position - d >= 0:
            picked.append(tokens[position - d])
            if len(picked) == n:
                break
        if position + d < len(tokens):
            picked.append(tokens[position + d])
            if len(picked) == n:
                break
    return picked


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("prototype with zero norm has no direction")
    return float(np.dot(u, v) / (nu * nv))


def avg_sim_c(
    model: SenseModel,
    word1: int,
    context1: Sequence[int],
    word2: int,
    context2: Sequence[int],
    epsilon: float = 1e-3,
    include_count_factor: bool = True,
    context_limit: int = 4,
) -> float:
    """Posterior-weighted average cosine between the two words' prototypes.

    Sums posterior(k1) * posterior(k2) * cos(prototype1, prototype2) over
    the senses whose predictive prior exceeds ``epsilon`` and divides by
    K1 * K2, the retained sense counts (set include_count_factor=False to
    drop that factor).  Posteriors come from disambiguate on the first
    ``context_limit`` context ids, which callers supply ordered by
    proximity to the target occurrence (see nearest_context).
    """
    post1 = disambiguate(model, word1, list(context1)[:context_limit])
    post2 = disambiguate(model, word2, list(context2)[:context_limit])
    senses1 = np.flatnonzero(prior_sense_probs(model, word1) > epsilon)
    senses2 = np.flatnonzero(prior_sense_probs(model, word2) > epsilon)
    in1 = np.asarray(model.in_vecs[word1], dtype=np.float64)
    in2 = np.asarray(model.in_vecs[word2], dtype=np.float64)
    total = 0.0
    for k1 in senses1:
        for k2 in senses2:
            total += post1[k1] * post2[k2] * _cosine(in1[k1], in2[k2])
    if include_count_factor:
        total /= len(senses1) * len(senses2)
    return total


def max_sim_c(
    model: SenseModel,
    word1: int,
    context1: Sequence[int],
    word2: int,
    context2: Sequence[int],
    context_limit: int = 4,
) -> float:
    """Cosine between the two contexts' most probable prototypes."""
    post1 = disambiguate(model, word1, list(context1)[:context_limit])
    post2 = disambiguate(model, word2, list(context2)[:context_limit])
    in1 = np.asarray(model.in_vecs[word1, int(np.argmax(post1))], dtype=np.float64)
    in2 = np.asarray(model.in_vecs[word2, int(np.argmax(post2))], dtype=np.float64)
    return _cosine(in1, in2)
