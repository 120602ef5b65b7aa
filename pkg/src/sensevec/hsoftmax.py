"""Sense-conditioned hierarchical softmax and its exact gradients.

The probability of a context word v given sense k of word w is the product
of branch sigmoids along v's Huffman path:

    p(v | w, k) = prod_n sigma(sign_n * <in_vecs[w, k], out_vecs[n]>)

Log-probabilities use the softplus form of log sigma, so they are finite
for any finite inputs, with no score clamping; gradients are exact.  Dot
products accumulate in float64 even when the stored vectors are float32.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .model import SenseModel
from .numerics import log_sigmoid


def log_p_word(model: SenseModel, target: int, word: int, sense: int) -> float:
    """log p(target | word, sense) along the target's Huffman path."""
    nodes = model.codes.nodes[target]
    signs = model.codes.signs[target]
    in_vec = np.asarray(model.in_vecs[word, sense], dtype=np.float64)
    out = np.asarray(model.out_vecs[nodes], dtype=np.float64)
    scores = out @ in_vec
    return float(np.sum(log_sigmoid(signs * scores)))


def grad_log_p_word(model: SenseModel, target: int, word: int, sense: int):
    """Exact gradient of log_p_word w.r.t. the prototype and output vectors.

    Returns (grad_in, grad_out) where grad_in is the (D,) gradient for
    in_vecs[word, sense] and grad_out is a list of (node id, (D,) gradient)
    pairs for the output vectors on the target's path.
    """
    nodes = model.codes.nodes[target]
    signs = model.codes.signs[target]
    in_vec = np.asarray(model.in_vecs[word, sense], dtype=np.float64)
    out = np.asarray(model.out_vecs[nodes], dtype=np.float64)
    scores = out @ in_vec
    # d log sigma(s*x)/dx = s * sigma(-s*x)
    coeff = signs * expit(-signs * scores)
    grad_in = coeff @ out
    grad_out = [(int(n), coeff[i] * in_vec) for i, n in enumerate(nodes)]
    return grad_in, grad_out
