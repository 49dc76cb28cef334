"""Skip-gram with negative sampling, trained by chunked SGD over numpy.

The loss for one (center, context) pair with k noise words is

    -log s(u.v) - sum_k log s(-u.n_k)        s = logistic sigmoid

with u a row of the target matrix U and v, n_k rows of the context
matrix C. `batch_loss` / `batch_grads` expose exactly the quantities the
trainer applies, so gradients can be checked against finite differences.

Training is deterministic for a fixed seed: window reduction, pair
shuffling and negative draws all come from one seeded generator, and
updates are applied chunk by chunk with np.add.at (repeated indices
accumulate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CLIP = 60.0  # |logit| bound; sigmoid saturates far earlier


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -_CLIP, _CLIP)))


def _log_sigmoid(x: np.ndarray) -> np.ndarray:
    return -np.logaddexp(0.0, -np.clip(x, -_CLIP, _CLIP))


def batch_loss(U, C, centers, contexts, negatives) -> float:
    """Total negative-sampling loss of a batch."""
    u = U[centers]
    pos = np.einsum("nd,nd->n", u, C[contexts])
    neg = np.einsum("nd,nkd->nk", u, C[negatives])
    return float(-(_log_sigmoid(pos).sum() + _log_sigmoid(-neg).sum()))


def batch_grads(U, C, centers, contexts, negatives):
    """Dense gradients of batch_loss with respect to U and C."""
    u = U[centers]
    vpos = C[contexts]
    vneg = C[negatives]
    gpos = sigmoid(np.einsum("nd,nd->n", u, vpos)) - 1.0
    gneg = sigmoid(np.einsum("nd,nkd->nk", u, vneg))

    dU = np.zeros_like(U)
    dC = np.zeros_like(C)
    du = gpos[:, None] * vpos + np.einsum("nk,nkd->nd", gneg, vneg)
    np.add.at(dU, centers, du)
    np.add.at(dC, contexts, gpos[:, None] * u)
    np.add.at(dC, negatives.reshape(-1),
              (gneg[:, :, None] * u[:, None, :]).reshape(-1, U.shape[1]))
    return dU, dC


def noise_cdf(counts: np.ndarray, power: float = 0.75) -> np.ndarray:
    """Cumulative noise distribution over the vocabulary (counts**power)."""
    weights = np.asarray(counts, dtype=np.float64) ** power
    total = weights.sum()
    if total <= 0:
        raise ValueError("noise distribution needs at least one positive count")
    return np.cumsum(weights / total)


def build_pairs(sentences: list[np.ndarray], window: int, rng: np.random.Generator):
    """All (center, context) index pairs with per-position reduced windows.

    Every position draws its window size b uniformly from [1, window];
    the pair (i, j) is emitted when |i - j| <= b_i within one sentence.
    """
    lengths = [len(s) for s in sentences]
    if sum(lengths) == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    tokens = np.concatenate([np.asarray(s, dtype=np.int64) for s in sentences if len(s)])
    sent_id = np.repeat(np.arange(len(lengths)), lengths)
    b = rng.integers(1, window + 1, size=len(tokens))
    centers, contexts = [], []
    for off in range(1, window + 1):
        if off >= len(tokens):
            break
        same = sent_id[:-off] == sent_id[off:]
        fwd = same & (b[:-off] >= off)
        bwd = same & (b[off:] >= off)
        centers.append(tokens[:-off][fwd])
        contexts.append(tokens[off:][fwd])
        centers.append(tokens[off:][bwd])
        contexts.append(tokens[:-off][bwd])
    if not centers:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


@dataclass
class SgnsSettings:
    dim: int = 100
    window: int = 5
    negative: int = 5
    epochs: int = 5
    lr0: float = 0.025
    lr_min: float = 1e-4
    chunk: int = 4096


def init_matrices(n_vocab: int, dim: int, rng: np.random.Generator):
    """word2vec-style init: uniform targets, zero contexts."""
    U = (rng.random((n_vocab, dim), dtype=np.float64) - 0.5) / dim
    C = np.zeros((n_vocab, dim), dtype=np.float64)
    return U, C


def train(
    sentences: list[np.ndarray],
    n_vocab: int,
    counts: np.ndarray,
    settings: SgnsSettings,
    seed: int,
    U: np.ndarray | None = None,
    C: np.ndarray | None = None,
    freeze_context: bool = False,
    center_mask: np.ndarray | None = None,
):
    """Train (U, C) in place over the index-encoded corpus.

    center_mask restricts which rows of U may move: pairs whose center is
    outside the mask are dropped, which with freeze_context gives the
    slice-training regime (only masked target rows ever change).
    """
    rng = np.random.default_rng(seed)
    if U is None or C is None:
        U, C = init_matrices(n_vocab, settings.dim, rng)
    if settings.epochs == 0:
        return U, C

    cdf = noise_cdf(counts)
    centers, contexts = build_pairs(sentences, settings.window, rng)
    if center_mask is not None and len(centers):
        keep = center_mask[centers]
        centers, contexts = centers[keep], contexts[keep]
    n_pairs = len(centers)
    if n_pairs == 0:
        return U, C

    chunk = settings.chunk
    chunks_per_epoch = (n_pairs + chunk - 1) // chunk
    total_chunks = settings.epochs * chunks_per_epoch
    k = settings.negative
    dim = U.shape[1]
    step = 0
    for _ in range(settings.epochs):
        order = rng.permutation(n_pairs)
        for lo in range(0, n_pairs, chunk):
            idx = order[lo : lo + chunk]
            c, x = centers[idx], contexts[idx]
            # right edge of the cdf can round below 1.0
            negs = np.minimum(np.searchsorted(cdf, rng.random((len(idx), k))), n_vocab - 1)
            lr = max(settings.lr_min, settings.lr0 * (1.0 - step / total_chunks))
            step += 1

            u = U[c]
            vpos = C[x]
            vneg = C[negs]
            gpos = sigmoid(np.einsum("nd,nd->n", u, vpos)) - 1.0
            gneg = sigmoid(np.einsum("nd,nkd->nk", u, vneg))

            du = gpos[:, None] * vpos + np.einsum("nk,nkd->nd", gneg, vneg)
            np.add.at(U, c, -lr * du)
            if not freeze_context:
                np.add.at(C, x, -lr * gpos[:, None] * u)
                np.add.at(C, negs.reshape(-1),
                          (-lr * gneg[:, :, None] * u[:, None, :]).reshape(-1, dim))
    return U, C
