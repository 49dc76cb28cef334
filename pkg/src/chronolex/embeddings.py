"""Diachronic word embeddings in a shared compass space.

A compass skip-gram model is trained once on a temporally balanced
concatenation of all buckets, updating both target and context matrices.
Each bucket then gets its own target matrix, initialized from the
compass targets and re-trained on that bucket's documents alone with the
context matrix frozen, which keeps every slice in the compass coordinate
space and makes cross-bucket cosine comparisons meaningful.

The distance series of a key holds, for every bucket after the earliest
one where the key has a vector, the cosine distance to that earliest
(anchor) vector. The anchor bucket itself has no point.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator

from . import sgns
from .base import check_fitted, check_positive, check_token_sentences
from .buckets import TimeBucket

PRIOR_QUOTA_FACTOR = 24  # the prior period aggregates two years of months


@dataclass(frozen=True)
class EmbeddingConfig:
    dim: int = 300
    min_count: int = 10
    window: int = 5
    negative: int = 5
    epochs_compass: int = 5
    epochs_slice: int = 5
    lr0: float = 0.025
    lr_min: float = 1e-4
    seed: int = 0
    month_quota: int = 100_000
    chunk: int = 4096

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        check_positive("month_quota", self.month_quota)

    def sgns(self, epochs: int) -> sgns.SgnsSettings:
        return sgns.SgnsSettings(
            dim=self.dim, window=self.window, negative=self.negative,
            epochs=epochs, lr0=self.lr0, lr_min=self.lr_min, chunk=self.chunk,
        )


def derive_seed(seed: int, tag: str) -> int:
    """Stable per-component RNG seed, independent of processing order."""
    digest = hashlib.blake2b(f"{seed}:{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def balance_sample(
    docs_by_bucket: dict[TimeBucket, list],
    quota: int,
    seed: int,
    prior_factor: int = PRIOR_QUOTA_FACTOR,
) -> dict[TimeBucket, list]:
    """Undersample buckets to at most `quota` documents per month
    (`quota * prior_factor` for the prior period), uniformly without
    replacement, keeping each bucket's original document order."""
    check_positive("quota", quota)
    out: dict[TimeBucket, list] = {}
    for bucket in sorted(docs_by_bucket):
        docs = docs_by_bucket[bucket]
        cap = quota * prior_factor if bucket.is_prior else quota
        if len(docs) <= cap:
            out[bucket] = list(docs)
            continue
        rng = np.random.default_rng(derive_seed(seed, f"balance:{bucket.label()}"))
        idx = rng.choice(len(docs), size=cap, replace=False)
        idx.sort()
        out[bucket] = [docs[i] for i in idx]
    return out


@dataclass
class SliceEmbeddings:
    """Per-bucket target vectors aligned to the compass space."""

    bucket: TimeBucket
    index: dict[str, int] = field(default_factory=dict)
    vectors: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def vector(self, word: str) -> np.ndarray:
        return self.vectors[self.index[word]]


class CompassEmbeddings(BaseEstimator):
    """Compass skip-gram model over the balanced concatenation.

    Parameters mirror EmbeddingConfig; `config` wins when given.

    Attributes (after fit)
    ----------
    index_ : word -> row mapping for both matrices.
    counts_ : training-corpus counts aligned with index_.
    target_ : target matrix U, one row per vocabulary word.
    context_ : context matrix C, frozen during slice training.
    """

    def __init__(self, config: EmbeddingConfig | None = None, **overrides):
        self.config = config
        self.overrides = overrides

    def _config(self) -> EmbeddingConfig:
        cfg = self.config if self.config is not None else EmbeddingConfig()
        return replace(cfg, **self.overrides) if self.overrides else cfg

    def fit(self, sentences, y=None):
        cfg = self._config()
        sents = check_token_sentences(sentences)
        counts: dict[str, int] = {}
        for sent in sents:
            for tok in sent:
                counts[tok] = counts.get(tok, 0) + 1
        vocab = sorted(w for w, c in counts.items() if c >= cfg.min_count)
        if not vocab:
            raise ValueError("vocabulary is empty after the min_count filter")
        self.index_ = {w: i for i, w in enumerate(vocab)}
        self.counts_ = np.array([counts[w] for w in vocab], dtype=np.int64)
        encoded = self._encode(sents)
        self.target_, self.context_ = sgns.train(
            encoded, len(vocab), self.counts_, cfg.sgns(cfg.epochs_compass),
            seed=derive_seed(cfg.seed, "compass"),
        )
        self.n_sentences_ = len(sents)
        return self

    def _encode(self, sents: list[list[str]]) -> list[np.ndarray]:
        index = self.index_
        out = []
        for sent in sents:
            ids = [index[t] for t in sent if t in index]
            if ids:
                out.append(np.asarray(ids, dtype=np.int64))
        return out

    def fit_slice(self, bucket: TimeBucket, sentences) -> SliceEmbeddings:
        """Train one bucket's slice: targets start at the compass targets,
        contexts stay frozen, and only words that meet min_count within
        the bucket keep a vector."""
        check_fitted(self, ("target_", "context_"))
        cfg = self._config()
        sents = check_token_sentences(sentences)

        slice_counts = np.zeros(len(self.index_), dtype=np.int64)
        for sent in sents:
            for tok in sent:
                row = self.index_.get(tok)
                if row is not None:
                    slice_counts[row] += 1
        mask = slice_counts >= cfg.min_count
        if not mask.any():
            return SliceEmbeddings(bucket)

        U = self.target_.copy()
        C = self.context_  # frozen: sgns.train never writes C here
        U, _ = sgns.train(
            self._encode(sents), len(self.index_), slice_counts,
            cfg.sgns(cfg.epochs_slice),
            seed=derive_seed(cfg.seed, f"slice:{bucket.label()}"),
            U=U, C=C, freeze_context=True, center_mask=mask,
        )
        rows = np.flatnonzero(mask)
        inv = {i: w for w, i in self.index_.items()}
        index = {inv[r]: j for j, r in enumerate(rows)}
        return SliceEmbeddings(bucket, index, U[rows].copy())


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(u, v); both vectors must be non-zero."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine distance undefined for zero vectors")
    return 1.0 - float(np.dot(u, v)) / (nu * nv)


@dataclass
class DistanceSeries:
    key: str
    anchor_bucket: TimeBucket | None = None
    points: dict[TimeBucket, float] = field(default_factory=dict)


def build_distance_series(slices: list[SliceEmbeddings], keys=None) -> dict[str, DistanceSeries]:
    """Distance-to-anchor series for every key with vectors in at least
    two buckets. The anchor is the key's earliest bucket with a vector."""
    ordered = sorted(slices, key=lambda s: s.bucket.sort_key())
    if keys is None:
        keys = sorted({w for s in ordered for w in s.index})
    out: dict[str, DistanceSeries] = {}
    for key in keys:
        series = DistanceSeries(key)
        anchor = None
        for sl in ordered:
            if key not in sl:
                continue
            if anchor is None:
                anchor = sl.vector(key)
                series.anchor_bucket = sl.bucket
                continue
            series.points[sl.bucket] = cosine_distance(anchor, sl.vector(key))
        if series.points:
            out[key] = series
    return out


# --- binary embedding files -------------------------------------------------

_EMB_MAGIC = b"CLXE"


def save_embeddings(path, index: dict[str, int], vectors: np.ndarray) -> None:
    """Vocab header (word, row) followed by a float32 row-major matrix."""
    order = sorted(index.items(), key=lambda kv: kv[1])
    mat = np.ascontiguousarray(vectors, dtype=np.float32)
    with open(path, "wb") as fh:
        fh.write(_EMB_MAGIC)
        fh.write(struct.pack("<BII", 1, len(order), mat.shape[1] if len(order) else 0))
        for word, row in order:
            enc = word.encode("utf-8")
            fh.write(struct.pack("<HI", len(enc), row))
            fh.write(enc)
        fh.write(mat.tobytes())


def load_embeddings(path) -> tuple[dict[str, int], np.ndarray]:
    with open(path, "rb") as fh:
        if fh.read(4) != _EMB_MAGIC:
            raise ValueError(f"not an embedding file: {path}")
        _, count, dim = struct.unpack("<BII", fh.read(9))
        index = {}
        for _ in range(count):
            wlen, row = struct.unpack("<HI", fh.read(6))
            index[fh.read(wlen).decode("utf-8")] = row
        mat = np.frombuffer(fh.read(), dtype=np.float32).reshape(count, dim)
    return index, mat.copy()
