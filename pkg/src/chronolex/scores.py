"""Sentiment and topic score aggregation into per-key bucket series.

Per-document classifier scores come either from a sidecar/inline source
or from the deterministic lexicon stub. Aggregation follows floor/cap
sampling: a (key, bucket) point exists only when at least `floor`
documents carry the key in that bucket, and the mean is taken over a
deterministic sample of at most `cap` of them, ordered by a 64-bit hash
of (seed, key, document id).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .buckets import TimeBucket

TOPIC_LABELS = (
    "arts & culture",
    "business & entrepreneurs",
    "celebrity & pop culture",
    "diaries & daily life",
    "family",
    "fashion & style",
    "film tv & video",
    "fitness & health",
    "food & dining",
    "gaming",
    "learning & educational",
    "music",
    "news & social concern",
    "other hobbies",
    "relationships",
    "science & technology",
    "sports",
    "travel & adventure",
    "youth & student life",
)
N_TOPICS = len(TOPIC_LABELS)

SAMPLE_FLOOR = 10
SAMPLE_CAP = 1024

NEUTRAL_PRIOR = (0.25, 0.5, 0.25)


@dataclass(frozen=True)
class DocScores:
    doc_id: str
    sentiment: tuple[float, float, float]  # negative, neutral, positive
    topics: tuple[float, ...]

    def __post_init__(self):
        if abs(sum(self.sentiment) - 1.0) > 1e-6:
            raise ValueError(f"sentiment of {self.doc_id} does not sum to 1")
        if len(self.topics) != N_TOPICS:
            raise ValueError(f"expected {N_TOPICS} topic scores, got {len(self.topics)}")
        for v in self.topics:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"topic score out of [0, 1]: {v}")


def hash64(seed: int, key: str, doc_id: str) -> int:
    digest = hashlib.blake2b(
        f"{seed}\x00{key}\x00{doc_id}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little")


def sample_docs(key: str, doc_ids, cap: int = SAMPLE_CAP,
                floor: int = SAMPLE_FLOOR, seed: int = 0) -> list[str]:
    """Deterministic per-(key, bucket) sample. Below the floor the bucket
    is omitted entirely (empty result); otherwise the first `cap` ids in
    hash order are kept."""
    ids = list(doc_ids)
    if len(ids) < floor:
        return []
    ids.sort(key=lambda d: (hash64(seed, key, d), d))
    return ids[:cap]


def mean_scores(sampled: list[DocScores]):
    """Componentwise means plus the positive-argmax fraction."""
    if not sampled:
        raise ValueError("mean over an empty sample; caller must omit the bucket")
    sent = np.array([d.sentiment for d in sampled], dtype=np.float64)
    topics = np.array([d.topics for d in sampled], dtype=np.float64)
    pos_frac = float(np.mean(sent.argmax(axis=1) == 2))
    return sent.mean(axis=0), topics.mean(axis=0), pos_frac


@dataclass
class SentimentSeries:
    key: str
    # bucket -> (mean_neg, mean_neu, mean_pos, pos_frac, n_sampled)
    points: dict[TimeBucket, tuple[float, float, float, float, int]] = field(default_factory=dict)


@dataclass
class TopicSeries:
    key: str
    points: dict[TimeBucket, np.ndarray] = field(default_factory=dict)
    top4: tuple[int, ...] = ()


def top4_topics(points: dict[TimeBucket, np.ndarray]) -> tuple[int, ...]:
    """Indices of the four largest per-topic sums over all buckets; ties
    break toward the lexicographically smaller topic label."""
    if not points:
        raise ValueError("top-4 selection needs at least one bucket")
    sums = np.zeros(N_TOPICS, dtype=np.float64)
    for vec in points.values():
        sums += vec
    order = sorted(range(N_TOPICS), key=lambda i: (-sums[i], TOPIC_LABELS[i]))
    return tuple(order[:4])


def build_score_series(
    occurrences: dict[str, dict[TimeBucket, list[str]]],
    scores_by_id: dict[str, DocScores],
    cap: int = SAMPLE_CAP,
    floor: int = SAMPLE_FLOOR,
    seed: int = 0,
) -> tuple[dict[str, SentimentSeries], dict[str, TopicSeries]]:
    """Aggregate per-key series from an occurrence index (key -> bucket ->
    ids of documents containing the key). One sample serves both
    families, mirroring how both come from the same predictions."""
    sent_out: dict[str, SentimentSeries] = {}
    topic_out: dict[str, TopicSeries] = {}
    for key in sorted(occurrences):
        sent_series = SentimentSeries(key)
        topic_series = TopicSeries(key)
        for bucket in sorted(occurrences[key]):
            sampled_ids = sample_docs(key, occurrences[key][bucket], cap, floor, seed)
            if not sampled_ids:
                continue
            sampled = [scores_by_id[d] for d in sampled_ids]
            sent_mean, topic_mean, pos_frac = mean_scores(sampled)
            sent_series.points[bucket] = (
                float(sent_mean[0]), float(sent_mean[1]), float(sent_mean[2]),
                pos_frac, len(sampled),
            )
            topic_series.points[bucket] = topic_mean
        if sent_series.points:
            topic_series.top4 = top4_topics(topic_series.points)
            sent_out[key] = sent_series
            topic_out[key] = topic_series
    return sent_out, topic_out


def occurrence_index(segmented_docs, connectors: set[str], vocab=None):
    """key -> bucket -> ids of documents whose segmented units contain the
    key, either as a unit or as a phrase component."""
    index: dict[str, dict[TimeBucket, list[str]]] = {}
    for doc_id, bucket, units in segmented_docs:
        keys = set()
        for unit in units:
            if " " in unit:
                keys.add(unit)
                keys.update(p for p in unit.split(" ") if p not in connectors)
            elif unit not in connectors:
                keys.add(unit)
        if vocab is not None:
            keys &= set(vocab.counts)
        for key in keys:
            index.setdefault(key, {}).setdefault(bucket, []).append(doc_id)
    return index


# --- deterministic stub scorer ----------------------------------------------


class StubScorer:
    """Lexicon scorer standing in for fine-tuned classifiers.

    Sentiment: positive/negative word-list hits are normalized with a
    smoothed weighting so a no-hit text yields exactly the neutral prior.
    Topics: each topic scores hits/(hits+1) over its keyword list.
    Same text always yields the same scores.
    """

    def __init__(self, positive=None, negative=None, topic_keywords=None):
        self.positive = set(positive) if positive is not None else _load_words("sentiment_pos.txt")
        self.negative = set(negative) if negative is not None else _load_words("sentiment_neg.txt")
        if topic_keywords is None:
            topic_keywords = json.loads(
                resources.files("chronolex.data").joinpath("topic_keywords.json").read_text("utf-8")
            )
        unknown = set(topic_keywords) - set(TOPIC_LABELS)
        if unknown:
            raise ValueError(f"unknown topic labels in keyword map: {sorted(unknown)}")
        self.topic_keywords = {
            label: set(topic_keywords.get(label, ())) for label in TOPIC_LABELS
        }

    def score(self, doc_id: str, tokens) -> DocScores:
        toks = [t.lower() for t in tokens]
        pos = sum(1 for t in toks if t in self.positive)
        neg = sum(1 for t in toks if t in self.negative)
        if pos == 0 and neg == 0:
            sentiment = NEUTRAL_PRIOR
        else:
            total = neg + pos + 1.0
            sentiment = ((neg + 0.25) / total, 0.5 / total, (pos + 0.25) / total)
        topics = []
        for label in TOPIC_LABELS:
            hits = sum(1 for t in toks if t in self.topic_keywords[label])
            topics.append(hits / (hits + 1.0))
        return DocScores(doc_id, sentiment, tuple(topics))


def _load_words(name: str) -> set[str]:
    text = resources.files("chronolex.data").joinpath(name).read_text("utf-8")
    return {w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#")}


def load_sidecar(path) -> dict[str, DocScores]:
    """NDJSON sidecar: one {id, sentiment:[3], topics:[19]} per line."""
    out: dict[str, DocScores] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out[rec["id"]] = DocScores(rec["id"], tuple(rec["sentiment"]), tuple(rec["topics"]))
    return out
