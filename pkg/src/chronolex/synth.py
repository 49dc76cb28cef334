"""Synthetic corpora with injected events and a ground-truth ledger.

Background documents draw content words from a Zipfian unigram model
into templates that always carry stopwords, so everything passes
admission. Events modify documents containing one target word during
[onset, onset + duration):

  SPIKE      multiplies how many target documents the bucket gets
  SHIFT      switches the target's context words from cluster A to B
             (magnitude = cluster words injected per document)
  SENTIMENT  injects positive- or negative-lexicon words
  TOPIC      injects keywords of a chosen topic

A SHIFT event with duration 0 never activates, which makes its target a
stationary control with the same frequency and context coherence as a
real shift target.

The ledger records exactly what was injected per bucket, so tests read
expectations from the ledger and never from pipeline output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .buckets import TimeBucket

SPIKE, SHIFT, SENTIMENT, TOPIC_FLIP = "spike", "shift", "sentiment", "topic"


@dataclass(frozen=True)
class EventSpec:
    target: str
    kind: str
    onset: int  # index into the generated bucket list
    duration: int
    magnitude: float = 2.0
    cluster_a: tuple[str, ...] = ()
    cluster_b: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in (SPIKE, SHIFT, SENTIMENT, TOPIC_FLIP):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if set(self.cluster_a) & set(self.cluster_b):
            raise ValueError("context clusters must be disjoint")

    def active(self, bucket_index: int) -> bool:
        return self.onset <= bucket_index < self.onset + self.duration


@dataclass
class SynthConfig:
    buckets: list[TimeBucket] = field(default_factory=list)
    docs_per_bucket: int = 200
    target_docs_per_bucket: int = 50
    vocab_size: int = 500
    zipf_exponent: float = 1.1
    words_per_doc: int = 8
    n_authors: int = 100
    seed: int = 0


def zipf_probs(n: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    w = ranks ** -exponent
    return w / w.sum()


def _timestamp(bucket: TimeBucket, rng: np.random.Generator) -> str:
    if bucket.is_prior:
        month = int(rng.integers(0, 24))
        year, mon = 2018 + month // 12, 1 + month % 12
    else:
        year, mon = bucket.year, bucket.month
    day = int(rng.integers(1, 29))
    hour = int(rng.integers(0, 24))
    minute = int(rng.integers(0, 60))
    second = int(rng.integers(0, 60))
    return f"{year:04d}-{mon:02d}-{day:02d}T{hour:02d}:{minute:02d}:{second:02d}Z"


def generate(events: list[EventSpec], cfg: SynthConfig):
    """Produce (records, ledger): NDJSON-shaped dicts plus the injected
    ground truth. Deterministic for a fixed config."""
    if not cfg.buckets:
        raise ValueError("config needs at least one bucket")
    for ev in events:
        if not 0 <= ev.onset < len(cfg.buckets):
            raise ValueError(f"event onset {ev.onset} outside generated range")
    rng = np.random.default_rng(cfg.seed)
    background = [f"word{i:04d}" for i in range(cfg.vocab_size)]
    probs = zipf_probs(cfg.vocab_size, cfg.zipf_exponent)
    targets = {ev.target: ev for ev in events}

    records = []
    ledger: dict = {
        "seed": cfg.seed,
        "buckets": [b.label() for b in cfg.buckets],
        "docs_per_bucket": cfg.docs_per_bucket,
        "events": [],
        "target_docs": {},
    }
    for ev in events:
        ledger["events"].append({
            "target": ev.target, "kind": ev.kind, "onset": ev.onset,
            "duration": ev.duration, "magnitude": ev.magnitude,
            "cluster_a": list(ev.cluster_a), "cluster_b": list(ev.cluster_b),
        })

    doc_no = 0
    for bi, bucket in enumerate(cfg.buckets):
        for target, ev in targets.items():
            n_target = cfg.target_docs_per_bucket
            if ev.kind == SPIKE and ev.active(bi):
                n_target = int(round(n_target * ev.magnitude))
            ledger["target_docs"].setdefault(target, {})[bucket.label()] = n_target
            for _ in range(n_target):
                records.append(_make_record(
                    doc_no, bucket, rng, cfg, background, probs, target=target,
                    event=ev, bucket_index=bi,
                ))
                doc_no += 1
        for _ in range(cfg.docs_per_bucket):
            records.append(_make_record(doc_no, bucket, rng, cfg, background, probs))
            doc_no += 1
    return records, ledger


def _make_record(doc_no, bucket, rng, cfg, background, probs,
                 target=None, event=None, bucket_index=0) -> dict:
    picks = [background[i] for i in rng.choice(len(background), size=cfg.words_per_doc, p=probs)]
    if target is not None:
        words = [target]
        if event.kind == SHIFT:
            cluster = event.cluster_b if event.active(bucket_index) else event.cluster_a
            n_ctx = max(1, int(round(event.magnitude)))
            ctx = [cluster[i] for i in rng.integers(0, len(cluster), size=n_ctx)]
            words += ctx + picks[: max(1, cfg.words_per_doc - n_ctx - 1)]
        elif event.kind == SENTIMENT and event.active(bucket_index):
            polarity = max(1, int(event.magnitude))
            inject = (event.cluster_b or ("great",))
            words += [inject[i] for i in rng.integers(0, len(inject), size=polarity)]
            words += picks[: cfg.words_per_doc - polarity]
        elif event.kind == TOPIC_FLIP and event.active(bucket_index):
            inject = event.cluster_b or event.cluster_a
            words += [inject[i] for i in rng.integers(0, len(inject), size=2)]
            words += picks[: cfg.words_per_doc - 2]
        else:
            words += picks[: cfg.words_per_doc - 1]
    else:
        words = picks
    mid = max(1, len(words) // 2)
    text = "the " + " ".join(words[:mid]) + " and " + " ".join(words[mid:])
    return {
        "id": f"d{doc_no:07d}",
        "author": f"author{int(rng.integers(0, cfg.n_authors)):04d}",
        "timestamp": _timestamp(bucket, rng),
        "text": text,
    }


def write_corpus(records, ledger, corpus_path, ledger_path) -> None:
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    with open(ledger_path, "w", encoding="utf-8") as fh:
        json.dump(ledger, fh, indent=2, sort_keys=True)
        fh.write("\n")
