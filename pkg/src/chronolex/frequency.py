"""Per-bucket absolute and per-million frequency series.

A phrase occurrence increments the phrase key and each of its
non-connector unigram components; unigrams outside phrases increment
normally. Connector words are not vocabulary keys and receive no
increments. Per-million normalizes by the bucket's total non-connector
token count taken before phrase joining, so the unigram counts of a
phrase-free bucket sum exactly to the denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .base import check_positive
from .buckets import TimeBucket
from .phrases import Vocabulary

PER_MILLION = 1_000_000


@dataclass
class FrequencySeries:
    key: str
    points: dict[TimeBucket, tuple[int, float]] = field(default_factory=dict)


def normalize(absolute: int, total: int) -> float:
    """Words-per-million scaling."""
    check_positive("total", total)
    return absolute * PER_MILLION / total


def count_bucket(segmented_docs, vocab: Vocabulary, connectors: set[str]) -> dict[str, int]:
    """Count vocabulary keys over one bucket of segmented documents.

    segmented_docs yields lists of unit strings (phrases already joined,
    space-separated inside a unit).
    """
    counts: dict[str, int] = {}
    in_vocab = vocab.counts.__contains__
    for units in segmented_docs:
        for unit in units:
            if " " in unit:
                if in_vocab(unit):
                    counts[unit] = counts.get(unit, 0) + 1
                for part in unit.split(" "):
                    if part not in connectors and in_vocab(part):
                        counts[part] = counts.get(part, 0) + 1
            elif in_vocab(unit):
                counts[unit] = counts.get(unit, 0) + 1
    return counts


def bucket_token_total(token_docs, connectors: set[str]) -> int:
    """Normalization denominator: non-connector tokens before joining."""
    total = 0
    for tokens in token_docs:
        for t in tokens:
            if t not in connectors:
                total += 1
    return total


def build_frequency_series(
    bucket_counts: dict[TimeBucket, dict[str, int]],
    totals: dict[TimeBucket, int],
) -> dict[str, FrequencySeries]:
    """Assemble per-key series from per-bucket count maps. Buckets where
    a key never occurs get no point; the query layer decides zero-fill."""
    series: dict[str, FrequencySeries] = {}
    for bucket in sorted(bucket_counts):
        total = totals[bucket]
        check_positive(f"total tokens in {bucket.label()}", total)
        for key, absolute in bucket_counts[bucket].items():
            s = series.get(key)
            if s is None:
                s = series[key] = FrequencySeries(key)
            s.points[bucket] = (absolute, normalize(absolute, total))
    return series


