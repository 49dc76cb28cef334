"""Bigram/trigram detection by co-occurrence scoring.

Two counting passes over a lowercased token corpus. Pass 1 scores
adjacent non-connector token pairs; a single connector word between them
is absorbed into the joined surface ("game of thrones") but never enters
the score, and a run of two or more connectors blocks joining. Pass 2
repeats the procedure over the pass-1 segmented stream, so a pass-1
bigram joined with a unigram yields a trigram; joins that would exceed
three scoring components are blocked.

Score for a candidate with exact-surface count ab and component counts
a, b over v distinct scorable types:

    (ab - min_count) * v / (a * b)

Candidates scoring at or above the threshold are accepted. Joining at
segmentation time is greedy left-to-right: a token consumed by one
phrase cannot start another in the same pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from sklearn.base import BaseEstimator, TransformerMixin

from .base import check_fitted, check_positive, check_token_sentences
from .tokenizer import load_connectors

Unit = tuple[str, ...]  # surface tokens of one segment unit
PairKey = tuple[Unit, Unit, Unit]  # (left, absorbed connectors, right)


def phrase_score(count_ab: int, count_a: int, count_b: int,
                 vocab_size: int, min_count: int) -> float:
    """Score one candidate pair; may be negative when count_ab < min_count."""
    if count_a < 1 or count_b < 1:
        raise ValueError("component counts must be >= 1")
    return (count_ab - min_count) * vocab_size / (count_a * count_b)


@dataclass
class PassStats:
    """Counting statistics of one scoring pass, kept for auditability."""

    unit_counts: dict[Unit, int] = field(default_factory=dict)
    pair_counts: dict[PairKey, int] = field(default_factory=dict)
    vocab_size: int = 0  # distinct scorable unit types seen in this pass


@dataclass
class Vocabulary:
    """Final n-gram inventory: joined key -> (count, arity)."""

    counts: dict[str, int] = field(default_factory=dict)
    arity: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, key: str) -> bool:
        return key in self.counts

    def breakdown(self) -> dict[int, int]:
        out = {1: 0, 2: 0, 3: 0}
        for a in self.arity.values():
            out[a] += 1
        return out

    def save_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("key\tarity\tcount\n")
            for key in sorted(self.counts):
                fh.write(f"{key}\t{self.arity[key]}\t{self.counts[key]}\n")

    @classmethod
    def load_tsv(cls, path) -> "Vocabulary":
        vocab = cls()
        with open(path, encoding="utf-8") as fh:
            header = fh.readline()
            if header.strip() != "key\tarity\tcount":
                raise ValueError(f"unexpected vocabulary header: {header!r}")
            for line in fh:
                key, arity, count = line.rstrip("\n").split("\t")
                vocab.counts[key] = int(count)
                vocab.arity[key] = int(arity)
        return vocab


def _unit_arity(unit: Unit, connectors: set[str]) -> int:
    return sum(1 for t in unit if t not in connectors)


def count_pass(sentences: list[list[Unit]], connectors: set[str]) -> PassStats:
    """Count scorable units and adjacent-pair candidates in one pass.

    Connector-only units separate or glue pairs per the absorption rule;
    pair candidates are counted for every adjacency (overlapping), the
    greedy consumption rule applies only at segmentation time.
    """
    stats = PassStats()
    unit_counts = stats.unit_counts
    pair_counts = stats.pair_counts
    for sent in sentences:
        prev: Unit | None = None
        between: list[Unit] = []
        for unit in sent:
            if len(unit) == 1 and unit[0] in connectors:
                if prev is not None:
                    between.append(unit)
                    if len(between) >= 2:
                        prev = None
                        between = []
                continue
            unit_counts[unit] = unit_counts.get(unit, 0) + 1
            if prev is not None:
                key = (prev, tuple(t for u in between for t in u), unit)
                pair_counts[key] = pair_counts.get(key, 0) + 1
            prev = unit
            between = []
    stats.vocab_size = len(unit_counts)
    return stats


def accept_pairs(stats: PassStats, threshold: float, min_count: int,
                 max_arity: int, connectors: set[str]) -> set[PairKey]:
    """Candidates whose score reaches the threshold and whose combined
    component count stays within max_arity."""
    accepted = set()
    unit_counts = stats.unit_counts
    for key, count_ab in stats.pair_counts.items():
        left, _, right = key
        if _unit_arity(left, connectors) + _unit_arity(right, connectors) > max_arity:
            continue
        score = phrase_score(count_ab, unit_counts[left], unit_counts[right],
                             stats.vocab_size, min_count)
        if score >= threshold:
            accepted.add(key)
    return accepted


def join_pass(sentences: list[list[Unit]], accepted: set[PairKey],
              connectors: set[str]) -> list[list[Unit]]:
    """Greedy left-to-right segmentation with the accepted pair set."""
    out: list[list[Unit]] = []
    for sent in sentences:
        units: list[Unit] = []
        prev: Unit | None = None
        between: list[Unit] = []
        for unit in sent:
            if len(unit) == 1 and unit[0] in connectors:
                if prev is None:
                    units.append(unit)
                else:
                    between.append(unit)
                    if len(between) >= 2:
                        units.append(prev)
                        units.extend(between)
                        prev = None
                        between = []
                continue
            if prev is not None:
                key = (prev, tuple(t for u in between for t in u), unit)
                if key in accepted:
                    units.append(prev + key[1] + unit)
                    prev = None
                    between = []
                    continue
                units.append(prev)
                units.extend(between)
                between = []
            prev = unit
        if prev is not None:
            units.append(prev)
        units.extend(between)
        out.append(units)
    return out


class PhraseDetector(BaseEstimator, TransformerMixin):
    """Learn the phrase vocabulary of a corpus and segment token streams.

    Parameters
    ----------
    min_count : minimum corpus count for any vocabulary entry.
    threshold : acceptance score; higher means fewer phrases.
    max_vocab : cap on tracked entries during counting; lowest-count
        entries are pruned when exceeded.
    connectors : connector word set, or None for the shipped default.

    Attributes (after fit)
    ----------
    vocab_ : Vocabulary of unigrams plus accepted bigrams/trigrams.
    pass_stats_ : per-pass counting statistics.
    accepted_ : per-pass accepted pair-key sets.
    """

    def __init__(self, min_count: int = 10, threshold: float = 10.0,
                 max_vocab: int = 100_000_000, connectors: set[str] | None = None):
        self.min_count = min_count
        self.threshold = threshold
        self.max_vocab = max_vocab
        self.connectors = connectors

    def _check_params(self) -> set[str]:
        check_positive("min_count", self.min_count)
        check_positive("threshold", self.threshold)
        check_positive("max_vocab", self.max_vocab)
        return set(self.connectors) if self.connectors is not None else load_connectors()

    def fit(self, sentences, y=None):
        connectors = self._check_params()
        sents = check_token_sentences(sentences)
        unit_sents: list[list[Unit]] = [[(t,) for t in s] for s in sents]

        self.pass_stats_ = []
        self.accepted_ = []
        for _ in range(2):
            stats = count_pass(unit_sents, connectors)
            self._enforce_max_vocab(stats)
            accepted = accept_pairs(stats, self.threshold, self.min_count, 3, connectors)
            self.pass_stats_.append(stats)
            self.accepted_.append(accepted)
            unit_sents = join_pass(unit_sents, accepted, connectors)

        self.connectors_ = connectors
        self.vocab_ = self._build_vocabulary(connectors)
        return self

    def _enforce_max_vocab(self, stats: PassStats) -> None:
        total = len(stats.unit_counts) + len(stats.pair_counts)
        if total <= self.max_vocab:
            return
        floor = 1
        while len(stats.unit_counts) + len(stats.pair_counts) > self.max_vocab:
            floor += 1
            stats.unit_counts = {u: c for u, c in stats.unit_counts.items() if c >= floor}
            stats.pair_counts = {k: c for k, c in stats.pair_counts.items() if c >= floor}

    def _build_vocabulary(self, connectors: set[str]) -> Vocabulary:
        vocab = Vocabulary()
        min_count = self.min_count
        for unit, count in self.pass_stats_[0].unit_counts.items():
            if count >= min_count and unit[0] not in connectors:
                vocab.counts[unit[0]] = count
                vocab.arity[unit[0]] = 1
        # accepted pairs from both passes; occurrence sets across passes
        # are disjoint, so counts for a shared surface add up
        for stats, accepted in zip(self.pass_stats_, self.accepted_):
            for key in accepted:
                count = stats.pair_counts[key]
                if count < min_count:
                    continue
                left, betw, right = key
                joined_unit = left + betw + right
                joined = " ".join(joined_unit)
                vocab.counts[joined] = vocab.counts.get(joined, 0) + count
                vocab.arity[joined] = _unit_arity(joined_unit, connectors)
        return vocab

    def transform(self, sentences) -> list[list[str]]:
        """Segment token streams: accepted phrases become single
        space-joined units, all other tokens pass through unchanged."""
        check_fitted(self, "vocab_")
        sents = check_token_sentences(sentences)
        unit_sents: list[list[Unit]] = [[(t,) for t in s] for s in sents]
        for accepted in self.accepted_:
            unit_sents = join_pass(unit_sents, accepted, self.connectors_)
        return [[" ".join(u) for u in sent] for sent in unit_sents]

    def components(self, key: str) -> list[str]:
        """Non-connector scoring components of a vocabulary key."""
        check_fitted(self, "vocab_")
        return [t for t in key.split(" ") if t not in self.connectors_]

    def save(self, path) -> None:
        """Persist accepted pair sets and vocabulary as JSON."""
        check_fitted(self, "vocab_")
        payload = {
            "min_count": self.min_count,
            "threshold": self.threshold,
            "connectors": sorted(self.connectors_),
            "accepted": [
                sorted([list(l), list(b), list(r)] for (l, b, r) in acc)
                for acc in self.accepted_
            ],
            "vocab": {k: [self.vocab_.arity[k], self.vocab_.counts[k]]
                      for k in sorted(self.vocab_.counts)},
        }
        Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "PhraseDetector":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        det = cls(min_count=payload["min_count"], threshold=payload["threshold"])
        det.connectors_ = set(payload["connectors"])
        det.accepted_ = [
            {(tuple(l), tuple(b), tuple(r)) for l, b, r in acc}
            for acc in payload["accepted"]
        ]
        vocab = Vocabulary()
        for key, (arity, count) in payload["vocab"].items():
            vocab.counts[key] = count
            vocab.arity[key] = arity
        det.vocab_ = vocab
        det.pass_stats_ = []
        return det
