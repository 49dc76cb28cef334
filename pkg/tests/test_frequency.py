import pytest

from chronolex.buckets import TimeBucket
from chronolex.frequency import (
    build_frequency_series, bucket_token_total, count_bucket, normalize,
)
from chronolex.phrases import PhraseDetector, Vocabulary

from oracles import oracle_bucket_counts

CONNECTORS = {"the", "of", "and", "a", "is"}


def vocab_from(entries):
    v = Vocabulary()
    for key, arity, count in entries:
        v.counts[key] = count
        v.arity[key] = arity
    return v


class TestNormalize:
    def test_definition_instance(self):
        assert normalize(50, 1_000_000) == 50.0

    def test_zero_count(self):
        assert normalize(0, 10) == 0.0

    def test_hand_arithmetic(self):
        assert normalize(7, 3_500_000) == 2.0

    def test_zero_total_rejected(self):
        with pytest.raises(ValueError):
            normalize(5, 0)


class TestCountBucket:
    def test_phrase_increments_components(self):
        vocab = vocab_from([
            ("joe biden", 2, 50), ("joe", 1, 80), ("biden", 1, 70), ("wins", 1, 20),
        ])
        counts = count_bucket([["joe biden", "wins"]], vocab, CONNECTORS)
        assert counts == {"joe biden": 1, "joe": 1, "biden": 1, "wins": 1}

    def test_absorbed_connector_gets_no_increment(self):
        vocab = vocab_from([
            ("game of thrones", 2, 50), ("game", 1, 60), ("thrones", 1, 55),
        ])
        counts = count_bucket([["game of thrones"]], vocab, CONNECTORS)
        assert counts == {"game of thrones": 1, "game": 1, "thrones": 1}

    def test_empty_bucket(self):
        assert count_bucket([], vocab_from([("x", 1, 10)]), CONNECTORS) == {}

    def test_plain_token_counts(self):
        vocab = vocab_from([("delta", 1, 30)])
        docs = [["delta", "delta"], ["delta", "delta"], ["delta", "delta"]]
        assert count_bucket(docs, vocab, CONNECTORS)["delta"] == 6

    def test_out_of_vocab_token_ignored(self):
        vocab = vocab_from([("delta", 1, 30)])
        assert count_bucket([["delta", "rare"]], vocab, CONNECTORS) == {"delta": 1}


class TestTotals:
    def test_connectors_excluded(self):
        docs = [["the", "launch", "of", "delta"], ["a", "big", "day"]]
        assert bucket_token_total(docs, CONNECTORS) == 4

    def test_unigram_counts_sum_to_total_when_all_in_vocab(self):
        det = PhraseDetector(min_count=2, threshold=1e9, connectors=CONNECTORS)
        corpus = [["the", "alpha", "beta"], ["alpha", "of", "beta"], ["alpha", "beta"]]
        det.fit(corpus)
        segmented = det.transform(corpus)
        counts = count_bucket(segmented, det.vocab_, CONNECTORS)
        assert sum(counts.values()) == bucket_token_total(corpus, CONNECTORS)


class TestSeries:
    def test_per_million_sums_to_million_without_phrases(self):
        det = PhraseDetector(min_count=2, threshold=1e9, connectors=CONNECTORS)
        corpus = [["alpha", "beta", "the", "gamma"]] * 5
        det.fit(corpus)
        b = TimeBucket(2020, 1)
        counts = {b: count_bucket(det.transform(corpus), det.vocab_, CONNECTORS)}
        totals = {b: bucket_token_total(corpus, CONNECTORS)}
        series = build_frequency_series(counts, totals)
        assert sum(s.points[b][1] for s in series.values()) == pytest.approx(1e6)

    def test_absent_bucket_stored_as_absent(self):
        b1, b2 = TimeBucket(2020, 1), TimeBucket(2020, 2)
        counts = {b1: {"delta": 2}, b2: {"other": 1}}
        series = build_frequency_series(counts, {b1: 10, b2: 10})
        assert b2 not in series["delta"].points

    def test_matches_brute_force_recount(self):
        det = PhraseDetector(min_count=3, threshold=2.0, connectors=CONNECTORS)
        corpus = [["new", "york", "is", "big"]] * 6 + [["big", "new", "day"]] * 4
        det.fit(corpus)
        segmented = det.transform(corpus)
        counts = count_bucket(segmented, det.vocab_, CONNECTORS)
        oracle = oracle_bucket_counts(segmented, set(det.vocab_.counts), CONNECTORS)
        assert counts == dict(oracle)

    def test_determinism(self):
        det = PhraseDetector(min_count=2, threshold=1.0, connectors=CONNECTORS)
        corpus = [["alpha", "beta", "gamma"], ["alpha", "beta"], ["gamma", "alpha"]]
        det.fit(corpus)
        b = TimeBucket(2020, 3)
        runs = []
        for _ in range(2):
            counts = {b: count_bucket(det.transform(corpus), det.vocab_, CONNECTORS)}
            totals = {b: bucket_token_total(corpus, CONNECTORS)}
            series = build_frequency_series(counts, totals)
            runs.append({k: dict(s.points) for k, s in series.items()})
        assert runs[0] == runs[1]
