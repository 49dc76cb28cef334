import random

import pytest

from chronolex.phrases import PhraseDetector, Vocabulary, phrase_score

from oracles import oracle_segment, oracle_vocabulary

CONNECTORS = {"the", "of", "and", "is", "a", "to", "in"}


def make_detector(min_count=10, threshold=10.0):
    return PhraseDetector(min_count=min_count, threshold=threshold, connectors=CONNECTORS)


class TestPhraseScore:
    def test_hand_evaluated(self):
        assert phrase_score(25, 20, 30, 1000, 10) == 25.0

    def test_zero_at_min_count(self):
        assert phrase_score(10, 20, 30, 1000, 10) == 0.0

    def test_negative_below_min_count(self):
        assert phrase_score(5, 1, 1, 100, 10) == -500.0

    def test_zero_component_count_rejected(self):
        with pytest.raises(ValueError):
            phrase_score(5, 0, 1, 100, 10)


def fillers(n, start=0):
    return [[f"filler{i:05d}"] for i in range(start, start + n)]


class TestDetector:
    def test_repeated_sentence_alone_scores_too_low(self):
        # 200 identical sentences: vocab_size 3 makes the score
        # (200-10)*3/(200*200) ~ 0.014, far below threshold 10
        corpus = [["new", "york", "is", "big"]] * 200
        det = make_detector().fit(corpus)
        assert det.vocab_.breakdown()[2] == 0
        assert dict(oracle_vocabulary(corpus, CONNECTORS, 10, 10.0)) == {
            "new": (1, 200), "york": (1, 200), "big": (1, 200),
        }

    def test_same_corpus_accepts_at_oracle_threshold(self):
        corpus = [["new", "york", "is", "big"]] * 200
        det = make_detector(threshold=0.01).fit(corpus)
        assert "new york" in det.vocab_
        assert det.vocab_.arity["new york"] == 2

    def test_unreachable_threshold_yields_no_bigrams(self):
        corpus = [["new", "york", "is", "big"]] * 200 + fillers(3000)
        det = make_detector(threshold=1e9).fit(corpus)
        assert det.vocab_.breakdown()[2] == 0
        assert det.vocab_.breakdown()[3] == 0

    def test_empty_corpus(self):
        det = make_detector().fit([])
        assert len(det.vocab_) == 0

    def test_connector_absorbed_into_surface(self):
        # score on game x thrones: (50-10)*703/(50*50) = 11.2 >= 10
        corpus = [["game", "of", "thrones"]] * 50 + fillers(700)
        det = make_detector().fit(corpus)
        assert "game of thrones" in det.vocab_
        assert det.vocab_.arity["game of thrones"] == 2
        assert det.vocab_.counts["game of thrones"] == 50
        segmented = det.transform([["game", "of", "thrones"]])
        assert segmented == [["game of thrones"]]

    def test_two_connectors_block_joining(self):
        corpus = [["game", "of", "the", "thrones"]] * 50 + fillers(700)
        det = make_detector().fit(corpus)
        assert all(det.vocab_.arity[k] == 1 for k in det.vocab_.counts)

    def test_trigram_via_second_pass(self):
        corpus = [["new", "york", "city"]] * 40 + fillers(800)
        det = make_detector().fit(corpus)
        assert "new york" in det.vocab_
        assert "new york city" in det.vocab_
        assert det.vocab_.arity["new york city"] == 3
        assert det.transform([["new", "york", "city"]]) == [["new york city"]]

    def test_greedy_consumption_left_to_right(self):
        corpus = [["new", "york", "city"]] * 40 + fillers(800)
        det = make_detector().fit(corpus)
        # york cannot start a phrase after being consumed by "new york"
        assert det.transform([["new", "york", "city", "york", "city"]])[0][0] == "new york city"

    def test_component_lookup(self):
        corpus = [["game", "of", "thrones"]] * 50 + fillers(700)
        det = make_detector().fit(corpus)
        assert det.components("game of thrones") == ["game", "thrones"]

    def test_every_bigram_component_is_a_unigram_entry(self):
        corpus = [["new", "york", "city"]] * 40 + fillers(800)
        det = make_detector().fit(corpus)
        for key, arity in det.vocab_.arity.items():
            if arity > 1:
                for part in det.components(key):
                    assert det.vocab_.arity.get(part) == 1

    def test_accepted_scores_recomputable_from_pass_counts(self):
        corpus = [["new", "york", "city"]] * 40 + [["game", "of", "thrones"]] * 50 + fillers(900)
        det = make_detector().fit(corpus)
        for stats, accepted in zip(det.pass_stats_, det.accepted_):
            for left, gap, right in accepted:
                score = phrase_score(
                    stats.pair_counts[(left, gap, right)],
                    stats.unit_counts[left], stats.unit_counts[right],
                    stats.vocab_size, det.min_count,
                )
                assert score >= det.threshold

    def test_save_load_round_trip(self, tmp_path):
        corpus = [["new", "york", "city"]] * 40 + fillers(800)
        det = make_detector().fit(corpus)
        det.save(tmp_path / "phrases.json")
        loaded = PhraseDetector.load(tmp_path / "phrases.json")
        assert loaded.vocab_.counts == det.vocab_.counts
        assert loaded.vocab_.arity == det.vocab_.arity
        probe = [["new", "york", "city", "and", "game"]]
        assert loaded.transform(probe) == det.transform(probe)

    def test_sklearn_param_interface(self):
        det = PhraseDetector(min_count=3)
        params = det.get_params()
        assert params["min_count"] == 3
        det.set_params(threshold=5.0)
        assert det.threshold == 5.0


def random_corpus(rng, n_sentences, vocab=40, connector_rate=0.25):
    words = [f"w{i}" for i in range(vocab)]
    conns = sorted(CONNECTORS)
    corpus = []
    for _ in range(n_sentences):
        length = rng.randint(2, 10)
        sent = []
        for _ in range(length):
            if rng.random() < connector_rate:
                sent.append(rng.choice(conns))
            else:
                # skewed draw so some pairs recur often
                sent.append(words[min(int(rng.expovariate(0.12)), vocab - 1)])
        corpus.append(sent)
    return corpus


class TestOracleEquivalence:
    @pytest.mark.parametrize("seed", range(8))
    def test_vocabulary_matches_oracle(self, seed):
        rng = random.Random(seed)
        corpus = random_corpus(rng, 300)
        min_count, threshold = 3, rng.choice([1.0, 2.0, 5.0, 10.0])
        det = PhraseDetector(min_count=min_count, threshold=threshold,
                             connectors=CONNECTORS).fit(corpus)
        expected = oracle_vocabulary(corpus, CONNECTORS, min_count, threshold)
        got = {k: (det.vocab_.arity[k], det.vocab_.counts[k]) for k in det.vocab_.counts}
        assert got == expected

    @pytest.mark.parametrize("seed", range(4))
    def test_segmentation_matches_oracle(self, seed):
        rng = random.Random(1000 + seed)
        corpus = random_corpus(rng, 250)
        det = PhraseDetector(min_count=3, threshold=2.0, connectors=CONNECTORS).fit(corpus)
        assert det.transform(corpus) == oracle_segment(corpus, CONNECTORS, 3, 2.0)


def multiword_keys(vocab: Vocabulary):
    return {k for k, a in vocab.arity.items() if a > 1}


class TestMonotonicity:
    def test_raising_threshold_never_adds_phrases(self):
        for seed in range(50):
            rng = random.Random(9000 + seed)
            corpus = random_corpus(rng, 120)
            low = PhraseDetector(min_count=2, threshold=1.0, connectors=CONNECTORS).fit(corpus)
            high = PhraseDetector(min_count=2, threshold=4.0, connectors=CONNECTORS).fit(corpus)
            assert multiword_keys(high.vocab_) <= multiword_keys(low.vocab_), f"seed {seed}"
