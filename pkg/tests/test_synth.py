import pytest

from chronolex.buckets import TimeBucket, parse_timestamp
from chronolex.ingest import IngestConfig, RawDocument, admit
from chronolex.synth import SPIKE, SHIFT, EventSpec, SynthConfig, generate

MONTHS = [TimeBucket(2020, m) for m in range(1, 7)]


def small_cfg(**kw):
    defaults = dict(buckets=MONTHS, docs_per_bucket=30, target_docs_per_bucket=10,
                    vocab_size=100, seed=3)
    defaults.update(kw)
    return SynthConfig(**defaults)


def test_deterministic_under_seed():
    ev = [EventSpec("delta", SHIFT, onset=3, duration=3,
                    cluster_a=("planea", "planeb"), cluster_b=("mutation", "variant"))]
    r1, l1 = generate(ev, small_cfg())
    r2, l2 = generate(ev, small_cfg())
    assert r1 == r2 and l1 == l2


def test_different_seed_changes_corpus():
    r1, _ = generate([], small_cfg(seed=1))
    r2, _ = generate([], small_cfg(seed=2))
    assert r1 != r2


def test_every_document_passes_admission():
    records, _ = generate([], small_cfg())
    cfg = IngestConfig()
    for rec in records:
        raw = RawDocument(rec["id"], rec["author"], None, rec["text"])
        assert admit(raw, cfg)


def test_timestamps_fall_in_their_bucket():
    records, _ = generate([], small_cfg(buckets=[TimeBucket.prior(), TimeBucket(2020, 5)]))
    for rec in records:
        ts = parse_timestamp(rec["timestamp"])
        assert (2018, 1) <= (ts.year, ts.month) <= (2020, 5)
        if ts.year == 2020 and ts.month >= 1:
            assert ts.month == 5


def test_spike_multiplies_target_docs():
    ev = [EventSpec("surge", SPIKE, onset=2, duration=1, magnitude=10.0)]
    records, ledger = generate(ev, small_cfg())
    per_bucket = ledger["target_docs"]["surge"]
    assert per_bucket["2020-03"] == 100
    assert per_bucket["2020-02"] == 10
    count = sum(1 for r in records if "surge" in r["text"].split()
                and parse_timestamp(r["timestamp"]).month == 3)
    assert count == 100


def test_shift_switches_context_clusters():
    ev = [EventSpec("folk", SHIFT, onset=3, duration=3,
                    cluster_a=("fable", "legend"), cluster_b=("album", "songs"))]
    records, _ = generate(ev, small_cfg())
    for rec in records:
        words = set(rec["text"].split())
        if "folk" not in words:
            continue
        month = parse_timestamp(rec["timestamp"]).month
        if month < 4:
            assert words & {"fable", "legend"}
            assert not words & {"album", "songs"}
        else:
            assert words & {"album", "songs"}
            assert not words & {"fable", "legend"}


def test_ledger_records_events():
    ev = [EventSpec("x", SPIKE, onset=0, duration=2, magnitude=3.0)]
    _, ledger = generate(ev, small_cfg())
    assert ledger["events"][0]["kind"] == SPIKE
    assert ledger["events"][0]["magnitude"] == 3.0
    assert ledger["buckets"] == [b.label() for b in MONTHS]


def test_unique_ids():
    records, _ = generate([], small_cfg())
    ids = [r["id"] for r in records]
    assert len(ids) == len(set(ids))


def test_onset_outside_range_rejected():
    with pytest.raises(ValueError):
        generate([EventSpec("x", SPIKE, onset=40, duration=1)], small_cfg())


def test_overlapping_clusters_rejected():
    with pytest.raises(ValueError):
        EventSpec("x", SHIFT, onset=0, duration=1,
                  cluster_a=("same",), cluster_b=("same", "other"))
