import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chronolex.base import SeriesNotFound, StoreError
from chronolex.buckets import TimeBucket, parse_bucket
from chronolex.store import (
    DIST, FREQ, SENT, TOPIC, SeriesRecord, Store, StoreWriter,
    read_varint, write_varint,
)

BUCKETS = [TimeBucket.prior()] + [TimeBucket(2020, m) for m in range(1, 7)]
KEY_TABLE = {
    "delta": (1, 500),
    "game of thrones": (2, 120),
    "parasite": (1, 260),
    "vaccine": (1, 900),
}


def sample_records():
    rng = np.random.default_rng(0)
    records = []
    for key in KEY_TABLE:
        freq_points = {i: (int(rng.integers(1, 50)), float(rng.random() * 100))
                       for i in range(len(BUCKETS))}
        records.append(SeriesRecord(key, FREQ, freq_points))
        records.append(SeriesRecord(key, DIST, {i: float(rng.random())
                                                for i in range(1, len(BUCKETS), 2)}))
        records.append(SeriesRecord(
            key, SENT,
            {i: (0.2, 0.5, 0.3, float(rng.random()), int(rng.integers(10, 1024)))
             for i in range(2, len(BUCKETS))},
        ))
        records.append(SeriesRecord(
            key, TOPIC,
            {i: tuple(rng.random(19).astype(float)) for i in range(1, 4)},
            top4=(3, 7, 11, 15),
        ))
    return records


@pytest.fixture
def built_store(tmp_path):
    writer = StoreWriter(tmp_path / "store", BUCKETS, KEY_TABLE,
                         corpus_id="fixture", fingerprint="f" * 64)
    records = sample_records()
    for rec in records:
        writer.put_series(rec)
    writer.commit()
    return tmp_path / "store", records


def test_varint_round_trip():
    buf = bytearray()
    values = [0, 1, 127, 128, 300, 2**21, 2**40 + 17]
    for v in values:
        write_varint(buf, v)
    pos = 0
    out = []
    for _ in values:
        v, pos = read_varint(buf, pos)
        out.append(v)
    assert out == values


class TestRoundTrip:
    def test_get_returns_identical_records(self, built_store):
        path, records = built_store
        with Store(path) as store:
            for rec in records:
                assert store.get_series(rec.key, rec.family) == rec

    def test_reopen_durability(self, built_store):
        path, records = built_store
        first = []
        with Store(path) as store:
            first = [store.get_series(r.key, r.family) for r in records]
        with Store(path) as store:
            second = [store.get_series(r.key, r.family) for r in records]
        assert first == second

    def test_unknown_key_not_found(self, built_store):
        path, _ = built_store
        with Store(path) as store:
            with pytest.raises(SeriesNotFound):
                store.get_series("unknownzz", FREQ)

    def test_key_without_family_record(self, tmp_path):
        writer = StoreWriter(tmp_path / "s", BUCKETS, KEY_TABLE)
        writer.put_series(SeriesRecord("delta", FREQ, {0: (3, 1.5)}))
        writer.put_series(SeriesRecord("parasite", FREQ, {0: (2, 1.0)}))
        writer.put_series(SeriesRecord("delta", DIST, {1: 0.2}))
        writer.commit()
        with Store(tmp_path / "s") as store:
            with pytest.raises(SeriesNotFound):
                store.get_series("parasite", DIST)

    def test_record_for_unknown_key_rejected(self, tmp_path):
        writer = StoreWriter(tmp_path / "s", BUCKETS, KEY_TABLE)
        with pytest.raises(KeyError):
            writer.put_series(SeriesRecord("nope", FREQ, {0: (1, 1.0)}))

    def test_manifest_contents(self, built_store):
        path, _ = built_store
        with Store(path) as store:
            m = store.manifest
            assert m.buckets == [b.label() for b in BUCKETS]
            assert m.vocab_size == len(KEY_TABLE)
            assert m.corpus_id == "fixture"
            assert set(m.families) == {FREQ, DIST, SENT, TOPIC}
            assert [parse_bucket(b) for b in m.buckets] == sorted(
                parse_bucket(b) for b in m.buckets)


class TestChecksums:
    @pytest.mark.parametrize("segment", ["keys.seg", "freq.seg", "sent.seg"])
    def test_corrupted_byte_detected(self, built_store, segment):
        path, _ = built_store
        data = bytearray((path / segment).read_bytes())
        data[len(data) // 2] ^= 0xFF
        (path / segment).write_bytes(bytes(data))
        with pytest.raises(StoreError, match=segment):
            Store(path)

    def test_missing_manifest_rejected(self, built_store):
        path, _ = built_store
        (path / "manifest.json").unlink()
        with pytest.raises(StoreError, match="manifest"):
            Store(path)


class TestPrefixSearch:
    def test_basic_prefix(self, built_store):
        path, _ = built_store
        with Store(path) as store:
            assert store.prefix_search("par", 10) == ["parasite"]

    def test_empty_prefix_is_frequency_ranked(self, built_store):
        path, _ = built_store
        with Store(path) as store:
            got = store.prefix_search("", 3)
        expected = sorted(KEY_TABLE, key=lambda k: (-KEY_TABLE[k][1], k))[:3]
        assert got == expected

    def test_no_match(self, built_store):
        path, _ = built_store
        with Store(path) as store:
            assert store.prefix_search("zzz", 10) == []

    def test_limit_zero(self, built_store):
        path, _ = built_store
        with Store(path) as store:
            assert store.prefix_search("p", 0) == []

    def test_matches_full_scan_oracle(self, built_store):
        path, _ = built_store
        with Store(path) as store:
            for q in ("", "p", "g", "ga", "game of", "v", "x"):
                oracle = sorted(
                    (k for k in KEY_TABLE if k.startswith(q)),
                    key=lambda k: (-KEY_TABLE[k][1], k),
                )
                assert store.prefix_search(q, 100) == oracle


family_points = st.sampled_from([FREQ, DIST, SENT, TOPIC]).flatmap(
    lambda family: st.dictionaries(
        st.integers(min_value=0, max_value=len(BUCKETS) - 1),
        {
            FREQ: st.tuples(st.integers(min_value=1, max_value=10**9),
                            st.floats(min_value=0, max_value=1e6, allow_nan=False)),
            DIST: st.floats(min_value=0, max_value=2, allow_nan=False),
            SENT: st.tuples(*([st.floats(min_value=0, max_value=1, allow_nan=False)] * 4),
                            st.integers(min_value=10, max_value=1024)),
            TOPIC: st.tuples(*([st.floats(min_value=0, max_value=1, allow_nan=False)] * 19)),
        }[family],
        min_size=1, max_size=len(BUCKETS),
    ).map(lambda points: (family, points))
)


@settings(max_examples=40, deadline=None)
@given(family_points)
def test_round_trip_any_record(tmp_path_factory, fam_points):
    family, points = fam_points
    tmp = tmp_path_factory.mktemp("prop")
    writer = StoreWriter(tmp / "s", BUCKETS, {"delta": (1, 5)})
    rec = SeriesRecord("delta", family, points,
                       top4=(0, 1, 2, 3) if family == TOPIC else ())
    writer.put_series(rec)
    writer.commit()
    with Store(tmp / "s") as store:
        assert store.get_series("delta", family) == rec
