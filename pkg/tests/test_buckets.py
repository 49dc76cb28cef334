from datetime import datetime, timezone

import pytest

from chronolex.base import RangeError
from chronolex.buckets import (
    TimeBucket, assign_bucket, month_range, parse_bucket, parse_timestamp,
)


def ts(s):
    return parse_timestamp(s)


def test_prior_before_cutoff():
    assert assign_bucket(ts("2019-06-15T12:00:00Z")) == TimeBucket.prior()


def test_cutoff_boundary_is_first_month():
    assert assign_bucket(ts("2020-01-01T00:00:00Z")) == TimeBucket(2020, 1)


def test_direct_month_mapping():
    assert assign_bucket(ts("2022-04-30T23:59:59Z")) == TimeBucket(2022, 4)


def test_out_of_range_rejected():
    with pytest.raises(RangeError):
        assign_bucket(ts("2017-12-31T23:59:59Z"))
    with pytest.raises(RangeError):
        assign_bucket(ts("2023-01-01T00:00:00Z"), end=(2022, 12))


def test_prior_sorts_before_all_months():
    buckets = [TimeBucket(2020, 1), TimeBucket.prior(), TimeBucket(2021, 12), TimeBucket(2020, 2)]
    assert sorted(buckets) == [
        TimeBucket.prior(), TimeBucket(2020, 1), TimeBucket(2020, 2), TimeBucket(2021, 12),
    ]


def test_label_round_trip():
    for b in (TimeBucket.prior(), TimeBucket(2020, 1), TimeBucket(2022, 12)):
        assert parse_bucket(b.label()) == b


def test_parse_bucket_rejects_garbage():
    with pytest.raises(ValueError):
        parse_bucket("not-a-bucket-at-all")


def test_parse_timestamp_handles_z_and_naive():
    a = parse_timestamp("2020-01-01T00:00:00Z")
    b = parse_timestamp("2020-01-01T00:00:00+00:00")
    c = parse_timestamp(datetime(2020, 1, 1))
    assert a == b == c
    assert a.tzinfo == timezone.utc


def test_month_range_inclusive():
    r = month_range((2019, 11), (2020, 2))
    assert [b.label() for b in r] == ["2019-11", "2019-12", "2020-01", "2020-02"]


def test_bucket_is_pure_function_of_inputs():
    stamps = ["2019-01-01T05:00:00Z", "2020-07-14T00:00:00Z", "2021-02-28T23:00:00Z"]
    first = [assign_bucket(ts(s)) for s in stamps]
    second = [assign_bucket(ts(s)) for s in stamps]
    assert first == second
