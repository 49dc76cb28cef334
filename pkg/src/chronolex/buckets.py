"""Time buckets: one aggregated prior period followed by calendar months.

Every series in the system is indexed by these buckets. The prior bucket
collects everything before the configured cutoff month and sorts before
all month buckets; month buckets sort chronologically.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from datetime import datetime, timezone

from .base import RangeError

PRIOR_LABEL = "prior"


@functools.total_ordering
@dataclass(frozen=True, slots=True)
class TimeBucket:
    """Either the prior aggregate period (year == 0) or a calendar month."""

    year: int = 0
    month: int = 0

    def __post_init__(self):
        if self.year == 0:
            if self.month != 0:
                raise ValueError("prior bucket must have month == 0")
        elif not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    @classmethod
    def prior(cls) -> "TimeBucket":
        return cls(0, 0)

    @property
    def is_prior(self) -> bool:
        return self.year == 0

    def sort_key(self) -> tuple[int, int]:
        return (self.year, self.month)

    def __lt__(self, other: "TimeBucket") -> bool:
        return self.sort_key() < other.sort_key()

    def label(self) -> str:
        if self.is_prior:
            return PRIOR_LABEL
        return f"{self.year:04d}-{self.month:02d}"

    def __str__(self) -> str:
        return self.label()


def parse_bucket(label: str) -> TimeBucket:
    """Inverse of TimeBucket.label()."""
    if label == PRIOR_LABEL:
        return TimeBucket.prior()
    try:
        y, m = label.split("-")
        return TimeBucket(int(y), int(m))
    except (ValueError, TypeError):
        raise ValueError(f"not a bucket label: {label!r}") from None


def parse_timestamp(value: str | datetime) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime.

    Accepts a trailing 'Z' (not understood by fromisoformat before 3.11)
    and naive timestamps, which are taken to be UTC.
    """
    if isinstance(value, datetime):
        dt = value
    else:
        text = value.strip()
        if text.endswith("Z") or text.endswith("z"):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def month_index(dt: datetime) -> int:
    return dt.year * 12 + (dt.month - 1)


def assign_bucket(
    ts: datetime,
    cutoff: tuple[int, int] = (2020, 1),
    start: tuple[int, int] | None = (2018, 1),
    end: tuple[int, int] | None = None,
) -> TimeBucket:
    """Map a timestamp to its bucket: prior if before the cutoff month,
    otherwise that calendar month.

    start/end bound the acceptable corpus range (inclusive month bounds);
    a timestamp outside them raises RangeError.
    """
    ym = ts.year * 12 + (ts.month - 1)
    if start is not None and ym < start[0] * 12 + (start[1] - 1):
        raise RangeError(f"timestamp {ts.isoformat()} precedes corpus range start {start}")
    if end is not None and ym > end[0] * 12 + (end[1] - 1):
        raise RangeError(f"timestamp {ts.isoformat()} exceeds corpus range end {end}")
    if ym < cutoff[0] * 12 + (cutoff[1] - 1):
        return TimeBucket.prior()
    return TimeBucket(ts.year, ts.month)


def month_range(start: tuple[int, int], end: tuple[int, int]) -> list[TimeBucket]:
    """Inclusive list of month buckets from start to end."""
    out = []
    y, m = start
    while (y, m) <= end:
        out.append(TimeBucket(y, m))
        m += 1
        if m > 12:
            y, m = y + 1, 1
    return out
