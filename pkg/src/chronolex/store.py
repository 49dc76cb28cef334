"""Read-only columnar series store.

A store is a directory of binary segments plus a JSON manifest written
last as the atomic commit marker. One sorted key table addresses four
per-family column segments through fixed-width offset tables, so point
lookups after open are O(log keys) for the key plus O(1) for the record.
The full byte layout lives in FORMAT.md; every segment carries a CRC-32
that is validated when the store opens.

Frequency records are dense over the bucket axis (a zero count means no
point); distance, sentiment and topic records are sparse since most keys
miss the sampling floor in most buckets.
"""

from __future__ import annotations

import bisect
import json
import mmap
import os
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .base import SeriesNotFound, StoreError

MAGIC = b"CLXS"
VERSION = 1

FREQ, DIST, SENT, TOPIC = "freq", "dist", "sent", "topic"
FAMILIES = (FREQ, DIST, SENT, TOPIC)
_FAMILY_CODE = {FREQ: 1, DIST: 2, SENT: 3, TOPIC: 4}

_HEADER = struct.Struct("<4sBBHII")  # magic, version, kind, reserved, count, extra


def write_varint(buf: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("varints are unsigned")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


def read_varint(view, pos: int) -> tuple[int, int]:
    result = shift = 0
    while True:
        byte = view[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7


@dataclass(frozen=True)
class SeriesRecord:
    """One key's series in one family.

    points maps bucket index -> family payload:
      freq  : (absolute: int, per_million: float)
      dist  : distance: float
      sent  : (mean_neg, mean_neu, mean_pos, pos_frac: float, n_sampled: int)
      topic : 19-tuple of floats
    topic records additionally carry the key-level top-4 topic indices.
    All floating values are quantized to float32 on construction, which
    is exactly the stored precision.
    """

    key: str
    family: str
    points: dict
    top4: tuple[int, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        q = _quantize_points(self.family, self.points)
        object.__setattr__(self, "points", q)
        object.__setattr__(self, "top4", tuple(int(i) for i in self.top4))


def _f32(x) -> float:
    return float(np.float32(x))


def _quantize_points(family: str, points: dict) -> dict:
    out = {}
    for idx, val in points.items():
        idx = int(idx)
        if family == FREQ:
            out[idx] = (int(val[0]), _f32(val[1]))
        elif family == DIST:
            out[idx] = _f32(val)
        elif family == SENT:
            out[idx] = (_f32(val[0]), _f32(val[1]), _f32(val[2]), _f32(val[3]), int(val[4]))
        else:
            if len(val) != 19:
                raise ValueError("topic points must have 19 components")
            out[idx] = tuple(_f32(v) for v in val)
    return out


def _encode_record(record: SeriesRecord, n_buckets: int) -> bytes:
    buf = bytearray()
    points = record.points
    if record.family == FREQ:
        pm = np.zeros(n_buckets, dtype=np.float32)
        for idx, (absolute, per_million) in points.items():
            if not 0 <= idx < n_buckets:
                raise ValueError(f"bucket index {idx} out of range")
            pm[idx] = per_million
        for idx in range(n_buckets):
            write_varint(buf, points[idx][0] if idx in points else 0)
        buf.extend(pm.tobytes())
        return bytes(buf)
    if record.family == TOPIC:
        if len(record.top4) != 4:
            raise ValueError("topic records need exactly 4 top-topic indices")
        buf.extend(bytes(record.top4))
    write_varint(buf, len(points))
    for idx in sorted(points):
        write_varint(buf, idx)
        val = points[idx]
        if record.family == DIST:
            buf.extend(struct.pack("<f", val))
        elif record.family == SENT:
            buf.extend(struct.pack("<4f", *val[:4]))
            write_varint(buf, val[4])
        else:
            buf.extend(struct.pack("<19f", *val))
    return bytes(buf)


def _decode_record(family: str, view, n_buckets: int, key: str) -> SeriesRecord:
    pos = 0
    points: dict = {}
    top4: tuple[int, ...] = ()
    if family == FREQ:
        absolutes = []
        for _ in range(n_buckets):
            v, pos = read_varint(view, pos)
            absolutes.append(v)
        pm = np.frombuffer(view[pos : pos + 4 * n_buckets], dtype="<f4")
        for idx, absolute in enumerate(absolutes):
            if absolute:
                points[idx] = (absolute, float(pm[idx]))
        return SeriesRecord(key, family, points)
    if family == TOPIC:
        top4 = tuple(view[:4])
        pos = 4
    n, pos = read_varint(view, pos)
    for _ in range(n):
        idx, pos = read_varint(view, pos)
        if family == DIST:
            (val,) = struct.unpack_from("<f", view, pos)
            pos += 4
            points[idx] = float(val)
        elif family == SENT:
            vals = struct.unpack_from("<4f", view, pos)
            pos += 16
            n_sampled, pos = read_varint(view, pos)
            points[idx] = (*(float(v) for v in vals), n_sampled)
        else:
            vals = struct.unpack_from("<19f", view, pos)
            pos += 76
            points[idx] = tuple(float(v) for v in vals)
    return SeriesRecord(key, family, points, top4)


@dataclass
class StoreManifest:
    corpus_id: str
    buckets: list[str]
    families: list[str]
    vocab_size: int
    built_unix: int
    fingerprint: str
    segments: dict[str, dict] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "format_version": VERSION,
            "corpus_id": self.corpus_id,
            "buckets": self.buckets,
            "families": self.families,
            "vocab_size": self.vocab_size,
            "built_unix": self.built_unix,
            "fingerprint": self.fingerprint,
            "segments": self.segments,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


class StoreWriter:
    """Single-writer builder. Records accumulate in memory and become an
    immutable store at commit(); the manifest is written last so a
    half-built directory never passes for a store."""

    def __init__(self, path, buckets, key_table: dict[str, tuple[int, int]],
                 corpus_id: str = "corpus", fingerprint: str = "",
                 built_unix: int | None = None):
        self.path = Path(path)
        self.buckets = [b.label() if hasattr(b, "label") else str(b) for b in buckets]
        self.keys = sorted(key_table)
        self.key_table = key_table  # key -> (arity, total count)
        self.corpus_id = corpus_id
        self.fingerprint = fingerprint
        # deterministic build stamp: honors SOURCE_DATE_EPOCH
        if built_unix is None:
            built_unix = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
        self.built_unix = built_unix
        self._records: dict[str, dict[str, SeriesRecord]] = {f: {} for f in FAMILIES}
        self._committed = False

    def put_series(self, record: SeriesRecord) -> None:
        if self._committed:
            raise StoreError("store already committed")
        if record.key not in self.key_table:
            raise KeyError(f"{record.key!r} is not in the key table")
        self._records[record.family][record.key] = record

    def commit(self) -> None:
        self.path.mkdir(parents=True, exist_ok=True)
        segments: dict[str, dict] = {}
        families = [f for f in FAMILIES if self._records[f]]

        body = bytearray()
        for key in self.keys:
            arity, count = self.key_table[key]
            enc = key.encode("utf-8")
            write_varint(body, len(enc))
            body.extend(enc)
            write_varint(body, arity)
            write_varint(body, count)
        segments["keys.seg"] = self._write_segment("keys.seg", 0, 0, bytes(body))

        n_buckets = len(self.buckets)
        for family in families:
            records = self._records[family]
            offsets = [0]
            body = bytearray()
            for key in self.keys:
                rec = records.get(key)
                if rec is not None:
                    body.extend(_encode_record(rec, n_buckets))
                offsets.append(len(body))
            blob = np.asarray(offsets, dtype="<u8").tobytes() + bytes(body)
            name = f"{family}.seg"
            segments[name] = self._write_segment(name, _FAMILY_CODE[family], n_buckets, blob)

        manifest = StoreManifest(
            corpus_id=self.corpus_id, buckets=self.buckets, families=families,
            vocab_size=len(self.keys), built_unix=self.built_unix,
            fingerprint=self.fingerprint, segments=segments,
        )
        tmp = self.path / "manifest.json.tmp"
        tmp.write_text(manifest.to_json(), encoding="utf-8")
        tmp.replace(self.path / "manifest.json")
        self._committed = True

    def _write_segment(self, name: str, kind: int, extra: int, body: bytes) -> dict:
        payload = _HEADER.pack(MAGIC, VERSION, kind, 0, len(self.keys), extra) + body
        (self.path / name).write_bytes(payload)
        return {"crc32": zlib.crc32(payload), "bytes": len(payload)}


class Store:
    """Memory-mapped reader over a committed store."""

    def __init__(self, path):
        self.path = Path(path)
        manifest_path = self.path / "manifest.json"
        if not manifest_path.exists():
            raise StoreError(f"no manifest at {manifest_path}; store incomplete or missing")
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
        if raw.get("format_version") != VERSION:
            raise StoreError(f"unsupported store format version {raw.get('format_version')}")
        self.manifest = StoreManifest(
            corpus_id=raw["corpus_id"], buckets=list(raw["buckets"]),
            families=list(raw["families"]), vocab_size=raw["vocab_size"],
            built_unix=raw["built_unix"], fingerprint=raw["fingerprint"],
            segments=raw["segments"],
        )
        self._files = []
        self._maps: dict[str, mmap.mmap] = {}
        for name, meta in self.manifest.segments.items():
            fh = open(self.path / name, "rb")
            mm = mmap.mmap(fh.fileno(), 0, access=mmap.ACCESS_READ)
            if zlib.crc32(mm[:]) != meta["crc32"]:
                mm.close()
                fh.close()
                self.close()
                raise StoreError(f"checksum mismatch in segment {name}")
            self._files.append(fh)
            self._maps[name] = mm
        self.keys, self.arities, self.counts = self._load_keys()
        self._offsets: dict[str, np.ndarray] = {}
        for family in self.manifest.families:
            mm = self._maps[f"{family}.seg"]
            start = _HEADER.size
            end = start + 8 * (len(self.keys) + 1)
            self._offsets[family] = np.frombuffer(mm[start:end], dtype="<u8")
        # frequency-descending key order for empty-prefix suggestions
        self._by_count = sorted(range(len(self.keys)),
                                key=lambda i: (-self.counts[i], self.keys[i]))

    def _load_keys(self):
        mm = self._maps["keys.seg"]
        magic, version, kind, _, count, _ = _HEADER.unpack_from(mm, 0)
        if magic != MAGIC or version != VERSION or kind != 0:
            raise StoreError("keys.seg header mismatch")
        keys, arities, counts = [], [], []
        pos = _HEADER.size
        for _ in range(count):
            klen, pos = read_varint(mm, pos)
            keys.append(mm[pos : pos + klen].decode("utf-8"))
            pos += klen
            arity, pos = read_varint(mm, pos)
            total, pos = read_varint(mm, pos)
            arities.append(arity)
            counts.append(total)
        return keys, arities, counts

    def close(self) -> None:
        for mm in getattr(self, "_maps", {}).values():
            mm.close()
        for fh in getattr(self, "_files", []):
            fh.close()
        self._maps = {}
        self._files = []

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __contains__(self, key: str) -> bool:
        i = bisect.bisect_left(self.keys, key)
        return i < len(self.keys) and self.keys[i] == key

    def get_series(self, key: str, family: str) -> SeriesRecord:
        if family not in self.manifest.families:
            raise SeriesNotFound(f"family {family!r} not in store")
        i = bisect.bisect_left(self.keys, key)
        if i >= len(self.keys) or self.keys[i] != key:
            raise SeriesNotFound(key)
        offsets = self._offsets[family]
        lo, hi = int(offsets[i]), int(offsets[i + 1])
        if lo == hi:
            raise SeriesNotFound(f"{key!r} has no {family} series")
        mm = self._maps[f"{family}.seg"]
        base = _HEADER.size + 8 * (len(self.keys) + 1)
        view = mm[base + lo : base + hi]
        return _decode_record(family, view, len(self.manifest.buckets), key)

    def prefix_search(self, q: str, limit: int = 10) -> list[str]:
        """Keys starting with q, by total corpus frequency descending."""
        q = q.lower()
        if limit <= 0:
            return []
        if not q:
            return [self.keys[i] for i in self._by_count[:limit]]
        lo = bisect.bisect_left(self.keys, q)
        if ord(q[-1]) < 0x10FFFF:
            hi = bisect.bisect_left(self.keys, q[:-1] + chr(ord(q[-1]) + 1))
        else:
            hi = len(self.keys)
        matched = range(lo, hi)
        ranked = sorted(matched, key=lambda i: (-self.counts[i], self.keys[i]))
        return [self.keys[i] for i in ranked[:limit]]
