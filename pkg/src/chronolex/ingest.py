"""Corpus ingestion: cleaning, admission filtering, bucketing, dedup.

Input is NDJSON, one record per line with fields id, author, timestamp,
text, optional retweet/media flags and optional score vectors. Output is
the same schema partitioned into one file per time bucket, ordered by
(bucket, id) so repeated runs produce byte-identical partitions.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .base import ChronolexError, check_fraction
from .buckets import TimeBucket, assign_bucket, parse_bucket, parse_timestamp
from .tokenizer import load_connectors, tokenize

PLACEHOLDER_HANDLE = "@user"

# URL spans: http(s) schemes plus bare t.co shortlinks.
_URL_RE = re.compile(r"(?:https?://\S+|\bt\.co/\S+)", re.IGNORECASE)
_MENTION_RE = re.compile(r"@(\w+)")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True, slots=True)
class RawDocument:
    id: str
    author: str
    timestamp: object  # datetime once parsed
    text: str
    retweet: bool = False
    media: bool = False
    sentiment: tuple | None = None
    topics: tuple | None = None


@dataclass(slots=True)
class Document:
    id: str
    author: str
    bucket: TimeBucket
    text: str
    timestamp: object = None
    tokens: list = field(default_factory=list)
    sentiment: tuple | None = None
    topics: tuple | None = None


@dataclass
class IngestConfig:
    stopwords: set[str] = field(default_factory=load_connectors)
    verified: set[str] = field(default_factory=set)
    cutoff: tuple[int, int] = (2020, 1)
    range_start: tuple[int, int] | None = (2018, 1)
    range_end: tuple[int, int] | None = None
    author_fraction: float = 0.01
    near_duplicates: bool = False  # optional 5-gram Jaccard mode
    jaccard_threshold: float = 0.9

    def __post_init__(self):
        if not self.stopwords:
            raise ValueError("stopword list must be non-empty")
        check_fraction("author_fraction", self.author_fraction, hi=0.5)
        self.verified = {v.lower().lstrip("@") for v in self.verified}


def clean_text(raw: str, verified: set[str]) -> str:
    """Remove URL spans, anonymize mentions of non-verified handles to
    the placeholder handle, and collapse whitespace. Idempotent."""
    text = _URL_RE.sub(" ", raw)

    def _mention(m: re.Match) -> str:
        handle = m.group(1)
        if handle.lower() in verified or m.group(0) == PLACEHOLDER_HANDLE:
            return m.group(0)
        return PLACEHOLDER_HANDLE

    text = _MENTION_RE.sub(_mention, text)
    return _WS_RE.sub(" ", text).strip()


def admit(doc: RawDocument, cfg: IngestConfig) -> bool:
    """Admission filter: drop retweets/media posts (input flags) and any
    document whose cleaned text is empty or carries no stopword token."""
    if doc.retweet or doc.media:
        return False
    if not doc.text:
        return False
    for tok in tokenize(doc.text):
        if tok.lowercased in cfg.stopwords:
            return True
    return False


def normalize_for_dedup(text: str) -> str:
    return _WS_RE.sub(" ", text.lower()).strip()


def _char_ngrams(text: str, n: int = 5) -> set[str]:
    if len(text) < n:
        return {text} if text else set()
    return {text[i : i + n] for i in range(len(text) - n + 1)}


def _jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 1.0
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter)


def top_authors(docs, fraction: float) -> set[str]:
    """Authors to exclude: the top floor(fraction * distinct_authors)
    most prolific, ties broken by author id."""
    counts: dict[str, int] = {}
    for d in docs:
        counts[d.author] = counts.get(d.author, 0) + 1
    k = int(fraction * len(counts))
    if k <= 0:
        return set()
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return {a for a, _ in ranked[:k]}


def dedup_filter(docs: list[Document], cfg: IngestConfig) -> list[Document]:
    """Embedding-view filter: drop exact duplicates (first occurrence
    wins) and documents from the most prolific authors. Output preserves
    input order (subsequence). The frequency view never sees this filter.

    With cfg.near_duplicates on, documents whose character-5-gram Jaccard
    similarity to an earlier kept document reaches the threshold are also
    dropped; candidates are found with a minhash band index.
    """
    excluded = top_authors(docs, cfg.author_fraction)
    seen: set[str] = set()
    kept: list[Document] = []

    # minhash state for the optional near-duplicate mode
    n_perm, n_bands = 32, 8
    rows = n_perm // n_bands
    bands: list[dict[tuple, list[int]]] = [dict() for _ in range(n_bands)]
    kept_shingles: list[set[str]] = []

    for doc in docs:
        if doc.author in excluded:
            continue
        norm = normalize_for_dedup(doc.text)
        if norm in seen:
            continue
        if cfg.near_duplicates:
            shingles = _char_ngrams(norm)
            sig = _minhash(shingles, n_perm)
            candidates: set[int] = set()
            keys = [tuple(sig[b * rows : (b + 1) * rows]) for b in range(n_bands)]
            for b, key in enumerate(keys):
                candidates.update(bands[b].get(key, ()))
            if any(
                _jaccard(shingles, kept_shingles[c]) >= cfg.jaccard_threshold
                for c in candidates
            ):
                continue
            idx = len(kept_shingles)
            kept_shingles.append(shingles)
            for b, key in enumerate(keys):
                bands[b].setdefault(key, []).append(idx)
        seen.add(norm)
        kept.append(doc)
    return kept


def _minhash(shingles: set[str], n_perm: int) -> list[int]:
    if not shingles:
        return [0] * n_perm
    sig = []
    for p in range(n_perm):
        salt = p.to_bytes(2, "little")
        sig.append(
            min(
                int.from_bytes(hashlib.blake2b(salt + s.encode(), digest_size=8).digest(), "little")
                for s in shingles
            )
        )
    return sig


def ingest_records(records, cfg: IngestConfig):
    """Clean, filter and bucket raw records.

    Returns (documents sorted by (bucket, id), rejection counters).
    Raises on duplicate ids: ids are the corpus primary key.
    """
    docs: list[Document] = []
    seen_ids: set[str] = set()
    rejected = {"flagged": 0, "no_stopword": 0, "out_of_range": 0}
    for rec in records:
        raw = _parse_record(rec)
        if raw.id in seen_ids:
            raise ChronolexError(f"duplicate document id {raw.id!r}")
        seen_ids.add(raw.id)
        cleaned = clean_text(raw.text, cfg.verified)
        candidate = RawDocument(
            raw.id, raw.author, raw.timestamp, cleaned, raw.retweet, raw.media,
            raw.sentiment, raw.topics,
        )
        if raw.retweet or raw.media:
            rejected["flagged"] += 1
            continue
        if not admit(candidate, cfg):
            rejected["no_stopword"] += 1
            continue
        try:
            bucket = assign_bucket(raw.timestamp, cfg.cutoff, cfg.range_start, cfg.range_end)
        except ChronolexError:
            rejected["out_of_range"] += 1
            continue
        docs.append(
            Document(raw.id, raw.author, bucket, cleaned, timestamp=raw.timestamp,
                     sentiment=raw.sentiment, topics=raw.topics)
        )
    docs.sort(key=lambda d: (d.bucket.sort_key(), d.id))
    return docs, rejected


def _parse_record(rec: dict) -> RawDocument:
    try:
        doc_id = rec["id"]
        author = rec["author"]
        ts = parse_timestamp(rec["timestamp"])
        text = rec["text"]
    except KeyError as e:
        raise ChronolexError(f"record missing field {e}") from None
    if not doc_id:
        raise ChronolexError("record has empty id")
    sentiment = tuple(rec["sentiment"]) if "sentiment" in rec else None
    topics = tuple(rec["topics"]) if "topics" in rec else None
    return RawDocument(
        str(doc_id), str(author), ts, str(text),
        bool(rec.get("retweet", False)), bool(rec.get("media", False)),
        sentiment, topics,
    )


def read_ndjson(path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_partitions(docs: list[Document], out_dir):
    """Write per-bucket NDJSON partitions plus a manifest of document and
    token counts. Documents must already be sorted by (bucket, id)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, dict] = {}
    handles: dict[str, object] = {}
    try:
        for doc in docs:
            label = doc.bucket.label()
            if label not in handles:
                handles[label] = open(out_dir / f"{label}.ndjson", "w", encoding="utf-8")
                manifest[label] = {"documents": 0, "tokens": 0}
            rec = {"id": doc.id, "author": doc.author, "text": doc.text}
            if doc.timestamp is not None:
                rec["timestamp"] = doc.timestamp.isoformat().replace("+00:00", "Z")
            if doc.sentiment is not None:
                rec["sentiment"] = list(doc.sentiment)
            if doc.topics is not None:
                rec["topics"] = list(doc.topics)
            handles[label].write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
            manifest[label]["documents"] += 1
            manifest[label]["tokens"] += len(tokenize(doc.text))
    finally:
        for fh in handles.values():
            fh.close()
    ordered = sorted(manifest.items(), key=lambda kv: parse_bucket(kv[0]).sort_key())
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump({"buckets": dict(ordered)}, fh, indent=2, sort_keys=False)
    return manifest


def read_partitions(corpus_dir) -> list[Document]:
    """Load a partitioned corpus back into (bucket, id)-ordered documents."""
    corpus_dir = Path(corpus_dir)
    with open(corpus_dir / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    docs: list[Document] = []
    labels = sorted(manifest["buckets"], key=lambda l: parse_bucket(l).sort_key())
    for label in labels:
        bucket = parse_bucket(label)
        for rec in read_ndjson(corpus_dir / f"{label}.ndjson"):
            docs.append(
                Document(
                    rec["id"], rec["author"], bucket, rec["text"],
                    timestamp=parse_timestamp(rec["timestamp"]) if "timestamp" in rec else None,
                    sentiment=tuple(rec["sentiment"]) if "sentiment" in rec else None,
                    topics=tuple(rec["topics"]) if "topics" in rec else None,
                )
            )
    return docs


def corpus_report(docs_timestamps) -> dict[str, dict]:
    """Distribution tables over (bucket label, day-of-month, hour, minute).

    Takes an iterable of (bucket, datetime) pairs; minutes/hours/days are
    emitted over their full ranges so absent slots show explicit zeros.
    """
    by_bucket: dict[str, int] = {}
    by_day = {d: 0 for d in range(1, 32)}
    by_hour = {h: 0 for h in range(24)}
    by_minute = {m: 0 for m in range(60)}
    for bucket, ts in docs_timestamps:
        label = bucket.label() if isinstance(bucket, TimeBucket) else str(bucket)
        by_bucket[label] = by_bucket.get(label, 0) + 1
        by_day[ts.day] += 1
        by_hour[ts.hour] += 1
        by_minute[ts.minute] += 1
    months = dict(sorted(by_bucket.items(), key=lambda kv: parse_bucket(kv[0]).sort_key()))
    return {"month": months, "day": by_day, "hour": by_hour, "minute": by_minute}
