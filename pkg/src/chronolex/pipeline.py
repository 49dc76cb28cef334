"""Pipeline stages and their shared configuration.

Stages write their outputs under a single working directory:

    corpus/   cleaned per-bucket partitions + manifest   (ingest)
    vocab/    vocabulary TSV + phrase model              (vocab build)
    freq/     frequency series + bucket totals           (freq)
    embed/    compass, per-bucket slices, distances      (embed ...)
    scores/   sentiment + topic series                   (scores)
    store/    committed binary store                     (store)

Every stage records the configuration fingerprint it ran under; a stage
refuses to run when an upstream stage carries a different fingerprint,
so a store can never silently mix configurations. The fingerprint hashes
configuration values and the content of referenced word lists, never
file system paths, which keeps identical runs in different directories
byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import frequency, scores as scores_mod
from .base import SeriesNotFound, StageError
from .buckets import parse_bucket
from .embeddings import (
    CompassEmbeddings, EmbeddingConfig, balance_sample, build_distance_series,
    load_embeddings, save_embeddings,
)
from .ingest import (
    IngestConfig, corpus_report, dedup_filter, ingest_records, read_ndjson,
    read_partitions, write_partitions,
)
from .phrases import PhraseDetector, Vocabulary
from .scores import StubScorer, build_score_series, load_sidecar, occurrence_index
from .store import DIST, FREQ, SENT, TOPIC, SeriesRecord, Store, StoreWriter
from .tokenizer import load_connectors, tokenize

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class PipelineConfig:
    seed: int = 0
    corpus_id: str = "corpus"
    # ingest
    stopword_file: str | None = None
    verified_file: str | None = None
    cutoff: tuple[int, int] = (2020, 1)
    range_start: tuple[int, int] | None = (2018, 1)
    range_end: tuple[int, int] | None = None
    author_fraction: float = 0.01
    near_duplicates: bool = False
    # phrases
    phrase_min_count: int = 10
    phrase_threshold: float = 10.0
    max_vocab: int = 100_000_000
    # embeddings
    embed: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    # scores
    score_floor: int = 10
    score_cap: int = 1024

    @classmethod
    def from_toml(cls, path) -> "PipelineConfig":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        cfg = cls()
        top = {k: v for k, v in raw.items() if not isinstance(v, dict)}
        for key in ("seed", "corpus_id"):
            if key in top:
                setattr(cfg, key, top[key])
        ing = raw.get("ingest", {})
        for key in ("stopword_file", "verified_file", "author_fraction", "near_duplicates"):
            if key in ing:
                setattr(cfg, key, ing[key])
        for key in ("cutoff", "range_start", "range_end"):
            if key in ing:
                setattr(cfg, key, tuple(ing[key]) if ing[key] else None)
        phr = raw.get("phrases", {})
        cfg.phrase_min_count = phr.get("min_count", cfg.phrase_min_count)
        cfg.phrase_threshold = phr.get("threshold", cfg.phrase_threshold)
        cfg.max_vocab = phr.get("max_vocab", cfg.max_vocab)
        emb = raw.get("embeddings", {})
        if emb:
            cfg.embed = EmbeddingConfig(**{**asdict(cfg.embed), **emb, "seed": top.get("seed", cfg.seed)})
        else:
            cfg.embed = EmbeddingConfig(**{**asdict(cfg.embed), "seed": cfg.seed})
        sco = raw.get("scores", {})
        cfg.score_floor = sco.get("floor", cfg.score_floor)
        cfg.score_cap = sco.get("cap", cfg.score_cap)
        return cfg

    def stopwords(self) -> set[str]:
        return load_connectors(self.stopword_file)

    def verified(self) -> set[str]:
        if self.verified_file is None:
            return set()
        with open(self.verified_file, encoding="utf-8") as fh:
            return {line.strip().lstrip("@").lower() for line in fh if line.strip()}

    def ingest_config(self) -> IngestConfig:
        return IngestConfig(
            stopwords=self.stopwords(), verified=self.verified(),
            cutoff=self.cutoff, range_start=self.range_start, range_end=self.range_end,
            author_fraction=self.author_fraction, near_duplicates=self.near_duplicates,
        )

    def fingerprint(self) -> str:
        payload = asdict(self)
        # hash list contents, not paths
        payload["stopword_file"] = sorted(self.stopwords())
        payload["verified_file"] = sorted(self.verified())
        payload["embed"] = asdict(self.embed)
        blob = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def _stage_path(workdir, stage: str) -> Path:
    return Path(workdir) / stage / "stage.json"


def _mark_stage(workdir, stage: str, fingerprint: str, **info) -> None:
    path = _stage_path(workdir, stage)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps({"stage": stage, "fingerprint": fingerprint, **info},
                   sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def require_stage(workdir, stage: str, fingerprint: str) -> dict:
    path = _stage_path(workdir, stage)
    if not path.exists():
        raise StageError(f"stage '{stage}' has not run yet (missing {path})")
    info = json.loads(path.read_text(encoding="utf-8"))
    if info.get("fingerprint") != fingerprint:
        raise StageError(
            f"stage '{stage}' was built under a different configuration; rerun it"
        )
    return info


# --- stages -------------------------------------------------------------


def run_ingest(cfg: PipelineConfig, workdir, inputs: list) -> dict:
    records = []
    for path in inputs:
        records.extend(read_ndjson(path))
    docs, rejected = ingest_records(records, cfg.ingest_config())
    manifest = write_partitions(docs, Path(workdir) / "corpus")
    _mark_stage(workdir, "corpus", cfg.fingerprint(),
                documents=sum(m["documents"] for m in manifest.values()),
                rejected=rejected)
    return manifest


def _tokenized_sentences(docs) -> list[list[str]]:
    return [[t.lowercased for t in tokenize(d.text)] for d in docs]


def run_vocab(cfg: PipelineConfig, workdir) -> Vocabulary:
    fp = cfg.fingerprint()
    require_stage(workdir, "corpus", fp)
    docs = read_partitions(Path(workdir) / "corpus")
    sentences = _tokenized_sentences(docs)
    detector = PhraseDetector(
        min_count=cfg.phrase_min_count, threshold=cfg.phrase_threshold,
        max_vocab=cfg.max_vocab, connectors=cfg.stopwords(),
    ).fit(sentences)
    out = Path(workdir) / "vocab"
    out.mkdir(parents=True, exist_ok=True)
    detector.vocab_.save_tsv(out / "vocab.tsv")
    detector.save(out / "phrases.json")
    _mark_stage(workdir, "vocab", fp, entries=len(detector.vocab_),
                breakdown=detector.vocab_.breakdown())
    return detector.vocab_


def _load_detector(workdir) -> PhraseDetector:
    return PhraseDetector.load(Path(workdir) / "vocab" / "phrases.json")


def run_freq(cfg: PipelineConfig, workdir) -> None:
    fp = cfg.fingerprint()
    require_stage(workdir, "corpus", fp)
    require_stage(workdir, "vocab", fp)
    docs = read_partitions(Path(workdir) / "corpus")
    detector = _load_detector(workdir)
    connectors = detector.connectors_

    by_bucket: dict = {}
    for doc in docs:
        by_bucket.setdefault(doc.bucket, []).append(doc)
    bucket_counts, totals = {}, {}
    for bucket in sorted(by_bucket):
        sents = _tokenized_sentences(by_bucket[bucket])
        totals[bucket] = frequency.bucket_token_total(sents, connectors)
        segmented = detector.transform(sents)
        bucket_counts[bucket] = frequency.count_bucket(segmented, detector.vocab_, connectors)
    series = frequency.build_frequency_series(bucket_counts, totals)

    out = Path(workdir) / "freq"
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "series.ndjson", "w", encoding="utf-8") as fh:
        for key in sorted(series):
            points = {b.label(): [a, pm] for b, (a, pm) in sorted(series[key].points.items())}
            fh.write(json.dumps({"key": key, "points": points}, ensure_ascii=False, sort_keys=True) + "\n")
    (out / "totals.json").write_text(
        json.dumps({b.label(): t for b, t in sorted(totals.items())}, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    _mark_stage(workdir, "freq", fp, keys=len(series))


def _embedding_view(cfg: PipelineConfig, workdir):
    """Deduplicated, phrase-segmented sentences grouped by bucket."""
    docs = read_partitions(Path(workdir) / "corpus")
    docs = dedup_filter(docs, cfg.ingest_config())
    detector = _load_detector(workdir)
    by_bucket: dict = {}
    for doc in docs:
        by_bucket.setdefault(doc.bucket, []).append(doc)
    segmented: dict = {}
    for bucket in sorted(by_bucket):
        segmented[bucket] = detector.transform(_tokenized_sentences(by_bucket[bucket]))
    return segmented


def run_embed_compass(cfg: PipelineConfig, workdir) -> None:
    fp = cfg.fingerprint()
    require_stage(workdir, "corpus", fp)
    require_stage(workdir, "vocab", fp)
    segmented = _embedding_view(cfg, workdir)
    balanced = balance_sample(segmented, cfg.embed.month_quota, cfg.embed.seed)
    compass = CompassEmbeddings(cfg.embed).fit(
        [s for bucket in sorted(balanced) for s in balanced[bucket]]
    )
    out = Path(workdir) / "embed"
    out.mkdir(parents=True, exist_ok=True)
    save_embeddings(out / "compass.target.emb", compass.index_, compass.target_)
    save_embeddings(out / "compass.context.emb", compass.index_, compass.context_)
    np.save(out / "compass.counts.npy", compass.counts_)
    _mark_stage(workdir, "embed-compass", fp, vocab=len(compass.index_))


def _load_compass(cfg: PipelineConfig, workdir) -> CompassEmbeddings:
    out = Path(workdir) / "embed"
    compass = CompassEmbeddings(cfg.embed)
    index, target = load_embeddings(out / "compass.target.emb")
    _, context = load_embeddings(out / "compass.context.emb")
    compass.index_ = index
    compass.target_ = target.astype(np.float64)
    compass.context_ = context.astype(np.float64)
    compass.counts_ = np.load(out / "compass.counts.npy")
    return compass


def run_embed_slices(cfg: PipelineConfig, workdir) -> None:
    fp = cfg.fingerprint()
    require_stage(workdir, "embed-compass", fp)
    segmented = _embedding_view(cfg, workdir)
    compass = _load_compass(cfg, workdir)
    out = Path(workdir) / "embed" / "slices"
    out.mkdir(parents=True, exist_ok=True)
    labels = []
    for bucket in sorted(segmented):
        sl = compass.fit_slice(bucket, segmented[bucket])
        save_embeddings(out / f"{bucket.label()}.emb", sl.index, sl.vectors)
        labels.append(bucket.label())
    _mark_stage(workdir, "embed-slices", fp, buckets=labels)


def run_embed_distances(cfg: PipelineConfig, workdir) -> None:
    from .embeddings import SliceEmbeddings

    fp = cfg.fingerprint()
    info = require_stage(workdir, "embed-slices", fp)
    out = Path(workdir) / "embed"
    slices = []
    for label in info["buckets"]:
        index, vectors = load_embeddings(out / "slices" / f"{label}.emb")
        slices.append(SliceEmbeddings(parse_bucket(label), index, vectors))
    series = build_distance_series(slices)
    with open(out / "distances.ndjson", "w", encoding="utf-8") as fh:
        for key in sorted(series):
            s = series[key]
            fh.write(json.dumps({
                "key": key,
                "anchor": s.anchor_bucket.label(),
                "points": {b.label(): d for b, d in sorted(s.points.items())},
            }, ensure_ascii=False, sort_keys=True) + "\n")
    _mark_stage(workdir, "embed-distances", fp, keys=len(series))


def run_scores(cfg: PipelineConfig, workdir, sidecar=None, use_stub=True) -> None:
    fp = cfg.fingerprint()
    require_stage(workdir, "corpus", fp)
    require_stage(workdir, "vocab", fp)
    docs = read_partitions(Path(workdir) / "corpus")
    detector = _load_detector(workdir)
    connectors = detector.connectors_

    sents = _tokenized_sentences(docs)
    segmented = detector.transform(sents)
    doc_scores: dict[str, scores_mod.DocScores] = {}
    if sidecar is not None:
        doc_scores.update(load_sidecar(sidecar))
    stub = StubScorer() if use_stub else None
    for doc, tokens in zip(docs, sents):
        if doc.id in doc_scores:
            continue
        if doc.sentiment is not None and doc.topics is not None:
            doc_scores[doc.id] = scores_mod.DocScores(doc.id, doc.sentiment, doc.topics)
        elif stub is not None:
            doc_scores[doc.id] = stub.score(doc.id, tokens)
        else:
            raise StageError(f"no scores for document {doc.id} and stub scoring disabled")

    occurrences = occurrence_index(
        ((doc.id, doc.bucket, units) for doc, units in zip(docs, segmented)),
        connectors, detector.vocab_,
    )
    sent_series, topic_series = build_score_series(
        occurrences, doc_scores, cap=cfg.score_cap, floor=cfg.score_floor, seed=cfg.seed,
    )
    out = Path(workdir) / "scores"
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "sentiment.ndjson", "w", encoding="utf-8") as fh:
        for key in sorted(sent_series):
            pts = {b.label(): list(v) for b, v in sorted(sent_series[key].points.items())}
            fh.write(json.dumps({"key": key, "points": pts}, ensure_ascii=False, sort_keys=True) + "\n")
    with open(out / "topics.ndjson", "w", encoding="utf-8") as fh:
        for key in sorted(topic_series):
            s = topic_series[key]
            pts = {b.label(): [float(x) for x in v] for b, v in sorted(s.points.items())}
            fh.write(json.dumps({"key": key, "top4": list(s.top4), "points": pts},
                                ensure_ascii=False, sort_keys=True) + "\n")
    _mark_stage(workdir, "scores", fp, keys=len(sent_series))


def run_store(cfg: PipelineConfig, workdir) -> Path:
    fp = cfg.fingerprint()
    for stage in ("corpus", "vocab", "freq", "embed-distances", "scores"):
        require_stage(workdir, stage, fp)
    workdir = Path(workdir)

    corpus_manifest = json.loads((workdir / "corpus" / "manifest.json").read_text("utf-8"))
    labels = sorted(corpus_manifest["buckets"], key=lambda l: parse_bucket(l).sort_key())
    bucket_idx = {label: i for i, label in enumerate(labels)}
    vocab = Vocabulary.load_tsv(workdir / "vocab" / "vocab.tsv")

    writer = StoreWriter(
        workdir / "store", [parse_bucket(l) for l in labels],
        {k: (vocab.arity[k], vocab.counts[k]) for k in vocab.counts},
        corpus_id=cfg.corpus_id, fingerprint=fp,
    )
    for rec in read_ndjson(workdir / "freq" / "series.ndjson"):
        points = {bucket_idx[l]: (int(a), float(pm)) for l, (a, pm) in rec["points"].items()}
        writer.put_series(SeriesRecord(rec["key"], FREQ, points))
    for rec in read_ndjson(workdir / "embed" / "distances.ndjson"):
        if rec["key"] not in vocab.counts:
            continue
        points = {bucket_idx[l]: float(d) for l, d in rec["points"].items()}
        writer.put_series(SeriesRecord(rec["key"], DIST, points))
    for rec in read_ndjson(workdir / "scores" / "sentiment.ndjson"):
        points = {bucket_idx[l]: tuple(v) for l, v in rec["points"].items()}
        writer.put_series(SeriesRecord(rec["key"], SENT, points))
    for rec in read_ndjson(workdir / "scores" / "topics.ndjson"):
        points = {bucket_idx[l]: tuple(v) for l, v in rec["points"].items()}
        writer.put_series(SeriesRecord(rec["key"], TOPIC, points, top4=tuple(rec["top4"])))
    writer.commit()
    _mark_stage(workdir, "store", fp)
    return workdir / "store"


def run_report(workdir) -> dict:
    docs = read_partitions(Path(workdir) / "corpus")
    tables = corpus_report((d.bucket, d.timestamp) for d in docs if d.timestamp is not None)
    out = Path(workdir) / "report"
    out.mkdir(parents=True, exist_ok=True)
    (out / "distribution.json").write_text(
        json.dumps(tables, sort_keys=False, indent=2, default=str) + "\n", encoding="utf-8")
    for name in ("month", "day", "hour", "minute"):
        with open(out / f"{name}.csv", "w", encoding="utf-8") as fh:
            fh.write(f"{name},documents\n")
            for k, v in tables[name].items():
                fh.write(f"{k},{v}\n")
    return tables


def run_export(store_path, out_dir) -> None:
    """CSV interchange bundle; run_import rebuilds an equivalent store."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with Store(store_path) as store:
        with open(out / "buckets.csv", "w", encoding="utf-8") as fh:
            fh.write("bucket\n")
            for label in store.manifest.buckets:
                fh.write(f"{label}\n")
        with open(out / "vocab.csv", "w", encoding="utf-8") as fh:
            fh.write("key,arity,total_count\n")
            for key, arity, count in zip(store.keys, store.arities, store.counts):
                fh.write(f"\"{key}\",{arity},{count}\n")
        _export_family(store, FREQ, out / "frequency.csv",
                       "key,bucket,absolute,per_million\n",
                       lambda v: f"{v[0]},{v[1]!r}")
        _export_family(store, DIST, out / "distance.csv",
                       "key,bucket,distance\n", lambda v: repr(v))
        _export_family(store, SENT, out / "sentiment.csv",
                       "key,bucket,mean_neg,mean_neu,mean_pos,pos_frac,n_sampled\n",
                       lambda v: ",".join(repr(x) for x in v[:4]) + f",{v[4]}")
        header = "key,bucket," + ",".join(
            '"' + l + '"' for l in scores_mod.TOPIC_LABELS) + "\n"
        _export_family(store, TOPIC, out / "topics.csv", header,
                       lambda v: ",".join(repr(x) for x in v))
        if TOPIC in store.manifest.families:
            with open(out / "top4.csv", "w", encoding="utf-8") as fh:
                fh.write("key,rank,topic\n")
                for key in store.keys:
                    try:
                        rec = store.get_series(key, TOPIC)
                    except SeriesNotFound:
                        continue
                    for rank, idx in enumerate(rec.top4, start=1):
                        fh.write(f"\"{key}\",{rank},\"{scores_mod.TOPIC_LABELS[idx]}\"\n")


def _export_family(store: Store, family: str, path, header: str, fmt) -> None:
    if family not in store.manifest.families:
        return
    labels = store.manifest.buckets
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header)
        for key in store.keys:
            try:
                rec = store.get_series(key, family)
            except SeriesNotFound:
                continue
            for idx in sorted(rec.points):
                fh.write(f"\"{key}\",{labels[idx]},{fmt(rec.points[idx])}\n")


def run_import(bundle_dir, out_store, corpus_id: str = "imported") -> Path:
    """Rebuild a store from an exported CSV bundle."""
    import csv

    bundle = Path(bundle_dir)
    if not (bundle / "vocab.csv").exists():
        raise StageError(f"no vocab.csv in {bundle}; not an export bundle")

    def rows(name):
        path = bundle / name
        if not path.exists():
            return
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            yield from reader

    labels = [row[0] for row in rows("buckets.csv")]
    if not labels:
        raise StageError(f"no buckets.csv in {bundle}; not an export bundle")
    bucket_idx = {label: i for i, label in enumerate(labels)}
    key_table = {key: (int(arity), int(count)) for key, arity, count in rows("vocab.csv")}

    digest = hashlib.sha256()
    for name in sorted(p.name for p in bundle.glob("*.csv")):
        digest.update(name.encode())
        digest.update((bundle / name).read_bytes())

    writer = StoreWriter(out_store, [parse_bucket(l) for l in labels], key_table,
                         corpus_id=corpus_id, fingerprint=digest.hexdigest())

    def gather(name):
        grouped: dict[str, dict[int, list[str]]] = {}
        for key, label, *values in rows(name):
            grouped.setdefault(key, {})[bucket_idx[label]] = values
        return grouped

    for key, pts in gather("frequency.csv").items():
        writer.put_series(SeriesRecord(
            key, FREQ, {i: (int(v[0]), float(v[1])) for i, v in pts.items()}))
    for key, pts in gather("distance.csv").items():
        writer.put_series(SeriesRecord(
            key, DIST, {i: float(v[0]) for i, v in pts.items()}))
    for key, pts in gather("sentiment.csv").items():
        writer.put_series(SeriesRecord(
            key, SENT,
            {i: (*(float(x) for x in v[:4]), int(v[4])) for i, v in pts.items()}))
    label_index = {label: i for i, label in enumerate(scores_mod.TOPIC_LABELS)}
    top4: dict[str, list[int]] = {}
    for key, _rank, topic in rows("top4.csv"):
        top4.setdefault(key, []).append(label_index[topic])
    for key, pts in gather("topics.csv").items():
        writer.put_series(SeriesRecord(
            key, TOPIC, {i: tuple(float(x) for x in v) for i, v in pts.items()},
            top4=tuple(top4[key])))
    writer.commit()
    return Path(out_store)
