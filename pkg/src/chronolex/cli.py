"""Command-line pipeline driver.

Every stage is a subcommand; stages check their upstream artifacts and
the shared configuration fingerprint, so a full build is:

    chronolex ingest  --workdir W corpus.ndjson
    chronolex vocab build --workdir W
    chronolex freq    --workdir W
    chronolex embed compass --workdir W
    chronolex embed slices --workdir W
    chronolex embed distances --workdir W
    chronolex scores  --workdir W
    chronolex store   --workdir W
    chronolex serve   --store W/store

Exit codes: 0 success, 2 usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import pipeline, synth
from .base import ChronolexError
from .buckets import TimeBucket, month_range, parse_bucket
from .embeddings import EmbeddingConfig
from .server import serve


def _config(args) -> pipeline.PipelineConfig:
    if getattr(args, "config", None):
        cfg = pipeline.PipelineConfig.from_toml(args.config)
    else:
        cfg = pipeline.PipelineConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
        cfg.embed = replace(cfg.embed, seed=args.seed)
    for name in ("stopword_file", "verified_file", "corpus_id"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "min_count", None) is not None:
        cfg.phrase_min_count = args.min_count
    if getattr(args, "threshold", None) is not None:
        cfg.phrase_threshold = args.threshold
    if getattr(args, "connectors", None) is not None:
        cfg.stopword_file = args.connectors
    for name in ("dim", "window", "negative", "epochs_compass", "epochs_slice",
                 "month_quota", "embed_min_count"):
        value = getattr(args, name, None)
        if value is not None:
            field = "min_count" if name == "embed_min_count" else name
            cfg.embed = replace(cfg.embed, **{field: value})
    return cfg


def _add_common(p: argparse.ArgumentParser, workdir=True):
    p.add_argument("--config", help="TOML configuration file")
    p.add_argument("--seed", type=int, help="pipeline seed override")
    if workdir:
        p.add_argument("--workdir", required=True, help="pipeline working directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chronolex",
                                     description="temporal n-gram series pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="clean, filter and bucket a raw NDJSON corpus")
    _add_common(p)
    p.add_argument("inputs", nargs="+", help="raw NDJSON corpus files")
    p.add_argument("--stopword-file", dest="stopword_file")
    p.add_argument("--verified-file", dest="verified_file")
    p.add_argument("--corpus-id", dest="corpus_id")

    p = sub.add_parser("vocab", help="vocabulary operations")
    vocab_sub = p.add_subparsers(dest="vocab_command", required=True)
    pb = vocab_sub.add_parser("build", help="detect phrases and build the vocabulary")
    _add_common(pb)
    pb.add_argument("--min-count", dest="min_count", type=int)
    pb.add_argument("--threshold", type=float)
    pb.add_argument("--connectors", help="connector word list file")

    p = sub.add_parser("freq", help="aggregate per-bucket frequencies")
    _add_common(p)

    p = sub.add_parser("embed", help="diachronic embedding stages")
    embed_sub = p.add_subparsers(dest="embed_command", required=True)
    for name, help_text in (("compass", "train the shared compass model"),
                            ("slices", "train per-bucket slices"),
                            ("distances", "compute distance-to-anchor series")):
        pe = embed_sub.add_parser(name, help=help_text)
        _add_common(pe)
        pe.add_argument("--dim", type=int)
        pe.add_argument("--window", type=int)
        pe.add_argument("--negative", type=int)
        pe.add_argument("--epochs-compass", dest="epochs_compass", type=int)
        pe.add_argument("--epochs-slice", dest="epochs_slice", type=int)
        pe.add_argument("--month-quota", dest="month_quota", type=int)
        pe.add_argument("--min-count", dest="embed_min_count", type=int)

    p = sub.add_parser("scores", help="aggregate sentiment and topic series")
    _add_common(p)
    p.add_argument("--sidecar", help="NDJSON sidecar with per-document scores")
    p.add_argument("--no-stub", action="store_true",
                   help="fail instead of stub-scoring documents without scores")

    p = sub.add_parser("store", help="assemble the binary series store")
    _add_common(p)
    p.add_argument("--corpus-id", dest="corpus_id")

    p = sub.add_parser("serve", help="serve a store over HTTP")
    p.add_argument("--store", required=True)
    p.add_argument("--bind", default="127.0.0.1:8701")
    p.add_argument("--cors-origin", dest="cors_origin")
    p.add_argument("--ui", dest="static_dir", help="static asset directory to serve at /")

    p = sub.add_parser("export", help="export a store as a CSV bundle")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("import", help="rebuild a store from an exported CSV bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--corpus-id", dest="corpus_id", default="imported")

    p = sub.add_parser("synth", help="generate a synthetic corpus with injected events")
    p.add_argument("--out", required=True, help="output corpus NDJSON path")
    p.add_argument("--ledger", help="ground-truth ledger path (default <out>.ledger.json)")
    p.add_argument("--months", type=int, default=12)
    p.add_argument("--start", default="2020-01")
    p.add_argument("--prior", action="store_true", help="include a prior-period bucket")
    p.add_argument("--docs-per-bucket", type=int, default=200)
    p.add_argument("--target-docs", type=int, default=50)
    p.add_argument("--vocab-size", type=int, default=500)
    p.add_argument("--events", help="JSON file with a list of event objects")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("report", help="corpus temporal distribution tables")
    _add_common(p)

    return parser


def _run_synth(args) -> None:
    start = parse_bucket(args.start)
    if start.is_prior:
        raise ChronolexError("--start must be a month, e.g. 2020-01")
    buckets: list[TimeBucket] = []
    if args.prior:
        buckets.append(TimeBucket.prior())
    y, m = start.year, start.month
    end_total = y * 12 + (m - 1) + args.months - 1
    buckets.extend(month_range((y, m), (end_total // 12, end_total % 12 + 1)))
    events = []
    if args.events:
        for raw in json.loads(Path(args.events).read_text(encoding="utf-8")):
            events.append(synth.EventSpec(
                target=raw["target"], kind=raw["kind"], onset=raw["onset"],
                duration=raw["duration"], magnitude=raw.get("magnitude", 2.0),
                cluster_a=tuple(raw.get("cluster_a", ())),
                cluster_b=tuple(raw.get("cluster_b", ())),
            ))
    cfg = synth.SynthConfig(
        buckets=buckets, docs_per_bucket=args.docs_per_bucket,
        target_docs_per_bucket=args.target_docs, vocab_size=args.vocab_size,
        seed=args.seed,
    )
    records, ledger = synth.generate(events, cfg)
    ledger_path = args.ledger or f"{args.out}.ledger.json"
    synth.write_corpus(records, ledger, args.out, ledger_path)
    print(f"wrote {len(records)} documents to {args.out}; ledger at {ledger_path}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ingest":
            manifest = pipeline.run_ingest(_config(args), args.workdir, args.inputs)
            print(f"ingested {sum(m['documents'] for m in manifest.values())} documents "
                  f"into {len(manifest)} buckets")
        elif args.command == "vocab":
            vocab = pipeline.run_vocab(_config(args), args.workdir)
            print(f"vocabulary: {len(vocab)} entries {vocab.breakdown()}")
        elif args.command == "freq":
            pipeline.run_freq(_config(args), args.workdir)
            print("frequency series written")
        elif args.command == "embed":
            cfg = _config(args)
            if args.embed_command == "compass":
                pipeline.run_embed_compass(cfg, args.workdir)
                print("compass trained")
            elif args.embed_command == "slices":
                pipeline.run_embed_slices(cfg, args.workdir)
                print("slices trained")
            else:
                pipeline.run_embed_distances(cfg, args.workdir)
                print("distance series written")
        elif args.command == "scores":
            pipeline.run_scores(_config(args), args.workdir,
                                sidecar=args.sidecar, use_stub=not args.no_stub)
            print("score series written")
        elif args.command == "store":
            path = pipeline.run_store(_config(args), args.workdir)
            print(f"store committed at {path}")
        elif args.command == "serve":
            serve(args.store, bind=args.bind, cors_origin=args.cors_origin,
                  static_dir=args.static_dir)
        elif args.command == "export":
            pipeline.run_export(args.store, args.out)
            print(f"exported CSV bundle to {args.out}")
        elif args.command == "import":
            path = pipeline.run_import(args.bundle, args.out, corpus_id=args.corpus_id)
            print(f"store imported at {path}")
        elif args.command == "synth":
            _run_synth(args)
        elif args.command == "report":
            tables = pipeline.run_report(args.workdir)
            print(f"report written ({sum(tables['month'].values())} documents)")
    except ChronolexError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: missing input: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
