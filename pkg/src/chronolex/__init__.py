"""chronolex: temporal n-gram analytics over timestamped text corpora.

Turns a timestamped document corpus into per-n-gram monthly time series
(frequency, diachronic-embedding distance, sentiment, topic distribution)
behind a binary series store, an HTTP query API, and a stage-based CLI.
"""

from .buckets import TimeBucket, assign_bucket, parse_bucket
from .embeddings import (
    CompassEmbeddings, EmbeddingConfig, balance_sample, build_distance_series,
    cosine_distance,
)
from .frequency import count_bucket, normalize
from .ingest import Document, IngestConfig, RawDocument, admit, clean_text, dedup_filter
from .phrases import PhraseDetector, Vocabulary, phrase_score
from .scores import DocScores, StubScorer, mean_scores, sample_docs, top4_topics
from .store import SeriesRecord, Store, StoreWriter
from .tokenizer import Token, TokenKind, is_connector, load_connectors, tokenize

__version__ = "0.1.0"

__all__ = [
    "CompassEmbeddings", "DocScores", "Document", "EmbeddingConfig",
    "IngestConfig", "PhraseDetector", "RawDocument", "SeriesRecord", "Store",
    "StoreWriter", "StubScorer", "TimeBucket", "Token", "TokenKind",
    "Vocabulary", "admit", "assign_bucket", "balance_sample",
    "build_distance_series", "clean_text", "cosine_distance", "count_bucket",
    "dedup_filter", "is_connector", "load_connectors", "mean_scores",
    "normalize", "parse_bucket", "phrase_score", "sample_docs", "tokenize",
    "top4_topics",
]
