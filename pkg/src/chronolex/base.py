"""Shared error types and input-validation helpers."""

from __future__ import annotations

from typing import Iterable, Sequence


class ChronolexError(Exception):
    """Base class for all library errors."""


class RangeError(ChronolexError):
    """A timestamp falls outside the configured corpus range."""


class StageError(ChronolexError):
    """A pipeline stage was invoked before its inputs exist, or with
    inputs built under a different configuration fingerprint."""


class StoreError(ChronolexError):
    """Store file is missing, malformed, or fails checksum validation."""


class SeriesNotFound(KeyError, ChronolexError):
    """Requested key/family pair has no record in the store."""


def check_positive(name: str, value) -> None:
    if value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")


def check_fraction(name: str, value: float, hi: float = 1.0) -> None:
    if not (0.0 <= value <= hi):
        raise ValueError(f"{name} must be in [0, {hi}], got {value!r}")


def check_token_sentences(sentences) -> list[list[str]]:
    """Validate and materialize a corpus of token lists.

    Accepts any iterable of sequences of strings and returns a list of
    lists, so estimators can make the multiple passes they need.
    """
    if isinstance(sentences, str):
        raise TypeError("expected an iterable of token lists, got a single string")
    out: list[list[str]] = []
    for i, sent in enumerate(sentences):
        if isinstance(sent, str):
            raise TypeError(f"sentence {i} is a string; tokenize it first")
        toks = list(sent)
        for t in toks:
            if not isinstance(t, str):
                raise TypeError(f"sentence {i} contains non-string token {t!r}")
        out.append(toks)
    return out


def check_fitted(estimator, attributes: Sequence[str] | str) -> None:
    """Raise if the estimator has not been fitted (sklearn convention:
    learned state lives in trailing-underscore attributes)."""
    if isinstance(attributes, str):
        attributes = [attributes]
    missing = [a for a in attributes if not hasattr(estimator, a)]
    if missing:
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted yet; call fit() first "
            f"(missing {', '.join(missing)})"
        )


def unique_strings(values: Iterable[str], what: str) -> set[str]:
    out: set[str] = set()
    for v in values:
        if not isinstance(v, str) or not v:
            raise ValueError(f"{what} entries must be non-empty strings, got {v!r}")
        out.add(v)
    return out
