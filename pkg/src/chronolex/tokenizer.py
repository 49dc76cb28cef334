"""Social-media-aware tokenizer.

Regex-staged: emoticons first (they collide with punctuation), then emoji
runs, hashtags, mentions, numbers, words, and a single-character fallback
so no input character is ever dropped. URLs are assumed to be removed by
the cleaning step upstream.

Trailing contraction clitics (n't, 's, 're, 've, 'll, 'd, 'm) are split
off conservatively: only when the remainder is non-empty and the clitic
sits at the very end of the word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources


class TokenKind(Enum):
    WORD = "word"
    HASHTAG = "hashtag"
    MENTION = "mention"
    EMOTICON = "emoticon"
    NUMBER = "number"
    PUNCT = "punct"


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    kind: TokenKind

    @property
    def lowercased(self) -> str:
        return self.surface.lower()


# ASCII emoticons: eyes-nose-mouth, the reversed form, and hearts.
_EMOTICON = r"""
    (?:
      [<>]?
      [:;=8]
      [\-o\*']?
      [\)\]\(\[dDpP/\\:\}\{@\|]
      |
      [\)\]\(\[dDpP/\\:\}\{@\|]
      [\-o\*']?
      [:;=8]
      [<>]?
      |
      <+/?3+
    )"""

# Pragmatic emoji cluster: one emoji base plus any ZWJ continuations,
# variation selectors, skin tones or keycap marks; flag pairs stay whole.
_E_BASE = (
    "["
    "\U0001F300-\U0001F5FF"
    "\U0001F600-\U0001F64F"
    "\U0001F680-\U0001F6FF"
    "\U0001F900-\U0001FAFF"
    "☀-➿"
    "⬀-⯿"
    "]"
)
_E_MOD = "[️\U0001F3FB-\U0001F3FF⃣]"
_EMOJI = (
    f"(?:[\U0001F1E6-\U0001F1FF]{{2}}"
    f"|{_E_BASE}(?:{_E_MOD}|‍{_E_BASE})*)"
)

_HASHTAG = r"(?:\#\w+(?:[-']\w+)*)"
_MENTION = r"(?:@\w+)"
_NUMBER = r"(?:\d+(?:[.,:/\-]\d+)*%?(?!\w))"
# One word shape covers plain, hyphenated and apostrophe forms alike
# (covid-19, don't); pure digit runs are caught by NUMBER first.
_WORD = r"(?:\w+(?:['’-]\w+)*)"

# NUMBER before EMOTICON so "8:15" reads as a time, not as eye-colon;
# EMOTICON before WORD so "D:" keeps its mouth.
_TOKEN_RE = re.compile(
    "|".join(
        f"(?P<{name}>{pat})"
        for name, pat in [
            ("NUMBER", _NUMBER),
            ("EMOTICON", _EMOTICON),
            ("EMOJI", _EMOJI),
            ("HASHTAG", _HASHTAG),
            ("MENTION", _MENTION),
            ("WORD", _WORD),
            ("OTHER", r"\S"),
        ]
    ),
    re.VERBOSE | re.UNICODE,
)

_GROUP_KIND = {
    "EMOTICON": TokenKind.EMOTICON,
    "EMOJI": TokenKind.WORD,  # emoji behave as words downstream
    "HASHTAG": TokenKind.HASHTAG,
    "MENTION": TokenKind.MENTION,
    "NUMBER": TokenKind.NUMBER,
    "WORD": TokenKind.WORD,
}

_APOS_CLITICS = ("'s", "'re", "'ve", "'ll", "'d", "'m")


def _split_clitic(surface: str) -> tuple[str, str] | None:
    low = surface.lower().replace("’", "'")
    if low.endswith("n't") and len(surface) > 3:
        return surface[:-3], surface[-3:]
    apos = low.rfind("'")
    if apos > 0 and low[apos:] in _APOS_CLITICS:
        return surface[:apos], surface[apos:]
    return None


def tokenize(text: str) -> list[Token]:
    """Tokenize cleaned text. Total and deterministic; every
    non-whitespace character of the input lands in exactly one token."""
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(text):
        group = m.lastgroup
        surface = m.group()
        if group == "OTHER":
            kind = TokenKind.WORD if surface.isalnum() else TokenKind.PUNCT
            tokens.append(Token(surface, kind))
            continue
        kind = _GROUP_KIND[group]
        if kind is TokenKind.WORD and ("'" in surface or "’" in surface):
            split = _split_clitic(surface)
            if split is not None:
                tokens.append(Token(split[0], TokenKind.WORD))
                tokens.append(Token(split[1], TokenKind.WORD))
                continue
        tokens.append(Token(surface, kind))
    return tokens


def is_connector(tok: Token, connectors: set[str]) -> bool:
    """Connector test used by phrase scoring. Hashtags and mentions are
    never connectors, whatever the word list says."""
    if tok.kind in (TokenKind.HASHTAG, TokenKind.MENTION):
        return False
    return tok.lowercased in connectors


def load_connectors(path=None) -> set[str]:
    """Load the connector/stopword list: one lowercase word per line,
    '#' comments allowed. Defaults to the list shipped with the package."""
    if path is None:
        text = resources.files("chronolex.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    if not words:
        raise ValueError("connector list is empty")
    return words


def read_fixtures(path) -> list[tuple[str, list[str]]]:
    """Tokenizer fixture file: input line, tab, expected space-joined tokens."""
    cases = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            left, _, right = line.partition("\t")
            cases.append((left, right.split(" ") if right else []))
    return cases
