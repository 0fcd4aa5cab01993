"""Tokenization, syllable counting, lexicon lookup, and sentence readability metrics."""

from __future__ import annotations

import csv
import string
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

VOWELS = set("aeiouy")
_PUNCT = set(string.punctuation) | {"‘", "’", "“", "”", "–", "—", "…"}
# apostrophes inside a word (don't, it's) stay part of the token
_INNER_OK = {"'", "’", "-"}


def _load_stopwords() -> frozenset:
    text = resources.files("gazeread.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


STOPWORDS = _load_stopwords()


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str  # lowercased, punctuation-stripped
    is_word: bool
    is_stopword: bool
    is_content: bool
    is_named_entity: bool = False


class Lexicon:
    """word -> rating map; kind is 'aoa' (years) or 'zipf' (log frequency)."""

    def __init__(self, entries: dict, kind: str):
        if kind not in ("aoa", "zipf"):
            raise ValueError(f"unknown lexicon kind: {kind}")
        for w, r in entries.items():
            if r != r or r in (float("inf"), float("-inf")):
                raise ValueError(f"non-finite rating for {w!r}")
            if kind == "aoa" and r <= 0:
                raise ValueError(f"AoA rating must be positive: {w!r}={r}")
        self.entries = dict(entries)
        self.kind = kind

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def get(self, word: str) -> Optional[float]:
        return self.entries.get(word)

    @property
    def mean_rating(self) -> float:
        return sum(self.entries.values()) / len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_csv(cls, path, kind: str) -> "Lexicon":
        entries = {}
        with open(path, newline="", encoding="utf-8") as f:
            r = csv.reader(f)
            header = next(r, None)
            if header is None or len(header) < 2:
                raise ValueError("lexicon CSV needs a word,rating header")
            for row in r:
                if not row:
                    continue
                entries[row[0].strip().lower()] = float(row[1])
        return cls(entries, kind)


def _normalize(surface: str) -> str:
    return "".join(c for c in surface.lower() if c not in _PUNCT or c in _INNER_OK)


def _strip_punct(raw: str) -> tuple[str, str, str]:
    """Split raw whitespace token into (leading punct, core, trailing punct)."""
    start, end = 0, len(raw)
    while start < end and raw[start] in _PUNCT:
        start += 1
    while end > start and raw[end - 1] in _PUNCT:
        end -= 1
    return raw[:start], raw[start:end], raw[end:]


def tokenize(sentence: str, freq_lexicon: Optional[Lexicon] = None) -> list[Token]:
    """Whitespace tokenization with leading/trailing punctuation split off.

    Named entities follow a capitalization heuristic: a capitalized word that
    is not sentence-initial is flagged; a capitalized sentence-initial word is
    flagged only when it is neither a stopword nor covered by the frequency
    lexicon; a capitalized sentence-initial word directly followed by a
    flagged word joins the entity.
    """
    if not sentence.strip():
        return []
    tokens: list[Token] = []
    word_positions: list[int] = []  # indices into tokens of word tokens
    for raw in sentence.split():
        lead, core, trail = _strip_punct(raw)
        for ch in lead:
            tokens.append(_punct_token(ch))
        if core:
            norm = _normalize(core)
            is_word = any(c.isalpha() for c in core)
            is_stop = is_word and norm in STOPWORDS
            tokens.append(Token(
                surface=core,
                normalized=norm,
                is_word=is_word,
                is_stopword=is_stop,
                is_content=is_word and not is_stop,
            ))
            if is_word:
                word_positions.append(len(tokens) - 1)
        for ch in trail:
            tokens.append(_punct_token(ch))
    return _flag_named_entities(tokens, word_positions, freq_lexicon)


def _punct_token(ch: str) -> Token:
    return Token(surface=ch, normalized="", is_word=False, is_stopword=False, is_content=False)


def _flag_named_entities(tokens: list[Token], word_positions: list[int],
                         freq_lexicon: Optional[Lexicon]) -> list[Token]:
    flags = [False] * len(tokens)
    for k, pos in enumerate(word_positions):
        t = tokens[pos]
        if not t.surface[:1].isupper():
            continue
        if k == 0:
            known = t.is_stopword or (freq_lexicon is not None and t.normalized in freq_lexicon)
            flags[pos] = not known and freq_lexicon is not None
        else:
            flags[pos] = True
    # sentence-initial capitalized word adjacent to a flagged word joins it
    if len(word_positions) >= 2:
        first, second = word_positions[0], word_positions[1]
        if flags[second] and not flags[first] and tokens[first].surface[:1].isupper() \
                and not tokens[first].is_stopword and second == first + 1:
            flags[first] = True
    return [
        Token(t.surface, t.normalized, t.is_word, t.is_stopword, t.is_content, f)
        for t, f in zip(tokens, flags)
    ]


def named_entity_count(tokens: Sequence[Token]) -> int:
    """Number of maximal runs of named-entity tokens."""
    count = 0
    prev = False
    for t in tokens:
        if t.is_named_entity and not prev:
            count += 1
        prev = t.is_named_entity
    return count


def detokenize(tokens: Sequence[Token]) -> list[str]:
    return [t.surface for t in tokens if t.is_word]


def count_syllables(word: str) -> int:
    """Vowel-group heuristic with silent-e and consonant+'le' rules, minimum 1."""
    letters = [c for c in word.lower() if c.isalpha()]
    if not letters:
        raise ValueError(f"no letters in {word!r}")
    w = "".join(letters)
    groups = 0
    prev_vowel = False
    for c in w:
        is_vowel = c in VOWELS
        if is_vowel and not prev_vowel:
            groups += 1
        prev_vowel = is_vowel
    if w.endswith("e") and len(w) >= 2 and w[-2] not in VOWELS:
        # terminal silent e, unless a consonant+"le" ending keeps its syllable
        if not (w.endswith("le") and len(w) >= 3 and w[-3] not in VOWELS):
            groups -= 1
    return max(groups, 1)


def _word_tokens(tokens: Sequence[Token]) -> list[Token]:
    return [t for t in tokens if t.is_word]


def fkgl(tokens: Sequence[Token]) -> float:
    """Flesch-Kincaid grade, single-sentence form (words-per-sentence = W)."""
    words = _word_tokens(tokens)
    if not words:
        raise ValueError("no word tokens")
    syllables = sum(count_syllables(t.surface) for t in words)
    w = len(words)
    return 0.39 * w + 11.8 * (syllables / w) - 15.59


def char_count(tokens: Sequence[Token]) -> int:
    """Letters+digits over word tokens."""
    return sum(1 for t in _word_tokens(tokens) for c in t.surface if c.isalnum())


def ari(tokens: Sequence[Token]) -> float:
    """Automated readability index, single-sentence form."""
    words = _word_tokens(tokens)
    if not words:
        raise ValueError("no word tokens")
    c = char_count(tokens)
    w = len(words)
    return 4.71 * (c / w) + 0.5 * w - 21.43


UNCOVERED = None  # sentinel for sentences with no lexicon-covered word


def aoa_stats(tokens: Sequence[Token], lex: Lexicon):
    """(average, maximum, covered count) over covered word tokens, or UNCOVERED."""
    if lex.kind != "aoa":
        raise ValueError("aoa_stats needs an AoA lexicon")
    ratings = [lex.get(t.normalized) for t in _word_tokens(tokens) if t.normalized in lex]
    if not ratings:
        return UNCOVERED
    return (sum(ratings) / len(ratings), max(ratings), len(ratings))


def zipf_avg(tokens: Sequence[Token], lex: Lexicon):
    """Mean Zipf frequency over covered word tokens, or UNCOVERED."""
    if lex.kind != "zipf":
        raise ValueError("zipf_avg needs a frequency lexicon")
    ratings = [lex.get(t.normalized) for t in _word_tokens(tokens) if t.normalized in lex]
    if not ratings:
        return UNCOVERED
    return sum(ratings) / len(ratings)


def load_fixture_lexicons() -> tuple[Lexicon, Lexicon]:
    """Small bundled AoA and Zipf lexicons used by tests and offline runs."""
    aoa_entries, zipf_entries = {}, {}
    for name, target in (("aoa_fixture.csv", aoa_entries), ("zipf_fixture.csv", zipf_entries)):
        text = resources.files("gazeread.data").joinpath(name).read_text("utf-8")
        rows = list(csv.reader(text.splitlines()))
        for row in rows[1:]:
            if row:
                target[row[0].strip().lower()] = float(row[1])
    return Lexicon(aoa_entries, "aoa"), Lexicon(zipf_entries, "zipf")
