"""Corpus-level readability comparison of original vs simplified sentences."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from . import linguistics as ling

METRIC_NAMES = ["fkgl", "ari", "avg_aoa", "max_aoa"]


@dataclass(frozen=True)
class SentencePair:
    original: str
    simplified: str

    def __post_init__(self):
        if not self.original.strip() or not self.simplified.strip():
            raise ValueError("pair sides must be non-empty")


@dataclass
class CorpusReadability:
    fkgl: float
    ari: float
    avg_aoa: float
    max_aoa: float

    def as_row(self) -> list[float]:
        return [self.fkgl, self.ari, self.avg_aoa, self.max_aoa]


def sentence_metrics(sentence: str, aoa: ling.Lexicon, zipf: ling.Lexicon) -> list[float]:
    tokens = ling.tokenize(sentence, freq_lexicon=zipf)
    if not any(t.is_word for t in tokens):
        raise ValueError(f"sentence has no words: {sentence!r}")
    stats = ling.aoa_stats(tokens, aoa)
    if stats is ling.UNCOVERED:
        avg = maxi = aoa.mean_rating
    else:
        avg, maxi, _ = stats
    return [ling.fkgl(tokens), ling.ari(tokens), avg, maxi]


def corpus_readability(sentences: Sequence[str], aoa: ling.Lexicon,
                       zipf: ling.Lexicon) -> CorpusReadability:
    """Unweighted per-sentence means of FKGL, ARI, avg AoA, and max AoA."""
    if not sentences:
        raise ValueError("empty corpus")
    sums = [0.0] * 4
    for s in sentences:
        for i, v in enumerate(sentence_metrics(s, aoa, zipf)):
            sums[i] += v
    n = len(sentences)
    return CorpusReadability(*[v / n for v in sums])


@dataclass
class ComparisonReport:
    original: CorpusReadability
    simplified: CorpusReadability

    @property
    def deltas(self) -> list[float]:
        return [s - o for o, s in zip(self.original.as_row(), self.simplified.as_row())]

    def to_dict(self) -> dict:
        return {
            "metrics": METRIC_NAMES,
            "original": self.original.as_row(),
            "simplified": self.simplified.as_row(),
            "delta": self.deltas,
        }

    def to_text(self) -> str:
        rows = [("", *METRIC_NAMES),
                ("original", *[f"{v:.2f}" for v in self.original.as_row()]),
                ("simplified", *[f"{v:.2f}" for v in self.simplified.as_row()]),
                ("delta", *[f"{v:+.2f}" for v in self.deltas])]
        widths = [max(len(r[c]) for r in rows) for c in range(5)]
        return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)) for r in rows)


def compare_report(pairs: Sequence[SentencePair], aoa: ling.Lexicon,
                   zipf: ling.Lexicon) -> ComparisonReport:
    if not pairs:
        raise ValueError("empty corpus")
    return ComparisonReport(
        original=corpus_readability([p.original for p in pairs], aoa, zipf),
        simplified=corpus_readability([p.simplified for p in pairs], aoa, zipf),
    )


def read_pair_corpus(path) -> list[SentencePair]:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    return [SentencePair(p["original"], p["simplified"]) for p in data]
