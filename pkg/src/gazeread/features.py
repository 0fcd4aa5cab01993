"""Per-sentence feature vectors: five gaze features plus eleven linguistic ones."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linguistics as ling
from .gaze import Fixation
from .layout import LayoutDocument, SentenceSpan, sentence_pixel_length

FEATURE_NAMES = [
    "f1_max_fix_dur", "f2_total_fix_dur", "f3_fix_count", "f4_regressive_fix_count",
    "f5_count_per_word", "f6_words", "f7_stopwords", "f8_chars", "f9_content_words",
    "f10_pixel_len", "f11_named_entities", "f12_ne_per_word", "f13_ari", "f14_fkgl",
    "f15_avg_aoa", "f16_avg_zipf",
]
N_FEATURES = len(FEATURE_NAMES)
CSV_FEATURE_COLUMNS = [f"f{i}" for i in range(1, 17)]


@dataclass(frozen=True)
class LabeledSentence:
    sentence_index: int
    vector: np.ndarray  # shape (16,)
    understood: bool  # true = not marked


def gaze_features(fixations: Sequence[Fixation], word_count: int,
                  regressive_count: Optional[int] = None) -> np.ndarray:
    """Features 1-5 for one sentence's attributed fixations.

    regressive_count is computed against the full temporal stream by
    build_matrix; when omitted it is derived from this sentence's fixations
    alone (previous fixation = previous within the given sequence).
    """
    if word_count < 1:
        raise ValueError("word_count must be >= 1")
    durations = [f.duration for f in fixations]
    if regressive_count is None:
        regressive_count = sum(
            1 for i in range(1, len(fixations))
            if fixations[i].word_index is not None
            and fixations[i - 1].word_index is not None
            and fixations[i].word_index < fixations[i - 1].word_index
        )
    f1 = max(durations) if durations else 0.0
    f2 = sum(durations)
    f3 = len(fixations)
    return np.array([f1, f2, f3, regressive_count, f3 / word_count], dtype=float)


def linguistic_features(span: SentenceSpan, doc: LayoutDocument,
                        aoa: ling.Lexicon, zipf: ling.Lexicon) -> np.ndarray:
    """Features 6-16 for one sentence."""
    tokens = ling.tokenize(span.text, freq_lexicon=zipf)
    words = [t for t in tokens if t.is_word]
    if not words:
        raise ValueError(f"sentence {span.index} has no word tokens")
    n_words = len(words)
    n_stop = sum(1 for t in words if t.is_stopword)
    n_chars = ling.char_count(tokens)
    n_content = sum(1 for t in words if t.is_content)
    pixel_len = sentence_pixel_length(span, doc)
    n_entities = ling.named_entity_count(tokens)
    aoa_res = ling.aoa_stats(tokens, aoa)
    avg_aoa = aoa_res[0] if aoa_res is not ling.UNCOVERED else aoa.mean_rating
    z = ling.zipf_avg(tokens, zipf)
    avg_zipf = z if z is not ling.UNCOVERED else zipf.mean_rating
    return np.array([
        n_words, n_stop, n_chars, n_content, pixel_len,
        n_entities, n_entities / n_words,
        ling.ari(tokens), ling.fkgl(tokens), avg_aoa, avg_zipf,
    ], dtype=float)


def regressive_counts(fixations: Sequence[Fixation], doc: LayoutDocument) -> list[int]:
    """Per-sentence regression counts over the full temporal stream.

    A fixation regresses when its word index is strictly below the previous
    fixation's; the regression is credited to the landing sentence.
    """
    counts = [0] * len(doc.sentences)
    prev_word = None
    for f in fixations:
        if f.word_index is None:
            continue
        if prev_word is not None and f.word_index < prev_word:
            counts[doc.words[f.word_index].sentence_index] += 1
        prev_word = f.word_index
    return counts


def build_matrix(doc: LayoutDocument, fixations: Sequence[Fixation],
                 aoa: ling.Lexicon, zipf: ling.Lexicon) -> np.ndarray:
    """S x 16 feature matrix, one row per sentence in document order.

    Fixations must already be resolved against doc; unresolved ones are ignored.
    """
    if not doc.sentences:
        raise ValueError("empty document")
    resolved = [f for f in fixations if f.word_index is not None]
    per_sentence: list[list[Fixation]] = [[] for _ in doc.sentences]
    for f in resolved:
        per_sentence[doc.words[f.word_index].sentence_index].append(f)
    regr = regressive_counts(resolved, doc)

    rows = []
    for span in doc.sentences:
        tokens = ling.tokenize(span.text, freq_lexicon=zipf)
        n_words = sum(1 for t in tokens if t.is_word)
        g = gaze_features(per_sentence[span.index], max(n_words, 1), regressive_count=regr[span.index])
        l = linguistic_features(span, doc, aoa, zipf)
        rows.append(np.concatenate([g, l]))
    return np.vstack(rows)


# --- feature matrix CSV: sentence_index,f1..f16[,label] ---------------------

def write_matrix_csv(path, matrix: np.ndarray, labels: Optional[Sequence[bool]] = None) -> None:
    header = ["sentence_index"] + CSV_FEATURE_COLUMNS + (["label"] if labels is not None else [])
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(header)
        for i, row in enumerate(matrix):
            out = [i] + [repr(float(v)) for v in row]
            if labels is not None:
                out.append(int(labels[i]))
            w.writerow(out)


def read_matrix_csv(path) -> tuple[np.ndarray, Optional[np.ndarray]]:
    with open(path, newline="", encoding="utf-8") as f:
        r = csv.reader(f)
        header = next(r)
        has_label = header[-1] == "label"
        expected = ["sentence_index"] + CSV_FEATURE_COLUMNS + (["label"] if has_label else [])
        if header != expected:
            raise ValueError(f"bad feature matrix header: {header}")
        rows, labels = [], []
        for row in r:
            if not row:
                continue
            rows.append([float(v) for v in row[1:17]])
            if has_label:
                labels.append(bool(int(row[17])))
    matrix = np.array(rows, dtype=float)
    return matrix, (np.array(labels) if has_label else None)
