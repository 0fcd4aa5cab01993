"""Shared builders for synthetic layouts, gaze streams, and user corpora."""

from __future__ import annotations

import numpy as np

from gazeread.gaze import GazeSample
from gazeread.layout import LayoutDocument, SentenceSpan, WordBox, compute_pixel_length

CHAR_W = 9.0
WORD_H = 20.0
GAP = 6.0
LINE_H = 32.0
PAGE_W = 1400.0

SAMPLE_PERIOD = 1000.0 / 60.0  # ms


def make_layout(doc_id: str, sentences: list[str], page_width: float = PAGE_W) -> LayoutDocument:
    """Monospace-ish layout: words flow left to right, wrapping at page_width."""
    words: list[WordBox] = []
    spans: list[SentenceSpan] = []
    x, y = 10.0, 10.0
    for si, text in enumerate(sentences):
        first = len(words)
        for token in text.split():
            w = max(len(token) * CHAR_W, CHAR_W)
            if x + w > page_width:
                x, y = 10.0, y + LINE_H
            words.append(WordBox(token, x, y, w, WORD_H, si))
            x += w + GAP
        member = words[first:]
        spans.append(SentenceSpan(si, text, first, len(words) - 1,
                                  compute_pixel_length(member)))
    return LayoutDocument(doc_id, spans, words)


def word_center(doc: LayoutDocument, word_index: int) -> tuple[float, float]:
    b = doc.words[word_index]
    return b.x + b.w / 2, b.y + b.h / 2


def dwell_stream(doc: LayoutDocument, visits: list[tuple[int, float]],
                 start_ms: float = 0.0, jitter: float = 0.0,
                 seed: int = 0) -> list[GazeSample]:
    """60 Hz samples dwelling on each (word_index, duration_ms) in turn.

    Consecutive dwells are joined by a single fast transition sample so the
    velocity rule separates them.
    """
    rng = np.random.default_rng(seed)
    samples: list[GazeSample] = []
    t = start_ms
    for word_index, duration in visits:
        cx, cy = word_center(doc, word_index)
        n = max(int(round(duration / SAMPLE_PERIOD)) + 1, 2)
        for _ in range(n):
            dx = rng.normal(0, jitter) if jitter else 0.0
            dy = rng.normal(0, jitter) if jitter else 0.0
            samples.append(GazeSample(t, cx + dx, cy + dy, True))
            t += SAMPLE_PERIOD
    return samples


def sbs_noise_dataset(seed: int, n: int = 120):
    """Informative/noise dataset for backward-selection checks.

    Two binary predictors carry the label with fixed per-class flip rates
    (13% and 25%); the last column is pure i.i.d. Gaussian noise that a
    deep ensemble will overfit, so dropping it should raise the CV score.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5B5]))
    y = np.arange(n) % 2 == 0

    def flipped(rate):
        x = y.copy()
        for cls in (True, False):
            idx = np.nonzero(y == cls)[0]
            pick = rng.choice(idx, int(round(rate * len(idx))), replace=False)
            x[pick] = ~x[pick]
        return x.astype(float)

    X = np.column_stack([flipped(0.13), flipped(0.25), rng.normal(0, 1, n)])
    return X, y


def synth_user_corpus(seed: int, n_sentences: int = 270, marked_rate: float = 0.28):
    """Feature-level corpus for one synthetic reader.

    Marked (not-understood) sentences get elevated fixation counts, durations,
    and regression rates; effect sizes are fixed so the classes are separable
    with a comfortable margin.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xACC]))
    s = n_sentences
    words = rng.integers(5, 26, s).astype(float)
    stop = rng.binomial(words.astype(int), 0.45).astype(float)
    chars = np.rint(words * rng.normal(4.7, 0.4, s)).clip(3, None)
    content = words - stop
    pixel = chars * 9.5 + (words - 1) * 4.0
    ents = rng.poisson(0.25, s).astype(float)
    ari = rng.normal(11, 3, s)
    fkgl = 0.8 * ari + rng.normal(0, 1.5, s)
    aoa = 5 + 0.12 * (fkgl - 10) + rng.normal(0, 0.7, s)
    zipf = 4.5 - 0.08 * (aoa - 5) + rng.normal(0, 0.4, s)

    marked = rng.random(s) < marked_rate
    fix_rate = np.where(marked, 1.9, 1.1)  # fixations per word
    dur_mean = np.where(marked, 250.0, 190.0)  # ms per fixation
    regr_p = np.where(marked, 0.16, 0.05)

    f3 = rng.poisson(fix_rate * words).astype(float)
    mean_dur = rng.normal(dur_mean, 25, s)
    f2 = np.where(f3 > 0, f3 * mean_dur, 0.0).clip(0, None)
    f1 = np.where(f3 > 0, mean_dur * (1.4 + 0.5 * rng.random(s)), 0.0)
    f4 = rng.binomial(f3.astype(int), regr_p).astype(float)
    f5 = f3 / words
    X = np.column_stack([f1, f2, f3, f4, f5, words, stop, chars, content,
                         pixel, ents, ents / words, ari, fkgl, aoa, zipf])
    y = ~marked  # label true = understood
    return X, y
