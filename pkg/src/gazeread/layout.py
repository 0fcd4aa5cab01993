"""Rendered-text geometry: word boxes, sentence spans, fixation-to-word mapping."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from .gaze import Fixation

DEFAULT_SNAP_RADIUS = 25.0  # px


@dataclass(frozen=True)
class WordBox:
    text: str
    x: float  # left
    y: float  # top
    w: float
    h: float
    sentence_index: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"word box must have positive size: {self!r}")
        if not self.text:
            raise ValueError("word box text must be non-empty")


@dataclass(frozen=True)
class SentenceSpan:
    index: int
    text: str
    first_word: int
    last_word: int
    pixel_length: float

    def __post_init__(self):
        if self.first_word > self.last_word:
            raise ValueError("sentence span has no words")
        if self.pixel_length <= 0:
            raise ValueError("pixel_length must be positive")


class LayoutDocument:
    """Immutable geometry of one rendered text."""

    def __init__(self, doc_id: str, sentences: list[SentenceSpan], words: list[WordBox]):
        self.doc_id = doc_id
        self.sentences = list(sentences)
        self.words = list(words)
        self._validate()

    def _validate(self) -> None:
        if not self.sentences or not self.words:
            raise ValueError("layout must contain at least one sentence and one word")
        expected_first = 0
        for i, s in enumerate(self.sentences):
            if s.index != i:
                raise ValueError(f"sentence index {s.index} out of order at position {i}")
            if s.first_word != expected_first:
                raise ValueError(f"sentence {i} word range does not continue the partition")
            for wi in range(s.first_word, s.last_word + 1):
                if wi >= len(self.words):
                    raise ValueError(f"sentence {i} references word {wi} beyond word list")
                if self.words[wi].sentence_index != i:
                    raise ValueError(f"word {wi} claims sentence {self.words[wi].sentence_index}, span says {i}")
            expected_first = s.last_word + 1
        if expected_first != len(self.words):
            raise ValueError("sentence spans do not partition the word list")

    def sentence_texts(self) -> list[str]:
        return [s.text for s in self.sentences]


def box_distance(px: float, py: float, box: WordBox) -> float:
    """Euclidean distance from a point to a box boundary; 0 inside."""
    dx = max(box.x - px, 0.0, px - (box.x + box.w))
    dy = max(box.y - py, 0.0, py - (box.y + box.h))
    return math.hypot(dx, dy)


def map_fixation_to_word(f: Fixation, doc: LayoutDocument, snap_radius: float = DEFAULT_SNAP_RADIUS) -> Optional[int]:
    """Word index under the centroid, or nearest within snap_radius; ties to the lower index."""
    if snap_radius < 0:
        raise ValueError("snap_radius must be >= 0")
    best_idx = None
    best_d = math.inf
    for i, box in enumerate(doc.words):
        d = box_distance(f.cx, f.cy, box)
        if d < best_d:
            best_d = d
            best_idx = i
    if best_idx is None or best_d > snap_radius:
        return None
    return best_idx


def sentence_of_fixation(f: Fixation, doc: LayoutDocument) -> Optional[int]:
    if f.word_index is None:
        return None
    if f.word_index < 0 or f.word_index >= len(doc.words):
        raise ValueError("corrupt layout: word index out of bounds")
    return doc.words[f.word_index].sentence_index


def sentence_pixel_length(s: SentenceSpan, doc: LayoutDocument) -> float:
    if s.index < 0 or s.index >= len(doc.sentences) or doc.sentences[s.index] != s:
        raise ValueError("span does not belong to document")
    return s.pixel_length


def compute_pixel_length(word_boxes: list[WordBox], line_tolerance: float = 1.0) -> float:
    """Sum of per-rendered-line extents (rightmost right edge - leftmost left edge).

    Boxes whose tops differ by no more than line_tolerance share a line.
    """
    if not word_boxes:
        raise ValueError("no word boxes")
    lines: dict[float, list[WordBox]] = {}
    keys: list[float] = []
    for b in word_boxes:
        for k in keys:
            if abs(b.y - k) <= line_tolerance:
                lines[k].append(b)
                break
        else:
            keys.append(b.y)
            lines[b.y] = [b]
    total = 0.0
    for boxes in lines.values():
        left = min(b.x for b in boxes)
        right = max(b.x + b.w for b in boxes)
        total += right - left
    return total


def resolve_fixations(fixations: list[Fixation], doc: LayoutDocument,
                      snap_radius: float = DEFAULT_SNAP_RADIUS) -> list[Fixation]:
    """Attach word indices; fixations mapping to no word are dropped."""
    out = []
    for f in fixations:
        wi = map_fixation_to_word(f, doc, snap_radius)
        if wi is not None:
            out.append(f.with_word(wi))
    return out


# --- layout document file format (JSON) ------------------------------------

def layout_to_dict(doc: LayoutDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "sentences": [
            {"index": s.index, "text": s.text, "first_word": s.first_word,
             "last_word": s.last_word, "pixel_length": s.pixel_length}
            for s in doc.sentences
        ],
        "words": [
            {"text": w.text, "x": w.x, "y": w.y, "w": w.w, "h": w.h,
             "sentence_index": w.sentence_index}
            for w in doc.words
        ],
    }


def layout_from_dict(d: dict) -> LayoutDocument:
    try:
        sentences = [SentenceSpan(s["index"], s["text"], s["first_word"],
                                  s["last_word"], s["pixel_length"])
                     for s in d["sentences"]]
        words = [WordBox(w["text"], w["x"], w["y"], w["w"], w["h"], w["sentence_index"])
                 for w in d["words"]]
        return LayoutDocument(d["doc_id"], sentences, words)
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed layout document: {e}") from e


def write_layout(path, doc: LayoutDocument) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(layout_to_dict(doc), f, indent=2, ensure_ascii=False)


def read_layout(path) -> LayoutDocument:
    with open(path, encoding="utf-8") as f:
        return layout_from_dict(json.load(f))
