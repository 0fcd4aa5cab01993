"""Velocity-threshold (I-VT) fixation detection over raw gaze sample streams."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class GazeSample:
    timestamp: float  # milliseconds, monotone non-decreasing within a stream
    x: float
    y: float
    valid: bool = True


@dataclass(frozen=True)
class IvtParams:
    velocity_threshold: float = 0.7  # px/ms
    min_fixation_duration: float = 60.0  # ms
    max_gap: float = 50.0  # ms of invalid samples bridged inside one fixation

    def __post_init__(self):
        if self.velocity_threshold <= 0:
            raise ValueError("velocity_threshold must be positive")
        if self.min_fixation_duration <= 0:
            raise ValueError("min_fixation_duration must be positive")
        if self.max_gap <= 0:
            raise ValueError("max_gap must be positive")


@dataclass(frozen=True)
class Fixation:
    start: float  # ms
    end: float  # ms
    cx: float  # px, centroid of member samples
    cy: float  # px
    word_index: Optional[int] = None  # resolved later against a layout

    @property
    def duration(self) -> float:
        return self.end - self.start

    def with_word(self, word_index: Optional[int]) -> "Fixation":
        return replace(self, word_index=word_index)


def point_velocity(a: GazeSample, b: GazeSample) -> float:
    """Euclidean px/ms velocity between two valid samples."""
    dt = b.timestamp - a.timestamp
    if dt <= 0:
        raise ValueError("non-increasing timestamps")
    return math.hypot(b.x - a.x, b.y - a.y) / dt


def detect_fixations(samples: Sequence[GazeSample], params: IvtParams) -> list[Fixation]:
    """Partition a time-ordered sample stream into fixations.

    Maximal runs of valid samples whose successive point velocities all fall
    below the threshold become candidates; invalid gaps no longer than
    max_gap do not split a run; candidates shorter than the minimum duration
    are dropped.
    """
    _check_monotone(samples)

    fixations: list[Fixation] = []
    run: list[GazeSample] = []

    def flush():
        if run:
            fix = _finish_run(run, params)
            if fix is not None:
                fixations.append(fix)
            run.clear()

    for s in samples:
        if not s.valid:
            continue
        if not run:
            run.append(s)
            continue
        prev = run[-1]
        gap = s.timestamp - prev.timestamp
        if gap > params.max_gap:
            # invalid/missing stretch too long to bridge
            flush()
            run.append(s)
            continue
        if gap <= 0:
            # duplicate timestamp: treat as part of the run, no velocity test possible
            run.append(s)
            continue
        if point_velocity(prev, s) < params.velocity_threshold:
            run.append(s)
        else:
            flush()
            run.append(s)
    flush()
    return fixations


def _finish_run(run: list[GazeSample], params: IvtParams) -> Optional[Fixation]:
    start = run[0].timestamp
    end = run[-1].timestamp
    if end - start < params.min_fixation_duration:
        return None
    cx = sum(s.x for s in run) / len(run)
    cy = sum(s.y for s in run) / len(run)
    return Fixation(start=start, end=end, cx=cx, cy=cy)


def _check_monotone(samples: Sequence[GazeSample]) -> None:
    for i in range(1, len(samples)):
        if samples[i].timestamp < samples[i - 1].timestamp:
            raise ValueError("non-increasing timestamps")


# --- gaze log file format: timestamp_ms,x_px,y_px,valid -------------------

GAZE_LOG_HEADER = ["timestamp_ms", "x_px", "y_px", "valid"]


def write_gaze_log(path, samples: Iterable[GazeSample]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(GAZE_LOG_HEADER)
        for s in samples:
            w.writerow([repr(float(s.timestamp)), repr(float(s.x)), repr(float(s.y)), int(s.valid)])


def read_gaze_log(path) -> list[GazeSample]:
    with open(path, newline="", encoding="utf-8") as f:
        r = csv.reader(f)
        header = next(r, None)
        if header is None or [h.strip() for h in header] != GAZE_LOG_HEADER:
            raise ValueError(f"bad gaze log header: {header}")
        samples = []
        for row in r:
            if not row:
                continue
            t, x, y, valid = row
            samples.append(GazeSample(float(t), float(x), float(y), valid.strip() in ("1", "true", "True")))
    _check_monotone(samples)
    return samples
