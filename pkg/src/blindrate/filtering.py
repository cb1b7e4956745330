"""Reliability filtering of received frames and word-matrix assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientFramesError
from .gf2 import BitMatrix


@dataclass(frozen=True)
class FilterParams:
    """Thresholds for symbol reliability (``t1``) and frame suitability (``t2``).

    A symbol is unreliable when ``|r| < t1``; a frame is suitable when it has at
    most ``t2`` unreliable symbols. ``m_s`` is the number of suitable frames
    stacked into the word matrix; ``None`` means "use the code length".
    """

    t1: float
    t2: int
    m_s: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.t1 <= 1.0:
            raise ValueError(f"t1 must lie in [0, 1], got {self.t1}")
        if self.t2 < 0:
            raise ValueError(f"t2 must be non-negative, got {self.t2}")
        if self.m_s is not None and self.m_s < 1:
            raise ValueError(f"m_s must be at least 1, got {self.m_s}")

    def rows_for(self, n):
        return n if self.m_s is None else self.m_s

    def check_length(self, n):
        if self.t2 > n:
            raise ValueError(f"t2={self.t2} exceeds frame length {n}")


@dataclass(frozen=True)
class FilterOutcome:
    word_matrix: BitMatrix
    frames_consumed: int
    unreliable_counts: tuple
    selected_indices: tuple


def unreliable_count(frame, t1):
    """Number of symbols with ``|r| < t1``."""
    return int(np.count_nonzero(np.abs(frame.symbols) < t1))


def build_word_matrix(frames, params, n=None):
    """Stack hard decisions of the first ``m_s`` suitable frames of a stream."""
    m_s = None if n is None else params.rows_for(n)
    rows = []
    counts = []
    selected = []
    consumed = 0
    for index, frame in enumerate(frames):
        if n is None:
            n = len(frame)
            m_s = params.rows_for(n)
            params.check_length(n)
        elif len(frame) != n:
            raise ValueError(f"frame {index} has length {len(frame)}, expected {n}")
        consumed += 1
        j = unreliable_count(frame, params.t1)
        counts.append(j)
        # non-strict: the acceptance probability is P[K <= t2]
        if j <= params.t2:
            rows.append(frame.hard_bits)
            selected.append(index)
            if len(rows) == m_s:
                break
    if m_s is None or len(rows) < m_s:
        raise InsufficientFramesError(len(rows), m_s or 0, consumed)
    return FilterOutcome(
        word_matrix=BitMatrix.from_dense(np.vstack(rows)),
        frames_consumed=consumed,
        unreliable_counts=tuple(counts),
        selected_indices=tuple(selected),
    )
