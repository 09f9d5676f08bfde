"""Evaluation metrics and run comparison for compressed streams."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from framepress.tensorio import FeatureSequence

REL_TOL_DEFAULT = 1e-5
ABS_FLOOR = 1e-7
_COSINE_EPS = 1e-12


def fidelity(original: FeatureSequence, compressed: FeatureSequence) -> float:
    """Mean over original frames of the best cosine match among compressed frames.

    Computed on flattened normalized values, without any position code. 1.0 (up
    to the epsilon guard) means every original frame is represented exactly.
    """
    if (original.tokens_per_frame, original.channels) != (compressed.tokens_per_frame, compressed.channels):
        raise ValueError("fidelity needs matching (tokens, channels) shapes")
    orig = original.values_matrix().reshape(len(original), -1).astype(np.float64)
    comp = compressed.values_matrix().reshape(len(compressed), -1).astype(np.float64)
    sims = (orig @ comp.T) / (
        np.outer(np.linalg.norm(orig, axis=1), np.linalg.norm(comp, axis=1)) + _COSINE_EPS
    )
    return float(sims.max(axis=1).mean())


def temporal_coverage(merge_sources: Sequence[Sequence[int]], input_count: int) -> float:
    """Fraction of input positions contributing to at least one output frame."""
    if input_count < 1:
        raise ValueError(f"input_count must be >= 1, got {input_count}")
    covered: set[int] = set()
    for sources in merge_sources:
        for pos in sources:
            if not 0 <= pos < input_count:
                raise ValueError(f"source position {pos} outside 0..{input_count - 1}")
            covered.add(pos)
    return len(covered) / input_count


@dataclass(frozen=True)
class Divergence:
    """First coordinate where two runs disagree beyond tolerance."""

    frame: int
    token: int
    channel: int
    value_a: float
    value_b: float


def compare_runs(
    a: FeatureSequence, b: FeatureSequence, rel_tol: float = REL_TOL_DEFAULT
) -> tuple[bool, Divergence | None]:
    """Elementwise comparison at |x - y| <= max(1e-7, rel_tol * max(|x|, |y|)).

    Sequences must already have equal lengths and shapes; returns the first
    divergent coordinate in frame-major order when they differ.
    """
    if len(a) != len(b):
        raise ValueError(f"compare_runs needs equal lengths, got {len(a)} and {len(b)}")
    if (a.tokens_per_frame, a.channels) != (b.tokens_per_frame, b.channels):
        raise ValueError("compare_runs needs matching (tokens, channels) shapes")
    mat_a = a.values_matrix().astype(np.float64)
    mat_b = b.values_matrix().astype(np.float64)
    bound = np.maximum(ABS_FLOOR, rel_tol * np.maximum(np.abs(mat_a), np.abs(mat_b)))
    bad = np.abs(mat_a - mat_b) > bound
    if not bad.any():
        return True, None
    frame, token, channel = np.unravel_index(int(np.argmax(bad)), bad.shape)
    return False, Divergence(
        frame=int(frame),
        token=int(token),
        channel=int(channel),
        value_a=float(mat_a[frame, token, channel]),
        value_b=float(mat_b[frame, token, channel]),
    )
