"""Bounded-buffer stream compression: greedy pairwise merging under an episode budget.

A bounded buffer of episode frames absorbs the stream window by window. While
the working set (buffer plus window) exceeds the capacity, the two most
cosine-similar frames, compared through similarity descriptors that carry a
scaled sinusoidal position code, are averaged into the lower slot and the higher
slot is dropped. Merging is 64-bit accumulate, 32-bit store. A window that fits
is concatenated without any merging.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from framepress import kernels
from framepress.simkernel import DEFAULT_PE_SCALE
from framepress.tensorio import FeatureSequence, Frame

MERGE_PLAIN = "plain"
MERGE_WEIGHTED = "weighted"
MERGE_MODES = (MERGE_PLAIN, MERGE_WEIGHTED)


@dataclass(frozen=True)
class MergeEvent:
    """One merge: at ingestion count `step`, working-set slot removed_slot was
    averaged into kept_slot; similarity is the 64-bit cosine that won the scan."""

    step: int
    kept_slot: int
    removed_slot: int
    similarity: float

    def __post_init__(self) -> None:
        if not 0 <= self.kept_slot < self.removed_slot:
            raise ValueError(
                f"merge event needs 0 <= kept_slot < removed_slot, got ({self.kept_slot}, {self.removed_slot})"
            )


@dataclass(frozen=True)
class StreamConfig:
    """Streaming-compression settings. Defaults: 10-frame windows into 20 episodes."""

    window_size: int = 10
    capacity: int = 20
    pe_scale: float = DEFAULT_PE_SCALE
    merge_mode: str = MERGE_PLAIN

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ValueError(f"window_size must be >= 1, got {self.window_size}")
        if self.capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {self.capacity}")
        if self.pe_scale < 0:
            raise ValueError(f"pe_scale must be >= 0, got {self.pe_scale}")
        if self.merge_mode not in MERGE_MODES:
            raise ValueError(f"merge_mode must be one of {MERGE_MODES}, got {self.merge_mode!r}")


@dataclass
class EpisodeBuffer:
    """Episode memory between windows; merge_log accumulates across appends."""

    episodes: list[Frame]
    capacity: int
    merge_log: list[MergeEvent] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {self.capacity}")
        if len(self.episodes) > self.capacity:
            raise ValueError(f"buffer holds {len(self.episodes)} episodes, over capacity {self.capacity}")

    @classmethod
    def empty(cls, capacity: int) -> "EpisodeBuffer":
        return cls(episodes=[], capacity=capacity)

    @property
    def ingested(self) -> int:
        """Raw frames absorbed so far; episode weights carry the conservation."""
        return sum(frame.weight for frame in self.episodes)


def merge_frames(a: Frame, b: Frame, merge_mode: str = MERGE_PLAIN) -> Frame:
    """Average two frames: plain mean by default, weight-weighted mean otherwise.

    The result's weight is the sum and its temporal index is the weight-weighted
    mean rounded half up, under both modes.
    """
    if merge_mode not in MERGE_MODES:
        raise ValueError(f"merge_mode must be one of {MERGE_MODES}, got {merge_mode!r}")
    if a.values.shape != b.values.shape:
        raise ValueError(f"cannot merge frames of shapes {a.values.shape} and {b.values.shape}")
    av = a.values.astype(np.float64)
    bv = b.values.astype(np.float64)
    if merge_mode == MERGE_WEIGHTED:
        merged = (a.weight * av + b.weight * bv) / (a.weight + b.weight)
    else:
        merged = (av + bv) / 2.0
    index = int(np.floor(
        (a.weight * a.temporal_index + b.weight * b.temporal_index) / (a.weight + b.weight) + 0.5
    ))
    return Frame(merged.astype(np.float32), temporal_index=index, weight=a.weight + b.weight)


def _pack(frames: Sequence[Frame]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    values = np.stack([frame.values for frame in frames]).reshape(len(frames), -1)
    values = np.ascontiguousarray(values, dtype=np.float32)
    weights = np.array([frame.weight for frame in frames], dtype=np.int64)
    indices = np.array([frame.temporal_index for frame in frames], dtype=np.int64)
    return values, weights, indices


def _unpack(values: np.ndarray, weights: np.ndarray, indices: np.ndarray, shape: tuple[int, int]) -> list[Frame]:
    return [
        Frame(values[pos].reshape(shape), temporal_index=int(indices[pos]), weight=int(weights[pos]))
        for pos in range(values.shape[0])
    ]


def _check_uniform(frames: Sequence[Frame]) -> tuple[int, int]:
    shape = frames[0].values.shape
    for pos, frame in enumerate(frames):
        if frame.values.shape != shape:
            raise ValueError(f"frame {pos} has shape {frame.values.shape}, expected {shape}")
    return shape


def eco_compress(
    frames: Sequence[Frame],
    capacity: int,
    pe_scale: float = DEFAULT_PE_SCALE,
    merge_mode: str = MERGE_PLAIN,
) -> list[Frame]:
    """Greedily merge the working set down to exactly `capacity` frames.

    Already-fitting input is returned unchanged. Output preserves surviving-slot
    order; merged frames may merge again within the same call.
    """
    if not frames:
        raise ValueError("working set must be non-empty")
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    if pe_scale < 0:
        raise ValueError(f"pe_scale must be >= 0, got {pe_scale}")
    if merge_mode not in MERGE_MODES:
        raise ValueError(f"merge_mode must be one of {MERGE_MODES}, got {merge_mode!r}")
    if len(frames) <= capacity:
        return list(frames)
    shape = _check_uniform(frames)
    values, weights, indices = _pack(frames)
    out_v, out_w, out_i, _ = kernels.compress_working_set(
        values, weights, indices, capacity, pe_scale, merge_mode == MERGE_WEIGHTED
    )
    return _unpack(out_v, out_w, out_i, shape)


def buffer_append_or_compress(
    buffer: EpisodeBuffer,
    window: Sequence[Frame],
    pe_scale: float = DEFAULT_PE_SCALE,
    merge_mode: str = MERGE_PLAIN,
) -> EpisodeBuffer:
    """Absorb one window: concatenate when everything fits, otherwise compress to capacity.

    Returns a new buffer; the input buffer is not modified. Every merge is logged
    with step equal to the raw-frame count ingested after this window.
    """
    window = list(window)
    combined = buffer.episodes + window
    if not combined:
        return EpisodeBuffer(episodes=[], capacity=buffer.capacity, merge_log=list(buffer.merge_log))
    shape = _check_uniform(combined)
    if len(combined) <= buffer.capacity:
        return EpisodeBuffer(episodes=combined, capacity=buffer.capacity, merge_log=list(buffer.merge_log))
    step = sum(frame.weight for frame in combined)
    values, weights, indices = _pack(combined)
    out_v, out_w, out_i, raw_events = kernels.compress_working_set(
        values, weights, indices, buffer.capacity, pe_scale, merge_mode == MERGE_WEIGHTED
    )
    log = list(buffer.merge_log)
    log.extend(
        MergeEvent(step=step, kept_slot=kept, removed_slot=removed, similarity=sim)
        for kept, removed, sim in raw_events
    )
    return EpisodeBuffer(episodes=_unpack(out_v, out_w, out_i, shape), capacity=buffer.capacity, merge_log=log)


def stream_compress_with_stats(
    seq: FeatureSequence, config: StreamConfig
) -> tuple[FeatureSequence, list[MergeEvent], int]:
    """stream_compress plus the peak working-set size in frames (always <= capacity + window)."""
    shape = (seq.tokens_per_frame, seq.channels)
    all_values = np.ascontiguousarray(seq.values_matrix().reshape(len(seq), -1), dtype=np.float32)
    all_weights = np.array([frame.weight for frame in seq.frames], dtype=np.int64)
    all_indices = np.array([frame.temporal_index for frame in seq.frames], dtype=np.int64)

    buf_v = all_values[:0]
    buf_w = all_weights[:0]
    buf_i = all_indices[:0]
    log: list[MergeEvent] = []
    ingested = 0
    peak = 0
    for start in range(0, len(seq), config.window_size):
        stop = min(start + config.window_size, len(seq))
        ingested += int(all_weights[start:stop].sum())
        cat_v = np.concatenate([buf_v, all_values[start:stop]])
        cat_w = np.concatenate([buf_w, all_weights[start:stop]])
        cat_i = np.concatenate([buf_i, all_indices[start:stop]])
        peak = max(peak, cat_v.shape[0])
        if cat_v.shape[0] <= config.capacity:
            buf_v, buf_w, buf_i = cat_v, cat_w, cat_i
            continue
        buf_v, buf_w, buf_i, raw_events = kernels.compress_working_set(
            cat_v, cat_w, cat_i, config.capacity, config.pe_scale, config.merge_mode == MERGE_WEIGHTED
        )
        log.extend(
            MergeEvent(step=ingested, kept_slot=kept, removed_slot=removed, similarity=sim)
            for kept, removed, sim in raw_events
        )
    episodes = _unpack(buf_v, buf_w, buf_i, shape)
    return FeatureSequence(episodes), log, peak


def stream_compress(seq: FeatureSequence, config: StreamConfig) -> tuple[FeatureSequence, list[MergeEvent]]:
    """Fold the sequence window by window through the episode buffer.

    Output length is min(len(seq), capacity) once the stream exceeds the
    capacity, and the episode weights always sum to the ingested frame count.
    """
    episodes, log, _ = stream_compress_with_stats(seq, config)
    return episodes, log
