"""Brute-force single-window compressor and merge-log replay checks.

oracle_eco is the independent reference for the streaming kernel: it treats the
whole sequence as one window and recomputes every descriptor and the full
similarity matrix from the surviving frames at every iteration, carrying no
state between iterations. The optimized path must match it event for event.
"""

from __future__ import annotations

import numpy as np

from framepress import simkernel
from framepress.eco import MergeEvent, StreamConfig, merge_frames
from framepress.tensorio import FeatureSequence, Frame

ORACLE_MAX_FRAMES = 512


def oracle_eco(seq: FeatureSequence, config: StreamConfig) -> tuple[FeatureSequence, list[MergeEvent]]:
    """Compress the whole sequence in one window by naive full recomputation.

    Guarded to 512 frames; the per-iteration rebuild is quadratic and meant for
    verification, not production. Equivalent to stream_compress with
    window_size == len(seq); config.window_size is ignored.
    """
    if len(seq) > ORACLE_MAX_FRAMES:
        raise ValueError(f"oracle accepts at most {ORACLE_MAX_FRAMES} frames, got {len(seq)}")
    frames = list(seq.frames)
    step = sum(frame.weight for frame in frames)
    log: list[MergeEvent] = []
    while len(frames) > config.capacity:
        descriptors = np.stack(
            [
                simkernel.similarity_descriptor(frame.values, frame.temporal_index, config.pe_scale)
                for frame in frames
            ]
        )
        sims = simkernel.pairwise_cosine(descriptors)
        count = len(frames)
        masked = np.where(np.triu(np.ones((count, count), dtype=bool), k=1), sims, -np.inf)
        kept, removed = divmod(int(np.argmax(masked)), count)
        log.append(
            MergeEvent(step=step, kept_slot=kept, removed_slot=removed, similarity=float(sims[kept, removed]))
        )
        frames[kept] = merge_frames(frames[kept], frames[removed], config.merge_mode)
        del frames[removed]
    return FeatureSequence(frames), log


class _Replay:
    """Walk a merge log against the windowed schedule that produced it."""

    def __init__(self, seq: FeatureSequence, config: StreamConfig):
        self.config = config
        self.windows = [
            seq.frames[start : start + config.window_size]
            for start in range(0, len(seq), config.window_size)
        ]

    def run(self, log: list[MergeEvent], on_merge) -> None:
        buffer: list[Frame] = []
        cursor = 0
        ingested = 0
        for window in self.windows:
            buffer = buffer + list(window)
            ingested += sum(frame.weight for frame in window)
            while len(buffer) > self.config.capacity:
                if cursor >= len(log):
                    raise ValueError("merge log ended before the buffer fit its capacity")
                event = log[cursor]
                if event.step != ingested:
                    raise ValueError(f"merge event step {event.step} does not match ingestion count {ingested}")
                if event.removed_slot >= len(buffer):
                    raise ValueError(f"merge event slot {event.removed_slot} outside working set of {len(buffer)}")
                on_merge(buffer, event)
                buffer[event.kept_slot] = merge_frames(
                    buffer[event.kept_slot], buffer[event.removed_slot], self.config.merge_mode
                )
                del buffer[event.removed_slot]
                cursor += 1
        if cursor != len(log):
            raise ValueError(f"merge log has {len(log) - cursor} unconsumed events")


def verify_greedy_log(
    seq: FeatureSequence, config: StreamConfig, log: list[MergeEvent], tol: float = 1e-9
) -> None:
    """Replay a stream_compress merge log, asserting every logged pair attains the
    maximum working-set similarity at its step. Raises ValueError on violation."""

    def check(buffer: list[Frame], event: MergeEvent) -> None:
        descriptors = np.stack(
            [
                simkernel.similarity_descriptor(frame.values, frame.temporal_index, config.pe_scale)
                for frame in buffer
            ]
        )
        sims = simkernel.pairwise_cosine(descriptors)
        count = len(buffer)
        upper = np.triu(np.ones((count, count), dtype=bool), k=1)
        best = float(np.where(upper, sims, -np.inf).max())
        recorded = float(sims[event.kept_slot, event.removed_slot])
        if recorded < best - tol:
            raise ValueError(
                f"logged pair ({event.kept_slot}, {event.removed_slot}) at {recorded} "
                f"is not maximal (best {best})"
            )
        if abs(recorded - event.similarity) > tol:
            raise ValueError(
                f"logged similarity {event.similarity} differs from replayed {recorded}"
            )

    _Replay(seq, config).run(log, check)


def replay_merge_distances(seq: FeatureSequence, config: StreamConfig, log: list[MergeEvent]) -> list[float]:
    """Temporal-index distance |kept - removed| of every merged pair, at merge time."""
    distances: list[float] = []

    def record(buffer: list[Frame], event: MergeEvent) -> None:
        distances.append(
            float(abs(buffer[event.kept_slot].temporal_index - buffer[event.removed_slot].temporal_index))
        )

    _Replay(seq, config).run(log, record)
    return distances


def replay_merge_sources(seq: FeatureSequence, config: StreamConfig, log: list[MergeEvent]) -> list[list[int]]:
    """Input positions absorbed into each output episode, recovered from the log."""
    sources: list[set[int]] = []
    cursor = 0
    ingested = 0
    for start in range(0, len(seq), config.window_size):
        stop = min(start + config.window_size, len(seq))
        sources.extend({pos} for pos in range(start, stop))
        ingested += sum(frame.weight for frame in seq.frames[start:stop])
        while len(sources) > config.capacity:
            if cursor >= len(log):
                raise ValueError("merge log ended before the buffer fit its capacity")
            event = log[cursor]
            if event.step != ingested or event.removed_slot >= len(sources):
                raise ValueError(f"merge event {event} inconsistent with the window schedule")
            sources[event.kept_slot] |= sources[event.removed_slot]
            del sources[event.removed_slot]
            cursor += 1
    if cursor != len(log):
        raise ValueError(f"merge log has {len(log) - cursor} unconsumed events")
    return [sorted(group) for group in sources]
