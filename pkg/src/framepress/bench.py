"""Throughput measurement for the streaming compressor.

Timing protocol: one discarded warm-up run, then the median of five timed runs
(wall clock). Inputs are seeded Gaussian frames so sweeps are reproducible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from statistics import median

import numpy as np

from framepress import kernels
from framepress.eco import StreamConfig, stream_compress_with_stats
from framepress.tensorio import FeatureSequence

DEFAULT_REPEATS = 5


@dataclass(frozen=True)
class BenchResult:
    frames: int
    median_ms: float
    frames_per_s: float
    peak_buffer_frames: int
    backend: str


def random_stream(count: int, tokens: int, channels: int, seed: int = 0) -> FeatureSequence:
    rng = np.random.default_rng((seed, count))
    mat = rng.standard_normal((count, tokens, channels)).astype(np.float32)
    return FeatureSequence.from_matrix(mat)


def time_stream_compress(
    seq: FeatureSequence, config: StreamConfig, repeats: int = DEFAULT_REPEATS
) -> tuple[float, int]:
    """Median wall-clock milliseconds over `repeats` runs, after one warm-up run."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    _, _, peak = stream_compress_with_stats(seq, config)
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        stream_compress_with_stats(seq, config)
        samples.append((time.perf_counter() - start) * 1e3)
    return median(samples), peak


def run_size_sweep(
    sizes: list[int],
    config: StreamConfig,
    tokens: int = 1,
    channels: int = 16,
    seed: int = 0,
    repeats: int = DEFAULT_REPEATS,
) -> list[BenchResult]:
    results = []
    for count in sizes:
        seq = random_stream(count, tokens, channels, seed=seed)
        median_ms, peak = time_stream_compress(seq, config, repeats=repeats)
        results.append(
            BenchResult(
                frames=count,
                median_ms=median_ms,
                frames_per_s=count / (median_ms / 1e3),
                peak_buffer_frames=peak,
                backend=kernels.active_backend(),
            )
        )
    return results


def parse_sizes(text: str) -> list[int]:
    """Parse a size list like "1k,10k,100k"; bare integers and m suffixes work too."""
    sizes = []
    for token in text.split(","):
        token = token.strip().lower()
        if not token:
            continue
        factor = 1
        if token.endswith("k"):
            factor, token = 1000, token[:-1]
        elif token.endswith("m"):
            factor, token = 1000000, token[:-1]
        try:
            value = int(token) * factor
        except ValueError as exc:
            raise ValueError(f"bad size token {token!r} in sizes list") from exc
        if value < 1:
            raise ValueError(f"sizes must be >= 1, got {value}")
        sizes.append(value)
    if not sizes:
        raise ValueError("sizes list is empty")
    return sizes
