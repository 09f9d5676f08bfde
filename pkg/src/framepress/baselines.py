"""Budgeted reference compressors: keep-style selection and pooling/clustering.

Seeded methods draw from SplitMix64. Its constants, the partial Fisher-Yates
subset draw used by random_keep, and the cumulative-probability inversion used
by the k-means++ seeding are all part of the reproducibility contract: the same
seed must select the same frames in any reimplementation, in any language.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from framepress.tensorio import FeatureSequence, Frame

METHODS = ("fifo", "random", "uniform", "avgpool", "maxpool", "kmeans")
POOL_MODES = ("avg", "max")
DEFAULT_KMEANS_ITERS = 25

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The pinned 64-bit generator behind every seeded baseline."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, bound: int) -> int:
        if bound < 1:
            raise ValueError(f"bound must be >= 1, got {bound}")
        return self.next_u64() % bound


@dataclass(frozen=True)
class BaselineConfig:
    method: str
    budget: int
    seed: int = 0
    kmeans_iters: int = DEFAULT_KMEANS_ITERS

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.kmeans_iters < 1:
            raise ValueError(f"kmeans_iters must be >= 1, got {self.kmeans_iters}")


def fifo_keep(seq: FeatureSequence, budget: int) -> FeatureSequence:
    """Keep the most recent min(len, budget) frames unchanged, in order."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    return FeatureSequence(seq.frames[-min(len(seq), budget):])


def random_keep(seq: FeatureSequence, budget: int, seed: int = 0) -> FeatureSequence:
    """Keep a uniform without-replacement sample, emitted in temporal order.

    Draw: partial Fisher-Yates over positions 0..n-1 using next_below(n - i)
    at step i, take the first min(n, budget), sort ascending.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    count = len(seq)
    take = min(count, budget)
    rng = SplitMix64(seed)
    positions = list(range(count))
    for i in range(take):
        j = i + rng.next_below(count - i)
        positions[i], positions[j] = positions[j], positions[i]
    kept = sorted(positions[:take])
    return FeatureSequence([seq.frames[pos] for pos in kept])


def uniform_keep(seq: FeatureSequence, budget: int) -> FeatureSequence:
    """Keep an even temporal grid: positions round(m*(n-1)/(k-1)), duplicates bumped up."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    count = len(seq)
    take = min(count, budget)
    if take == 1:
        return FeatureSequence([seq.frames[0]])
    positions = []
    for m in range(take):
        # exact integer round-half-up of m*(count-1)/(take-1)
        pos = (2 * m * (count - 1) + (take - 1)) // (2 * (take - 1))
        if positions and pos <= positions[-1]:
            pos = positions[-1] + 1
        positions.append(pos)
    return FeatureSequence([seq.frames[pos] for pos in positions])


def pool_bins(count: int, budget: int) -> list[tuple[int, int]]:
    """(start, size) of each contiguous pooling bin; sizes differ by at most one,
    earlier bins take the remainder."""
    if count < 1 or budget < 1:
        raise ValueError(f"count and budget must be >= 1, got {count} and {budget}")
    bins = min(count, budget)
    base, extra = divmod(count, bins)
    spans = []
    start = 0
    for b in range(bins):
        size = base + (1 if b < extra else 0)
        spans.append((start, size))
        start += size
    return spans


def pool_compress(seq: FeatureSequence, budget: int, mode: str = "avg") -> FeatureSequence:
    """Pool min(len, budget) contiguous bins (sizes differ by at most one, earlier
    bins larger): per-bin mean or elementwise max, weighted by bin size, indexed
    by the bin's first frame."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if mode not in POOL_MODES:
        raise ValueError(f"mode must be one of {POOL_MODES}, got {mode!r}")
    mat = seq.values_matrix()
    out_frames = []
    for start, size in pool_bins(len(seq), budget):
        block = mat[start : start + size]
        if mode == "avg":
            pooled = block.astype(np.float64).mean(axis=0).astype(np.float32)
        else:
            pooled = block.max(axis=0)
        out_frames.append(
            Frame(pooled, temporal_index=seq.frames[start].temporal_index, weight=size)
        )
    return FeatureSequence(out_frames)


def _sq_distances(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    delta = points - center[None, :]
    return np.einsum("ij,ij->i", delta, delta)


def _seed_centers(points: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    """k-means++ with SplitMix64: next center at the first cumulative-d2 bin exceeding r."""
    count = points.shape[0]
    chosen = [rng.next_below(count)]
    d2 = _sq_distances(points, points[chosen[0]])
    while len(chosen) < k:
        total = float(d2.sum())
        if total <= 0.0:
            taken = set(chosen)
            pick = next(pos for pos in range(count) if pos not in taken)
        else:
            r = rng.next_double() * total
            pick = min(int(np.searchsorted(np.cumsum(d2), r, side="right")), count - 1)
        chosen.append(pick)
        d2 = np.minimum(d2, _sq_distances(points, points[pick]))
    return points[chosen].copy()


def kmeans_lloyd(
    points: np.ndarray, k: int, seed: int = 0, iters: int = DEFAULT_KMEANS_ITERS
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd iterations on float64 points; returns (centers, labels, wcss history).

    Assignment breaks ties toward the lowest cluster, stops early once labels are
    stable, and re-seeds any emptied cluster from the point farthest out.
    """
    count = points.shape[0]
    centers = _seed_centers(points, k, SplitMix64(seed))
    labels = None
    history: list[float] = []
    for _ in range(iters):
        d2 = np.stack([_sq_distances(points, centers[c]) for c in range(k)], axis=1)
        new_labels = np.argmin(d2, axis=1)
        nearest = d2[np.arange(count), new_labels]
        history.append(float(np.maximum(nearest, 0.0).sum()))
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        claimable = nearest.copy()
        for c in range(k):
            if counts[c] == 0:
                farthest = int(np.argmax(claimable))
                centers[c] = points[farthest]
                claimable[farthest] = -1.0
            else:
                centers[c] = points[labels == c].mean(axis=0)
    assert labels is not None
    # duplicate-heavy inputs can stabilize with empty clusters; repopulate each
    # from the farthest point of any multi-member cluster so k holds whenever
    # count >= k, then restate every center as its members' mean
    counts = np.bincount(labels, minlength=k)
    if (counts == 0).any():
        d2 = np.stack([_sq_distances(points, centers[c]) for c in range(k)], axis=1)
        nearest = d2[np.arange(count), labels]
        for c in range(k):
            if counts[c] > 0:
                continue
            movable = np.where(counts[labels] > 1, nearest, -1.0)
            farthest = int(np.argmax(movable))
            counts[labels[farthest]] -= 1
            labels[farthest] = c
            counts[c] = 1
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
    return centers, labels, history


def kmeans_compress_with_members(
    seq: FeatureSequence, budget: int, seed: int = 0, iters: int = DEFAULT_KMEANS_ITERS
) -> tuple[FeatureSequence, list[list[int]]]:
    """kmeans_compress, also returning each output's member positions."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if len(seq) < budget:
        raise ValueError(f"kmeans needs at least budget frames, got {len(seq)} < {budget}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    flat = seq.values_matrix().reshape(len(seq), -1).astype(np.float64)
    _, labels, _ = kmeans_lloyd(flat, budget, seed=seed, iters=iters)
    shape = (seq.tokens_per_frame, seq.channels)
    clusters = []
    for c in range(budget):
        members = np.flatnonzero(labels == c)
        if members.size == 0:
            continue
        clusters.append((int(members[0]), members))
    clusters.sort(key=lambda item: item[0])
    out_frames = []
    groups = []
    for earliest, members in clusters:
        mean = flat[members].mean(axis=0)
        out_frames.append(
            Frame(
                mean.astype(np.float32).reshape(shape),
                temporal_index=seq.frames[earliest].temporal_index,
                weight=int(members.size),
            )
        )
        groups.append([int(pos) for pos in members])
    return FeatureSequence(out_frames), groups


def kmeans_compress(
    seq: FeatureSequence, budget: int, seed: int = 0, iters: int = DEFAULT_KMEANS_ITERS
) -> FeatureSequence:
    """Cluster flattened frames into `budget` groups; outputs are the member means,
    ordered by each cluster's earliest frame, weighted by member count."""
    compressed, _ = kmeans_compress_with_members(seq, budget, seed=seed, iters=iters)
    return compressed


def run_baseline(seq: FeatureSequence, config: BaselineConfig) -> FeatureSequence:
    """Dispatch a BaselineConfig to the matching method."""
    if config.method == "fifo":
        return fifo_keep(seq, config.budget)
    if config.method == "random":
        return random_keep(seq, config.budget, seed=config.seed)
    if config.method == "uniform":
        return uniform_keep(seq, config.budget)
    if config.method == "avgpool":
        return pool_compress(seq, config.budget, mode="avg")
    if config.method == "maxpool":
        return pool_compress(seq, config.budget, mode="max")
    return kmeans_compress(seq, config.budget, seed=config.seed, iters=config.kmeans_iters)
