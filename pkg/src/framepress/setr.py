"""Stride-anchor grouping: every k-th frame is kept and absorbs the frames between.

Every stride-th frame (positions 0, k, 2k, ...) becomes an anchor; each other
frame donates itself to the anchor with the highest normalized dot-product
similarity (flattened values, no position code). The output is one frame per
anchor: the equal-weight mean of the anchor and its donors, ordered by anchor
position, weighted by group size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from framepress.tensorio import FeatureSequence, Frame

_ASSIGN_CHUNK = 8192


@dataclass(frozen=True)
class SetrConfig:
    """Anchor stride, given directly or as a keep ratio (stride = round(1/ratio))."""

    stride: int | None = None
    keep_ratio: float | None = None

    def __post_init__(self) -> None:
        if (self.stride is None) == (self.keep_ratio is None):
            raise ValueError("provide exactly one of stride or keep_ratio")
        if self.stride is not None and self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.keep_ratio is not None and not 0.0 < self.keep_ratio <= 1.0:
            raise ValueError(f"keep_ratio must be in (0, 1], got {self.keep_ratio}")

    @property
    def resolved_stride(self) -> int:
        if self.stride is not None:
            return self.stride
        return max(1, int(np.floor(1.0 / self.keep_ratio + 0.5)))


@dataclass
class SemanticAssignment:
    """Anchor/donor split plus the donor -> anchor map (positions, not temporal indices)."""

    anchors: tuple[int, ...]
    donors: tuple[int, ...]
    assignment: dict[int, int] = field(default_factory=dict)


def stride_partition(count: int, stride: int) -> SemanticAssignment:
    """Split positions 0..count-1 into ceil(count/stride) anchors and the rest."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    anchors = tuple(range(0, count, stride))
    anchor_set = set(anchors)
    donors = tuple(pos for pos in range(count) if pos not in anchor_set)
    return SemanticAssignment(anchors=anchors, donors=donors)


def assign_semantics(seq: FeatureSequence, partition: SemanticAssignment) -> SemanticAssignment:
    """Map each donor to its most similar anchor; ties go to the lowest anchor position."""
    flat = seq.values_matrix().reshape(len(seq), -1).astype(np.float64)
    norms = np.linalg.norm(flat, axis=1)
    normed = flat / np.where(norms < 1e-12, 1.0, norms)[:, None]
    anchor_mat = normed[list(partition.anchors)]
    assignment: dict[int, int] = {}
    donors = list(partition.donors)
    for start in range(0, len(donors), _ASSIGN_CHUNK):
        chunk = donors[start : start + _ASSIGN_CHUNK]
        sims = normed[chunk] @ anchor_mat.T
        # argmax takes the first maximum, i.e. the lowest anchor position
        winners = np.argmax(sims, axis=1)
        for donor, win in zip(chunk, winners):
            assignment[donor] = partition.anchors[int(win)]
    return SemanticAssignment(anchors=partition.anchors, donors=partition.donors, assignment=assignment)


def _group_members(partition: SemanticAssignment) -> Mapping[int, list[int]]:
    groups: dict[int, list[int]] = {anchor: [anchor] for anchor in partition.anchors}
    for donor, anchor in partition.assignment.items():
        groups[anchor].append(donor)
    for members in groups.values():
        members.sort()  # fixed ascending reduction order
    return groups


def setr_compress_with_assignment(
    seq: FeatureSequence, config: SetrConfig
) -> tuple[FeatureSequence, SemanticAssignment]:
    """setr_compress, also returning the donor assignment it used."""
    stride = config.resolved_stride
    partition = assign_semantics(seq, stride_partition(len(seq), stride))
    flat = seq.values_matrix().reshape(len(seq), -1).astype(np.float64)
    groups = _group_members(partition)
    out_frames = []
    shape = (seq.tokens_per_frame, seq.channels)
    for anchor in partition.anchors:
        members = groups[anchor]
        mean = flat[members].mean(axis=0)
        out_frames.append(
            Frame(
                mean.astype(np.float32).reshape(shape),
                temporal_index=seq.frames[anchor].temporal_index,
                weight=len(members),
            )
        )
    return FeatureSequence(out_frames), partition


def setr_compress(seq: FeatureSequence, config: SetrConfig) -> FeatureSequence:
    """Compress to ceil(len(seq)/stride) frames, one per anchor, in anchor order.

    Group weights sum to len(seq); stride 1 reproduces a raw input exactly.
    """
    compressed, _ = setr_compress_with_assignment(seq, config)
    return compressed
