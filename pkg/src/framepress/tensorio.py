"""Frame-sequence types, the FSEQ1 binary container, synthetic streams, and report files.

FSEQ1 layout (all integers little-endian):

    bytes 0..5    magic b"FSEQ1\\x00"
    bytes 6..9    u32 frame count N
    bytes 10..13  u32 tokens per frame T
    bytes 14..17  u32 channels per token C
    bytes 18..    N * T * C IEEE-754 binary32 values, frame-major then token-major

Raw files carry no weights or temporal indices; on read they default to weight 1
and indices 0..N-1. Writing is value-lossless and byte-deterministic.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence

import numpy as np

from framepress._version import __version__

MAGIC = b"FSEQ1\x00"
_HEADER = struct.Struct("<6sIII")


class FseqFormatError(ValueError):
    """A feature file is malformed: bad magic, truncation, or non-finite payload."""


@dataclass(frozen=True, eq=False)
class Frame:
    """One feature frame: a read-only (tokens, channels) float32 grid plus provenance.

    weight counts how many raw frames were merged into this one; temporal_index is
    the frame's position in the original stream (a rounded weighted mean after merges).
    """

    values: np.ndarray
    temporal_index: int = 0
    weight: int = 1

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 2:
            raise ValueError(f"frame values must be 2-D (tokens, channels), got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"frame values must be non-empty, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("frame values must be finite")
        if not np.issubdtype(type(self.temporal_index), np.integer) and not isinstance(self.temporal_index, int):
            raise ValueError(f"temporal_index must be an integer, got {type(self.temporal_index).__name__}")
        if self.temporal_index < 0:
            raise ValueError(f"temporal_index must be >= 0, got {self.temporal_index}")
        if self.weight < 1:
            raise ValueError(f"weight must be >= 1, got {self.weight}")
        values = values.view()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "temporal_index", int(self.temporal_index))
        object.__setattr__(self, "weight", int(self.weight))

    @property
    def tokens(self) -> int:
        return int(self.values.shape[0])

    @property
    def channels(self) -> int:
        return int(self.values.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.temporal_index == other.temporal_index
            and self.weight == other.weight
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values)
        )


class FeatureSequence:
    """An ordered, shape-uniform list of frames.

    Raw and generated streams have strictly increasing temporal indices; compressor
    outputs keep surviving-slot order instead, so monotonicity is not enforced here.
    """

    def __init__(self, frames: Sequence[Frame]):
        frames = list(frames)
        if not frames:
            raise ValueError("a feature sequence needs at least one frame")
        shape = frames[0].values.shape
        for pos, frame in enumerate(frames):
            if frame.values.shape != shape:
                raise ValueError(
                    f"frame {pos} has shape {frame.values.shape}, expected {shape} (uniform shapes required)"
                )
        self.frames: list[Frame] = frames

    @property
    def tokens_per_frame(self) -> int:
        return self.frames[0].tokens

    @property
    def channels(self) -> int:
        return self.frames[0].channels

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[Frame]:
        return iter(self.frames)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureSequence):
            return NotImplemented
        return len(self.frames) == len(other.frames) and all(
            a == b for a, b in zip(self.frames, other.frames)
        )

    def values_matrix(self) -> np.ndarray:
        """All frame values stacked into a (N, tokens, channels) float32 array."""
        return np.stack([frame.values for frame in self.frames]).astype(np.float32, copy=False)

    @classmethod
    def from_matrix(
        cls,
        values: np.ndarray,
        indices: Sequence[int] | None = None,
        weights: Sequence[int] | None = None,
    ) -> "FeatureSequence":
        """Build a sequence from a (N, tokens, channels) array; defaults: indices 0..N-1, weight 1."""
        mat = np.ascontiguousarray(values, dtype=np.float32)
        if mat.ndim != 3:
            raise ValueError(f"expected a (N, tokens, channels) array, got shape {mat.shape}")
        count = mat.shape[0]
        if indices is None:
            indices = range(count)
        if weights is None:
            weights = [1] * count
        mat.setflags(write=False)
        frames = [
            Frame(mat[pos], temporal_index=int(idx), weight=int(wgt))
            for pos, (idx, wgt) in enumerate(zip(indices, weights))
        ]
        if len(frames) != count:
            raise ValueError("indices/weights length does not match frame count")
        return cls(frames)


def read_feature_file(path: str | Path) -> FeatureSequence:
    """Parse an FSEQ1 file. Raises FseqFormatError with path context on malformed input."""
    p = Path(path)
    blob = p.read_bytes()
    if len(blob) < _HEADER.size:
        raise FseqFormatError(f"{p}: truncated header ({len(blob)} bytes, need {_HEADER.size})")
    magic, count, tokens, channels = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise FseqFormatError(f"{p}: bad magic {magic!r}, expected {MAGIC!r}")
    if count == 0 or tokens == 0 or channels == 0:
        raise FseqFormatError(f"{p}: zero dimension in header (n={count}, t={tokens}, c={channels})")
    expected = _HEADER.size + count * tokens * channels * 4
    if len(blob) != expected:
        raise FseqFormatError(f"{p}: file is {len(blob)} bytes, header implies {expected}")
    flat = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    if not np.all(np.isfinite(flat)):
        raise FseqFormatError(f"{p}: payload contains non-finite values")
    return FeatureSequence.from_matrix(flat.reshape(count, tokens, channels).astype(np.float32))


def write_feature_file(seq: FeatureSequence, path: str | Path) -> None:
    """Write an FSEQ1 file. Weights and temporal indices are not stored."""
    mat = seq.values_matrix()
    header = _HEADER.pack(MAGIC, len(seq), seq.tokens_per_frame, seq.channels)
    Path(path).write_bytes(header + mat.astype("<f4", copy=False).tobytes())


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a clustered synthetic stream: contiguous same-cluster blocks of frames.

    Cluster centers are unit-norm and pairwise near-orthogonal, which requires
    num_clusters <= tokens_per_frame * channels.
    """

    num_clusters: int
    frames_per_cluster: int
    tokens_per_frame: int
    channels: int
    noise_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("num_clusters", "frames_per_cluster", "tokens_per_frame", "channels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.noise_sigma < 0:
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        dim = self.tokens_per_frame * self.channels
        if self.num_clusters > dim:
            raise ValueError(
                f"num_clusters ({self.num_clusters}) cannot exceed tokens*channels ({dim}); "
                "near-orthogonal centers would not exist"
            )


_CENTER_SEPARATION = 0.2
_NOISE_STREAM_TAG = 0x6E015E


def _cluster_centers(spec: SyntheticSpec) -> np.ndarray:
    """Unit-norm centers with pairwise |cosine| <= 0.2, via QR of a seeded Gaussian."""
    dim = spec.tokens_per_frame * spec.channels
    for attempt in range(16):
        rng = np.random.default_rng((spec.seed, attempt))
        gauss = rng.standard_normal((dim, spec.num_clusters))
        q, _ = np.linalg.qr(gauss)
        centers = q[:, : spec.num_clusters].T
        gram = np.abs(centers @ centers.T)
        np.fill_diagonal(gram, 0.0)
        if gram.max(initial=0.0) <= _CENTER_SEPARATION:
            return centers
    raise RuntimeError(f"could not separate {spec.num_clusters} centers in {dim} dimensions")


def gen_episode_stream(spec: SyntheticSpec) -> FeatureSequence:
    """Generate num_clusters contiguous blocks of frames_per_cluster noisy copies of each center."""
    dim = spec.tokens_per_frame * spec.channels
    centers = _cluster_centers(spec)
    total = spec.num_clusters * spec.frames_per_cluster
    noise_rng = np.random.default_rng((spec.seed, _NOISE_STREAM_TAG))
    values = np.repeat(centers, spec.frames_per_cluster, axis=0)
    if spec.noise_sigma > 0:
        values = values + spec.noise_sigma * noise_rng.standard_normal((total, dim))
    mat = values.astype(np.float32).reshape(total, spec.tokens_per_frame, spec.channels)
    return FeatureSequence.from_matrix(mat)


@dataclass
class EvalReport:
    """Result record emitted by the CLI; serialized as stable-key-order JSON."""

    command: str
    config: dict[str, Any]
    input_frames: int
    input_tokens: int
    input_channels: int
    output_frames: int
    metrics: dict[str, float] = field(default_factory=dict)
    timing_ms: dict[str, float] = field(default_factory=dict)
    peak_buffer_frames: int = 0
    seed: int | None = None
    tool_version: str = __version__
    merge_log: list[dict[str, Any]] | None = None
    setr_assignment: list[list[int]] | None = None

    def to_json_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "tool_version": self.tool_version,
            "command": self.command,
            "config": self.config,
            "input": {"n": self.input_frames, "t": self.input_tokens, "c": self.input_channels},
            "output": {"n": self.output_frames},
            "metrics": self.metrics,
            "timing_ms": self.timing_ms,
            "peak_buffer_frames": self.peak_buffer_frames,
            "seed": self.seed,
        }
        if self.merge_log is not None:
            payload["merge_log"] = self.merge_log
        if self.setr_assignment is not None:
            payload["setr_assignment"] = self.setr_assignment
        return payload

    @classmethod
    def from_json_dict(cls, payload: dict[str, Any]) -> "EvalReport":
        try:
            return cls(
                command=payload["command"],
                config=payload["config"],
                input_frames=payload["input"]["n"],
                input_tokens=payload["input"]["t"],
                input_channels=payload["input"]["c"],
                output_frames=payload["output"]["n"],
                metrics=payload["metrics"],
                timing_ms=payload["timing_ms"],
                peak_buffer_frames=payload["peak_buffer_frames"],
                seed=payload["seed"],
                tool_version=payload["tool_version"],
                merge_log=payload.get("merge_log"),
                setr_assignment=payload.get("setr_assignment"),
            )
        except KeyError as exc:
            raise ValueError(f"report is missing required key {exc}") from exc


def write_report(report: EvalReport, path: str | Path) -> None:
    """Serialize a report to JSON with sorted keys; equal reports give identical bytes."""
    text = json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def read_report(path: str | Path) -> EvalReport:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return EvalReport.from_json_dict(payload)
