"""Similarity primitives shared by the compressors.

All accumulation is float64 regardless of storage precision. Cosine iterates in
ascending index order on both arguments, so cosine(a, b) == cosine(b, a) bit for
bit. Pair selection breaks ties toward the lowest first slot, then lowest second
slot, comparing similarities with exact 64-bit equality; the row-major first-max
scan below IS that rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_EPS = 1e-12
COSINE_EPS = 1e-12
POSITION_BASE = 10000.0
DEFAULT_PE_SCALE = 0.1


def flatten_frame(values: np.ndarray) -> np.ndarray:
    """Row-major flatten of a (tokens, channels) grid to a float64 vector."""
    return np.asarray(values, dtype=np.float64).reshape(-1)


def l2_normalize(vec: np.ndarray) -> np.ndarray:
    """Scale to unit L2 norm; vectors with norm < 1e-12 are returned unchanged."""
    vec = np.asarray(vec, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm < NORM_EPS:
        return vec.copy()
    return vec / norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity dot(a, b) / (|a| * |b| + 1e-12); zero vectors give 0."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"cosine needs equal-length 1-D vectors, got {a.shape} and {b.shape}")
    denom = float(np.linalg.norm(a)) * float(np.linalg.norm(b)) + COSINE_EPS
    return float(np.dot(a, b) / denom)


def sinusoidal_position_code(position: float, dim: int) -> np.ndarray:
    """Sinusoidal code: entry 2m = sin(pos / base^(2m/dim)), entry 2m+1 = cos of the same.

    Odd dim puts the final sine term in the last entry.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    half = np.arange((dim + 1) // 2, dtype=np.float64)
    step = (-2.0 / dim) * np.log(POSITION_BASE)
    angles = float(position) * np.exp(half * step)
    code = np.empty(dim, dtype=np.float64)
    code[0::2] = np.sin(angles)
    code[1::2] = np.cos(angles[: dim // 2])
    return code


def position_code_rows(positions: np.ndarray, dim: int) -> np.ndarray:
    """sinusoidal_position_code for a batch of positions, one row each."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    positions = np.asarray(positions, dtype=np.float64)
    half = np.arange((dim + 1) // 2, dtype=np.float64)
    step = (-2.0 / dim) * np.log(POSITION_BASE)
    angles = positions[:, None] * np.exp(half * step)[None, :]
    codes = np.empty((positions.shape[0], dim), dtype=np.float64)
    codes[:, 0::2] = np.sin(angles)
    codes[:, 1::2] = np.cos(angles[:, : dim // 2])
    return codes


def similarity_descriptor(values: np.ndarray, temporal_index: int, pe_scale: float = DEFAULT_PE_SCALE) -> np.ndarray:
    """Descriptor the merge loop compares: unit-normalized flat values plus a scaled position code.

    Only descriptors see the position code; stored frame values are never modified by it.
    """
    if pe_scale < 0:
        raise ValueError(f"pe_scale must be >= 0, got {pe_scale}")
    flat = flatten_frame(values)
    base = l2_normalize(flat)
    if pe_scale == 0:
        return base
    return base + pe_scale * sinusoidal_position_code(temporal_index, flat.shape[0])


def descriptor_rows(values: np.ndarray, indices: np.ndarray, pe_scale: float) -> np.ndarray:
    """similarity_descriptor for a whole working set: (n, dim) float64, one row per frame."""
    flat = np.asarray(values, dtype=np.float64).reshape(values.shape[0], -1)
    norms = np.linalg.norm(flat, axis=1)
    safe = np.where(norms < NORM_EPS, 1.0, norms)
    base = flat / safe[:, None]
    if pe_scale == 0:
        return base
    return base + pe_scale * position_code_rows(np.asarray(indices), flat.shape[1])


def pairwise_cosine(descriptors: np.ndarray) -> np.ndarray:
    """Full (n, n) cosine matrix for descriptor rows, 64-bit throughout."""
    desc = np.asarray(descriptors, dtype=np.float64)
    norms = np.linalg.norm(desc, axis=1)
    return (desc @ desc.T) / (np.outer(norms, norms) + COSINE_EPS)


@dataclass(frozen=True)
class PairChoice:
    """The winning pair of a best_pair scan; first < second always holds."""

    first: int
    second: int
    similarity: float


def best_pair(descriptors: Sequence[np.ndarray] | np.ndarray) -> PairChoice:
    """Most-similar distinct pair under cosine; ties go to the lowest (first, second)."""
    desc = np.asarray(descriptors, dtype=np.float64)
    if desc.ndim != 2:
        raise ValueError(f"best_pair needs a uniform stack of 1-D descriptors, got shape {desc.shape}")
    count = desc.shape[0]
    if count < 2:
        raise ValueError(f"best_pair needs at least two descriptors, got {count}")
    sims = pairwise_cosine(desc)
    masked = np.where(np.triu(np.ones((count, count), dtype=bool), k=1), sims, -np.inf)
    # flat argmax returns the first maximum in row-major order: the tie-break contract
    flat = int(np.argmax(masked))
    first, second = divmod(flat, count)
    return PairChoice(first=first, second=second, similarity=float(sims[first, second]))
