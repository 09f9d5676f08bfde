"""Backend selection for the greedy merge loop.

Two interchangeable implementations of compress_working_set exist: a compiled
Cython extension (framepress._kernels) and a numpy reference
(framepress._kernels_py). The compiled one is used when importable; set the
FRAMEPRESS_KERNEL environment variable to "python" or "compiled" to force a
choice, or call set_backend() at runtime (benchmarks and tests do).

Shared contract of compress_working_set(values, weights, indices, capacity,
pe_scale, weighted):

  values   (n, dim) float32, flattened frame grids, C-contiguous
  weights  (n,) int64, all >= 1
  indices  (n,) int64 temporal indices, all >= 0
  returns  (values', weights', indices', events) where the outputs hold
           max(n is kept if n <= capacity else capacity) rows in surviving-slot
           order and events is [(kept_slot, removed_slot, similarity), ...] in
           merge order, slots being working-set positions at merge time.

Semantics (greedy best-pair merging, tie-break to lowest slots, 64-bit
accumulation with 32-bit storage, weight-weighted index rounding) are defined by
the numpy backend. The compiled backend mirrors every update expression, so
merge decisions and all outputs match exactly whenever no two DISTINCT pairs are
similarity-tied within about 1e-15; similarity values themselves may differ from
the numpy backend in the last few ulps because one accumulates scalar dots and
the other uses BLAS.
"""

from __future__ import annotations

import os

from framepress import _kernels_py

_BACKENDS = {"python": _kernels_py}
try:
    from framepress import _kernels as _compiled  # built by setup.py when Cython is present

    _BACKENDS["compiled"] = _compiled
except ImportError:
    pass

_requested = os.environ.get("FRAMEPRESS_KERNEL")
if _requested is not None and _requested not in _BACKENDS:
    raise RuntimeError(
        f"FRAMEPRESS_KERNEL={_requested!r} is not available; "
        f"choices here: {sorted(_BACKENDS)}"
    )
_active = _requested or ("compiled" if "compiled" in _BACKENDS else "python")


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    """Switch the dispatched backend; intended for tests and benchmarks."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; choices: {sorted(_BACKENDS)}")
    _active = name


def compress_working_set(values, weights, indices, capacity, pe_scale, weighted):
    return _BACKENDS[_active].compress_working_set(
        values, weights, indices, capacity, pe_scale, weighted
    )
