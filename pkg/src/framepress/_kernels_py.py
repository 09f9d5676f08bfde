"""Reference numpy backend for the greedy working-set compressor.

The full descriptor and similarity matrices are rebuilt after every merge rather
than refreshed incrementally: BLAS gives bit-identical matmul cells for identical
row data but NOT matching matmul-vs-matvec values, so a mixed refresh would let
exact-math similarity ties drift apart within a run and destabilize the
deterministic tie-break. A full rebuild keeps ties bit-exact. See kernels.py for
the shared backend contract.
"""

from __future__ import annotations

import numpy as np

from framepress import simkernel


def compress_working_set(
    values: np.ndarray,
    weights: np.ndarray,
    indices: np.ndarray,
    capacity: int,
    pe_scale: float,
    weighted: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[tuple[int, int, float]]]:
    vals = np.array(values, dtype=np.float32, copy=True, order="C")
    wgts = np.array(weights, dtype=np.int64, copy=True)
    idxs = np.array(indices, dtype=np.int64, copy=True)
    events: list[tuple[int, int, float]] = []
    if vals.shape[0] <= capacity:
        return vals, wgts, idxs, events

    desc = simkernel.descriptor_rows(vals, idxs, pe_scale)
    sims = simkernel.pairwise_cosine(desc)
    while vals.shape[0] > capacity:
        count = vals.shape[0]
        upper = np.triu(np.ones((count, count), dtype=bool), k=1)
        flat = int(np.argmax(np.where(upper, sims, -np.inf)))
        kept, removed = divmod(flat, count)
        events.append((kept, removed, float(sims[kept, removed])))

        wa = int(wgts[kept])
        wb = int(wgts[removed])
        a = vals[kept].astype(np.float64)
        b = vals[removed].astype(np.float64)
        if weighted:
            merged = (wa * a + wb * b) / (wa + wb)
        else:
            merged = (a + b) / 2.0
        vals[kept] = merged.astype(np.float32)
        # temporal index is the weight-weighted mean under both modes, round half up
        idxs[kept] = int(np.floor((wa * int(idxs[kept]) + wb * int(idxs[removed])) / (wa + wb) + 0.5))
        wgts[kept] = wa + wb

        survivors = np.ones(count, dtype=bool)
        survivors[removed] = False
        vals = vals[survivors]
        wgts = wgts[survivors]
        idxs = idxs[survivors]
        desc = simkernel.descriptor_rows(vals, idxs, pe_scale)
        sims = simkernel.pairwise_cosine(desc)
    return vals, wgts, idxs, events
