# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled backend for the greedy working-set compressor.

Every similarity in this module flows through the same sequential scalar dot
product, so equal row data always yields bitwise-equal similarities within a
run. That makes an incremental refresh of the merged row exactly equivalent to
a full matrix rebuild, which is what the numpy backend must do to keep ties
stable. See kernels.py for the shared backend contract.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, floor, log, sin, sqrt

cnp.import_array()

cdef double NORM_EPS = 1e-12
cdef double COSINE_EPS = 1e-12
cdef double POSITION_BASE = 10000.0


cdef double _dot(double[:, ::1] rows, Py_ssize_t a, Py_ssize_t b, Py_ssize_t dim) noexcept nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    for k in range(dim):
        acc += rows[a, k] * rows[b, k]
    return acc


cdef void _refresh_descriptor(
    float[:, ::1] flat,
    cnp.int64_t[::1] idxs,
    double pe_scale,
    Py_ssize_t row,
    double[:, ::1] desc,
    double[::1] norms,
) noexcept nogil:
    """Rebuild one descriptor row: unit-normalized values plus the scaled position code."""
    cdef Py_ssize_t dim = desc.shape[1]
    cdef Py_ssize_t k, m
    cdef double acc = 0.0
    cdef double v, safe, step, angle, pos
    for k in range(dim):
        v = <double>flat[row, k]
        acc += v * v
    safe = sqrt(acc)
    if safe < NORM_EPS:
        safe = 1.0
    for k in range(dim):
        desc[row, k] = (<double>flat[row, k]) / safe
    if pe_scale != 0.0:
        pos = <double>idxs[row]
        step = (-2.0 / <double>dim) * log(POSITION_BASE)
        for m in range((dim + 1) // 2):
            angle = pos * exp((<double>m) * step)
            desc[row, 2 * m] = desc[row, 2 * m] + pe_scale * sin(angle)
            if 2 * m + 1 < dim:
                desc[row, 2 * m + 1] = desc[row, 2 * m + 1] + pe_scale * cos(angle)
    acc = 0.0
    for k in range(dim):
        acc += desc[row, k] * desc[row, k]
    norms[row] = sqrt(acc)


cdef void _refresh_sims_row(
    double[:, ::1] desc,
    double[::1] norms,
    Py_ssize_t row,
    Py_ssize_t count,
    double[:, ::1] sims,
) noexcept nogil:
    cdef Py_ssize_t j
    cdef double s
    for j in range(count):
        if j == row:
            continue
        s = _dot(desc, row, j, desc.shape[1]) / (norms[row] * norms[j] + COSINE_EPS)
        sims[row, j] = s
        sims[j, row] = s
    sims[row, row] = 1.0


def compress_working_set(values, weights, indices, capacity, pe_scale, weighted):
    vals3 = np.array(values, dtype=np.float32, copy=True, order="C")
    wgts_arr = np.array(weights, dtype=np.int64, copy=True)
    idxs_arr = np.array(indices, dtype=np.int64, copy=True)
    events = []
    cdef Py_ssize_t n = vals3.shape[0]
    cdef Py_ssize_t cap = capacity
    if n <= cap:
        return vals3, wgts_arr, idxs_arr, events

    flat_arr = vals3.reshape(n, -1)
    cdef float[:, ::1] flat = flat_arr
    cdef cnp.int64_t[::1] wgts = wgts_arr
    cdef cnp.int64_t[::1] idxs = idxs_arr
    cdef Py_ssize_t dim = flat.shape[1]

    desc_arr = np.empty((n, dim), dtype=np.float64)
    norm_arr = np.empty(n, dtype=np.float64)
    sims_arr = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] desc = desc_arr
    cdef double[::1] norms = norm_arr
    cdef double[:, ::1] sims = sims_arr

    cdef double scale = pe_scale
    cdef bint use_weights = weighted
    cdef Py_ssize_t i, j, k, kept, removed
    cdef double best, s, wa, wb, merged
    cdef cnp.int64_t ia, ib

    with nogil:
        for i in range(n):
            _refresh_descriptor(flat, idxs, scale, i, desc, norms)
        for i in range(n):
            sims[i, i] = 1.0
            for j in range(i + 1, n):
                s = _dot(desc, i, j, dim) / (norms[i] * norms[j] + COSINE_EPS)
                sims[i, j] = s
                sims[j, i] = s

    while n > cap:
        # strict > keeps the first maximum in row-major order: ties go low
        best = -np.inf
        kept = 0
        removed = 1
        with nogil:
            for i in range(n - 1):
                for j in range(i + 1, n):
                    if sims[i, j] > best:
                        best = sims[i, j]
                        kept = i
                        removed = j
        events.append((int(kept), int(removed), float(best)))

        with nogil:
            wa = <double>wgts[kept]
            wb = <double>wgts[removed]
            for k in range(dim):
                if use_weights:
                    merged = (wa * (<double>flat[kept, k]) + wb * (<double>flat[removed, k])) / (wa + wb)
                else:
                    merged = ((<double>flat[kept, k]) + (<double>flat[removed, k])) / 2.0
                flat[kept, k] = <float>merged
            ia = idxs[kept]
            ib = idxs[removed]
            # temporal index is the weight-weighted mean under both modes, round half up
            idxs[kept] = <cnp.int64_t>floor(
                (<double>(wgts[kept] * ia + wgts[removed] * ib)) / (wa + wb) + 0.5
            )
            wgts[kept] = wgts[kept] + wgts[removed]

            for i in range(removed, n - 1):
                for k in range(dim):
                    flat[i, k] = flat[i + 1, k]
                    desc[i, k] = desc[i + 1, k]
                wgts[i] = wgts[i + 1]
                idxs[i] = idxs[i + 1]
                norms[i] = norms[i + 1]
            for i in range(removed, n - 1):
                for j in range(n):
                    sims[i, j] = sims[i + 1, j]
            for j in range(removed, n - 1):
                for i in range(n - 1):
                    sims[i, j] = sims[i, j + 1]
        n -= 1
        with nogil:
            _refresh_descriptor(flat, idxs, scale, kept, desc, norms)
            _refresh_sims_row(desc, norms, kept, n, sims)

    return vals3[:n].copy(), wgts_arr[:n].copy(), idxs_arr[:n].copy(), events
