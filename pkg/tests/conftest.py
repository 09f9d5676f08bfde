"""Shared helpers: seeded stream builders and the acceptance summary printer."""

from __future__ import annotations

import numpy as np

from framepress.tensorio import FeatureSequence


def random_sequence(seed: int, count: int, tokens: int = 1, channels: int = 8) -> FeatureSequence:
    rng = np.random.default_rng((0xF0, seed))
    mat = rng.standard_normal((count, tokens, channels)).astype(np.float32)
    return FeatureSequence.from_matrix(mat)


def frames_from_rows(rows, indices=None, weights=None) -> FeatureSequence:
    """Rows of channel values -> a (n, 1, c) sequence; handy for worked examples."""
    mat = np.asarray(rows, dtype=np.float32)[:, None, :]
    return FeatureSequence.from_matrix(mat, indices=indices, weights=weights)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # Read the module instance pytest imported, whatever name it got it under.
    import sys

    lines = []
    for name, module in sys.modules.items():
        if name.rpartition(".")[2] == "test_acceptance":
            lines = getattr(module, "SUMMARY_LINES", [])
            break
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
