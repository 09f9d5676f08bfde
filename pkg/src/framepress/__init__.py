"""Memory-bounded compression for streams of high-dimensional feature frames.

Two complementary compressors operate on the same frame containers: a
streaming episode buffer that greedily merges the most similar pair whenever
it overflows a fixed capacity, and an anchor-stride grouper that folds each
frame into its most similar anchor. Reference selectors and pooled baselines,
a brute-force correctness oracle, quality metrics, and a benchmark runner
round out the toolkit.
"""

from framepress._version import __version__
from framepress.baselines import BaselineConfig, run_baseline
from framepress.eco import (
    EpisodeBuffer,
    MergeEvent,
    StreamConfig,
    buffer_append_or_compress,
    eco_compress,
    merge_frames,
    stream_compress,
    stream_compress_with_stats,
)
from framepress.kernels import active_backend, available_backends, set_backend
from framepress.metrics import compare_runs, fidelity, temporal_coverage
from framepress.oracle import oracle_eco, verify_greedy_log
from framepress.setr import SetrConfig, setr_compress, setr_compress_with_assignment
from framepress.tensorio import (
    EvalReport,
    FeatureSequence,
    Frame,
    FseqFormatError,
    SyntheticSpec,
    gen_episode_stream,
    read_feature_file,
    read_report,
    write_feature_file,
    write_report,
)

__all__ = [
    "BaselineConfig",
    "EpisodeBuffer",
    "EvalReport",
    "FeatureSequence",
    "Frame",
    "FseqFormatError",
    "MergeEvent",
    "SetrConfig",
    "StreamConfig",
    "SyntheticSpec",
    "__version__",
    "active_backend",
    "available_backends",
    "buffer_append_or_compress",
    "compare_runs",
    "eco_compress",
    "fidelity",
    "gen_episode_stream",
    "merge_frames",
    "oracle_eco",
    "read_feature_file",
    "read_report",
    "run_baseline",
    "set_backend",
    "setr_compress",
    "setr_compress_with_assignment",
    "stream_compress",
    "stream_compress_with_stats",
    "temporal_coverage",
    "verify_greedy_log",
    "write_feature_file",
    "write_report",
]
