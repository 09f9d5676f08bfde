"""Top-level acceptance checks for the compression toolkit.

Each test prints one PASS/FAIL line into the terminal summary (see conftest).
The checks are property-based: bounded-buffer invariants under fuzz, agreement
with the brute-force reference, identity degenerate cases, frozen small
reductions, cluster-center recovery on synthetic streams, fidelity ordering
against the reference compressors, linear scaling, and the temporal-locality
bias introduced by the position code.
"""

from __future__ import annotations

import time

import numpy as np

from framepress import bench
from framepress.baselines import (
    fifo_keep,
    kmeans_compress,
    pool_compress,
    random_keep,
    uniform_keep,
)
from framepress.eco import (
    EpisodeBuffer,
    StreamConfig,
    buffer_append_or_compress,
    eco_compress,
    stream_compress,
    stream_compress_with_stats,
)
from framepress.metrics import compare_runs, fidelity
from framepress.oracle import oracle_eco, replay_merge_distances
from framepress.setr import SetrConfig, setr_compress
from framepress.tensorio import FeatureSequence, SyntheticSpec, gen_episode_stream

from tests.conftest import frames_from_rows, random_sequence

SUMMARY_LINES: list[str] = []


def _record(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    SUMMARY_LINES.append(line)
    assert ok, line


def _unit_rows(mat: np.ndarray) -> np.ndarray:
    flat = mat.reshape(mat.shape[0], -1).astype(np.float64)
    return flat / (np.linalg.norm(flat, axis=1, keepdims=True) + 1e-12)


def test_buffer_capacity_fuzz():
    rng = np.random.default_rng(20260814)
    streams = 1000
    bound_breaks = 0
    mass_breaks = 0
    start = time.perf_counter()
    for _ in range(streams):
        count = int(rng.integers(1, 257))
        capacity = int(rng.integers(1, 33))
        window = int(rng.integers(1, 33))
        tokens = int(rng.integers(1, 5))
        channels = int(rng.integers(1, 17))
        mat = rng.standard_normal((count, tokens, channels), dtype=np.float32)
        seq = FeatureSequence.from_matrix(mat)
        buffer = EpisodeBuffer.empty(capacity)
        for pos in range(0, count, window):
            buffer = buffer_append_or_compress(buffer, seq.frames[pos : pos + window])
            if len(buffer.episodes) > capacity:
                bound_breaks += 1
        if sum(frame.weight for frame in buffer.episodes) != count:
            mass_breaks += 1
    elapsed = time.perf_counter() - start
    ok = bound_breaks == 0 and mass_breaks == 0 and elapsed < 60.0
    _record(
        "capacity fuzz",
        ok,
        f"{streams} streams, {bound_breaks} bound breaks, {mass_breaks} mass breaks, {elapsed:.1f}s (budget 60s)",
    )


def test_bruteforce_equivalence_fuzz():
    rng = np.random.default_rng(977)
    cases = 200
    mismatches = 0
    max_sim_delta = 0.0
    start = time.perf_counter()
    for trial in range(cases):
        count = int(rng.integers(1, 65))
        capacity = int(rng.integers(1, 21))
        channels = int(rng.integers(1, 9))
        tokens = int(rng.integers(1, 3))
        mode = "weighted" if trial % 2 else "plain"
        mat = rng.standard_normal((count, tokens, channels), dtype=np.float32)
        seq = FeatureSequence.from_matrix(mat)
        config = StreamConfig(window_size=count, capacity=capacity, merge_mode=mode)
        stream_out, stream_log = stream_compress(seq, config)
        oracle_out, oracle_log = oracle_eco(seq, config)
        decisions_equal = [(e.step, e.kept_slot, e.removed_slot) for e in stream_log] == [
            (e.step, e.kept_slot, e.removed_slot) for e in oracle_log
        ]
        if stream_log and decisions_equal:
            max_sim_delta = max(
                max_sim_delta,
                max(abs(a.similarity - b.similarity) for a, b in zip(stream_log, oracle_log)),
            )
        values_equal, _ = compare_runs(stream_out, oracle_out)
        meta_equal = [(f.weight, f.temporal_index) for f in stream_out.frames] == [
            (f.weight, f.temporal_index) for f in oracle_out.frames
        ]
        if not (decisions_equal and values_equal and meta_equal):
            mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and max_sim_delta <= 1e-9 and elapsed < 30.0
    _record(
        "oracle equivalence",
        ok,
        f"{cases} cases, {mismatches} mismatches, max sim delta {max_sim_delta:.2e}, {elapsed:.1f}s (budget 30s)",
    )


def test_identity_suite():
    failures = []

    seq = random_sequence(41, 12, 1, 6)
    for capacity in (12, 30):
        episodes, log = stream_compress(seq, StreamConfig(window_size=5, capacity=capacity))
        if log != [] or episodes != seq:
            failures.append(f"eco capacity {capacity}")

    if setr_compress(seq, SetrConfig(stride=1)) != seq:
        failures.append("setr stride 1")

    if fifo_keep(seq, 12) != seq:
        failures.append("fifo")
    if random_keep(seq, 12, seed=0) != seq:
        failures.append("random")
    if uniform_keep(seq, 12) != seq:
        failures.append("uniform")
    for mode in ("avg", "max"):
        pooled = pool_compress(seq, 12, mode=mode)
        if not np.array_equal(pooled.values_matrix(), seq.values_matrix()):
            failures.append(f"{mode}pool")
    clustered = kmeans_compress(seq, 12, seed=0)
    if not np.allclose(clustered.values_matrix(), seq.values_matrix(), atol=1e-6):
        failures.append("kmeans values")
    if [f.temporal_index for f in clustered.frames] != list(range(12)):
        failures.append("kmeans order")

    _record("identity suite", not failures, "all degenerate budgets are identities" if not failures else f"failed: {failures}")


def test_known_small_reductions():
    worst = 0.0

    eco_in = frames_from_rows([[1.0, 0.0], [0.8, 0.6], [0.0, 1.0]])
    expected_eco = np.array([[0.9, 0.3], [0.0, 1.0]])
    direct = eco_compress(eco_in.frames, capacity=2, pe_scale=0.0)
    streamed, _ = stream_compress(eco_in, StreamConfig(window_size=3, capacity=2, pe_scale=0.0))
    brute, _ = oracle_eco(eco_in, StreamConfig(window_size=3, capacity=2, pe_scale=0.0))
    for got in (
        np.stack([f.values for f in direct]),
        streamed.values_matrix(),
        brute.values_matrix(),
    ):
        worst = max(worst, float(np.abs(got.reshape(2, 2) - expected_eco).max()))

    setr_in = frames_from_rows([[1.0, 0.0], [0.6, 0.8], [0.0, 1.0], [1.0, 0.0]])
    expected_setr = np.array([[1.0, 0.0], [0.3, 0.9]])
    kept = setr_compress(setr_in, SetrConfig(stride=2))
    worst = max(worst, float(np.abs(kept.values_matrix().reshape(2, 2) - expected_setr).max()))
    meta_ok = [(f.weight, f.temporal_index) for f in kept.frames] == [(2, 0), (2, 2)]

    ok = worst <= 1e-6 and meta_ok
    _record("worked reductions", ok, f"three-route two-frame outputs, max deviation {worst:.2e} (tol 1e-6)")


def test_cluster_center_recovery():
    worst_by_budget = {}
    bijective = True
    for clusters in (4, 10, 20):
        spec = SyntheticSpec(
            num_clusters=clusters,
            frames_per_cluster=5,
            tokens_per_frame=1,
            channels=32,
            noise_sigma=0.01,
            seed=clusters,
        )
        seq = gen_episode_stream(spec)
        centers = _unit_rows(seq.values_matrix().reshape(clusters, 5, -1).mean(axis=1))
        episodes, _ = stream_compress(seq, StreamConfig(window_size=10, capacity=clusters))
        outputs = _unit_rows(episodes.values_matrix())
        sims = outputs @ centers.T
        worst_by_budget[clusters] = float(sims.max(axis=1).min())
        if len(set(sims.argmax(axis=1).tolist())) != clusters:
            bijective = False
        if clusters == 20:
            kept = setr_compress(seq, SetrConfig(keep_ratio=0.2))
            ksims = _unit_rows(kept.values_matrix()) @ centers.T
            worst_by_budget["setr20"] = float(ksims.max(axis=1).min())
            if len(set(ksims.argmax(axis=1).tolist())) != clusters:
                bijective = False
    ok = bijective and all(value >= 0.99 for value in worst_by_budget.values())
    detail = ", ".join(f"{key}: {value:.4f}" for key, value in worst_by_budget.items())
    _record("cluster recovery", ok, f"worst center cosine (min 0.99) {detail}, bijective={bijective}")


def test_fidelity_ordering():
    seeds = 50
    budget = 10
    scores = {"eco": [], "fifo": [], "random": [], "setr": [], "avgpool": []}
    start = time.perf_counter()
    for seed in range(seeds):
        spec = SyntheticSpec(
            num_clusters=10,
            frames_per_cluster=10,
            tokens_per_frame=1,
            channels=32,
            noise_sigma=0.05,
            seed=seed,
        )
        seq = gen_episode_stream(spec)
        episodes, _ = stream_compress(seq, StreamConfig(window_size=10, capacity=budget))
        scores["eco"].append(fidelity(seq, episodes))
        scores["fifo"].append(fidelity(seq, fifo_keep(seq, budget)))
        scores["random"].append(fidelity(seq, random_keep(seq, budget, seed=seed)))
        kept = setr_compress(seq, SetrConfig(stride=8))
        scores["setr"].append(fidelity(seq, kept))
        scores["avgpool"].append(fidelity(seq, pool_compress(seq, len(kept), mode="avg")))
    elapsed = time.perf_counter() - start
    mean = {key: float(np.mean(values)) for key, values in scores.items()}
    fifo_margin = mean["eco"] - mean["fifo"]
    random_margin = mean["eco"] - mean["random"]
    ok = fifo_margin > 0.05 and random_margin > 0.05 and mean["setr"] >= mean["avgpool"] and elapsed < 120.0
    _record(
        "fidelity ordering",
        ok,
        f"{seeds} seeds: eco {mean['eco']:.3f} vs fifo {mean['fifo']:.3f} vs random {mean['random']:.3f} "
        f"(margins {fifo_margin:.3f}/{random_margin:.3f} > 0.05), setr {mean['setr']:.4f} >= avgpool "
        f"{mean['avgpool']:.4f}, {elapsed:.1f}s (budget 120s)",
    )


def test_streaming_scalability():
    config = StreamConfig(window_size=10, capacity=20)
    results = bench.run_size_sweep([10_000, 100_000], config, channels=16, repeats=3)
    small, large = results
    peak_ok = large.peak_buffer_frames <= config.capacity + config.window_size
    rates = sorted((small.frames_per_s, large.frames_per_s))
    ratio = rates[1] / rates[0]
    ok = peak_ok and ratio <= 2.0
    _record(
        "scaling",
        ok,
        f"peak buffer {large.peak_buffer_frames} frames at n=100k (bound {config.capacity + config.window_size}), "
        f"throughput {small.frames_per_s:,.0f}/s at 10k vs {large.frames_per_s:,.0f}/s at 100k (ratio {ratio:.2f}x <= 2x)",
    )


def _interleaved_lookalike_stream(seed: int) -> FeatureSequence:
    """Repeated visits to the same patterns: distant frames look alike by value."""
    rng = np.random.default_rng((0xEC0, seed))
    centers = rng.standard_normal((4, 16))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    rows = []
    for _ in range(3):
        for pattern in range(4):
            rows.append(centers[pattern] + 0.01 * rng.standard_normal((5, 16)))
    mat = np.concatenate(rows).astype(np.float32).reshape(60, 1, 16)
    return FeatureSequence.from_matrix(mat)


def test_position_code_locality():
    seeds = range(5)
    gaps = {0.0: [], 0.1: []}
    for seed in seeds:
        seq = _interleaved_lookalike_stream(seed)
        for pe_scale in gaps:
            config = StreamConfig(window_size=10, capacity=8, pe_scale=pe_scale)
            _, log = stream_compress(seq, config)
            gaps[pe_scale].append(float(np.mean(replay_merge_distances(seq, config, log))))
    strict = sum(with_pe < without for with_pe, without in zip(gaps[0.1], gaps[0.0]))
    ok = strict == len(gaps[0.1])
    _record(
        "position-code locality",
        ok,
        f"mean merged-pair index distance {np.mean(gaps[0.1]):.1f} with code vs {np.mean(gaps[0.0]):.1f} without, "
        f"strictly smaller in {strict}/{len(gaps[0.1])} seeds",
    )
