"""Reference compressor tests: selection, pooling, k-means, and the pinned RNG."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framepress.baselines import (
    DEFAULT_KMEANS_ITERS,
    METHODS,
    BaselineConfig,
    SplitMix64,
    fifo_keep,
    kmeans_compress,
    kmeans_compress_with_members,
    kmeans_lloyd,
    pool_bins,
    pool_compress,
    random_keep,
    run_baseline,
    uniform_keep,
)
from framepress.tensorio import FeatureSequence

from tests.conftest import frames_from_rows, random_sequence


class TestSplitMix64:
    def test_published_vectors_for_seed_zero(self):
        rng = SplitMix64(0)
        assert [rng.next_u64() for _ in range(4)] == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
            0xF88BB8A8724C81EC,
        ]

    def test_state_wraps_to_64_bits(self):
        rng = SplitMix64(2**64 - 1)
        assert 0 <= rng.next_u64() < 2**64

    def test_next_double_range(self):
        rng = SplitMix64(123)
        for _ in range(100):
            assert 0.0 <= rng.next_double() < 1.0

    def test_next_below(self):
        rng = SplitMix64(5)
        draws = [rng.next_below(7) for _ in range(200)]
        assert set(draws) <= set(range(7))
        with pytest.raises(ValueError):
            rng.next_below(0)


class TestFifo:
    def test_keeps_suffix(self):
        seq = random_sequence(0, 5, 1, 3)
        out = fifo_keep(seq, 2)
        assert out.frames == seq.frames[3:]

    def test_budget_at_least_n_is_identity(self):
        seq = random_sequence(1, 4, 1, 3)
        assert fifo_keep(seq, 4) == seq
        assert fifo_keep(seq, 9) == seq

    def test_windowed_fold_equals_suffix_take(self):
        seq = random_sequence(2, 23, 1, 4)
        budget = 6
        held: list = []
        for start in range(0, len(seq), 5):
            held = (held + seq.frames[start : start + 5])[-budget:]
        assert fifo_keep(seq, budget).frames == held


class TestRandom:
    def test_seed_determinism(self):
        seq = random_sequence(3, 20, 1, 4)
        assert random_keep(seq, 5, seed=7) == random_keep(seq, 5, seed=7)

    def test_distinct_seeds_usually_differ(self):
        seq = random_sequence(4, 30, 1, 4)
        picks = {tuple(f.temporal_index for f in random_keep(seq, 5, seed=s).frames) for s in range(8)}
        assert len(picks) > 1

    def test_budget_at_least_n_is_identity(self):
        seq = random_sequence(5, 6, 1, 3)
        assert random_keep(seq, 6, seed=0) == seq
        assert random_keep(seq, 60, seed=0) == seq

    def test_output_in_temporal_order(self):
        seq = random_sequence(6, 40, 1, 3)
        out = random_keep(seq, 10, seed=3)
        indices = [f.temporal_index for f in out.frames]
        assert indices == sorted(indices)
        assert len(set(indices)) == 10

    def test_marginal_frequencies_are_uniform(self):
        seq = random_sequence(7, 4, 1, 2)
        hits = np.zeros(4)
        draws = 10_000
        for seed in range(draws):
            for frame in random_keep(seq, 2, seed=seed).frames:
                hits[frame.temporal_index] += 1
        freq = hits / draws
        assert np.all(np.abs(freq - 0.5) <= 0.02)


class TestUniform:
    def test_endpoints(self):
        seq = random_sequence(8, 5, 1, 3)
        out = uniform_keep(seq, 2)
        assert [f.temporal_index for f in out.frames] == [0, 4]

    def test_budget_equal_n_is_identity(self):
        seq = random_sequence(9, 7, 1, 3)
        assert uniform_keep(seq, 7) == seq

    def test_hundred_to_twenty(self):
        seq = random_sequence(10, 100, 1, 3)
        indices = [f.temporal_index for f in uniform_keep(seq, 20).frames]
        assert len(indices) == 20
        assert indices[0] == 0 and indices[-1] == 99
        assert indices == sorted(set(indices))

    def test_budget_one_keeps_first(self):
        seq = random_sequence(11, 9, 1, 3)
        assert [f.temporal_index for f in uniform_keep(seq, 1).frames] == [0]

    @settings(max_examples=50, deadline=None)
    @given(count=st.integers(1, 60), budget=st.integers(1, 60))
    def test_fuzz_strictly_increasing_unique(self, count, budget):
        seq = random_sequence(12, count, 1, 2)
        indices = [f.temporal_index for f in uniform_keep(seq, budget).frames]
        assert len(indices) == min(count, budget)
        assert all(a < b for a, b in zip(indices, indices[1:]))


class TestPool:
    def test_avg_worked_example(self):
        seq = frames_from_rows([[1, 0], [3, 0], [0, 2], [0, 4]])
        out = pool_compress(seq, 2, mode="avg")
        assert np.allclose(out.values_matrix().reshape(2, 2), [[2, 0], [0, 3]])
        assert [f.weight for f in out.frames] == [2, 2]
        assert [f.temporal_index for f in out.frames] == [0, 2]

    def test_max_worked_example(self):
        seq = frames_from_rows([[1, 0], [3, 0], [0, 2], [0, 4]])
        out = pool_compress(seq, 2, mode="max")
        assert np.allclose(out.values_matrix().reshape(2, 2), [[3, 0], [0, 4]])

    def test_budget_equal_n_is_value_identity(self):
        seq = random_sequence(13, 6, 2, 3)
        for mode in ("avg", "max"):
            out = pool_compress(seq, 6, mode=mode)
            assert np.array_equal(out.values_matrix(), seq.values_matrix())

    def test_bins_earlier_larger(self):
        assert pool_bins(5, 2) == [(0, 3), (3, 2)]
        assert pool_bins(7, 3) == [(0, 3), (3, 2), (5, 2)]
        assert pool_bins(4, 2) == [(0, 2), (2, 2)]

    @settings(max_examples=50, deadline=None)
    @given(count=st.integers(1, 80), budget=st.integers(1, 80))
    def test_fuzz_bins_partition_evenly(self, count, budget):
        bins = pool_bins(count, budget)
        assert len(bins) == min(count, budget)
        sizes = [size for _, size in bins]
        assert sum(sizes) == count
        assert max(sizes) - min(sizes) <= 1
        assert sorted(sizes, reverse=True) == sizes
        rebuilt = [pos for start, size in bins for pos in range(start, start + size)]
        assert rebuilt == list(range(count))

    def test_avgpool_mass_conservation(self):
        seq = random_sequence(14, 43, 1, 4)
        out = pool_compress(seq, 9, mode="avg")
        assert sum(f.weight for f in out.frames) == 43

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            pool_compress(random_sequence(15, 4, 1, 2), 2, mode="median")


class TestKmeans:
    def test_recovers_two_separated_clusters(self):
        rows = np.array(
            [[10.0, 0.0], [10.2, 0.0], [9.8, 0.0], [0.0, 5.0], [0.0, 5.2], [0.0, 4.8]],
            dtype=np.float32,
        )
        out = kmeans_compress(frames_from_rows(rows), 2, seed=0)
        got = out.values_matrix().reshape(2, 2)
        assert np.allclose(got[0], [10.0, 0.0], atol=1e-6)
        assert np.allclose(got[1], [0.0, 5.0], atol=1e-6)
        assert [f.weight for f in out.frames] == [3, 3]
        assert [f.temporal_index for f in out.frames] == [0, 3]

    def test_budget_equal_n_is_value_identity(self):
        seq = random_sequence(16, 7, 1, 4)
        out = kmeans_compress(seq, 7, seed=2)
        assert np.allclose(out.values_matrix(), seq.values_matrix(), atol=1e-6)
        assert [f.temporal_index for f in out.frames] == list(range(7))

    def test_seed_determinism(self):
        seq = random_sequence(17, 30, 1, 5)
        assert kmeans_compress(seq, 4, seed=9) == kmeans_compress(seq, 4, seed=9)

    def test_budget_above_n_rejected(self):
        with pytest.raises(ValueError):
            kmeans_compress(random_sequence(18, 3, 1, 2), 4)

    def test_wcss_non_increasing(self):
        points = np.random.default_rng(19).standard_normal((50, 4))
        _, _, history = kmeans_lloyd(points, 5, seed=1)
        assert all(a >= b - 1e-9 for a, b in zip(history, history[1:]))

    def test_duplicate_points_still_fill_every_cluster(self):
        rows = np.float32([[1, 0], [1, 0], [1, 0], [0, 1]])
        out, groups = kmeans_compress_with_members(frames_from_rows(rows), 3, seed=1)
        assert len(out) == 3
        assert sorted(pos for group in groups for pos in group) == [0, 1, 2, 3]
        assert sum(f.weight for f in out.frames) == 4

    def test_all_identical_points(self):
        rows = np.float32([[2, 2]] * 5)
        out, groups = kmeans_compress_with_members(frames_from_rows(rows), 3, seed=4)
        assert len(out) == 3
        assert sum(len(g) for g in groups) == 5

    def test_members_cover_input_exactly_once(self):
        seq = random_sequence(20, 40, 1, 6)
        _, groups = kmeans_compress_with_members(seq, 6, seed=3)
        flat = sorted(pos for group in groups for pos in group)
        assert flat == list(range(40))


class TestRunBaseline:
    @pytest.mark.parametrize("method", METHODS)
    def test_every_method_dispatches(self, method):
        seq = random_sequence(21, 25, 2, 3)
        out = run_baseline(seq, BaselineConfig(method=method, budget=5, seed=1))
        assert len(out) == 5
        assert out.tokens_per_frame == 2 and out.channels == 3

    @pytest.mark.parametrize("method", ("fifo", "random", "uniform"))
    def test_selection_methods_keep_frames_bit_identical(self, method):
        seq = random_sequence(22, 18, 1, 4)
        out = run_baseline(seq, BaselineConfig(method=method, budget=6, seed=2))
        originals = {f.temporal_index: f for f in seq.frames}
        for frame in out.frames:
            assert frame == originals[frame.temporal_index]

    @pytest.mark.parametrize("method", METHODS)
    def test_determinism(self, method):
        seq = random_sequence(23, 20, 1, 4)
        config = BaselineConfig(method=method, budget=4, seed=11)
        assert run_baseline(seq, config) == run_baseline(seq, config)

    @settings(max_examples=30, deadline=None)
    @given(
        method=st.sampled_from(METHODS),
        count=st.integers(1, 40),
        budget=st.integers(1, 40),
        seed=st.integers(0, 1000),
    )
    def test_fuzz_output_length(self, method, count, budget, seed):
        if method == "kmeans" and count < budget:
            return
        seq = random_sequence(seed, count, 1, 3)
        out = run_baseline(seq, BaselineConfig(method=method, budget=budget, seed=seed))
        assert len(out) == min(count, budget)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BaselineConfig(method="magic", budget=3)
        with pytest.raises(ValueError):
            BaselineConfig(method="fifo", budget=0)
        with pytest.raises(ValueError):
            BaselineConfig(method="kmeans", budget=3, kmeans_iters=0)
        assert BaselineConfig(method="kmeans", budget=3).kmeans_iters == DEFAULT_KMEANS_ITERS
