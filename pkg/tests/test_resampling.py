import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uoi.exceptions import InvalidArgumentError
from uoi.parallel import default_workers, parallel_map
from uoi.resampling import SeedSpec, bootstrap_indices, fractional_split, half_subsample, split_80_10_10


def test_seedspec_validation():
    with pytest.raises(InvalidArgumentError):
        SeedSpec(-1)
    with pytest.raises(InvalidArgumentError):
        SeedSpec(2**64)
    assert SeedSpec(2**64 - 1).master_seed == 2**64 - 1


def test_seedspec_spawn_and_coerce():
    s = SeedSpec(7)
    assert s.spawn(3).spawn(4).stream == (3, 4)
    assert s.spawn(3).stream_id == 3
    assert SeedSpec.coerce(7) == s
    assert SeedSpec.coerce(s) is s
    assert SeedSpec.coerce(None) == SeedSpec(0)


def test_seedspec_generator_is_pcg64_from_seed_sequence():
    ref = np.random.Generator(np.random.PCG64(np.random.SeedSequence(11, spawn_key=(2, 5))))
    assert np.array_equal(SeedSpec(11, (2, 5)).rng().integers(0, 2**32, 10), ref.integers(0, 2**32, 10))


class TestBootstrap:
    def test_n_one(self):
        assert bootstrap_indices(1, SeedSpec(3)).indices.tolist() == [0]

    def test_deterministic(self):
        a = bootstrap_indices(50, SeedSpec(9, (1,)))
        b = bootstrap_indices(50, SeedSpec(9, (1,)))
        assert np.array_equal(a.indices, b.indices)

    @given(n=st.integers(1, 500), seed=st.integers(0, 2**64 - 1))
    def test_length_and_range(self, n, seed):
        idx = bootstrap_indices(n, SeedSpec(seed)).indices
        assert idx.size == n and idx.min() >= 0 and idx.max() < n

    def test_distinct_fraction(self):
        # each index is missed with probability (1 - 1/n)^n -> 1/e
        n = 10_000
        fracs = [np.unique(bootstrap_indices(n, SeedSpec(s)).indices).size / n for s in range(100)]
        assert np.mean(fracs) == pytest.approx(1 - np.exp(-1), abs=0.02)

    def test_out_of_bag_complements(self):
        plan = bootstrap_indices(40, SeedSpec(2))
        oob = plan.out_of_bag()
        assert set(oob).isdisjoint(plan.indices)
        assert set(oob) | set(plan.indices) == set(range(40))

    def test_invalid_n(self):
        with pytest.raises(InvalidArgumentError):
            bootstrap_indices(0, SeedSpec())


class TestHalfSubsample:
    def test_n_two(self):
        idx = half_subsample(2, SeedSpec(1)).indices
        assert idx.size == 1 and idx[0] in (0, 1)

    def test_n_odd(self):
        idx = half_subsample(101, SeedSpec(1)).indices
        assert idx.size == 50 and np.unique(idx).size == 50

    def test_inclusion_frequency(self):
        n = 20
        counts = np.zeros(n)
        for s in range(10_000):
            counts[half_subsample(n, SeedSpec(s)).indices] += 1
        np.testing.assert_allclose(counts / 10_000, 0.5, atol=0.02)

    def test_invalid_n(self):
        with pytest.raises(InvalidArgumentError):
            half_subsample(1, SeedSpec())


class TestSplit:
    def test_sizes_ten(self):
        plan = split_80_10_10(10, SeedSpec(0))
        assert [b.size for b in plan.blocks] == [8, 1, 1]

    def test_sizes_hundred_partition(self):
        blocks = split_80_10_10(100, SeedSpec(4)).blocks
        assert [b.size for b in blocks] == [80, 10, 10]
        joined = np.concatenate(blocks)
        assert sorted(joined.tolist()) == list(range(100))

    @given(n=st.integers(10, 2000), seed=st.integers(0, 2**64 - 1))
    def test_partition_property(self, n, seed):
        blocks = split_80_10_10(n, SeedSpec(seed)).blocks
        assert [b.size for b in blocks] == [int(0.8 * n + 1e-9), int(0.1 * n + 1e-9), n - int(0.8 * n + 1e-9) - int(0.1 * n + 1e-9)]
        assert np.unique(np.concatenate(blocks)).size == n

    def test_reproducible(self):
        a = split_80_10_10(57, SeedSpec(5)).blocks
        b = split_80_10_10(57, SeedSpec(5)).blocks
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_small_n_raises(self):
        with pytest.raises(InvalidArgumentError):
            split_80_10_10(9, SeedSpec())

    def test_bad_fractions(self):
        with pytest.raises(InvalidArgumentError):
            fractional_split(20, SeedSpec(), (0.9, 0.1))


def test_stream_independence():
    same = 0
    for a in range(100):
        x = bootstrap_indices(30, SeedSpec(1, (a,))).indices
        y = bootstrap_indices(30, SeedSpec(1, (a + 100,))).indices
        same += np.array_equal(x, y)
    assert same == 0


def test_parallel_map_preserves_order_and_results():
    items = list(range(25))
    fn = lambda k: bootstrap_indices(20, SeedSpec(3, (k,))).indices.tolist()  # noqa: E731
    assert parallel_map(fn, items, 1) == parallel_map(fn, items, 8)


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv("UOI_WORKERS", "6")
    assert default_workers() == 6
    monkeypatch.setenv("UOI_WORKERS", "junk")
    assert default_workers() == 1
    monkeypatch.delenv("UOI_WORKERS")
    assert default_workers() == 1
