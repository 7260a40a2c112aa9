import numpy as np
import pytest

from meanforge.means import DomainError
from meanforge.sampling import CHUNK_SIZE, SamplingSpec, edge_ratios, sample_pairs, sample_ratios, worker_count


class TestSpec:
    @pytest.mark.parametrize("kwargs", [
        {"count": 0}, {"count": 1.5}, {"seed": -1}, {"seed": 2**64},
        {"ratio_min": 0.0}, {"ratio_min": 2.0, "ratio_max": 1.0}, {"ratio_max": np.inf},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(DomainError):
            SamplingSpec(**kwargs)

    def test_totals(self):
        spec = SamplingSpec(count=10)
        assert spec.n_edge == 5 and spec.total == 15
        assert SamplingSpec(count=10, include_edge_cases=False).total == 10


class TestStream:
    def test_edge_cases_first(self):
        spec = SamplingSpec(count=100)
        x = sample_ratios(spec)
        assert list(x[:5]) == [1.0, 1.0 - 1e-9, 1.0 + 1e-9, 1e-8, 1e8]

    def test_edges_clipped_to_range(self):
        spec = SamplingSpec(count=5, ratio_min=2.0, ratio_max=3.0)
        assert list(edge_ratios(spec)) == [2.0, 3.0]

    def test_in_range_and_log_uniform(self):
        spec = SamplingSpec(count=200_000, seed=7, include_edge_cases=False)
        x = sample_ratios(spec)
        assert x.min() >= 1e-8 and x.max() <= 1e8
        u = np.log10(x)
        assert abs(u.mean()) < 0.05
        counts, _ = np.histogram(u, bins=16, range=(-8, 8))
        assert counts.min() > 0.9 * counts.mean()

    def test_slices_agree_with_full_stream(self):
        spec = SamplingSpec(count=3 * CHUNK_SIZE + 17, seed=11)
        full = sample_ratios(spec)
        for start, stop in [(0, 3), (4, CHUNK_SIZE + 9), (CHUNK_SIZE * 2 - 1, spec.total)]:
            assert np.array_equal(sample_ratios(spec, start, stop), full[start:stop])

    def test_prefix_stable_in_count(self):
        small = sample_ratios(SamplingSpec(count=1000, seed=5))
        big = sample_ratios(SamplingSpec(count=100_000, seed=5))
        assert np.array_equal(small, big[:1005])

    def test_seed_changes_stream(self):
        a = sample_ratios(SamplingSpec(count=100, seed=1))[5:]
        b = sample_ratios(SamplingSpec(count=100, seed=2))[5:]
        assert not np.array_equal(a, b)

    def test_pairs(self):
        pairs = list(sample_pairs(SamplingSpec(count=10), scale=2.0))
        assert len(pairs) == 15
        assert all(p.a == 2.0 for p in pairs)
        assert pairs[0].b == 2.0


class TestWorkers:
    def test_env(self, monkeypatch):
        monkeypatch.setenv("MEANFORGE_THREADS", "3")
        assert worker_count() == 3
        assert worker_count(5) == 5
        monkeypatch.setenv("MEANFORGE_THREADS", "zero")
        with pytest.raises(DomainError):
            worker_count()

    def test_default_positive(self, monkeypatch):
        monkeypatch.delenv("MEANFORGE_THREADS", raising=False)
        assert 1 <= worker_count() <= 8
