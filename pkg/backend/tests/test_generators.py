"""
Sample-path generators: specs, variance profiles, seeded paths, diagnostics
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from app.errors import CapacityError, SpecError
from app.generators import (
    GeneratorSpec,
    lacunary_min_ratio,
    lacunary_sequence,
    lindeberg_diagnostic,
    lyapunov_ratio,
    lyapunov_witness,
    sample_path,
    sample_support,
    variance_profile_of,
)
from app.variance_ladder import ratio_bound

INDEPENDENT = ["rademacher", "gaussian", "prime_bernoulli"]


class TestGeneratorSpec:

    def test_unknown_kind(self):
        with pytest.raises(SpecError):
            GeneratorSpec("cauchy")

    def test_non_positive_sigma(self):
        with pytest.raises(SpecError):
            GeneratorSpec("gaussian", sigma=0.0)

    def test_lacunary_ratio_must_exceed_one(self):
        with pytest.raises(SpecError):
            GeneratorSpec("lacunary", ratio=1.0)

    def test_with_seed_keeps_everything_else(self):
        spec = GeneratorSpec("rademacher", sigma=2.0, zero_prefix=3).with_seed(9)
        assert (spec.kind, spec.sigma, spec.zero_prefix, spec.seed) == ("rademacher", 2.0, 3, 9)
        assert spec.independent
        assert not GeneratorSpec("lacunary").independent


class TestVarianceProfiles:

    def test_sigma_schedule(self):
        spec = GeneratorSpec("gaussian", sigma=2.0, sigma_power=0.5, zero_prefix=2)
        profile = variance_profile_of(spec, 5)
        np.testing.assert_allclose(profile.sigma_sq[1:], [0.0, 0.0, 12.0, 16.0, 20.0])

    def test_prime_model_profile(self):
        profile = variance_profile_of(GeneratorSpec("prime_bernoulli"), 10)
        assert profile.prefix[1] == 0.0
        assert profile.prefix[2] == pytest.approx(0.25)
        assert profile.prefix[3] == pytest.approx(17.0 / 36.0)
        assert ratio_bound(profile).value ** 2 == pytest.approx(17.0 / 9.0)

    def test_lacunary_profile(self):
        profile = variance_profile_of(GeneratorSpec("lacunary", ratio=2.0), 50)
        assert profile.max_level == pytest.approx(50.0 / 12.0)

    def test_lacunary_capacity(self, monkeypatch):
        from app import generators
        monkeypatch.setattr(generators, "_check_lacunary_length", _always_over_limit)
        with pytest.raises(CapacityError):
            variance_profile_of(GeneratorSpec("lacunary"), 10)


def _always_over_limit(n_max):
    raise CapacityError("over limit", {"n_max": n_max})


class TestLacunarySequence:

    def test_doubling(self):
        assert lacunary_sequence(2.0, 5) == (2, 4, 8, 16, 32)

    def test_three_halves(self):
        assert lacunary_sequence(1.5, 5) == (1, 2, 3, 5, 7)
        assert lacunary_min_ratio(1.5, 5) == pytest.approx(1.4)

    def test_repeated_terms_rejected(self):
        with pytest.raises(SpecError):
            lacunary_sequence(1.1, 10)


class TestSampling:

    @pytest.mark.parametrize("kind", INDEPENDENT + ["lacunary"])
    def test_same_seed_same_path(self, kind):
        spec = GeneratorSpec(kind, seed=11)
        a = sample_path(spec, 200, path_index=3)
        b = sample_path(spec, 200, path_index=3)
        np.testing.assert_array_equal(a.sums, b.sums)

    @pytest.mark.parametrize("kind", INDEPENDENT + ["lacunary"])
    def test_paths_differ_by_index(self, kind):
        spec = GeneratorSpec(kind, seed=11)
        first = sample_path(spec, 200, path_index=0).sums
        others = [sample_path(spec, 200, path_index=i).sums for i in range(1, 5)]
        assert any(not np.array_equal(first, other) for other in others)

    @pytest.mark.parametrize("kind", INDEPENDENT)
    def test_support_matches_path(self, kind):
        spec = GeneratorSpec(kind, zero_prefix=4) if kind != "prime_bernoulli" else GeneratorSpec(kind)
        idx, values = sample_support(spec, 300, seed=5, path_index=2)
        path = sample_path(spec, 300, seed=5, path_index=2)
        np.testing.assert_allclose(path.increments[idx - 1], values, atol=1e-9)
        off = np.setdiff1d(np.arange(1, 301), idx)
        np.testing.assert_allclose(path.increments[off - 1], 0.0, atol=1e-9)

    def test_rademacher_increments(self):
        path = sample_path(GeneratorSpec("rademacher", sigma=3.0, seed=1), 500)
        np.testing.assert_allclose(np.abs(path.increments), 3.0)

    def test_lacunary_increments_in_range(self):
        idx, inc = sample_support(GeneratorSpec("lacunary", ratio=2.0, seed=4), 100)
        assert idx.size == 100
        assert np.all(inc >= -0.5) and np.all(inc < 0.5)

    def test_prime_counts(self):
        path = sample_path(GeneratorSpec("prime_bernoulli", seed=2), 1000, path_index=7)
        counts = path.counts()
        steps = np.diff(np.concatenate(([0], counts[1:])))
        assert set(np.unique(steps)) <= {0, 1}
        composite = np.array([4, 6, 8, 9, 10, 12, 14, 15, 16, 18])
        assert np.all(counts[composite] == counts[composite - 1])

    def test_counts_only_for_prime_model(self):
        with pytest.raises(SpecError):
            sample_path(GeneratorSpec("gaussian"), 10).counts()

    @given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=0, max_value=1000))
    def test_gaussian_path_is_pure_function_of_seed(self, seed, index):
        spec = GeneratorSpec("gaussian")
        a = sample_path(spec, 50, seed=seed, path_index=index)
        b = sample_path(spec, 50, seed=seed, path_index=index)
        np.testing.assert_array_equal(a.sums, b.sums)


class TestDiagnostics:

    def test_lyapunov_witness(self):
        report = lyapunov_witness(10**4)
        assert report.ok
        assert report.checked == 1229
        assert report.max_ratio <= 1.0

    def test_lyapunov_ratio_decays_for_unit_gaussian(self):
        spec = GeneratorSpec("gaussian")
        assert lyapunov_ratio(spec, 10**4) < lyapunov_ratio(spec, 100)

    def test_lyapunov_ratio_closed_form_rademacher(self):
        n = 400
        expected = n / n ** 1.5
        assert lyapunov_ratio(GeneratorSpec("rademacher"), n) == pytest.approx(expected)

    def test_lindeberg_gaussian_small(self):
        value = lindeberg_diagnostic(GeneratorSpec("gaussian"), 10**4, 0.1)
        assert 0.0 <= value < 1e-10

    def test_lindeberg_rademacher_is_zero_past_threshold(self):
        # |X_j| = 1 <= eps s_n once s_n >= 1/eps
        assert lindeberg_diagnostic(GeneratorSpec("rademacher"), 10**4, 0.5) == 0.0

    def test_lindeberg_needs_positive_eps(self):
        with pytest.raises(SpecError):
            lindeberg_diagnostic(GeneratorSpec("gaussian"), 10, 0.0)

    def test_lindeberg_lacunary_uniform_marginal(self):
        # a = eps s_n = 0.25 for n = 12, eps = 0.25
        value = lindeberg_diagnostic(GeneratorSpec("lacunary"), 12, 0.25)
        expected = 12 * (2.0 / 3.0) * (0.125 - 0.25 ** 3) / 1.0
        assert value == pytest.approx(expected)
        assert math.isfinite(value)

    def test_lindeberg_gaussian_matches_quadrature(self):
        # E(Z^2; |Z| > 1) with s_1 = 1
        tail, _ = integrate.quad(lambda z: z * z * stats.norm.pdf(z), 1.0, np.inf, epsabs=1e-13, epsrel=1e-13)
        assert lindeberg_diagnostic(GeneratorSpec("gaussian"), 1, 1.0) == pytest.approx(2.0 * tail, abs=1e-9)


def _endpoint_sums(spec: GeneratorSpec, n: int, paths: int) -> np.ndarray:
    profile = variance_profile_of(spec, n)
    return np.array([sample_path(spec, n, path_index=i, profile=profile).sums[n] for i in range(paths)])


class TestMoments:

    @pytest.mark.parametrize("kind", INDEPENDENT + ["lacunary"])
    def test_centering(self, kind):
        sums = _endpoint_sums(GeneratorSpec(kind, seed=31), 64, 20000)
        assert abs(sums.mean()) <= 4.0 * sums.std(ddof=1) / math.sqrt(sums.size)

    @pytest.mark.parametrize("kind", INDEPENDENT)
    def test_variance_matches_profile(self, kind):
        spec = GeneratorSpec(kind, seed=32)
        s_sq = variance_profile_of(spec, 64).max_level
        sums = _endpoint_sums(spec, 64, 20000)
        assert sums.var(ddof=1) == pytest.approx(s_sq, rel=0.06)

    def test_prime_count_mean(self):
        assert 1 / 2 + 1 / 3 + 1 / 5 + 1 / 7 == pytest.approx(1.17619, abs=1e-5)
        spec = GeneratorSpec("prime_bernoulli", seed=33)
        profile = variance_profile_of(spec, 10)
        counts = np.array([sample_path(spec, 10, path_index=i, profile=profile).counts()[10] for i in range(20000)])
        stderr = math.sqrt(profile.max_level / counts.size)
        assert abs(counts.mean() - 247 / 210) <= 4.0 * stderr


@pytest.mark.slow
class TestMomentsAtScale:

    @pytest.mark.parametrize("kind", INDEPENDENT)
    def test_centering_and_variance(self, kind):
        spec = GeneratorSpec(kind, seed=34)
        s_sq = variance_profile_of(spec, 64).max_level
        sums = _endpoint_sums(spec, 64, 10**6)
        assert abs(sums.mean()) <= 4.0 * math.sqrt(s_sq) / 10**3
        assert sums.var(ddof=1) == pytest.approx(s_sq, rel=0.02)

    def test_prime_count_mean(self):
        spec = GeneratorSpec("prime_bernoulli", seed=35)
        profile = variance_profile_of(spec, 10)
        counts = np.array([sample_path(spec, 10, path_index=i, profile=profile).counts()[10] for i in range(10**6)])
        assert abs(counts.mean() - 247 / 210) <= 3.0 * math.sqrt(profile.max_level / counts.size)
