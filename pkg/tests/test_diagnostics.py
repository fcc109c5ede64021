"""Empirical W2 and Gaussianity-profile tests.

Oracles: exhaustive permutation search on tiny point sets, an independent LP
formulation of the assignment problem (solved by HiGHS), and the 1-D
sorted-coupling closed form.
"""

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from mklvc.diagnostics import empirical_w2, gaussianity_profile, std_spectrum
from mklvc.errors import InvalidBlockDimError, ValidationError
from mklvc.stats import EmbeddingSequence, GaussianStats, sort_profile
from mklvc.transport import gaussian_w2


def oracle_w2_bruteforce(x, y):
    """Minimum over all n! pairings; n <= 7 or so."""
    n = len(x)
    best = np.inf
    for perm in itertools.permutations(range(n)):
        cost = sum(float(np.sum((x[i] - y[j]) ** 2)) for i, j in enumerate(perm))
        best = min(best, cost)
    return float(np.sqrt(best / n))


def oracle_w2_lp(x, y):
    """Assignment as a transportation LP over the Birkhoff polytope."""
    n = len(x)
    cost = ((x[:, None, :] - y[None, :, :]) ** 2).sum(-1).ravel()
    a_eq = np.zeros((2 * n, n * n))
    for i in range(n):
        a_eq[i, i * n : (i + 1) * n] = 1.0       # row sums
        a_eq[n + i, i::n] = 1.0                  # column sums
    b_eq = np.ones(2 * n)
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    assert res.success
    return float(np.sqrt(res.fun / n))


class TestEmpiricalW2:
    def test_identical_sets_zero(self):
        rng = np.random.default_rng(80)
        x = rng.standard_normal((40, 3))
        assert empirical_w2(x, x, seed=1) == 0.0

    def test_1d_shifted_pairs(self):
        x = np.array([[0.0], [1.0]])
        y = np.array([[10.0], [11.0]])
        assert empirical_w2(x, y, seed=0) == pytest.approx(10.0, rel=1e-12)

    def test_matches_bruteforce_small(self):
        rng = np.random.default_rng(81)
        for trial in range(8):
            n = int(rng.integers(2, 7))
            x = rng.standard_normal((n, 2))
            y = rng.standard_normal((n, 2))
            got = empirical_w2(x, y, seed=5)
            assert got == pytest.approx(oracle_w2_bruteforce(x, y), rel=1e-12)

    def test_matches_lp_oracle_32_points(self):
        rng = np.random.default_rng(82)
        x = rng.standard_normal((32, 2))
        y = rng.standard_normal((32, 2)) + 0.5
        assert empirical_w2(x, y, seed=3) == pytest.approx(oracle_w2_lp(x, y), rel=1e-9)

    def test_symmetric_bit_exact(self):
        rng = np.random.default_rng(83)
        for trial in range(5):
            x = rng.standard_normal((20, 3))
            y = rng.standard_normal((33, 3))
            assert empirical_w2(x, y, subsample=16, seed=7) == empirical_w2(y, x, subsample=16, seed=7)

    def test_scale_identity(self):
        rng = np.random.default_rng(84)
        x = rng.standard_normal((25, 4))
        y = rng.standard_normal((30, 4))
        base = empirical_w2(x, y, subsample=20, seed=11)
        for a in (0.1, 2.0, 345.0):
            scaled = empirical_w2(a * x, a * y, subsample=20, seed=11)
            assert abs(scaled - a * base) / (a * base) < 1e-9

    def test_1d_equals_sorted_coupling(self):
        rng = np.random.default_rng(85)
        for trial in range(6):
            n = int(rng.integers(2, 50))
            x = rng.standard_normal((n, 1)) * 3.0
            y = rng.standard_normal((n, 1)) + 1.0
            want = float(np.sqrt(np.sum((np.sort(x[:, 0]) - np.sort(y[:, 0])) ** 2) / n))
            assert empirical_w2(x, y, subsample=n, seed=0) == pytest.approx(want, rel=1e-12)

    def test_subsampling_caps_cloud_size(self):
        rng = np.random.default_rng(86)
        x = rng.standard_normal((100, 2))
        y = rng.standard_normal((80, 2))
        # Just runs fast and returns a finite value; s = 16.
        value = empirical_w2(x, y, subsample=16, seed=2)
        assert np.isfinite(value) and value >= 0

    def test_converges_to_gaussian_w2(self):
        rng = np.random.default_rng(87)
        for dim in (1, 2, 4):
            a = rng.standard_normal((dim, dim))
            cov1 = a @ a.T / dim + 0.3 * np.eye(dim)
            b = rng.standard_normal((dim, dim))
            cov2 = b @ b.T / dim + 0.3 * np.eye(dim)
            mu1 = rng.standard_normal(dim) * 2.0
            mu2 = rng.standard_normal(dim) * 2.0
            true = gaussian_w2(
                GaussianStats(mean=mu1, cov=cov1, sample_count=1),
                GaussianStats(mean=mu2, cov=cov2, sample_count=1),
            )
            x = rng.multivariate_normal(mu1, cov1, size=512)
            y = rng.multivariate_normal(mu2, cov2, size=512)
            est = empirical_w2(x, y, subsample=512, seed=9)
            assert abs(est - true) / true < 0.10

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            empirical_w2(np.ones((3, 2)), np.ones((3, 3)), seed=0)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            empirical_w2(np.ones((0, 2)), np.ones((3, 2)), seed=0)


def heavy_tailed_grouped(seed, n_frames=4096, dim=64):
    """Gaussian first halves; each 16-dim group's second half is a heavy-tailed
    antipodal copy of its first half. Windows of width <= 8 see Gaussians or
    Gaussian scale mixtures; non-Gaussian joint structure appears only at
    width 16."""
    rng = np.random.default_rng(seed)
    frames = np.empty((n_frames, dim))
    for g in range(0, dim, 16):
        half = rng.standard_normal((n_frames, 8))
        sign = np.where(rng.random(n_frames) < 0.5, 1.0, -1.0)
        tail = np.where(rng.random(n_frames) < 0.15, 2.5, 1.0)
        frames[:, g : g + 8] = half
        frames[:, g + 8 : g + 16] = (sign * tail)[:, None] * half
    return EmbeddingSequence(frames=frames)


class TestGaussianityProfile:
    def test_gaussian_data_below_two_sample_baseline(self):
        # Fitted-Gaussian distance should not exceed the distance between two
        # independent draws of the same Gaussian (the fit adapts to the data).
        rng = np.random.default_rng(90)
        frames = rng.standard_normal((2000, 8))
        seq = EmbeddingSequence(frames=frames)
        profile = sort_profile(np.ones(8))
        result = gaussianity_profile(seq, 4, profile, subsample=256, mc_samples=256, seed=3, stride=4)
        baseline = empirical_w2(
            rng.standard_normal((256, 4)), rng.standard_normal((256, 4)), seed=3
        ) / 4
        for value in result.w2_values:
            assert value < baseline * 1.25

    def test_heavy_tailed_ordering_k2_vs_k16(self):
        seq = heavy_tailed_grouped(42)
        profile = sort_profile(np.ones(64))
        low = gaussianity_profile(seq, 2, profile, subsample=256, mc_samples=256, seed=5, stride=16)
        high = gaussianity_profile(seq, 16, profile, subsample=256, mc_samples=256, seed=5, stride=16)
        assert np.mean(low.w2_values) <= np.mean(high.w2_values)

    def test_scaling_frames_scales_profile(self):
        rng = np.random.default_rng(91)
        frames = rng.standard_normal((500, 8))
        seq = EmbeddingSequence(frames=frames)
        doubled = EmbeddingSequence(frames=2.0 * frames)
        profile = sort_profile(np.ones(8))
        base = gaussianity_profile(seq, 2, profile, subsample=128, mc_samples=128, seed=7, stride=2)
        scaled = gaussianity_profile(doubled, 2, profile, subsample=128, mc_samples=128, seed=7, stride=2)
        for v_base, v_scaled in zip(base.w2_values, scaled.w2_values):
            assert v_scaled == pytest.approx(2.0 * v_base, rel=1e-9)

    def test_records_parameters(self):
        rng = np.random.default_rng(92)
        seq = EmbeddingSequence(frames=rng.standard_normal((100, 8)))
        profile = sort_profile(np.ones(8))
        result = gaussianity_profile(seq, 4, profile, subsample=64, mc_samples=32, seed=13, stride=8)
        assert result.seed == 13
        assert result.sample_size == 32
        assert result.block_start_indices == (0, 4) or result.block_start_indices == (0,)

    def test_block_dim_must_divide(self):
        rng = np.random.default_rng(93)
        seq = EmbeddingSequence(frames=rng.standard_normal((50, 6)))
        with pytest.raises(InvalidBlockDimError):
            gaussianity_profile(seq, 4, sort_profile(np.ones(6)), seed=0)


class TestStdSpectrum:
    def test_constant_zero(self):
        seq = EmbeddingSequence(frames=np.full((10, 5), 3.0))
        assert np.allclose(std_spectrum(seq), 0.0)

    def test_single_active_dimension(self):
        frames = np.zeros((30, 6))
        frames[:, 4] = np.linspace(-1, 1, 30)
        spectrum = std_spectrum(EmbeddingSequence(frames=frames))
        assert spectrum[0] > 0
        assert np.allclose(spectrum[1:], 0.0)

    def test_descending(self):
        rng = np.random.default_rng(94)
        seq = EmbeddingSequence(frames=rng.standard_normal((100, 12)) * rng.uniform(0.1, 5.0, 12))
        spectrum = std_spectrum(seq)
        assert np.all(spectrum[:-1] >= spectrum[1:])
