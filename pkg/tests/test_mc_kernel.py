import math

import numpy as np
import pytest

from maternact.activations import MaternActivation
from maternact.kernels import EnvelopeParams, MaternParams, MatNNKernel
from maternact.mc_kernel import (
    BiasPrior,
    BinaryWhite,
    GaussianWeights,
    RandomFeatureConfig,
    calibrate_matnn_scale,
    estimate_kernel,
    kernel_curve,
    mc_gram,
    sample_features,
)

ACT32 = MaternActivation(1.5, 1.0)


def grid_1d(lo=-4.0, hi=4.0, n=161):
    return [np.array([v]) for v in np.linspace(lo, hi, n)]


class TestSampling:
    def test_deterministic(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 512, seed=7)
        w1, b1 = sample_features(cfg, 3)
        w2, b2 = sample_features(cfg, 3)
        assert np.array_equal(w1, w2) and np.array_equal(b1, b2)

    def test_binary_support(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 4096, seed=1)
        w, _ = sample_features(cfg, 2)
        assert set(np.unique(w)) == {-1.0, 1.0}

    def test_gaussian_mean(self):
        cfg = RandomFeatureConfig(GaussianWeights(1.0), BiasPrior(1.0), 100_000, seed=2)
        w, _ = sample_features(cfg, 1)
        assert abs(w.mean()) <= 0.02  # CLT bound 3/sqrt(K) ~ 0.0095

    def test_validation(self):
        with pytest.raises(ValueError):
            RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 0, 0)
        with pytest.raises(ValueError):
            GaussianWeights(0.0)
        with pytest.raises(ValueError):
            BiasPrior(-1.0)
        with pytest.raises(ValueError):
            sample_features(RandomFeatureConfig(), 0)


class TestEstimate:
    def test_diagonal_nonnegative(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 2000, seed=3)
        assert estimate_kernel(cfg, ACT32, [0.7], [0.7]) >= 0.0

    def test_symmetry(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 2000, seed=3)
        assert estimate_kernel(cfg, ACT32, [0.5], [1.5]) == estimate_kernel(
            cfg, ACT32, [1.5], [0.5]
        )

    def test_dim_mismatch(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 100, seed=0)
        with pytest.raises(ValueError):
            estimate_kernel(cfg, ACT32, [0.0, 1.0], [0.0])

    def test_composite_kernel_agreement(self):
        # the envelope * Matern * envelope model tracks the true network
        # kernel only approximately: at K=10^4 (seed 0) the pointwise gap
        # on the >0.05 region is ~9% while the gap relative to the curve
        # scale stays under 5%
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 10_000, seed=0)
        grid = grid_1d()
        mc = kernel_curve(cfg, ACT32, [0.0], grid)
        scale = calibrate_matnn_scale(ACT32, BiasPrior(1.0), BinaryWhite(), 1, 100_000, 1)
        exact_kernel = MatNNKernel(MaternParams(1.5, 1.0), EnvelopeParams(1.0, 1.0), scale)
        exact = np.array([exact_kernel([0.0], g) for g in grid])
        mask = exact > 0.05
        assert mask.sum() > 30
        dev = np.abs(mc[mask] - exact[mask])
        assert np.max(dev / exact[mask]) <= 0.12
        assert np.max(dev) / scale <= 0.05


class TestCurve:
    def test_single_point_matches_estimate(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 3000, seed=5)
        ref = np.array([0.3])
        curve = kernel_curve(cfg, ACT32, ref, [ref])
        assert curve.shape == (1,)
        assert curve[0] == estimate_kernel(cfg, ACT32, ref, ref)

    def test_grid_reorder_permutes(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 3000, seed=5)
        grid = grid_1d(n=17)
        curve = kernel_curve(cfg, ACT32, [0.0], grid)
        perm = np.random.default_rng(0).permutation(len(grid))
        permuted = kernel_curve(cfg, ACT32, [0.0], [grid[i] for i in perm])
        assert np.array_equal(permuted, curve[perm])

    def test_binary_vs_gaussian_weights(self):
        # same smoothness near the origin, clearly different tails
        grid = grid_1d()
        xs = np.linspace(-4.0, 4.0, 161)
        binary = kernel_curve(
            RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 100_000, 11), ACT32, [0.0], grid
        )
        gauss = kernel_curve(
            RandomFeatureConfig(GaussianWeights(1.0), BiasPrior(1.0), 100_000, 12),
            ACT32, [0.0], grid,
        )
        near = np.abs(xs) <= 0.25
        assert np.max(np.abs(binary[near] - gauss[near]) / binary[near]) <= 0.10
        tails = np.abs(xs) >= 2.0
        assert np.max(np.abs(binary[tails] - gauss[tails]) / np.maximum(binary[tails], 1e-12)) > 0.5


class TestStatistics:
    def test_two_seed_difference_within_standard_error(self):
        grid = grid_1d(n=81)
        c1, se1 = kernel_curve(
            RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 10_000, 21),
            ACT32, [0.0], grid, return_se=True,
        )
        c2, se2 = kernel_curve(
            RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 10_000, 22),
            ACT32, [0.0], grid, return_se=True,
        )
        rms_diff = math.sqrt(float(np.mean((c1 - c2) ** 2)))
        rms_se = math.sqrt(float(np.mean(se1**2 + se2**2)))
        assert rms_diff <= 2.0 * rms_se

    def test_convergence_in_k(self):
        grid = grid_1d(n=81)
        scale = calibrate_matnn_scale(ACT32, BiasPrior(1.0), BinaryWhite(), 1, 100_000, 999)
        composite = MatNNKernel(MaternParams(1.5, 1.0), EnvelopeParams(1.0, 1.0), scale)
        composite_curve = np.array([composite([0.0], g) for g in grid])
        # reference for the scaling law: the *true* kernel via a huge draw
        # (the composite model has a systematic few-1e-3 RMS offset that
        # floors the error at large K)
        truth = kernel_curve(
            RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 2_000_000, 4242),
            ACT32, [0.0], grid,
        )
        rms_eq, rms_truth = [], []
        for K in (1_000, 10_000, 100_000):
            per_seed_eq, per_seed_truth = [], []
            for seed in range(10):
                c = kernel_curve(
                    RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), K, 100 + seed),
                    ACT32, [0.0], grid,
                )
                per_seed_eq.append(np.mean((c - composite_curve) ** 2))
                per_seed_truth.append(np.mean((c - truth) ** 2))
            rms_eq.append(math.sqrt(float(np.mean(per_seed_eq))))
            rms_truth.append(math.sqrt(float(np.mean(per_seed_truth))))
        # monotone decrease against the composite reference
        assert rms_eq[0] > rms_eq[1] >= rms_eq[2] * 0.95
        # 1/sqrt(10) per decade within a factor of two, against the truth
        for a, b in zip(rms_truth, rms_truth[1:]):
            assert math.sqrt(10.0) / 2.0 <= a / b <= math.sqrt(10.0) * 2.0


class TestMcGram:
    def test_positive_semidefinite(self):
        cfg = RandomFeatureConfig(BinaryWhite(), BiasPrior(1.0), 500, seed=9)
        X = np.linspace(-3.0, 3.0, 25)[:, None]
        gram = mc_gram(cfg, ACT32, X)
        assert np.allclose(gram, gram.T)
        assert np.linalg.eigvalsh(gram).min() >= -1e-7

    def test_calibration_positive(self):
        scale = calibrate_matnn_scale(ACT32, BiasPrior(1.0), n_features=20_000, seed=0)
        assert scale > 0.0
