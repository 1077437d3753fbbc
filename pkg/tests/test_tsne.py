import math

import numpy as np
import pytest
from scipy.cluster.vq import kmeans2

from iropskit import _tsne_core
from iropskit.dimred import (
    TsneParams,
    active_backend,
    joint_affinities,
    perplexity_calibration,
    tsne_embed,
)
from iropskit.dimred import _tsne_numpy
from iropskit.errors import ValidationError

BACKENDS = [_tsne_numpy, _tsne_core]


def three_clusters(n_per=100, seed=0, spread=0.5):
    rng = np.random.default_rng(seed)
    centers = np.array(
        [[0, 0, 0, 0, 0], [10, 0, 0, 0, 0], [0, 10, 0, 0, 0]], dtype=float
    )
    labels = np.repeat([0, 1, 2], n_per)
    x = centers[labels] + spread * rng.standard_normal((3 * n_per, 5))
    return x, labels


def cluster_purity(embedding, labels, k, seed=1):
    _, assign = kmeans2(embedding, k, seed=seed, minit="++")
    return sum(np.bincount(labels[assign == c]).max() for c in range(k)) / len(labels)


class TestPerplexityCalibration:
    def test_two_equidistant_neighbors(self):
        sigma, p = perplexity_calibration(np.array([4.0, 4.0]), 2.0)
        assert p == pytest.approx([0.5, 0.5])
        assert sigma > 0

    def test_entropy_matches_target(self):
        rng = np.random.default_rng(1)
        row = rng.uniform(0.5, 30.0, size=99)
        for perplexity in (5.0, 12.0, 25.0):
            _, p = perplexity_calibration(row, perplexity)
            entropy = -(p * np.log2(p)).sum()
            assert entropy == pytest.approx(math.log2(perplexity), abs=1e-4)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_distance_rescaling_rescales_sigma(self):
        rng = np.random.default_rng(2)
        row = rng.uniform(0.5, 10.0, size=50)
        sigma1, p1 = perplexity_calibration(row, 10.0)
        c = 7.3
        sigma2, p2 = perplexity_calibration(c * row, 10.0)
        assert sigma2 / sigma1 == pytest.approx(math.sqrt(c), rel=1e-3)
        assert np.abs(p1 - p2).max() <= 1e-8

    def test_unattainable_perplexity(self):
        with pytest.raises(ValidationError):
            perplexity_calibration(np.array([1.0, 2.0, 3.0]), 9.0)


class TestAffinities:
    def test_symmetric_unit_sum(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((40, 4))
        p = joint_affinities(x, 10.0)
        assert np.abs(p - p.T).max() == 0.0
        assert p.sum() == pytest.approx(1.0, abs=1e-9)
        assert (np.diag(p) == 0).all()


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.backend_name())
class TestKernels:
    def test_kl_zero_when_p_equals_q(self, backend):
        rng = np.random.default_rng(4)
        y = rng.standard_normal((30, 2))
        # construct P := Q(y); the divergence and gradient must vanish
        sq = ((y[:, None, :] - y[None, :, :]) ** 2).sum(-1)
        num = 1.0 / (1.0 + sq)
        np.fill_diagonal(num, 0.0)
        p = num / num.sum()
        kl = backend.kl_divergence(p, y)
        grad = np.asarray(backend.gradient(p, y))
        assert kl == pytest.approx(0.0, abs=1e-12)
        assert np.abs(grad).max() <= 1e-12

    def test_kl_nonnegative(self, backend):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((25, 3))
        p = joint_affinities(x, 7.0)
        for seed in range(3):
            y = np.random.default_rng(seed).standard_normal((25, 2))
            assert backend.kl_divergence(p, y) >= 0.0

    def test_gradient_matches_finite_differences(self, backend):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((20, 4))
        p = joint_affinities(x, 5.0)
        y = rng.standard_normal((20, 2))
        grad = np.asarray(backend.gradient(p, y))
        fd = np.zeros_like(y)
        h = 1e-6
        for i in range(20):
            for c in range(2):
                y_plus = y.copy()
                y_plus[i, c] += h
                y_minus = y.copy()
                y_minus[i, c] -= h
                fd[i, c] = (
                    backend.kl_divergence(p, y_plus) - backend.kl_divergence(p, y_minus)
                ) / (2 * h)
        rel = np.linalg.norm(grad - fd) / np.linalg.norm(fd)
        assert rel <= 1e-4

    def test_backends_agree(self, backend):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((30, 3))
        p = joint_affinities(x, 8.0)
        y = rng.standard_normal((30, 2))
        kl_ref = _tsne_numpy.kl_divergence(p, y)
        grad_ref = _tsne_numpy.gradient(p, y)
        assert backend.kl_divergence(p, y) == pytest.approx(kl_ref, rel=1e-12)
        assert np.abs(np.asarray(backend.gradient(p, y)) - grad_ref).max() <= 1e-10


class TestEmbed:
    def test_cluster_recovery(self):
        x, labels = three_clusters(seed=0)
        result = tsne_embed(x, TsneParams(perplexity=30, n_iter=600, seed=2))
        assert cluster_purity(result.embedding, labels, 3) >= 0.9

    def test_final_kl_below_first_post_exaggeration(self):
        x, _ = three_clusters(n_per=50, seed=1)
        result = tsne_embed(x, TsneParams(perplexity=20, n_iter=500, seed=3))
        post = [kl for it, kl in result.kl_trace if it > 250]
        assert result.final_kl <= post[0]
        assert all(kl >= 0 for _, kl in result.kl_trace)

    def test_deterministic_given_seed(self):
        x, _ = three_clusters(n_per=20, seed=2)
        a = tsne_embed(x, TsneParams(perplexity=10, n_iter=300, seed=9))
        b = tsne_embed(x, TsneParams(perplexity=10, n_iter=300, seed=9))
        assert a.embedding.tobytes() == b.embedding.tobytes()
        assert a.kl_trace == b.kl_trace

    def test_identical_rows_rejected(self):
        x = np.ones((12, 3))
        with pytest.raises(ValidationError):
            tsne_embed(x, TsneParams(perplexity=3))

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValidationError):
            tsne_embed(np.random.default_rng(0).standard_normal((5, 2)))

    def test_perplexity_range_enforced(self):
        x = np.random.default_rng(0).standard_normal((30, 3))
        with pytest.raises(ValidationError):
            tsne_embed(x, TsneParams(perplexity=11.0))  # > (n-1)/3

    def test_backend_recorded(self):
        x, _ = three_clusters(n_per=10, seed=3)
        result = tsne_embed(x, TsneParams(perplexity=5, n_iter=50, seed=0))
        assert result.backend == active_backend()
        assert result.backend in ("compiled", "numpy")


class TestWeatherSilhouette:
    def test_code_silhouette_beats_permutation(self, weather_dataset_300):
        from iropskit.feature_pipeline import (
            ScalerMethod,
            apply_scaler,
            delay_code_labels,
            engineer_features,
            fit_scaler,
        )

        fm = engineer_features(weather_dataset_300)
        labels = np.array(delay_code_labels(weather_dataset_300))
        model = fit_scaler(fm.values, ScalerMethod.RANGE)
        scaled = apply_scaler(model, fm.values)
        result = tsne_embed(scaled, TsneParams(perplexity=30, n_iter=600, seed=2))

        def silhouette(points, labs):
            d = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(-1))
            values = []
            for i in range(len(points)):
                same = labs == labs[i]
                same[i] = False
                a = d[i][same].mean()
                b = min(d[i][labs == other].mean() for other in set(labs) if other != labs[i])
                values.append((b - a) / max(a, b))
            return float(np.mean(values))

        true_score = silhouette(result.embedding, labels)
        permuted = np.random.default_rng(5).permutation(labels)
        assert true_score > silhouette(result.embedding, permuted)
