import numpy as np
import pytest

from iropskit.dimred import pca_fit, pca_transform
from iropskit.errors import ValidationError


def random_orthogonal(m, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


class TestFit:
    def test_line_degenerate_data(self):
        t = np.linspace(-1, 1, 50)
        x = np.column_stack([t, 2.0 * t])
        model = pca_fit(x, 2)
        assert model.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-9)
        assert model.explained_variance_ratio[1] == pytest.approx(0.0, abs=1e-9)

    def test_isotropic_gaussian_ratios(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((5000, 6))
        model = pca_fit(x, 6)
        assert model.explained_variance_ratio == pytest.approx(
            np.full(6, 1 / 6), abs=0.02
        )

    def test_orthonormal_components(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((200, 8)) @ np.diag([5, 4, 3, 2, 1, 1, 1, 1])
        model = pca_fit(x, 5)
        gram = model.components @ model.components.T
        assert np.abs(gram - np.eye(5)).max() <= 1e-8

    def test_eigenvalues_non_increasing_and_nonnegative(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((100, 7))
        model = pca_fit(x, 7)
        assert (np.diff(model.eigenvalues) <= 1e-12).all()
        assert (model.eigenvalues >= 0).all()

    def test_d_out_of_range(self):
        x = np.random.default_rng(0).standard_normal((10, 4))
        for d in (0, 5, 10):
            with pytest.raises(ValidationError):
                pca_fit(x, d)

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((60, 5))
        a = pca_fit(x, 3)
        b = pca_fit(x, 3)
        assert np.array_equal(a.components, b.components)
        for row in a.components:
            assert row[np.argmax(np.abs(row))] > 0

    def test_rotation_invariant_spectrum(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((300, 6)) @ np.diag([4, 3, 2, 1, 0.5, 0.25])
        q = random_orthogonal(6, seed=1)
        before = pca_fit(x, 6).eigenvalues
        after = pca_fit(x @ q, 6).eigenvalues
        assert np.abs(before - after).max() <= 1e-8


class TestTransform:
    def test_mean_row_maps_to_origin(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((40, 5))
        model = pca_fit(x, 3)
        y = pca_transform(model, x.mean(axis=0, keepdims=True))
        assert np.abs(y).max() <= 1e-12

    def test_full_rank_reconstruction(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((50, 6))
        model = pca_fit(x, 6)
        y = pca_transform(model, x)
        reconstructed = model.mean + y @ model.components
        assert np.abs(reconstructed - x).max() <= 1e-8

    def test_transformed_columns_uncorrelated(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((500, 5)) @ rng.standard_normal((5, 5))
        model = pca_fit(x, 5)
        y = pca_transform(model, x)
        cov = np.cov(y, rowvar=False)
        off_diag = cov - np.diag(np.diag(cov))
        assert np.abs(off_diag).max() < 1e-6

    def test_dimension_mismatch(self):
        x = np.random.default_rng(0).standard_normal((20, 4))
        model = pca_fit(x, 2)
        with pytest.raises(ValidationError):
            pca_transform(model, x[:, :3])
