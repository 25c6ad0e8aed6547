import numpy as np
import pytest

from wpclust import (
    ProjPoint,
    RatProjPoint,
    WeightMismatchError,
    act,
    normalize_dataset,
    normalize_geometric,
    normalize_rational,
    reconstruction_error,
    weighted_norm,
    weighted_pca,
)


def random_points(rng, q, n):
    d = len(q)
    return [ProjPoint(q, rng.normal(size=d) + 1j * rng.normal(size=d)) for _ in range(n)]


class TestNormalizeDataset:
    def test_geometric(self):
        pts = random_points(np.random.default_rng(0), (2, 1), 5)
        out = normalize_dataset(pts, "geometric")
        assert all(abs(weighted_norm(p) - 1) <= 1e-12 for p in out)

    def test_geometric_idempotent(self):
        pts = normalize_dataset(random_points(np.random.default_rng(1), (2, 1), 5), "geometric")
        again = normalize_dataset(pts, "geometric")
        for p, r in zip(pts, again):
            assert np.max(np.abs(p.coords - r.coords)) <= 1e-12

    def test_rational(self):
        pts = [RatProjPoint((2, 3), (4, 8)), RatProjPoint((2, 3), (1, 1))]
        out = normalize_dataset(pts, "rational")
        assert [p.coords for p in out] == [(1, 1), (1, 1)]

    def test_mode_mismatch(self):
        with pytest.raises(ValueError):
            normalize_dataset([RatProjPoint((2, 3), (1, 1))], "geometric")
        with pytest.raises(ValueError):
            normalize_dataset(random_points(np.random.default_rng(2), (2, 1), 2), "rational")
        with pytest.raises(ValueError):
            normalize_dataset([], "geometric")


class TestWeightedPCA:
    Q = (2, 4, 6, 10)

    def test_identical_points_zero_spectrum(self):
        p = ProjPoint(self.Q, [1, 1j, 2, 0.5])
        res = weighted_pca([p] * 6, 2)
        assert np.all(res.eigenvalues <= 1e-15)
        assert np.max(np.abs(res.projected)) <= 1e-12

    def test_eigensum_equals_trace(self):
        rng = np.random.default_rng(3)
        pts = random_points(rng, self.Q, 18)
        res = weighted_pca(pts, 4)
        q = np.asarray(self.Q, dtype=float)
        z = np.array([normalize_geometric(p).coords for p in pts])
        u = z * np.sqrt(q)
        uc = u - u.mean(axis=0)
        trace = float(np.sum(np.abs(uc) ** 2)) / len(pts)
        assert abs(res.eigenvalues.sum() - trace) <= 1e-8 * trace

    def test_reconstruction_error_matches_discarded(self):
        rng = np.random.default_rng(4)
        pts = random_points(rng, self.Q, 15)
        errs = []
        for k in (1, 2, 3, 4):
            res = weighted_pca(pts, k)
            err = reconstruction_error(pts, res)
            assert err == pytest.approx(res.discarded_variance, rel=1e-8, abs=1e-12)
            errs.append(err)
        assert all(errs[i] >= errs[i + 1] for i in range(len(errs) - 1))

    def test_full_rank_preserves_weighted_inner_products(self):
        rng = np.random.default_rng(5)
        pts = random_points(rng, self.Q, 12)
        res = weighted_pca(pts, 4)
        q = np.asarray(self.Q, dtype=float)
        z = np.array([normalize_geometric(p).coords for p in pts])
        uc = z * np.sqrt(q) - res.mean * np.sqrt(q)
        gram = uc @ uc.conj().T
        gram_proj = res.projected @ res.projected.conj().T
        assert np.max(np.abs(gram - gram_proj)) <= 1e-8

    def test_components_orthonormal_under_weighted_product(self):
        rng = np.random.default_rng(6)
        pts = random_points(rng, self.Q, 10)
        res = weighted_pca(pts, 3)
        q = np.asarray(self.Q, dtype=float)
        gram = (res.components * q) @ res.components.conj().T
        assert np.max(np.abs(gram - np.eye(3))) <= 1e-10

    def test_spectrum_invariant_under_global_phase(self):
        rng = np.random.default_rng(7)
        pts = random_points(rng, self.Q, 14)
        res = weighted_pca(pts, 4)
        lam = np.exp(1j * 1.234)
        res_rot = weighted_pca([act(p, lam) for p in pts], 4)
        assert np.max(np.abs(res.eigenvalues - res_rot.eigenvalues)) <= 1e-8

    def test_complex_line_fixture(self):
        # unit-phase multiples of one representative stay inside a single
        # complex line, so exactly one eigenvalue survives.
        rng = np.random.default_rng(8)
        base = normalize_geometric(ProjPoint((2, 1), rng.normal(size=2) + 1j * rng.normal(size=2)))
        pts = [ProjPoint((2, 1), np.exp(1j * t) * base.coords) for t in np.linspace(0, 2, 9)]
        res = weighted_pca(pts, 2)
        assert res.eigenvalues[0] > 1e-3
        assert res.eigenvalues[1] <= 1e-8

    def test_validation(self):
        rng = np.random.default_rng(9)
        pts = random_points(rng, (2, 1), 5)
        with pytest.raises(ValueError):
            weighted_pca(pts, 0)
        with pytest.raises(ValueError):
            weighted_pca(pts, 3)
        with pytest.raises(ValueError):
            weighted_pca(pts[:1], 1)
        with pytest.raises(WeightMismatchError):
            weighted_pca([pts[0], ProjPoint((1, 1), [1, 1])], 1)

    def test_uncentered_mode(self):
        rng = np.random.default_rng(10)
        pts = random_points(rng, (2, 1), 8)
        res = weighted_pca(pts, 2, center=False)
        assert np.all(res.mean == 0)
