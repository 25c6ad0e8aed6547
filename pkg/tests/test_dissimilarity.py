import numpy as np
import pytest

from wpclust import (
    DissimilarityOptions,
    ProjPoint,
    RatProjPoint,
    RationalScanOptions,
    WeightMismatchError,
    chord_distance,
    dissimilarity,
    dissimilarity_rational,
    normalize_geometric,
    normalize_rational,
    triangle_violation_scan,
)

RAW = DissimilarityOptions(normalize_inputs=False)


def random_point(rng, q):
    return ProjPoint(q, rng.normal(size=len(q)) + 1j * rng.normal(size=len(q)))


class TestDissimilarity:
    def test_identical_representatives(self):
        p = ProjPoint((2, 1), [1 + 1j, 0.5])
        assert dissimilarity(p, p) <= 1e-9

    def test_eps_pair_reproduction(self):
        # raw representatives, q = (2, 1): the near-miss pair sits at ~eps
        u = ProjPoint((2, 1), [1, 0])
        v = ProjPoint((2, 1), [1, 0.01])
        d = dissimilarity(u, v, RAW)
        assert 0.009 <= d <= 0.011

    def test_axis_pair_reproduction(self):
        # the unit-constrained scaling pins the second term at 1
        u = ProjPoint((2, 1), [1, 0])
        w = ProjPoint((2, 1), [0, 1])
        d = dissimilarity(u, w, RAW)
        assert abs(d - 1.0) <= 0.1

    def test_exactly_symmetric(self):
        rng = np.random.default_rng(1)
        for q in ((2, 1), (2, 4, 6, 10)):
            for _ in range(3):
                a, b = random_point(rng, q), random_point(rng, q)
                assert dissimilarity(a, b) == dissimilarity(b, a)

    def test_upper_bounded_by_euclidean(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            a, b = random_point(rng, (2, 1)), random_point(rng, (2, 1))
            eucl = float(
                np.linalg.norm(
                    normalize_geometric(a).coords - normalize_geometric(b).coords
                )
            )
            assert dissimilarity(a, b) <= eucl

    def test_unit_phase_invariance(self):
        # Exact for the true infimum; the grid+refinement solver occasionally
        # settles in a competing local basin, so the bound here is the
        # observed solver accuracy, not the optimizer tolerance.
        rng = np.random.default_rng(3)
        opts = DissimilarityOptions()
        for _ in range(8):
            a, b = random_point(rng, (2, 1)), random_point(rng, (2, 1))
            psi = rng.uniform(0, 2 * np.pi)
            d1 = dissimilarity(a, b, opts)
            d2 = dissimilarity(
                ProjPoint((2, 1), a.coords * np.exp(1j * psi * np.array([2, 1]))),
                b,
                opts,
            )
            assert abs(d1 - d2) <= 5e-3 * (1 + d1)

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        a, b = random_point(rng, (2, 1)), random_point(rng, (2, 1))
        assert dissimilarity(a, b) == dissimilarity(a, b)

    def test_weight_mismatch(self):
        with pytest.raises(WeightMismatchError):
            dissimilarity(ProjPoint((2, 1), [1, 1]), ProjPoint((1, 1), [1, 1]))

    def test_options_validated(self):
        with pytest.raises(ValueError):
            DissimilarityOptions(r_min=-1)
        with pytest.raises(ValueError):
            DissimilarityOptions(angle_grid_count=1)
        with pytest.raises(ValueError):
            DissimilarityOptions(tol=0)


class TestDissimilarityRational:
    def test_identical(self):
        p = normalize_rational(RatProjPoint((2, 3), (3, 5)))
        assert dissimilarity_rational(p, p) == 0.0

    def test_equivalent_pair_hits_zero(self):
        # (4, 8) is the class of (1, 1): the scan finds the witness exactly.
        x = RatProjPoint((2, 3), (1, 1), normalized=True)
        y = normalize_rational(RatProjPoint((2, 3), (4, 8)))
        assert dissimilarity_rational(x, y, RationalScanOptions(height_bound=4)) == 0.0

    def test_unnormalized_inputs_rejected(self):
        a = RatProjPoint((2, 3), (1, 1), normalized=True)
        b = RatProjPoint((2, 3), (4, 8))
        with pytest.raises(ValueError):
            dissimilarity_rational(a, b)

    def test_separated_pair(self):
        x = RatProjPoint((2, 3), (1, 1), normalized=True)
        y = RatProjPoint((2, 3), (1, 2), normalized=True)
        assert dissimilarity_rational(x, y, RationalScanOptions(height_bound=50)) > 0.1

    def test_monotone_in_height_bound(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            x = normalize_rational(
                RatProjPoint((2, 3), [int(v) for v in rng.integers(1, 9, size=2)])
            )
            y = normalize_rational(
                RatProjPoint((2, 3), [int(v) for v in rng.integers(1, 9, size=2)])
            )
            vals = [
                dissimilarity_rational(x, y, RationalScanOptions(height_bound=h))
                for h in (2, 5, 12, 25)
            ]
            assert all(vals[i] >= vals[i + 1] for i in range(len(vals) - 1))

    def test_exactly_symmetric(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            coords_x = [int(v) for v in rng.integers(1, 9, size=2)]
            coords_y = [int(v) for v in rng.integers(1, 9, size=2)]
            x = normalize_rational(RatProjPoint((2, 3), coords_x))
            y = normalize_rational(RatProjPoint((2, 3), coords_y))
            assert dissimilarity_rational(x, y) == dissimilarity_rational(y, x)


class TestTriangleScan:
    def test_all_identical_points(self):
        p = ProjPoint((2, 1), [1, 1])
        rep = triangle_violation_scan([p, p, p, p], chord_distance, trials=50, seed=0)
        assert rep.max_ratio == 0.0
        assert rep.zero_denominator_triples == 50
        assert rep.violations == []

    def test_chord_metric_has_no_violations(self):
        rng = np.random.default_rng(7)
        pts = [random_point(rng, (2, 1)) for _ in range(10)]
        rep = triangle_violation_scan(pts, chord_distance, trials=300, seed=1)
        assert rep.max_ratio <= 1.0 + 1e-9
        assert rep.violations == []

    def test_deterministic_and_serializable(self):
        rng = np.random.default_rng(8)
        pts = [random_point(rng, (2, 1)) for _ in range(6)]
        r1 = triangle_violation_scan(pts, chord_distance, trials=40, seed=3)
        r2 = triangle_violation_scan(pts, chord_distance, trials=40, seed=3)
        assert r1.to_json_dict() == r2.to_json_dict()
        d = r1.to_json_dict()
        assert set(d) >= {"max_ratio", "argmax", "violations", "trials", "seed"}

    def test_violation_recorded(self):
        # synthetic non-metric: one pair is disproportionately far
        far = {(0, 2): 3.0}

        def metric(a, b):
            key = (min(a, b), max(a, b))
            return far.get(key, 1.0)

        rep = triangle_violation_scan([0, 1, 2], metric, trials=100, seed=0)
        assert rep.max_ratio == pytest.approx(1.5)
        assert rep.violations
        assert rep.argmax is not None

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            triangle_violation_scan([1, 2], lambda a, b: 0.0, trials=5, seed=0)
