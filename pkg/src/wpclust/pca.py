"""Dataset normalization and weighted principal component analysis.

PCA operates on lifted unit-weighted-norm representatives.  Rescaling each
coordinate by sqrt(q_k) turns the weighted inner product
<a, b>_q = sum q_k a_k conj(b_k) into the standard Hermitian one, so the
covariance is an ordinary Hermitian matrix and numpy's eigh applies; the
returned components are mapped back, orthonormal under <., .>_q.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    ProjPoint,
    RatProjPoint,
    WeightMismatchError,
    normalize_geometric,
    normalize_rational,
)


def normalize_dataset(points: Sequence, mode: str) -> list:
    """Apply the per-point canonical normalization for the given mode."""
    if not points:
        raise ValueError("dataset is empty")
    if mode == "geometric":
        if not all(isinstance(p, ProjPoint) for p in points):
            raise ValueError("geometric mode requires complex points")
        return [normalize_geometric(p) for p in points]
    if mode == "rational":
        if not all(isinstance(p, RatProjPoint) for p in points):
            raise ValueError("rational mode requires rational points")
        return [normalize_rational(p) for p in points]
    raise ValueError(f"unknown mode {mode!r}; expected 'geometric' or 'rational'")


@dataclass
class WeightedPCAResult:
    """Spectral summary of a point cloud under the weighted inner product.

    ``eigenvalues`` is the full non-increasing spectrum (all d of them,
    clamped at zero); ``components`` holds only the top-k basis vectors,
    orthonormal under <., .>_q, with ``projected`` the per-point
    coefficients against them and ``mean`` the centering vector.
    """

    k: int
    eigenvalues: np.ndarray  # (d,) full spectrum, non-increasing
    components: np.ndarray  # (k, d) complex
    projected: np.ndarray  # (N, k) complex
    mean: np.ndarray  # (d,) complex

    @property
    def retained_variance(self) -> float:
        return float(np.sum(self.eigenvalues[: self.k]))

    @property
    def discarded_variance(self) -> float:
        return float(np.sum(self.eigenvalues[self.k :]))


def weighted_pca(
    points: Sequence[ProjPoint], k: int, center: bool = True
) -> WeightedPCAResult:
    """Top-k weighted-Hermitian PCA of geometrically normalized points.

    Mean weighted squared reconstruction residual equals the discarded
    eigenvalue mass; with k = d the centered weighted inner products of the
    points are reproduced exactly by the coefficient vectors.
    """
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    weights = points[0].weights
    if any(p.weights != weights for p in points):
        raise WeightMismatchError("points live in different weighted spaces")
    d = len(weights)
    if not 1 <= k <= d:
        raise ValueError(f"k must be in [1, {d}], got {k}")

    normalized = [normalize_geometric(p) for p in points]
    z = np.array([p.coords for p in normalized])  # (N, d)
    sq = np.sqrt(weights.array)
    u = z * sq
    mean_u = u.mean(axis=0) if center else np.zeros(d, dtype=complex)
    uc = u - mean_u

    # Hermitian with M v = lambda v maximizing E|<u, v>|^2 for <a, b> = a.conj(b).
    cov = (uc.T @ uc.conj()) / len(points)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order].real, 0.0, None)
    evecs = evecs[:, order]

    components_u = evecs[:, :k].T  # (k, d), orthonormal rows
    projected = uc @ components_u.conj().T  # (N, k)
    return WeightedPCAResult(
        k=k,
        eigenvalues=evals,
        components=components_u / sq,
        projected=projected,
        mean=mean_u / sq,
    )


def reconstruction_error(points: Sequence[ProjPoint], result: WeightedPCAResult) -> float:
    """Mean weighted squared residual of projecting onto the retained basis."""
    weights = points[0].weights
    sq = np.sqrt(weights.array)
    z = np.array([normalize_geometric(p).coords for p in points])
    uc = z * sq - result.mean * sq
    approx = result.projected @ (result.components * sq)
    resid = uc - approx
    return float(np.mean(np.sum(np.abs(resid) ** 2, axis=1)))
