"""Seeded synthetic data generators and the degree-zero moduli invariant."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import (
    ProjPoint,
    RatProjPoint,
    Weights,
    normalize_geometric,
    normalize_rational,
)

MODULI_WEIGHTS = (2, 4, 6, 10)


class UndefinedInvariantError(ValueError):
    """The invariant's denominator coordinate vanishes."""


@dataclass
class LabeledDataset:
    points: list
    labels: list[int]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.points) != len(self.labels):
            raise ValueError("points and labels must have equal length")


def gen_synthetic_clusters(
    q: Weights | Iterable[int],
    n_clusters: int,
    per_cluster: int,
    spread: float,
    seed: int,
) -> LabeledDataset:
    """Gaussian blobs around random unit-weighted-norm centers.

    Members are center + complex Gaussian noise of scale ``spread`` in lifted
    coordinates, re-normalized to unit weighted norm; labels follow centers.
    """
    weights = q if isinstance(q, Weights) else Weights(q)
    if n_clusters < 1 or per_cluster < 1:
        raise ValueError("cluster counts must be >= 1")
    if spread <= 0:
        raise ValueError("spread must be positive")
    d = len(weights)
    rng = np.random.default_rng(seed)

    points: list[ProjPoint] = []
    labels: list[int] = []
    for c in range(n_clusters):
        center = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        center = normalize_geometric(ProjPoint(weights, center)).coords
        for _ in range(per_cluster):
            noise = spread * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
            member = center + noise
            if not np.any(member != 0):
                member = center
            points.append(normalize_geometric(ProjPoint(weights, member)))
            labels.append(c)
    meta = {
        "generator": "synthetic_clusters",
        "weights": list(weights.q),
        "n_clusters": n_clusters,
        "per_cluster": per_cluster,
        "spread": spread,
        "seed": seed,
    }
    return LabeledDataset(points, labels, meta)


def gen_moduli_points(count: int, height_bound: float, seed: int) -> LabeledDataset:
    """Distinct wgcd-normalized integer points of the (2, 4, 6, 10) space.

    Coordinates are sampled uniformly in |x_i| <= height_bound**q_i, the box
    the height definition carves out, so every emitted point has weighted
    height at most height_bound after normalization.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if height_bound < 1:
        raise ValueError("height bound must be >= 1")
    weights = Weights(MODULI_WEIGHTS)
    bounds = [int(height_bound**qi) for qi in weights.q]
    rng = np.random.default_rng(seed)

    points: list[RatProjPoint] = []
    seen: set[tuple[int, ...]] = set()
    # Bail out when the box is saturated: a long streak of duplicates means
    # (nearly) every class under the bound has already been emitted.
    stale = 0
    max_stale = 20_000
    while len(points) < count:
        coords = tuple(int(rng.integers(-b, b + 1)) for b in bounds)
        if all(x == 0 for x in coords):
            continue
        p = normalize_rational(RatProjPoint(weights, coords))
        if p.coords in seen:
            stale += 1
            if stale >= max_stale:
                raise ValueError(
                    f"found only {len(points)} distinct points with height bound "
                    f"{height_bound}; lower count or raise the bound"
                )
            continue
        stale = 0
        seen.add(p.coords)
        points.append(p)
    meta = {
        "generator": "moduli_points",
        "weights": list(weights.q),
        "count": count,
        "height_bound": height_bound,
        "seed": seed,
    }
    return LabeledDataset(points, [0] * len(points), meta)


def absolute_invariant_t1(p: RatProjPoint) -> float:
    """x_0**5 / x_3 on the (2, 4, 6, 10) space, exact in rational arithmetic.

    Degree-zero under the scaling action: both numerator and denominator pick
    up lambda**10, so the value is independent of the representative.
    """
    if p.weights.q != MODULI_WEIGHTS:
        raise ValueError(f"invariant defined on weights {MODULI_WEIGHTS}, got {p.weights.q}")
    if p.coords[3] == 0:
        raise UndefinedInvariantError("denominator coordinate x_3 is zero")
    return float(Fraction(p.coords[0] ** 5, p.coords[3]))
