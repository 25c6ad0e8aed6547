"""Scaling-infimum dissimilarities between weighted projective classes.

The raw infimum of ||lambda^q . z - mu^q . w|| over both scalings free is
identically zero (send both scalings to zero together), so the computable
definition constrains the scaling on one side to unit modulus and minimizes
over the other.  Evaluating the constrained problem in both orientations and
taking the min makes the value exactly symmetric in its arguments.

The rational analogue scans reduced fractions +-a/b up to a height bound;
the scan is exhaustive and monotone non-increasing in the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._optim import nelder_mead
from .core import (
    ProjPoint,
    RatProjPoint,
    WeightMismatchError,
    normalize_geometric,
)


@dataclass
class DissimilarityOptions:
    """Grid/refinement controls for the complex dissimilarity solver."""

    normalize_inputs: bool = True
    r_min: float = 1e-3
    r_max: float = 1e3
    r_count: int = 25
    angle_grid_count: int = 16
    refine_iters: int = 200
    tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.r_min <= 0 or self.r_max <= 0 or self.r_max < self.r_min:
            raise ValueError("radial grid bounds must be positive with r_min <= r_max")
        if self.r_count < 2 or self.angle_grid_count < 2:
            raise ValueError("grid counts must be >= 2")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


@dataclass
class RationalScanOptions:
    """Exhaustive-scan controls for the rational dissimilarity."""

    height_bound: int = 50
    include_negative: bool = True

    def __post_init__(self):
        if self.height_bound < 1:
            raise ValueError("height bound must be >= 1")


def chord_distance(p1: ProjPoint, p2: ProjPoint) -> float:
    """Euclidean distance between the unit-weighted-norm representatives.

    The cheap baseline: invariant under nothing but a shared representative
    choice, used for comparisons against the scaling-aware distances.
    """
    if p1.weights != p2.weights:
        raise WeightMismatchError("points live in different weighted spaces")
    return float(
        np.linalg.norm(normalize_geometric(p1).coords - normalize_geometric(p2).coords)
    )


def _objective(z: np.ndarray, w: np.ndarray, q: np.ndarray):
    """f(log r, theta, phi) = ||(r e^{i theta})^q . z - (e^{i phi})^q . w||."""

    def f(x: np.ndarray) -> float:
        lam_pow = np.exp((x[0] + 1j * x[1]) * q)
        mu_pow = np.exp(1j * x[2] * q)
        return float(np.linalg.norm(lam_pow * z - mu_pow * w))

    return f


def _solve_one_orientation(
    z: np.ndarray, w: np.ndarray, q: np.ndarray, opts: DissimilarityOptions
) -> float:
    """Minimize with |mu| = 1 on the w side and lambda free on the z side."""
    logr = np.linspace(math.log(opts.r_min), math.log(opts.r_max), opts.r_count)
    angles = np.linspace(0.0, 2.0 * math.pi, opts.angle_grid_count, endpoint=False)

    # Coarse grid, fully vectorized: values over (r, theta, phi).
    rq = np.exp(np.outer(logr, q))  # (R, d)
    et = np.exp(1j * np.outer(angles, q))  # (T, d)
    lam_pow = rq[:, None, :] * et[None, :, :]  # (R, T, d)
    a = lam_pow * z  # (R, T, d)
    b = et * w  # (P, d) with P = T
    diff = a[:, :, None, :] - b[None, None, :, :]
    vals = np.sqrt(np.sum(np.abs(diff) ** 2, axis=-1))

    f = _objective(z, w, q)
    identity_val = f(np.zeros(3))  # (lambda, mu) = (1, 1): plain Euclidean distance
    best = min(float(vals.min()), identity_val)

    # Refine several competing grid cells: the landscape is multimodal and
    # the best cell alone can sit in the wrong basin.
    order = np.argsort(vals.ravel(), kind="stable")[:6]
    starts = [
        np.array([logr[i], angles[j], angles[k]])
        for i, j, k in (np.unravel_index(int(ix), vals.shape) for ix in order)
    ]
    rng = np.random.default_rng(opts.seed)
    starts.append(starts[0] + rng.normal(scale=[0.3, 0.2, 0.2]))
    for x0 in starts:
        _, v = nelder_mead(f, x0, step=[0.2, 0.15, 0.15], max_iters=opts.refine_iters)
        if v < best:
            best = v
    return best


def dissimilarity(
    p1: ProjPoint, p2: ProjPoint, opts: DissimilarityOptions | None = None
) -> float:
    """Scaling-infimum dissimilarity between two complex classes.

    Never exceeds the Euclidean distance of the (optionally normalized)
    input representatives, since the identity scalings are always tried.
    Deterministic given opts; exactly symmetric by construction.
    """
    opts = opts or DissimilarityOptions()
    if p1.weights != p2.weights:
        raise WeightMismatchError("points live in different weighted spaces")
    if opts.normalize_inputs:
        p1 = normalize_geometric(p1)
        p2 = normalize_geometric(p2)
    q = p1.weights.array
    z, w = p1.coords, p2.coords
    return min(
        _solve_one_orientation(z, w, q, opts),
        _solve_one_orientation(w, z, q, opts),
    )


def _fraction_values(h: int, include_negative: bool) -> np.ndarray:
    """All reduced fractions a/b with 1 <= a, b <= h, optionally signed."""
    vals = [
        a / b
        for b in range(1, h + 1)
        for a in range(1, h + 1)
        if math.gcd(a, b) == 1
    ]
    arr = np.asarray(sorted(vals), dtype=float)
    if include_negative:
        arr = np.concatenate([-arr[::-1], arr])
    return arr


def _scan_one_orientation(
    x: np.ndarray, y: np.ndarray, q: np.ndarray, qints, lam: np.ndarray, mus
) -> float:
    lam_vecs = np.power(lam[:, None], q[None, :]) * x  # (L, d)
    best = math.inf
    for mu in mus:
        target = np.array([mu**k for k in qints]) * y
        d2 = np.sum((lam_vecs - target) ** 2, axis=1)
        m = float(d2.min())
        if m < best:
            best = m
    return best


def dissimilarity_rational(
    p1: RatProjPoint, p2: RatProjPoint, opts: RationalScanOptions | None = None
) -> float:
    """Certified minimum of ||lambda^q x - mu^q y|| over bounded-height fractions.

    Letting both scalings roam the fraction grid degenerates (lambda = mu =
    1/H shrinks every pair toward zero together), so mu is pinned to the unit
    group of the rationals, {+1, -1}: the exact analogue of the unit-modulus
    device used on the complex side.  Both orientations are evaluated and the
    smaller taken, which makes the value exactly symmetric; (1, 1) is always
    in the search set, and enlarging the height bound can only enlarge it,
    hence never increases the result.
    """
    opts = opts or RationalScanOptions()
    if p1.weights != p2.weights:
        raise WeightMismatchError("points live in different weighted spaces")
    if not (p1.normalized and p2.normalized):
        raise ValueError("inputs must be wgcd-normalized (see normalize_rational)")

    q = p1.weights.array
    qints = p1.weights.q
    x = np.asarray(p1.coords, dtype=float)
    y = np.asarray(p2.coords, dtype=float)
    lam = _fraction_values(opts.height_bound, opts.include_negative)
    mus = (1, -1) if opts.include_negative else (1,)

    best = min(
        _scan_one_orientation(x, y, q, qints, lam, mus),
        _scan_one_orientation(y, x, q, qints, lam, mus),
    )
    return math.sqrt(max(best, 0.0))


@dataclass
class ViolationReport:
    """Outcome of a triangle-inequality scan over sampled triples."""

    max_ratio: float
    argmax: tuple[int, int, int] | None
    violations: list[dict]
    trials: int
    seed: int
    tol: float
    zero_denominator_triples: int = 0

    def to_json_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "argmax": list(self.argmax) if self.argmax is not None else None,
            "violations": self.violations,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "zero_denominator_triples": self.zero_denominator_triples,
        }


def triangle_violation_scan(
    points: Sequence,
    metric: Callable[[object, object], float],
    trials: int,
    seed: int,
    tol: float = 1e-9,
) -> ViolationReport:
    """Sample triples (u, v, w) and report ratios d(u,w) / (d(u,v) + d(v,w)).

    Ratios above 1 + tol are collected as violations; triples whose
    denominator is zero are counted separately and never flagged.  Pairwise
    distances are cached, so repeated pairs cost one metric call.
    """
    n = len(points)
    if n < 3:
        raise ValueError("need at least 3 points to scan triples")
    rng = np.random.default_rng(seed)
    cache: dict[tuple[int, int], float] = {}

    def dist(i: int, j: int) -> float:
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            cache[key] = float(metric(points[key[0]], points[key[1]]))
        return cache[key]

    max_ratio = 0.0
    argmax = None
    violations: list[dict] = []
    zero_denom = 0
    for _ in range(trials):
        i, j, k = (int(v) for v in rng.choice(n, size=3, replace=False))
        d_uw = dist(i, k)
        d_uv = dist(i, j)
        d_vw = dist(j, k)
        denom = d_uv + d_vw
        if denom == 0.0:
            zero_denom += 1
            continue
        ratio = d_uw / denom
        if ratio > max_ratio:
            max_ratio = ratio
            argmax = (i, j, k)
        if ratio > 1.0 + tol:
            violations.append(
                {
                    "triple": [i, j, k],
                    "ratio": ratio,
                    "d_uw": d_uw,
                    "d_uv": d_uv,
                    "d_vw": d_vw,
                }
            )
    return ViolationReport(
        max_ratio=max_ratio,
        argmax=argmax,
        violations=violations,
        trials=trials,
        seed=seed,
        tol=tol,
        zero_denominator_triples=zero_denom,
    )
