"""Finsler norm, discrete path lengths, and geodesic distances.

The tangent-space norm at a representative z with velocity v is

    F(z, v) = sqrt(A) * C / B,
    A = sum q_k |v_k|^2,   B = sum q_k |z_k|^2,   C = |sum q_k z_k conj(v_k)|,

implemented exactly as displayed, which makes it 2-homogeneous in v (the
associated length functional is therefore parameterization-dependent; paths
use fixed uniform parameter spacing so the objective is well defined).

Geodesic distances are computed by minimizing the midpoint-rule discrete
length of a lifted path over its interior nodes, with numerically estimated
gradients and backtracking descent, best-of over seeded multistarts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    ProjPoint,
    RatProjPoint,
    Tangent,
    WeightMismatchError,
    Weights,
    normalize_geometric,
)

# Steps that bring any node's weighted norm below this are rejected.
_NODE_NORM_FLOOR = 1e-6


class DegeneratePathError(RuntimeError):
    """A path node or midpoint collapsed onto the excluded origin."""


@dataclass
class PiecewisePath:
    """Ordered lifted nodes of a discretized curve; M = len(nodes) - 1 segments."""

    weights: Weights
    nodes: np.ndarray  # (M+1, d) complex

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex)
        if self.nodes.ndim != 2 or self.nodes.shape[0] < 2:
            raise ValueError("a path needs at least two nodes")
        if self.nodes.shape[1] != len(self.weights):
            raise ValueError("node width does not match weight count")
        if np.any(np.all(self.nodes == 0, axis=1)):
            raise ValueError("path nodes must be nonzero vectors")

    @property
    def segments(self) -> int:
        return self.nodes.shape[0] - 1


@dataclass
class GeodesicOptions:
    segments: int = 16
    max_iters: int = 500
    step: float = 0.1
    tol: float = 1e-8
    multistarts: int = 3
    seed: int = 0
    record_energies: bool = False

    def __post_init__(self):
        if self.segments < 2:
            raise ValueError("need at least 2 segments")
        if self.max_iters < 1:
            raise ValueError("need at least 1 iteration")
        if self.tol <= 0 or self.step <= 0:
            raise ValueError("step and tol must be positive")
        if self.multistarts < 1:
            raise ValueError("need at least 1 start")


@dataclass
class GeodesicResult:
    distance: float
    path: PiecewisePath
    converged: bool
    iterations: int
    energies: list[float] | None = None


def _norm_value(q: np.ndarray, z: np.ndarray, v: np.ndarray) -> float:
    a = float(np.sum(q * np.abs(v) ** 2))
    b = float(np.sum(q * np.abs(z) ** 2))
    c = float(np.abs(np.sum(q * z * np.conj(v))))
    return math.sqrt(a) * c / b


def finsler_norm(base: ProjPoint, v: Tangent) -> float:
    """sqrt(A) * C / B for the weighted quantities A, B, C above."""
    if v.base is not base:
        if v.base.weights != base.weights or not np.array_equal(
            v.base.coords, base.coords
        ):
            raise ValueError("tangent vector is attached to a different base point")
    return _norm_value(base.weights.array, base.coords, v.v)


def finsler_norm_rational(base: RatProjPoint, v: Sequence[float]) -> float:
    """Same algebra on a wgcd-normalized integer representative; all real."""
    if not base.normalized:
        raise ValueError("base must be wgcd-normalized (see normalize_rational)")
    vv = np.asarray([float(c) for c in v], dtype=float)
    if vv.shape[0] != len(base.weights):
        raise ValueError("tangent length does not match base point")
    x = np.asarray(base.coords, dtype=float)
    return _norm_value(base.weights.array, x, vv)


def _segment_lengths(batch: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Midpoint-rule discrete lengths for a (B, M+1, d) batch of lifted paths.

    Velocity on segment s is the finite difference scaled by M (uniform
    parameter spacing 1/M); a path with an exactly-zero midpoint gets +inf.
    """
    m = batch.shape[1] - 1
    mids = 0.5 * (batch[:, :-1, :] + batch[:, 1:, :])
    deltas = (batch[:, 1:, :] - batch[:, :-1, :]) * m
    a = np.sum(q * np.abs(deltas) ** 2, axis=2)
    b = np.sum(q * np.abs(mids) ** 2, axis=2)
    c = np.abs(np.sum(q * mids * np.conj(deltas), axis=2))
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(b > 0.0, np.sqrt(a) * c / np.where(b > 0.0, b, 1.0), np.inf)
        f = np.where((a == 0.0) & (b > 0.0), 0.0, f)
    return np.sum(f, axis=1) / m


def path_length(path: PiecewisePath) -> float:
    """Discrete length of one path; raises on a zero midpoint."""
    q = path.weights.array
    val = float(_segment_lengths(path.nodes[None, :, :], q)[0])
    if not math.isfinite(val):
        raise DegeneratePathError("a segment midpoint is the zero vector")
    return val


def _align_phase(z: np.ndarray, w: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Rotate w by the unit scalar (grid-searched) maximizing Re<z, w'>_q."""
    c = q * z * np.conj(w)
    psis = np.linspace(0.0, 2.0 * math.pi, 1024, endpoint=False)
    vals = np.real(np.exp(-1j * np.outer(psis, q)) @ c)
    psi = psis[int(np.argmax(vals))]
    return np.exp(1j * psi * q) * w


def _align_sign(x: np.ndarray, y: np.ndarray, qints: Sequence[int], q: np.ndarray) -> np.ndarray:
    """Real analogue of phase alignment: act by -1 if it increases <x, y'>_q."""
    flip = np.array([(-1.0) ** k for k in qints])
    if float(np.sum(q * x * (flip * y))) > float(np.sum(q * x * y)):
        return flip * y
    return y


def _node_norms(batch: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(q * np.abs(batch) ** 2, axis=-1))


class _PathProblem:
    """Descent workspace: endpoints fixed, interior nodes as a flat real vector."""

    def __init__(self, z, w, q, segments, real_mode):
        self.z = z
        self.w = w
        self.q = q
        self.m = segments
        self.d = z.shape[0]
        self.real_mode = real_mode
        self.n_int = segments - 1
        self.half = self.n_int * self.d
        self.dof = self.half if real_mode else 2 * self.half

    def chord(self) -> np.ndarray:
        t = np.linspace(0.0, 1.0, self.m + 1)[:, None]
        return (1.0 - t) * self.z + t * self.w

    def pack(self, nodes: np.ndarray) -> np.ndarray:
        interior = nodes[1:-1, :]
        if self.real_mode:
            return interior.real.ravel().copy()
        return np.concatenate([interior.real.ravel(), interior.imag.ravel()])

    def assemble(self, xs: np.ndarray) -> np.ndarray:
        """(B, dof) real -> (B, M+1, d) complex paths with fixed endpoints."""
        b = xs.shape[0]
        if self.real_mode:
            interior = xs.reshape(b, self.n_int, self.d).astype(complex)
        else:
            interior = xs[:, : self.half].reshape(b, self.n_int, self.d) + 1j * xs[
                :, self.half :
            ].reshape(b, self.n_int, self.d)
        nodes = np.empty((b, self.m + 1, self.d), dtype=complex)
        nodes[:, 0, :] = self.z
        nodes[:, -1, :] = self.w
        nodes[:, 1:-1, :] = interior
        return nodes

    def energy(self, x: np.ndarray) -> float:
        return float(_segment_lengths(self.assemble(x[None, :]), self.q)[0])

    def valid(self, x: np.ndarray) -> bool:
        nodes = self.assemble(x[None, :])[0]
        return bool(np.all(_node_norms(nodes, self.q) >= _NODE_NORM_FLOOR))

    def gradient(self, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
        k = self.dof
        xs = np.repeat(x[None, :], 2 * k, axis=0)
        idx = np.arange(k)
        xs[idx, idx] += h
        xs[k + idx, idx] -= h
        lengths = _segment_lengths(self.assemble(xs), self.q)
        return (lengths[:k] - lengths[k:]) / (2.0 * h)


def _descend(problem: _PathProblem, x0: np.ndarray, opts: GeodesicOptions):
    """Backtracking gradient descent; energy is non-increasing by construction."""
    x = x0.copy()
    energy = problem.energy(x)
    energies = [energy]
    step = opts.step
    converged = False
    iters = 0
    for _ in range(opts.max_iters):
        grad = problem.gradient(x)
        gsq = float(np.dot(grad, grad))
        if gsq < 1e-24:
            converged = True
            break
        iters += 1
        t = step
        accepted = False
        for _ in range(40):
            cand = x - t * grad
            if problem.valid(cand):
                cand_energy = problem.energy(cand)
                if cand_energy < energy - 1e-4 * t * gsq:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            converged = True
            break
        improvement = energy - cand_energy
        x, energy = cand, cand_energy
        energies.append(energy)
        step = min(t * 2.0, 1.0)
        if improvement < opts.tol * (1.0 + energy):
            converged = True
            break
    return x, energy, iters, converged, energies


def _solve_geodesic(z, w, weights: Weights, opts: GeodesicOptions, real_mode: bool):
    q = weights.array
    problem = _PathProblem(z, w, q, opts.segments, real_mode)

    chord = problem.chord()
    scale = max(float(np.linalg.norm(w - z)), 0.1)
    rng = np.random.default_rng(opts.seed)
    if not np.all(_node_norms(chord, q) >= _NODE_NORM_FLOOR):
        base = problem.pack(chord)
        for attempt in range(1, 21):
            x_try = base + rng.normal(scale=0.05 * attempt * scale, size=problem.dof)
            if problem.valid(x_try):
                chord = problem.assemble(x_try[None, :])[0]
                break
        else:
            raise DegeneratePathError(
                "could not find a nondegenerate initial path between the endpoints"
            )
    x_chord = problem.pack(chord)

    best = None
    for start in range(opts.multistarts):
        if start == 0:
            x0 = x_chord
        else:
            srng = np.random.default_rng([opts.seed, start])
            x0 = x_chord + srng.normal(scale=0.1 * scale, size=problem.dof)
            if not problem.valid(x0):
                continue
        result = _descend(problem, x0, opts)
        if best is None or result[1] < best[1]:
            best = result
    if best is None:
        raise DegeneratePathError("all starts hit degenerate paths")

    x_best, energy, iters, converged, energies = best
    nodes = problem.assemble(x_best[None, :])[0]
    path = PiecewisePath(weights, nodes)
    return GeodesicResult(
        distance=energy,
        path=path,
        converged=converged,
        iterations=iters,
        energies=energies if opts.record_energies else None,
    )


def _order_key(coords: np.ndarray) -> tuple:
    return tuple(v for c in coords for v in (c.real, c.imag))


def geodesic_distance(
    p1: ProjPoint, p2: ProjPoint, opts: GeodesicOptions | None = None
) -> GeodesicResult:
    """Finsler distance between complex classes by discrete energy minimization.

    Endpoints are the unit-weighted-norm representatives, with the second
    rotated by a unit scalar to maximize Re<z, w>_q before building the
    initial straight chord; the result never exceeds that chord's length.
    The integrand is reversal-invariant, so the solver orders the endpoints
    canonically before optimizing: both argument orders run the identical
    computation and the returned distance is exactly symmetric.
    """
    opts = opts or GeodesicOptions()
    if p1.weights != p2.weights:
        raise WeightMismatchError("points live in different weighted spaces")
    a = normalize_geometric(p1).coords
    b = normalize_geometric(p2).coords
    swapped = _order_key(b) < _order_key(a)
    if swapped:
        a, b = b, a
    w = _align_phase(a, b, p1.weights.array)
    result = _solve_geodesic(a, w, p1.weights, opts, real_mode=False)
    if swapped:
        result.path = PiecewisePath(p1.weights, result.path.nodes[::-1].copy())
    return result


def geodesic_distance_rational(
    p1: RatProjPoint, p2: RatProjPoint, opts: GeodesicOptions | None = None
) -> GeodesicResult:
    """Rational-Finsler distance via real lifted paths between integer representatives.

    Truly rational-coordinate paths are not searchable; the relaxation keeps
    the wgcd-normalized endpoints and the same integrand but lets interior
    nodes roam over real vectors.
    """
    opts = opts or GeodesicOptions()
    if p1.weights != p2.weights:
        raise WeightMismatchError("points live in different weighted spaces")
    if not (p1.normalized and p2.normalized):
        raise ValueError("inputs must be wgcd-normalized (see normalize_rational)")
    q = p1.weights.array
    a = np.asarray(p1.coords, dtype=float)
    b = np.asarray(p2.coords, dtype=float)
    swapped = tuple(b) < tuple(a)
    if swapped:
        a, b = b, a
    y = _align_sign(a, b, p1.weights.q, q)
    result = _solve_geodesic(
        a.astype(complex), y.astype(complex), p1.weights, opts, real_mode=True
    )
    if swapped:
        result.path = PiecewisePath(p1.weights, result.path.nodes[::-1].copy())
    return result
