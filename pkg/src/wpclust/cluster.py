"""Pairwise distance matrices, agglomerative clustering, cuts, and stability.

Agglomeration merges the active pair with the smallest linkage distance,
breaking ties by the lexicographically smallest (min_id, max_id) cluster-id
pair, and always runs down to a single cluster; stopping criteria live in
``cut``.  Average linkage tracks inter-cluster distance *sums* so the merge
height is always one division of exact sums, matching a from-scratch rescan
bit for bit whenever the sums are exactly representable.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

LINKAGES = ("single", "complete", "average")


class PairEvaluationError(RuntimeError):
    """Distance oracle failed on a specific pair of points."""

    def __init__(self, i: int, j: int, cause: BaseException):
        super().__init__(f"distance oracle failed on pair ({i}, {j}): {cause!r}")
        self.i = i
        self.j = j
        self.cause = cause


class StabilityBoundError(RuntimeError):
    """Single-linkage merge heights moved more than the matrix perturbation."""


@dataclass
class DistanceMatrix:
    """Dense symmetric nonnegative matrix with zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.array_equal(v, v.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diagonal(v) != 0.0):
            raise ValueError("distance matrix must have a zero diagonal")
        if np.any(v < 0.0):
            raise ValueError("distances must be nonnegative")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass
class Dendrogram:
    """Merge records (left_id, right_id, height, new_id) over n_leaves leaves.

    Leaves are 0..n_leaves-1; merge k creates cluster id n_leaves + k.
    """

    n_leaves: int
    merges: list[tuple[int, int, float, int]]

    def __post_init__(self):
        if len(self.merges) != max(self.n_leaves - 1, 0):
            raise ValueError("a dendrogram over n leaves has n - 1 merges")

    def heights(self) -> np.ndarray:
        return np.array([m[2] for m in self.merges], dtype=float)

    def to_json_dict(self) -> dict:
        return {
            "n_leaves": self.n_leaves,
            "merges": [[l, r, h, nid] for (l, r, h, nid) in self.merges],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Dendrogram":
        merges = [
            (int(l), int(r), float(h), int(nid)) for (l, r, h, nid) in obj["merges"]
        ]
        return cls(n_leaves=int(obj["n_leaves"]), merges=merges)


def distance_matrix(
    points: Sequence, oracle: Callable[[object, object], float], parallelism: int = 1
) -> DistanceMatrix:
    """Evaluate the oracle once per unordered pair and mirror into a matrix.

    Results are assembled by pair index, so the matrix is identical at any
    parallelism degree (the oracle must be pure).
    """
    n = len(points)
    if n < 1:
        raise ValueError("need at least one point")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def eval_pair(pair: tuple[int, int]) -> float:
        i, j = pair
        try:
            return float(oracle(points[i], points[j]))
        except Exception as exc:  # noqa: BLE001 - rewrapped with pair context
            raise PairEvaluationError(i, j, exc) from exc

    if parallelism <= 1 or not pairs:
        results = [eval_pair(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(eval_pair, pairs))

    values = np.zeros((n, n), dtype=float)
    for (i, j), v in zip(pairs, results):
        values[i, j] = v
        values[j, i] = v
    return DistanceMatrix(values)


def agglomerate(m: DistanceMatrix, linkage: str) -> Dendrogram:
    """Merge down to one cluster under single/complete/average linkage."""
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    n = m.n
    if n == 1:
        return Dendrogram(1, [])

    # 'work' holds linkage values for single/complete, pair-distance sums for
    # average; 'sizes' turns sums into means on demand.
    work = m.values.copy()
    sizes = np.ones(n, dtype=float)
    ids = list(range(n))
    active = np.ones(n, dtype=bool)
    merges: list[tuple[int, int, float, int]] = []

    for step in range(n - 1):
        if linkage == "average":
            cur = work / np.outer(sizes, sizes)
        else:
            cur = work.copy()
        cur[~active, :] = np.inf
        cur[:, ~active] = np.inf
        np.fill_diagonal(cur, np.inf)

        min_val = cur.min()
        cand = np.argwhere(cur == min_val)
        best_slot = None
        best_key = None
        for a, b in cand:
            if a >= b:
                continue
            key = (min(ids[a], ids[b]), max(ids[a], ids[b]))
            if best_key is None or key < best_key:
                best_key = key
                best_slot = (int(a), int(b))
        a, b = best_slot

        if linkage == "single":
            work[a, :] = np.minimum(work[a, :], work[b, :])
        elif linkage == "complete":
            work[a, :] = np.maximum(work[a, :], work[b, :])
        else:
            work[a, :] = work[a, :] + work[b, :]
        work[:, a] = work[a, :]
        work[a, a] = 0.0

        new_id = n + step
        merges.append((best_key[0], best_key[1], float(min_val), new_id))
        sizes[a] += sizes[b]
        ids[a] = new_id
        active[b] = False

    return Dendrogram(n, merges)


def cut(
    d: Dendrogram, k: int | None = None, height: float | None = None
) -> np.ndarray:
    """Partition leaves by undoing late merges (k) or dropping tall ones (height).

    Labels are canonical: the cluster containing the smallest leaf index gets
    label 0, the next smallest remaining cluster gets 1, and so on.
    """
    if (k is None) == (height is None):
        raise ValueError("specify exactly one of k or height")
    n = d.n_leaves
    if k is not None:
        if not 1 <= k <= n:
            raise ValueError(f"k must be in [1, {n}], got {k}")
        kept = d.merges[: n - k]
    else:
        if height < 0:
            raise ValueError("height threshold must be nonnegative")
        kept = [mr for mr in d.merges if mr[2] <= height]

    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    for left, right, _, new_id in kept:
        if left not in members or right not in members:
            raise RuntimeError(
                "height cut crossed a non-monotone merge sequence; "
                "cut by k instead"
            )
        members[new_id] = members.pop(left) + members.pop(right)

    clusters = sorted(members.values(), key=min)
    labels = np.empty(n, dtype=int)
    for label, leaves in enumerate(clusters):
        for leaf in leaves:
            labels[leaf] = label
    return labels


def kmeans_baseline(coords: Sequence[Sequence[float]], k: int, seed: int) -> np.ndarray:
    """Lloyd iteration with seeded farthest-first init; Euclidean baseline only."""
    pts = np.asarray(coords, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty 2-d coordinate array")
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    rng = np.random.default_rng(seed)
    center_idx = [int(rng.integers(n))]
    dist_sq = np.sum((pts - pts[center_idx[0]]) ** 2, axis=1)
    for _ in range(k - 1):
        center_idx.append(int(np.argmax(dist_sq)))
        d_new = np.sum((pts - pts[center_idx[-1]]) ** 2, axis=1)
        dist_sq = np.minimum(dist_sq, d_new)
    centers = pts[center_idx].copy()

    labels = np.full(n, -1, dtype=int)
    for _ in range(100):
        d2 = np.sum((pts[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        for c in range(k):
            mask = new_labels == c
            if np.any(mask):
                centers[c] = pts[mask].mean(axis=0)
            else:
                # Reseat an empty cluster at the globally worst-served point.
                centers[c] = pts[int(np.argmax(np.min(d2, axis=1)))]
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    return _canonical_labels(labels)


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    remap: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        if lab not in remap:
            remap[lab] = len(remap)
        out[i] = remap[lab]
    return out


@dataclass
class StabilityReport:
    """Sup-norm matrix gap vs. merge-height movement for one linkage."""

    n: int
    linkage: str
    delta: float
    max_sorted_height_diff: float
    bound_asserted: bool


def stability_check(
    m_a: DistanceMatrix, m_b: DistanceMatrix, linkage: str
) -> StabilityReport:
    """Compare dendrograms of two matrices against their sup-norm gap.

    Single-linkage sorted merge heights are minimax edge weights, hence
    1-Lipschitz in the sup-norm: the height movement must stay within delta,
    and the check raises if it does not.  Complete/average movements are
    reported without assertion.
    """
    if m_a.n != m_b.n:
        raise ValueError("matrices must have the same size")
    delta = float(np.max(np.abs(m_a.values - m_b.values))) if m_a.n else 0.0
    heights_a = np.sort(agglomerate(m_a, linkage).heights())
    heights_b = np.sort(agglomerate(m_b, linkage).heights())
    diff = float(np.max(np.abs(heights_a - heights_b))) if heights_a.size else 0.0
    asserted = linkage == "single"
    if asserted and diff > delta:
        raise StabilityBoundError(
            f"single-linkage heights moved {diff} > sup-norm gap {delta}"
        )
    return StabilityReport(
        n=m_a.n,
        linkage=linkage,
        delta=delta,
        max_sorted_height_diff=diff,
        bound_asserted=asserted,
    )


def dendrogram_to_newick(d: Dendrogram, leaf_names: Sequence[str] | None = None) -> str:
    """Newick string with branch lengths equal to merge-height differences."""
    if leaf_names is None:
        leaf_names = [str(i) for i in range(d.n_leaves)]
    if len(leaf_names) != d.n_leaves:
        raise ValueError("need one name per leaf")
    text = {i: name for i, name in enumerate(leaf_names)}
    height = {i: 0.0 for i in range(d.n_leaves)}
    last = None
    for left, right, h, new_id in d.merges:
        bl_l = h - height[left]
        bl_r = h - height[right]
        text[new_id] = "(%s:%.17g,%s:%.17g)" % (text[left], bl_l, text[right], bl_r)
        height[new_id] = h
        last = new_id
    if last is None:
        return text[0] + ";"
    return text[last] + ";"


def rand_index(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Fraction of point pairs on which two partitions agree."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ValueError("label arrays must have the same length")
    n = a.size
    if n < 2:
        return 1.0
    same_a = a[:, None] == a[None, :]
    same_b = b[:, None] == b[None, :]
    iu = np.triu_indices(n, k=1)
    return float(np.mean(same_a[iu] == same_b[iu]))


def adjusted_rand_index(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Chance-corrected pair-counting agreement between two partitions."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise ValueError("label arrays must have the same length")
    n = a.size
    _, a_inv = np.unique(a, return_inverse=True)
    _, b_inv = np.unique(b, return_inverse=True)
    table = np.zeros((a_inv.max() + 1, b_inv.max() + 1), dtype=np.int64)
    np.add.at(table, (a_inv, b_inv), 1)

    def comb2(x):
        return x * (x - 1) // 2

    sum_cells = int(np.sum(comb2(table)))
    sum_rows = int(np.sum(comb2(table.sum(axis=1))))
    sum_cols = int(np.sum(comb2(table.sum(axis=0))))
    total = comb2(n)
    expected = sum_rows * sum_cols / total if total else 0.0
    max_index = 0.5 * (sum_rows + sum_cols)
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))
