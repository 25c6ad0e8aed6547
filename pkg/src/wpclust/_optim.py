"""Small deterministic Nelder-Mead simplex minimizer.

The objectives it serves have absolute-value kinks, so no gradients are
assumed. Iteration count is capped for reproducibility; no randomness.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    step: float | Sequence[float] = 0.25,
    max_iters: int = 200,
    ftol: float = 1e-14,
) -> tuple[np.ndarray, float]:
    """Minimize f from x0; returns (best point, best value).

    Standard coefficients: reflect 1, expand 2, contract 0.5, shrink 0.5.
    Stops after max_iters sweeps or when the simplex values flatten to ftol.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    steps = np.broadcast_to(np.asarray(step, dtype=float), (n,))

    simplex = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += steps[i] if steps[i] != 0 else 0.25
        simplex.append(v)
    vals = [float(f(v)) for v in simplex]

    for _ in range(max_iters):
        order = np.argsort(vals, kind="stable")
        simplex = [simplex[i] for i in order]
        vals = [vals[i] for i in order]
        if vals[-1] - vals[0] <= ftol * (1.0 + abs(vals[0])):
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]

        xr = centroid + (centroid - worst)
        fr = float(f(xr))
        if fr < vals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = float(f(xe))
            if fe < fr:
                simplex[-1], vals[-1] = xe, fe
            else:
                simplex[-1], vals[-1] = xr, fr
        elif fr < vals[-2]:
            simplex[-1], vals[-1] = xr, fr
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = float(f(xc))
            if fc < vals[-1]:
                simplex[-1], vals[-1] = xc, fc
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = best + 0.5 * (simplex[i] - best)
                    vals[i] = float(f(simplex[i]))

    i = int(np.argmin(vals))
    return simplex[i].copy(), vals[i]
