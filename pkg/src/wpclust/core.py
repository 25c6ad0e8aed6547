"""Weighted projective points over C and Q, the scaling action, and canonical forms.

A point of the weighted projective space with weights ``q = (q_0, ..., q_n)``
is an equivalence class of nonzero coordinate vectors under

    (z_0, ..., z_n)  ~  (lambda**q_0 * z_0, ..., lambda**q_n * z_n),   lambda != 0.

Complex representatives are canonicalized by scaling to unit weighted norm;
integer representatives are canonicalized by dividing out the weighted gcd
and fixing a sign convention.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np


class InvalidPointError(ValueError):
    """Coordinate vector is identically zero (no projective class)."""


class WeightMismatchError(ValueError):
    """Operands do not live in the same weighted projective space."""


class Weights:
    """Positive integer grades (q_0, ..., q_n), one per coordinate."""

    __slots__ = ("q", "_arr")

    def __init__(self, q: Iterable[int]):
        qt = tuple(int(v) for v in q)
        if len(qt) < 2:
            raise ValueError("need at least two weights, got %r" % (qt,))
        if any(v < 1 for v in qt):
            raise ValueError("weights must be positive integers, got %r" % (qt,))
        self.q = qt
        self._arr = np.asarray(qt, dtype=float)

    @property
    def array(self) -> np.ndarray:
        """Weights as a float vector, for vectorized formulas."""
        return self._arr

    def lcm(self) -> int:
        return math.lcm(*self.q)

    def __len__(self) -> int:
        return len(self.q)

    def __iter__(self):
        return iter(self.q)

    def __getitem__(self, i: int) -> int:
        return self.q[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Weights) and self.q == other.q

    def __hash__(self) -> int:
        return hash(self.q)

    def __repr__(self) -> str:
        return "Weights(%r)" % (self.q,)


class ProjPoint:
    """A complex representative z of a class [z]; coordinates never all zero."""

    __slots__ = ("weights", "coords")

    def __init__(self, weights: Weights | Iterable[int], coords: Sequence[complex]):
        self.weights = weights if isinstance(weights, Weights) else Weights(weights)
        arr = np.array(coords, dtype=complex)
        if arr.ndim != 1 or arr.shape[0] != len(self.weights):
            raise ValueError(
                "coordinate count %d does not match weight count %d"
                % (arr.size, len(self.weights))
            )
        if not np.any(arr != 0):
            raise InvalidPointError("all coordinates are zero")
        self.coords = arr

    def __repr__(self) -> str:
        return "ProjPoint(%r, %r)" % (self.weights.q, list(self.coords))


class RatProjPoint:
    """An integer representative of a rational class, coordinates exact.

    The ``normalized`` flag asserts wgcd(coords, weights) == 1; it is verified
    at construction time so downstream code can trust it.
    """

    __slots__ = ("weights", "coords", "normalized")

    def __init__(
        self,
        weights: Weights | Iterable[int],
        coords: Sequence[int],
        normalized: bool = False,
    ):
        self.weights = weights if isinstance(weights, Weights) else Weights(weights)
        ct = tuple(int(x) for x in coords)
        if len(ct) != len(self.weights):
            raise ValueError(
                "coordinate count %d does not match weight count %d"
                % (len(ct), len(self.weights))
            )
        if all(x == 0 for x in ct):
            raise InvalidPointError("all coordinates are zero")
        if normalized and wgcd(ct, self.weights) != 1:
            raise ValueError("normalized flag set but wgcd != 1 for %r" % (ct,))
        self.coords = ct
        self.normalized = bool(normalized)

    def __repr__(self) -> str:
        return "RatProjPoint(%r, %r, normalized=%r)" % (
            self.weights.q,
            list(self.coords),
            self.normalized,
        )


class Tangent:
    """A tangent vector v attached to a base representative."""

    __slots__ = ("base", "v")

    def __init__(self, base: ProjPoint, v: Sequence[complex]):
        arr = np.array(v, dtype=complex)
        if arr.ndim != 1 or arr.shape[0] != base.coords.shape[0]:
            raise ValueError("tangent length does not match base point")
        self.base = base
        self.v = arr


def weighted_norm(p: ProjPoint) -> float:
    """(sum_k q_k |z_k|^2)^(1/2); strictly positive for valid points."""
    return float(np.sqrt(np.sum(p.weights.array * np.abs(p.coords) ** 2)))


def normalize_geometric(p: ProjPoint) -> ProjPoint:
    """Scale coordinates by the positive real 1/weighted_norm(p).

    This is plain scalar division of the representative, not the group
    action; the result has weighted norm 1 and stays in the same class.
    """
    return ProjPoint(p.weights, p.coords / weighted_norm(p))


def act(p: ProjPoint, lam: complex) -> ProjPoint:
    """Apply the weighted scaling action: coordinate k becomes lam**q_k * z_k."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("scaling by zero is not a group element")
    factors = np.array([lam**k for k in p.weights.q], dtype=complex)
    return ProjPoint(p.weights, p.coords * factors)


def act_rational(p: RatProjPoint, m: int) -> RatProjPoint:
    """Scale an integer representative by a nonzero integer: x_i -> m**q_i * x_i."""
    m = int(m)
    if m == 0:
        raise ValueError("scaling by zero is not a group element")
    coords = tuple(m ** qi * x for qi, x in zip(p.weights.q, p.coords))
    return RatProjPoint(p.weights, coords, normalized=False)


# ---------------------------------------------------------------------------
# Integer factorization helpers (for wgcd). Deterministic: trial division for
# small factors, Miller-Rabin + Brent rho for anything that survives.
# ---------------------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Deterministic witness set for n < 3.3e24.
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """A nontrivial factor of composite odd n; deterministic over seeds 1, 2, ..."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = 2
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError("rho failed to factor %d" % n)


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 as {prime: multiplicity}."""
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    # 2/4-wheel over 6k+-1 up to a modest bound; rho handles the rest.
    while f * f <= n and f < 100_000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 4 if f % 6 == 1 else 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        g = _brent_rho(m)
        stack.append(g)
        stack.append(m // g)
    return out


def wgcd(coords: Sequence[int], weights: Weights | Iterable[int]) -> int:
    """Largest d >= 1 with d**q_i dividing x_i for every nonzero coordinate.

    Dividing coordinate i by d**q_i then yields the reduced representative.
    """
    w = weights if isinstance(weights, Weights) else Weights(weights)
    xs = [(abs(int(x)), qi) for x, qi in zip(coords, w.q) if x != 0]
    if len(coords) != len(w):
        raise ValueError("coordinate count does not match weight count")
    if not xs:
        raise InvalidPointError("all coordinates are zero")
    g = 0
    for ax, _ in xs:
        g = math.gcd(g, ax)
    if g == 1:
        return 1
    d = 1
    for p in _factorize(g):
        a = None
        for ax, qi in xs:
            e = 0
            while ax % p == 0:
                ax //= p
                e += 1
            a = e // qi if a is None else min(a, e // qi)
            if a == 0:
                break
        if a:
            d *= p**a
    return d


def normalize_rational(p: RatProjPoint) -> RatProjPoint:
    """Reduce to the canonical wgcd-1 representative with fixed sign.

    Divides coordinate i by d**q_i for d = wgcd, then acts by -1 if the
    first odd-weight nonzero coordinate is negative (the only sign freedom
    a rational scaling leaves on a wgcd-1 representative).
    """
    if p.normalized:
        return p
    d = wgcd(p.coords, p.weights)
    coords = [x // d**qi for x, qi in zip(p.coords, p.weights.q)]
    for x, qi in zip(coords, p.weights.q):
        if qi % 2 == 1 and x != 0:
            if x < 0:
                coords = [(-1) ** qj * y for qj, y in zip(p.weights.q, coords)]
            break
    return RatProjPoint(p.weights, coords, normalized=True)


def weighted_height(p: RatProjPoint) -> float:
    """max_i |x_i|^(1/q_i) evaluated on the canonical wgcd-1 representative."""
    if not p.normalized:
        p = normalize_rational(p)
    best = 0.0
    for x, qi in zip(p.coords, p.weights.q):
        if x == 0:
            continue
        ax = abs(x)
        try:
            r = float(ax) ** (1.0 / qi)
        except OverflowError:
            r = math.exp(math.log(ax) / qi)
        if r > best:
            best = r
    return best


def equivalent(p1: ProjPoint, p2: ProjPoint, tol: float = 1e-9) -> bool:
    """Class-equality test: do some scalings carry p1's representative to p2's?

    Zero patterns must agree, and with L = lcm(q) the ratios
    (w_k / z_k)**(L/q_k) must agree across nonzero coordinates; raising to
    the L/q_k power removes the branch ambiguity of fractional powers.
    """
    if p1.weights != p2.weights:
        raise WeightMismatchError("points live in different weighted spaces")
    z, w = p1.coords, p2.coords
    if not np.array_equal(z == 0, w == 0):
        return False
    L = p1.weights.lcm()
    ref = None
    for zk, wk, qk in zip(z, w, p1.weights.q):
        if zk == 0:
            continue
        r = (wk / zk) ** (L // qk)
        if ref is None:
            ref = r
            continue
        if abs(r - ref) > tol * max(abs(r), abs(ref), 1e-300):
            return False
    return True
