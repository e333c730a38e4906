"""Foundational numerics: error functions, Gauss-Legendre rules, root
bracketing, and a dense symmetric eigensolver.

Everything here is pure and deterministic: identical inputs produce
bitwise identical outputs, so higher-level sweeps can be parallelized
without losing reproducibility.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.special


class NoBracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class NonFiniteError(ArithmeticError):
    """A function returned NaN or infinity where a finite value was required."""


class NonConvergenceError(ArithmeticError):
    """An iterative solver failed to converge on pathological input."""


class QuadratureNotConvergedError(ArithmeticError):
    """Doubling the quadrature resolution moved the result beyond tolerance."""


def erfc(x):
    """Complementary error function, 2/sqrt(pi) * int_x^inf exp(-y^2) dy.

    Accepts scalars or arrays; total on finite reals.
    """
    return scipy.special.erfc(x)


def erfcx(x):
    """Scaled complementary error function exp(x^2) * erfc(x).

    Stays finite for arbitrarily large positive x, which is what makes
    products of huge Gaussians and tiny erfc tails computable.
    """
    return scipy.special.erfcx(x)


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and weights of a quadrature rule on a finite interval."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        lo, hi = self.interval
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if nodes[0] <= lo or nodes[-1] >= hi:
            raise ValueError("nodes must lie strictly inside the interval")
        if not np.all(weights > 0):
            raise ValueError("weights must be positive")
        if abs(weights.sum() - (hi - lo)) > 1e-12 * (hi - lo):
            raise ValueError("weights do not sum to the interval length")

    def __len__(self):
        return len(self.nodes)

    def integrate(self, values) -> float:
        """Apply the rule to nodal values (fixed summation order)."""
        return np.dot(self.weights, values)


@functools.lru_cache(maxsize=64)
def _leggauss(n: int):
    # scipy's Newton-iteration solver scales linearly in n; the numpy
    # companion-matrix route is O(n^3) and unusable for the large rules
    # that convergence loops can request
    return scipy.special.roots_legendre(n)


def gauss_legendre(n: int, lo: float, hi: float) -> QuadratureGrid:
    """n-point Gauss-Legendre rule on [lo, hi].

    Exact for polynomials of degree <= 2n - 1.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    x, w = _leggauss(n)
    half = 0.5 * (hi - lo)
    return QuadratureGrid(
        nodes=half * x + 0.5 * (hi + lo),
        weights=half * w,
        interval=(lo, hi),
    )


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Locate a sign change of f inside [lo, hi] to within tol.

    Deterministic midpoint bisection.  Raises NoBracketError when
    f(lo) * f(hi) >= 0 and NonFiniteError when f evaluates to a
    non-finite value.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    flo, fhi = f(lo), f(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)):
        raise NonFiniteError("f is not finite at a bracket endpoint")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoBracketError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:  # ran out of floating-point resolution
            break
        fmid = f(mid)
        if not np.isfinite(fmid):
            raise NonFiniteError(f"f({mid}) is not finite")
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense real symmetric matrix; symmetry is exact by construction."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be a square matrix")
        if not np.isfinite(m).all():
            raise ValueError("entries must be finite")
        # mirror the upper triangle so that (i, j) and (j, i) come from a
        # single evaluation per unordered pair
        upper = np.triu(m)
        object.__setattr__(self, "entries", upper + np.triu(m, 1).T)

    @property
    def order(self) -> int:
        return self.entries.shape[0]


def sym_eig_max(m: SymmetricMatrix) -> tuple[float, np.ndarray]:
    """Algebraically largest eigenvalue and unit eigenvector of m.

    Note "algebraically largest", not largest in magnitude: the kernels
    discretized here have negative eigenvalues that dominate in modulus,
    which is why magnitude-based power iteration is avoided.  The
    eigenvector sign is fixed so its largest-magnitude entry is positive.
    """
    try:
        values, vectors = np.linalg.eigh(m.entries)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"symmetric eigensolve failed: {exc}") from exc
    value = float(values[-1])
    vector = vectors[:, -1]
    scale = np.linalg.norm(m.entries, ord=np.inf)
    residual = np.linalg.norm(m.entries @ vector - value * vector)
    if scale > 0 and residual > 1e-10 * scale:
        raise NonConvergenceError(
            f"eigenpair residual {residual:.3e} exceeds 1e-10 * ||M|| = {1e-10 * scale:.3e}"
        )
    pivot = np.argmax(np.abs(vector))
    if vector[pivot] < 0:
        vector = -vector
    return value, vector
