"""Approximating functionals on sampled paths: smoothed local time at a
level, offset local time, smoothed self-intersection local time, the
endpoint kernel, band-occupation local time, the local-time field and
the occupation-formula identity.

Time integrals use node values with trapezoid weights; the triangle
{s < t} uses the product-trapezoid weights of the square restricted to
the strict upper triangle plus half the diagonal, so a constant
integrand integrates to exactly 1/2 and the occupation identity is an
exact Fubini swap at the shared discretization.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .analytic import gauss_kernel_sq
from .processes import Path


@dataclass(frozen=True)
class LocalTime:
    """Phi_eps(f) = int_0^1 p_eps(f(t)) dt; scalar paths only."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class OffsetLocalTime:
    """F_eps(f) = int_0^1 p_eps^d(f(t) - u) dt."""

    eps: float
    u: tuple

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        _warn_zero_offset(self.u)


@dataclass(frozen=True)
class SelfIntersection:
    """G_eps(f) = int_{s<t} p_eps^d(f(t) - f(s) - u) ds dt."""

    eps: float
    u: tuple

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        _warn_zero_offset(self.u)


@dataclass(frozen=True)
class EndpointKernel:
    """Phi_eps(f) = p_eps(f(1)); scalar paths only."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")


FunctionalSpec = LocalTime | OffsetLocalTime | SelfIntersection | EndpointKernel


def _warn_zero_offset(u):
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise ValueError("offset u must be a 1-D vector")
    if len(u) > 1 and np.all(u == 0.0):
        warnings.warn(
            "offset u = 0 with d > 1: the localized functional has no "
            "finite limit; results are valid for fixed eps only",
            stacklevel=3,
        )


@functools.lru_cache(maxsize=16)
def interval_weights(n_steps: int) -> np.ndarray:
    """Trapezoid weights over the n_steps + 1 grid nodes; sum to 1."""
    w = np.full(n_steps + 1, 1.0 / n_steps)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


@functools.lru_cache(maxsize=8)
def triangle_rule(n_steps: int):
    """Node-pair rule for the triangle {0 <= s <= t <= 1}.

    Returns (i_idx, j_idx, weights, tau) over pairs i <= j; weights are
    products of trapezoid weights, halved on the diagonal, and sum to
    exactly 1/2.
    """
    w1 = interval_weights(n_steps)
    i_idx, j_idx = np.triu_indices(n_steps + 1, k=0)
    weights = w1[i_idx] * w1[j_idx]
    weights[i_idx == j_idx] *= 0.5
    tau = (j_idx - i_idx) / n_steps
    return i_idx, j_idx, weights, tau


def _spec_dim(spec: FunctionalSpec) -> int | None:
    if isinstance(spec, (LocalTime, EndpointKernel)):
        return 1
    return len(np.asarray(spec.u))


def eval_functional(spec: FunctionalSpec, path: Path) -> float:
    """Value of the functional on one path; always non-negative."""
    return float(eval_functional_many(spec, path.values[None, :, :])[0])


def eval_functional_many(spec: FunctionalSpec, values: np.ndarray) -> np.ndarray:
    """Vectorized evaluation over a batch of paths of shape (N, n+1, d)."""
    n_paths, n_nodes, d = values.shape
    n_steps = n_nodes - 1
    want = _spec_dim(spec)
    if want is not None and d != want:
        raise ValueError(f"path dimension {d} does not match the functional ({want})")
    if isinstance(spec, EndpointKernel):
        return gauss_kernel_sq(values[:, -1, 0] ** 2, spec.eps, d=1)
    if isinstance(spec, LocalTime):
        w = interval_weights(n_steps)
        return gauss_kernel_sq(values[:, :, 0] ** 2, spec.eps, d=1) @ w
    if isinstance(spec, OffsetLocalTime):
        w = interval_weights(n_steps)
        u = np.asarray(spec.u, dtype=float)
        sq = np.sum((values - u[None, None, :]) ** 2, axis=2)
        return gauss_kernel_sq(sq, spec.eps, d=d) @ w
    if isinstance(spec, SelfIntersection):
        i_idx, j_idx, weights, _ = triangle_rule(n_steps)
        # single precision in the O(n_steps^2) pair table for Monte Carlo
        # batches: the ~1e-5 relative rounding is far below the sampling
        # noise floor; small batches keep full precision
        dtype = np.float32 if n_paths > 8 else np.float64
        uu = np.asarray(spec.u, dtype=dtype)
        ww = weights.astype(dtype)
        vv = values.astype(dtype)
        out = np.empty(n_paths)
        norm = (2.0 * np.pi * spec.eps) ** (-0.5 * d)
        chunk = max(1, int(2e7 // len(i_idx)))
        for lo in range(0, n_paths, chunk):
            v = vv[lo : lo + chunk]
            diff = v[:, j_idx, :] - v[:, i_idx, :] - uu[None, None, :]
            sq = np.einsum("pqa,pqa->pq", diff, diff)
            np.multiply(sq, dtype(-0.5 / spec.eps), out=sq)
            np.exp(sq, out=sq)
            out[lo : lo + chunk] = (sq @ ww) * norm
        return out
    raise TypeError(f"unknown functional spec {spec!r}")


def indicator_local_time(path: Path, x: float, eps: float) -> float:
    """Band-occupation average (1/2 eps) * time spent in [x-eps, x+eps],
    time measured by trapezoid weights of the node values."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    v = path.scalar()
    w = interval_weights(path.grid.n_steps)
    inside = np.abs(v - x) <= eps
    return float(np.dot(w, inside)) / (2.0 * eps)


def indicator_local_time_many(values: np.ndarray, x: float, eps: float) -> np.ndarray:
    """Batched band-occupation average over paths (N, n+1, 1)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    w = interval_weights(values.shape[1] - 1)
    inside = np.abs(values[:, :, 0] - x) <= eps
    return (inside @ w) / (2.0 * eps)


def local_time_field(path: Path, eps: float, x_grid) -> np.ndarray:
    """Smoothed field ell_eps(x) = int_0^1 p_eps(f(t) - x) dt on x_grid."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    v = path.scalar()
    w = interval_weights(path.grid.n_steps)
    x_grid = np.asarray(x_grid, dtype=float)
    sq = (v[None, :] - x_grid[:, None]) ** 2
    return gauss_kernel_sq(sq, eps, d=1) @ w


# raw moments of the standard normal, E Z^k for k = 0..4
_GAUSS_MOMENTS = np.array([1.0, 0.0, 1.0, 0.0, 3.0])
MAX_OCCUPATION_DEGREE = 4


def _smoothed_poly_coeffs(coeffs, eps):
    """Coefficients of g(m) = E f(m + sqrt(eps) Z) for polynomial f."""
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.zeros_like(coeffs)
    for j, c in enumerate(coeffs):
        if c == 0.0:
            continue
        for i in range(0, j + 1, 2):
            out[j - i] += c * math.comb(j, i) * _GAUSS_MOMENTS[i] * eps ** (i / 2)
    return out


def occupation_identity(path: Path, eps: float, coeffs):
    """Both sides of the occupation identity for a polynomial test
    function f given by ``coeffs`` (degree <= 4, ascending powers).

    lhs integrates f against the local-time field, with the x-integral
    done analytically node by node; rhs integrates the Gaussian-smoothed
    polynomial along the path.  Equality is exact Fubini at the shared
    time discretization.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if len(coeffs) > MAX_OCCUPATION_DEGREE + 1:
        raise ValueError(f"polynomial degree must be <= {MAX_OCCUPATION_DEGREE}")
    if not eps > 0:
        raise ValueError("eps must be positive")
    v = path.scalar()
    w = interval_weights(path.grid.n_steps)
    # lhs: per node m, int f(x) p_eps(m - x) dx via central moments of N(m, eps)
    s = math.sqrt(eps)
    lhs_node = np.zeros_like(v)
    for j, c in enumerate(coeffs):
        if c == 0.0:
            continue
        moment_j = np.zeros_like(v)
        for i in range(0, j + 1, 2):
            moment_j += math.comb(j, i) * _GAUSS_MOMENTS[i] * s**i * v ** (j - i)
        lhs_node += c * moment_j
    lhs = float(np.dot(w, lhs_node))
    # rhs: evaluate the smoothed polynomial along the path
    g = _smoothed_poly_coeffs(coeffs, eps)
    rhs = float(np.dot(w, np.polynomial.polynomial.polyval(v, g)))
    return lhs, rhs
