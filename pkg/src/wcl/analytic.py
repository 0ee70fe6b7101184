"""Exact analytic building blocks: Hermite polynomials, Gaussian heat
kernels, the scaled Hermite product basis and quadrature rules.

Everything here is deterministic and closed-form (or a convergent
quadrature of a closed form), so these routines double as oracles for
the statistical modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special
from scipy.optimize import minimize_scalar

MAX_HERMITE_DEGREE = 60
MAX_BOUND_DEGREE = 20

# exp(-z) underflows to subnormals around z = 745; treat as exact zero
_EXP_UNDERFLOW = 745.0


def hermite_eval(n, x):
    """Probabilists' Hermite polynomial H_n(x).

    Evaluated by the three-term recurrence
    H_0 = 1, H_1 = x, H_{n+1}(x) = x*H_n(x) - n*H_{n-1}(x).
    Accepts scalars or arrays in ``x``.
    """
    if n < 0:
        raise ValueError("Hermite degree must be non-negative")
    if n > MAX_HERMITE_DEGREE:
        raise ValueError(
            f"Hermite degree {n} exceeds the overflow guard {MAX_HERMITE_DEGREE}"
        )
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h_cur = x.copy()
    for k in range(1, n):
        h_prev, h_cur = h_cur, x * h_cur - k * h_prev
    return h_cur if h_cur.ndim else float(h_cur)


def hermite_sequence(n_max, x):
    """All of H_0(x), ..., H_{n_max}(x) in one recurrence sweep.

    Returns an array of shape (n_max + 1,) + shape(x).
    """
    if n_max < 0 or n_max > MAX_HERMITE_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_HERMITE_DEGREE}]")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = x
    for k in range(1, n_max):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def hermite_bound_constant(n):
    """Smallest a_n with |H_n(x)| <= a_n * exp(x^2/4) for all real x.

    Found by maximizing |H_n(x)| * exp(-x^2/4); the objective decays at
    infinity, so the maximum is attained on a bounded interval.
    """
    if n < 0 or n > MAX_BOUND_DEGREE:
        raise ValueError(f"degree must be in [0, {MAX_BOUND_DEGREE}]")
    if n == 0:
        return 1.0

    def neg_objective(x):
        return -abs(hermite_eval(n, x)) * math.exp(-0.25 * x * x)

    # locate candidate maxima on a dense grid, then polish each bracket
    xs = np.linspace(-4.0 * math.sqrt(n + 1), 4.0 * math.sqrt(n + 1), 4001)
    vals = np.abs(hermite_eval(n, xs)) * np.exp(-0.25 * xs**2)
    best = -np.inf
    order = np.argsort(vals)[::-1][:8]
    for i in order:
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, len(xs) - 1)]
        res = minimize_scalar(
            neg_objective, bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -res.fun)
    return float(best)


@dataclass(frozen=True)
class HeatKernelParams:
    """Dimension and variance of the Gaussian kernel p_eps^d."""

    d: int
    eps: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not self.eps > 0:
            raise ValueError("variance must be positive")


def heat_kernel(params: HeatKernelParams, x) -> float:
    """Gaussian density (2*pi*eps)^(-d/2) * exp(-|x|^2 / (2*eps))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape[-1] != params.d:
        raise ValueError(f"point has dimension {x.shape[-1]}, expected {params.d}")
    sq = float(np.dot(x, x))
    return gauss_kernel_sq(sq, params.eps, params.d)


def gauss_kernel_sq(sq_norm, eps, d=1):
    """p_eps^d evaluated from the squared norm; array-friendly.

    Returns exact zero once the exponent is past the float underflow
    threshold.
    """
    if not eps > 0:
        raise ValueError("variance must be positive")
    sq_norm = np.asarray(sq_norm, dtype=float)
    z = sq_norm / (2.0 * eps)
    norm = (2.0 * math.pi * eps) ** (-0.5 * d)
    out = np.where(z > _EXP_UNDERFLOW, 0.0, norm * np.exp(-np.minimum(z, _EXP_UNDERFLOW)))
    return out if out.ndim else float(out)


def heat_convolve_variance(a: float, b: float) -> float:
    """Variance of p_a * p_b; the semigroup property gives a + b."""
    if not (a > 0 and b > 0):
        raise ValueError("variances must be positive")
    return a + b


def product_basis_eval(idx, sigma, x):
    """Scaled Hermite product R_idx(x) = sigma^|idx| * prod_j H_{idx_j}(x_j/sigma).

    These are orthogonal (not orthonormal) in L2(p_{sigma^2}^d dx); see
    ``product_basis_norm`` for the norms.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    idx = tuple(int(n) for n in idx)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if len(x) != len(idx):
        raise ValueError("point dimension must match the multi-index length")
    val = sigma ** sum(idx)
    for n_j, x_j in zip(idx, x):
        val *= hermite_eval(n_j, x_j / sigma)
    return float(val)


def product_basis_norm(idx, sigma):
    """L2(p_{sigma^2}^d dx) norm of R_idx: sigma^|idx| * sqrt(prod idx_j!)."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    idx = tuple(int(n) for n in idx)
    return sigma ** sum(idx) * math.sqrt(math.prod(math.factorial(n) for n in idx))


@dataclass(frozen=True)
class QuadratureRule:
    """1-D quadrature rule on [0,1], reusable as the per-axis rule for
    simplex integration.

    kind: 'trapezoid' or 'gauss-legendre'; n: number of nodes.
    """

    kind: str = "trapezoid"
    n: int = 2000

    def __post_init__(self):
        if self.kind not in ("trapezoid", "gauss-legendre"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.n < 2:
            raise ValueError("need at least 2 nodes")

    def nodes_weights(self):
        """Nodes and weights on [0,1]; weights sum to 1."""
        if self.kind == "trapezoid":
            x = np.linspace(0.0, 1.0, self.n)
            w = np.full(self.n, 1.0 / (self.n - 1))
            w[0] *= 0.5
            w[-1] *= 0.5
            return x, w
        x, w = np.polynomial.legendre.leggauss(self.n)
        return 0.5 * (x + 1.0), 0.5 * w


DEFAULT_INTERVAL_RULE = QuadratureRule("trapezoid", 2000)
DEFAULT_SIMPLEX_RULE = QuadratureRule("gauss-legendre", 200)


def integrate_interval(f, rule: QuadratureRule = DEFAULT_INTERVAL_RULE) -> float:
    """Quadrature of f over [0,1]; f may be scalar or vectorized."""
    x, w = rule.nodes_weights()
    try:
        vals = np.asarray(f(x), dtype=float)
        if vals.shape != x.shape:
            raise TypeError
    except TypeError:
        vals = np.array([f(t) for t in x], dtype=float)
    if np.any(~np.isfinite(vals)):
        raise ValueError("integrand evaluated to a non-finite value at a node")
    return float(np.dot(w, vals))


def integrate_simplex(f, n, rule: QuadratureRule = DEFAULT_SIMPLEX_RULE,
                      sqrt_substitution=True) -> float:
    """Integral of f(t_1, ..., t_n) over the ordered simplex
    0 <= t_1 <= ... <= t_n <= 1, for n in {2, 3, 4}.

    The simplex is mapped to the unit cube by t_n = u_n, t_j = t_{j+1}*u_j,
    and each cube coordinate optionally passes through u = sin^2(theta).
    The substitution removes inverse-square-root endpoint singularities
    (Kac-moment integrands), letting tensor Gauss-Legendre converge.
    """
    if n not in (2, 3, 4):
        raise ValueError("simplex order must be 2, 3 or 4")
    if rule.kind != "gauss-legendre":
        raise ValueError("simplex integration requires a gauss-legendre rule")
    x, w = np.polynomial.legendre.leggauss(rule.n)
    if sqrt_substitution:
        theta = (x + 1.0) * (math.pi / 4.0)
        u = np.sin(theta) ** 2
        wu = w * (math.pi / 4.0) * np.sin(2.0 * theta)
    else:
        u = 0.5 * (x + 1.0)
        wu = 0.5 * w
    grids = np.meshgrid(*([u] * n), indexing="ij")
    weight = np.ones_like(grids[0])
    for g in np.meshgrid(*([wu] * n), indexing="ij"):
        weight = weight * g
    ts = [None] * n
    ts[n - 1] = grids[n - 1]
    jac = np.ones_like(grids[0])
    for j in range(n - 2, -1, -1):
        ts[j] = ts[j + 1] * grids[j]
        jac = jac * ts[j + 1]
    vals = np.asarray(f(*ts), dtype=float)
    if np.any(~np.isfinite(vals)):
        raise ValueError("integrand evaluated to a non-finite value at a node")
    return float(np.sum(weight * jac * vals))


def gauss_hermite_rule(n):
    """Nodes/weights for E[g(Z)], Z standard normal (probabilists' scaling)."""
    # scipy's routine stays stable at high orders where numpy's overflows
    x, w = scipy.special.roots_hermitenorm(n)
    return x, w / math.sqrt(2.0 * math.pi)
