"""Gaussian process models on a uniform grid of [0,1].

Four models: Brownian motion, Gaussian integrators X(t) driven by a
bounded invertible operator acting on step functions, a smooth
stationary sinusoidal process (for level-crossing counts) and the
degenerate line t*xi.

All node-level covariances are exact finite-dimensional linear algebra:
increments are sampled exactly, the operator acts on cell coefficients
under the h-weighted inner product <u,v> = h * sum(u_i v_i), so
statistical tests downstream carry no discretization bias at the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MIN_SINGULAR_VALUE = 1e-10


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0 = t_0 < ... < t_n = 1 with n_steps cells."""

    n_steps: int

    def __post_init__(self):
        if self.n_steps < 2:
            raise ValueError("need at least 2 steps")

    @property
    def h(self) -> float:
        return 1.0 / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_steps + 1)

    def index_of(self, t: float) -> int:
        k = round(t * self.n_steps)
        if abs(k * self.h - t) > 1e-12:
            raise ValueError(f"time {t} is not a grid node")
        return int(k)


@dataclass
class Path:
    """A sampled path: values[k, j] = X_j(t_k); values[0] = 0.

    ``derivative`` is filled only for the smooth stationary model, where
    it is computed analytically alongside the path.
    """

    grid: TimeGrid
    values: np.ndarray
    derivative: np.ndarray | None = None

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def scalar(self) -> np.ndarray:
        if self.d != 1:
            raise ValueError("operation requires a scalar path")
        return self.values[:, 0]

    def to_csv(self, path_or_file):
        t = self.grid.times
        data = np.column_stack([t, self.values])
        header = "t," + ",".join(f"x{j + 1}" for j in range(self.d))
        np.savetxt(path_or_file, data, delimiter=",", header=header, comments="")


class IntegratorOperator:
    """Matrix representation of a bounded invertible operator on
    L2([0,1]) restricted to step functions on the grid cells.

    The matrix acts on cell-coefficient vectors; norms and inner
    products carry the h-weight of the cells.
    """

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("operator matrix must be square")
        self.matrix = matrix
        self.n_cells = matrix.shape[0]
        self._singular_values = np.linalg.svd(matrix, compute_uv=False)
        if self._singular_values[-1] <= _MIN_SINGULAR_VALUE:
            raise ValueError("operator matrix is numerically singular")

    @property
    def h(self) -> float:
        return 1.0 / self.n_cells

    @property
    def singular_values(self) -> np.ndarray:
        return self._singular_values

    @classmethod
    def identity(cls, n_cells):
        return cls(np.eye(n_cells))

    @classmethod
    def from_profile(cls, g, n_cells):
        """Multiplication operator (Af)(s) = g(s) f(s), g sampled at cell
        midpoints."""
        s = (np.arange(n_cells) + 0.5) / n_cells
        return cls(np.diag(np.asarray([g(si) for si in s], dtype=float)))

    @classmethod
    def from_csv(cls, path):
        """Load a row-major matrix from CSV with header line 'n_cells,<n>'."""
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if header[0] != "n_cells":
                raise ValueError("operator CSV must start with an 'n_cells' header")
            n = int(header[1])
            matrix = np.loadtxt(fh, delimiter=",", ndmin=2)
        if matrix.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {matrix.shape}")
        return cls(matrix)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(f"n_cells,{self.n_cells}\n")
            np.savetxt(fh, self.matrix, delimiter=",")

    def indicator_coefficients(self, i, j):
        """Cell-coefficient vector of the indicator of [t_i, t_j]."""
        v = np.zeros(self.n_cells)
        v[i:j] = 1.0
        return v

    def weighted_norm(self, coeffs) -> float:
        return math.sqrt(self.h * float(np.dot(coeffs, coeffs)))

    def node_image_matrix(self):
        """Column k is M applied to the indicator coefficients of [0, t_k]."""
        # column k has ones in the first k cells
        cum = (np.arange(self.n_cells)[:, None] < np.arange(self.n_cells + 1)[None, :]).astype(float)
        return self.matrix @ cum


@dataclass(frozen=True)
class BrownianMotion:
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")


@dataclass(frozen=True)
class Integrator:
    operator: IntegratorOperator
    d: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")


@dataclass(frozen=True)
class SmoothStationary:
    """xi(t) = xi_1 cos(omega t) + xi_2 sin(omega t); unit variance,
    derivative variance omega^2."""

    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("angular frequency must be positive")


@dataclass(frozen=True)
class DegenerateLine:
    """eta(t) = t * xi with xi standard Gaussian; all mass on lines."""


ProcessModel = BrownianMotion | Integrator | SmoothStationary | DegenerateLine


def model_dimension(model: ProcessModel) -> int:
    if isinstance(model, (BrownianMotion, Integrator)):
        return model.d
    return 1


def _rng(seed):
    # counter-based: sequence fully determined by (master seed, replica)
    return np.random.default_rng(np.random.SeedSequence(seed))


def replica_seed(master_seed: int, replica: int):
    """Derived seed for one replica; order-independent across replicas."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(replica,))


def sample_values(model: ProcessModel, grid: TimeGrid, seed, n_paths=1):
    """Sample n_paths paths at once; returns values of shape
    (n_paths, n_steps + 1, d) plus derivative (or None).

    ``seed`` may be an int or a numpy SeedSequence.
    """
    rng = np.random.default_rng(seed)
    n = grid.n_steps
    h = grid.h
    if isinstance(model, BrownianMotion):
        dw = rng.normal(0.0, math.sqrt(h), size=(n_paths, n, model.d))
        values = np.concatenate(
            [np.zeros((n_paths, 1, model.d)), np.cumsum(dw, axis=1)], axis=1
        )
        return values, None
    if isinstance(model, Integrator):
        op = model.operator
        if op.n_cells != n:
            raise ValueError(
                f"operator has {op.n_cells} cells but the grid has {n} steps"
            )
        basis = op.node_image_matrix()  # (n, n+1)
        dw = rng.normal(0.0, math.sqrt(h), size=(n_paths, n, model.d))
        values = np.einsum("pij,ik->pkj", dw, basis)
        return values, None
    if isinstance(model, SmoothStationary):
        xi = rng.normal(size=(n_paths, 2))
        t = grid.times
        c, s = np.cos(model.omega * t), np.sin(model.omega * t)
        values = (xi[:, :1] * c[None, :] + xi[:, 1:] * s[None, :])[:, :, None]
        deriv = (
            -xi[:, :1] * model.omega * s[None, :] + xi[:, 1:] * model.omega * c[None, :]
        )[:, :, None]
        return values, deriv
    if isinstance(model, DegenerateLine):
        xi = rng.normal(size=(n_paths, 1))
        values = (xi * grid.times[None, :])[:, :, None]
        return values, None
    raise TypeError(f"unknown model {model!r}")


def sample(model: ProcessModel, grid: TimeGrid, seed) -> Path:
    """Sample a single path; exact node-level Gaussian law per model."""
    values, deriv = sample_values(model, grid, seed, n_paths=1)
    return Path(grid, values[0], None if deriv is None else deriv[0])


def covariance(model: ProcessModel, s: float, t: float) -> np.ndarray:
    """Exact d x d covariance matrix Cov(X(s), X(t)) at grid times."""
    if isinstance(model, BrownianMotion):
        return min(s, t) * np.eye(model.d)
    if isinstance(model, Integrator):
        op = model.operator
        i = round(s * op.n_cells)
        j = round(t * op.n_cells)
        if abs(i / op.n_cells - s) > 1e-12 or abs(j / op.n_cells - t) > 1e-12:
            raise ValueError("covariance requires grid-node times")
        a = op.matrix @ op.indicator_coefficients(0, i)
        b = op.matrix @ op.indicator_coefficients(0, j)
        return op.h * float(np.dot(a, b)) * np.eye(model.d)
    if isinstance(model, SmoothStationary):
        return np.array([[math.cos(model.omega * (t - s))]])
    if isinstance(model, DegenerateLine):
        return np.array([[s * t]])
    raise TypeError(f"unknown model {model!r}")


def sigma_interval(op: IntegratorOperator, s: float, t: float) -> float:
    """sigma(s, t) = ||M 1_{[s,t]}|| under the h-weighted inner product."""
    if s > t:
        raise ValueError("need s <= t")
    i = round(s * op.n_cells)
    j = round(t * op.n_cells)
    if abs(i / op.n_cells - s) > 1e-12 or abs(j / op.n_cells - t) > 1e-12:
        raise ValueError("sigma requires grid-node times")
    return op.weighted_norm(op.matrix @ op.indicator_coefficients(i, j))


def operator_bounds(op: IntegratorOperator):
    """(m, M_up): extreme squared singular values of the operator.

    These bracket sigma^2: m*(t-s) <= sigma(s,t)^2 <= M_up*(t-s) for all
    grid s <= t.  The h-weights cancel in the Rayleigh quotient, so the
    plain singular values of the matrix apply.
    """
    sv = op.singular_values
    return float(sv[-1] ** 2), float(sv[0] ** 2)


def integrator_inequality(op: IntegratorOperator, partition, coeffs):
    """Exact both sides of the defining L2-boundedness inequality for
    the increments of the integrator.

    lhs = E[sum a_k (X(t_{k+1}) - X(t_k))]^2 = ||M c||^2 with c the cell
    coefficients of sum a_k 1_{[t_k, t_{k+1}]}; rhs_bound uses the
    largest squared singular value.
    """
    partition = np.asarray(partition, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    if np.any(np.diff(partition) <= 0):
        raise ValueError("partition must be strictly increasing")
    if len(coeffs) != len(partition) - 1:
        raise ValueError("need one coefficient per partition interval")
    c = np.zeros(op.n_cells)
    for a_k, lo, hi in zip(coeffs, partition[:-1], partition[1:]):
        i = round(lo * op.n_cells)
        j = round(hi * op.n_cells)
        if abs(i / op.n_cells - lo) > 1e-12 or abs(j / op.n_cells - hi) > 1e-12:
            raise ValueError("partition points must be grid nodes")
        c[i:j] += a_k
    lhs = op.weighted_norm(op.matrix @ c) ** 2
    _, big = operator_bounds(op)
    rhs = big * float(np.sum(coeffs**2 * np.diff(partition)))
    return lhs, rhs


def upcrossing_count(path: Path, level: float) -> int:
    """Number of grid intervals with value[k] < level <= value[k+1]."""
    v = path.scalar()
    return int(np.sum((v[:-1] < level) & (v[1:] >= level)))
