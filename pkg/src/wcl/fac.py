"""Empirical finite-absolute-continuity engine.

Pairs the weighted measures Phi_eps * mu against finite-dimensional
polynomials of point evaluations, estimates the ratio constants
|<Phi_eps mu, P>| / ||P||_{L2(mu)}, runs uniform-in-eps studies over
random polynomials, and computes the two weak-compactness moment
diagnostics (Karhunen-Loeve tail sums and Holder-type increment
moments) for the weighted measures.

All estimators share one seed-matched path set across the eps grid, so
eps-comparisons are low-variance and bit-reproducible.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .functionals import FunctionalSpec, eval_functional_many, interval_weights
from .processes import (
    ProcessModel,
    Path,
    TimeGrid,
    model_dimension,
    replica_seed,
    sample_values,
)

MAX_POLY_DEGREE = 8
MAX_POLY_POINTS = 8
_CHUNK = 2000


@dataclass(frozen=True)
class MCConfig:
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.n_samples < 100:
            raise ValueError("need at least 100 samples")


@dataclass(frozen=True)
class PolyFunctional:
    """Polynomial in point evaluations of the path.

    ``times`` are grid times, ``coords`` the matching 1-based coordinate
    indices; ``monomials`` is a list of (exponent vector, coefficient)
    with the exponent vector running over the evaluation points.
    """

    times: tuple
    coords: tuple
    monomials: tuple

    def __post_init__(self):
        if len(self.times) != len(self.coords):
            raise ValueError("need one coordinate index per evaluation time")
        if len(self.times) > MAX_POLY_POINTS:
            raise ValueError(f"at most {MAX_POLY_POINTS} evaluation points")
        if not any(c != 0.0 for _, c in self.monomials):
            raise ValueError("polynomial must have a nonzero coefficient")
        if self.degree > MAX_POLY_DEGREE:
            raise ValueError(f"degree must be <= {MAX_POLY_DEGREE}")

    @property
    def degree(self) -> int:
        return max(sum(e) for e, _ in self.monomials)

    @staticmethod
    def constant(c: float) -> "PolyFunctional":
        return PolyFunctional((), (), (((), float(c)),))

    def scaled(self, factor: float) -> "PolyFunctional":
        return PolyFunctional(
            self.times, self.coords,
            tuple((e, c * factor) for e, c in self.monomials),
        )


def eval_poly(p: PolyFunctional, path: Path) -> float:
    return float(eval_poly_many(p, path.values[None, :, :], path.grid)[0])


def eval_poly_many(p: PolyFunctional, values: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Batched polynomial evaluation over paths (N, n+1, d)."""
    d = values.shape[2]
    cols = []
    for t, c in zip(p.times, p.coords):
        if not 1 <= c <= d:
            raise ValueError(f"coordinate index {c} out of range for d={d}")
        cols.append(values[:, grid.index_of(t), c - 1])
    pts = np.column_stack(cols) if cols else np.empty((values.shape[0], 0))
    out = np.zeros(values.shape[0])
    for exponents, coeff in p.monomials:
        term = np.full(values.shape[0], coeff)
        for j, e in enumerate(exponents):
            if e:
                term = term * pts[:, j] ** e
        out += term
    return out


def _mc_accumulate(model, grid, mc: MCConfig, fn):
    """Deterministic chunked MC: fn(values) -> array of per-path values.

    Returns (mean, std_error, n); sums are pooled in replica order with
    compensated summation.
    """
    sums, sq_sums, counts = [], [], []
    for r, lo in enumerate(range(0, mc.n_samples, _CHUNK)):
        nb = min(_CHUNK, mc.n_samples - lo)
        values, _ = sample_values(model, grid, replica_seed(mc.seed, r), n_paths=nb)
        x = np.asarray(fn(values), dtype=float)
        sums.append(float(np.sum(x)))
        sq_sums.append(float(np.sum(x**2)))
        counts.append(nb)
    n = sum(counts)
    mean = math.fsum(sums) / n
    var = max(math.fsum(sq_sums) / n - mean**2, 0.0)
    return mean, math.sqrt(var / n), n


def pairing_mc(model: ProcessModel, spec: FunctionalSpec, p: PolyFunctional,
               mc: MCConfig, grid: TimeGrid):
    """MC estimate of int Phi(f) P(f) mu(df) with standard error."""
    mean, se, _ = _mc_accumulate(
        model, grid, mc,
        lambda v: eval_functional_many(spec, v) * eval_poly_many(p, v, grid),
    )
    return mean, se


def l2_norm_mc(model: ProcessModel, p: PolyFunctional, mc: MCConfig, grid: TimeGrid):
    """sqrt(E P^2) under mu, with delta-method standard error."""
    m2, se2, _ = _mc_accumulate(
        model, grid, mc, lambda v: eval_poly_many(p, v, grid) ** 2
    )
    norm = math.sqrt(m2)
    se = se2 / (2.0 * norm) if norm > 0 else float("inf")
    return norm, se


class IllConditionedDenominator(RuntimeError):
    """The L2 norm estimate is too noisy to divide by."""


def fac_ratio(model: ProcessModel, spec: FunctionalSpec, p: PolyFunctional,
              mc: MCConfig, grid: TimeGrid):
    """|pairing| / l2 norm with first-order error propagation."""
    num, num_se = pairing_mc(model, spec, p, mc, grid)
    den, den_se = l2_norm_mc(model, p, mc, grid)
    if not den > 5.0 * den_se:
        raise IllConditionedDenominator(
            f"L2 norm {den:.3g} is below 5 standard errors ({den_se:.3g})"
        )
    ratio = abs(num) / den
    se = math.hypot(num_se / den, ratio * den_se / den)
    return ratio, se


def random_poly(rng: np.random.Generator, degree: int, grid: TimeGrid, d: int,
                n_points: int | None = None) -> PolyFunctional:
    """Draw a random polynomial for the FAC search distribution.

    Evaluation times are uniform over interior grid nodes, coordinates
    uniform over 1..d, exponent vectors uniform over total degree <=
    ``degree``, coefficients standard Gaussian.  Callers normalize by an
    estimated L2 norm.
    """
    if n_points is None:
        n_points = int(rng.integers(1, min(4, MAX_POLY_POINTS) + 1))
    ks = rng.integers(1, grid.n_steps + 1, size=n_points)
    times = tuple(float(k) * grid.h for k in ks)
    coords = tuple(int(c) for c in rng.integers(1, d + 1, size=n_points))
    exps = [e for e in _exponent_vectors(n_points, degree)]
    chosen = rng.choice(len(exps), size=min(len(exps), max(2, degree + 1)), replace=False)
    monomials = tuple((exps[i], float(rng.standard_normal())) for i in chosen)
    return PolyFunctional(times, coords, monomials)


def _exponent_vectors(n_points: int, max_total: int):
    if n_points == 0:
        yield ()
        return
    for first in range(max_total + 1):
        for rest in _exponent_vectors(n_points - 1, max_total - first):
            yield (first,) + rest


@dataclass
class FacStudyReport:
    """Outcome of a uniform-in-eps FAC ratio study."""

    model: str
    family: str
    eps_grid: list
    degree: int
    max_ratios: list
    max_ratio_std_errors: list
    sup_ratio: float
    oracle_bound: float | None = None
    n_polynomials: int = 0
    n_samples: int = 0

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.__dict__, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["eps", "max_ratio", "std_error"])
            for eps, r, se in zip(self.eps_grid, self.max_ratios,
                                  self.max_ratio_std_errors):
                writer.writerow([f"{eps:.12g}", f"{r:.12g}", f"{se:.12g}"])


def uniform_fac_study(model: ProcessModel, family, eps_grid, degree: int,
                      n_random_polys: int, mc: MCConfig, grid: TimeGrid,
                      oracle_bound: float | None = None,
                      family_name: str = "") -> FacStudyReport:
    """Max FAC ratio over random polynomials, for each eps of a
    decreasing grid, on one seed-matched path set.

    ``family`` maps eps to a FunctionalSpec.
    """
    eps_grid = [float(e) for e in eps_grid]
    if len(eps_grid) < 3 or any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps grid must be decreasing with at least 3 points")
    if n_random_polys < 20:
        raise ValueError("need at least 20 random polynomials")
    d = model_dimension(model)
    rng = np.random.default_rng(replica_seed(mc.seed, 10**6))
    polys = [random_poly(rng, degree, grid, d) for _ in range(n_random_polys)]

    # one pass over the shared sample: P values and Phi_eps values
    n_eps = len(eps_grid)
    n_p = len(polys)
    sum_p2 = np.zeros(n_p)
    sum_pair = np.zeros((n_eps, n_p))
    sum_pair_sq = np.zeros((n_eps, n_p))
    n = 0
    for r, lo in enumerate(range(0, mc.n_samples, _CHUNK)):
        nb = min(_CHUNK, mc.n_samples - lo)
        values, _ = sample_values(model, grid, replica_seed(mc.seed, r), n_paths=nb)
        pv = np.stack([eval_poly_many(p, values, grid) for p in polys])  # (n_p, nb)
        sum_p2 += np.sum(pv**2, axis=1)
        for ei, eps in enumerate(eps_grid):
            phi = eval_functional_many(family(eps), values)
            prod = phi[None, :] * pv
            sum_pair[ei] += np.sum(prod, axis=1)
            sum_pair_sq[ei] += np.sum(prod**2, axis=1)
        n += nb
    l2 = np.sqrt(sum_p2 / n)
    pair_mean = sum_pair / n
    pair_se = np.sqrt(np.maximum(sum_pair_sq / n - pair_mean**2, 0.0) / n)
    ratios = np.abs(pair_mean) / l2[None, :]
    ratio_se = pair_se / l2[None, :]
    best = np.argmax(ratios, axis=1)
    max_ratios = [float(ratios[ei, b]) for ei, b in enumerate(best)]
    max_se = [float(ratio_se[ei, b]) for ei, b in enumerate(best)]
    return FacStudyReport(
        model=type(model).__name__,
        family=family_name or family(eps_grid[0]).__class__.__name__,
        eps_grid=eps_grid,
        degree=degree,
        max_ratios=max_ratios,
        max_ratio_std_errors=max_se,
        sup_ratio=float(max(max_ratios)),
        oracle_bound=oracle_bound,
        n_polynomials=n_random_polys,
        n_samples=n,
    )


def endpoint_hermite_bound(n: int) -> float:
    """Closed-form uniform-in-eps bound for the endpoint-kernel family
    paired with H_n(f(1)): |H_n(0)| / (sqrt(n!) * sqrt(2 pi))."""
    from .analytic import hermite_eval

    return abs(hermite_eval(n, 0.0)) / math.sqrt(math.factorial(n) * 2.0 * math.pi)


def kl_basis(k: int, t: np.ndarray) -> np.ndarray:
    """Karhunen-Loeve eigenfunction of Brownian motion:
    e_k(t) = sqrt(2) sin((k - 1/2) pi t), k >= 1."""
    return math.sqrt(2.0) * np.sin((k - 0.5) * math.pi * t)


@dataclass
class TailDiagnostic:
    """KL tail sums of the weighted measures across the eps grid.

    tail_sums[e][n-1] = sum_{k=n..N} E_{mu_eps}[(e_k, u)^2], with the
    unweighted model in ``unweighted_tails``.
    """

    eps_grid: list
    basis_size: int
    tail_sums: list
    tail_std_errors: list
    unweighted_tails: list
    unweighted_std_errors: list


def tail_moment_diagnostic(model: ProcessModel, family, eps_grid, basis_size: int,
                           mc: MCConfig, grid: TimeGrid) -> TailDiagnostic:
    """Weak-compactness diagnostic: per-eps tails of the KL coefficient
    second moments under the Phi_eps-weighted normalized measures.

    Weighting uses importance weights Phi_eps(f) on the unweighted
    sample, normalized by the sample mean of Phi_eps.
    """
    eps_grid = [float(e) for e in eps_grid]
    t = grid.times
    w_time = interval_weights(grid.n_steps)
    basis = np.stack([kl_basis(k, t) * w_time for k in range(1, basis_size + 1)])

    n = 0
    sum_phi = np.zeros(len(eps_grid))
    sum_wc2 = np.zeros((len(eps_grid), basis_size))
    sum_wc2_sq = np.zeros((len(eps_grid), basis_size))
    sum_c2 = np.zeros(basis_size)
    sum_c2_sq = np.zeros(basis_size)
    for r, lo in enumerate(range(0, mc.n_samples, _CHUNK)):
        nb = min(_CHUNK, mc.n_samples - lo)
        values, _ = sample_values(model, grid, replica_seed(mc.seed, r), n_paths=nb)
        # (e_k, u) summed over coordinates: ||proj||^2 uses all d coords
        c2 = np.zeros((nb, basis_size))
        for j in range(values.shape[2]):
            c2 += (values[:, :, j] @ basis.T) ** 2
        sum_c2 += np.sum(c2, axis=0)
        sum_c2_sq += np.sum(c2**2, axis=0)
        for ei, eps in enumerate(eps_grid):
            phi = eval_functional_many(family(eps), values)
            sum_phi[ei] += float(np.sum(phi))
            sum_wc2[ei] += phi @ c2
            sum_wc2_sq[ei] += phi**2 @ c2**2
        n += nb

    def tails(vec):
        return np.cumsum(vec[::-1])[::-1]

    unweighted = sum_c2 / n
    unweighted_se = np.sqrt(np.maximum(sum_c2_sq / n - unweighted**2, 0.0) / n)
    tail_sums, tail_ses = [], []
    for ei in range(len(eps_grid)):
        mean_phi = sum_phi[ei] / n
        m = sum_wc2[ei] / n / mean_phi
        se = np.sqrt(np.maximum(sum_wc2_sq[ei] / n - (sum_wc2[ei] / n) ** 2, 0.0) / n) / mean_phi
        tail_sums.append(tails(m).tolist())
        tail_ses.append(np.sqrt(tails(se**2)).tolist())
    return TailDiagnostic(
        eps_grid=eps_grid,
        basis_size=basis_size,
        tail_sums=tail_sums,
        tail_std_errors=tail_ses,
        unweighted_tails=tails(unweighted).tolist(),
        unweighted_std_errors=np.sqrt(tails(unweighted_se**2)).tolist(),
    )


def bm_kl_second_moment(k: int) -> float:
    """Exact E (e_k, w)^2 for scalar Brownian motion: ((k-1/2) pi)^-2."""
    return ((k - 0.5) * math.pi) ** -2


@dataclass
class HolderDiagnostic:
    """Fitted growth exponent of increment moments per eps."""

    eps_grid: list
    m0: int
    exponents: list
    exponent_std_errors: list
    unweighted_exponent: float
    unweighted_std_error: float


def holder_moment_diagnostic(model: ProcessModel, family, eps_grid, m0: int,
                             time_pairs, mc: MCConfig, grid: TimeGrid) -> HolderDiagnostic:
    """Weak-compactness diagnostic: fit the exponent of |t2 - t1| in
    E_{mu_eps} ||u(t2) - u(t1)||^{2 m0} by least squares in log-log
    coordinates, with the regression standard error."""
    if m0 not in (1, 2):
        raise ValueError("m0 must be 1 or 2")
    eps_grid = [float(e) for e in eps_grid]
    pairs = [(float(a), float(b)) for a, b in time_pairs]
    idx = [(grid.index_of(a), grid.index_of(b)) for a, b in pairs]
    gaps = np.array([abs(b - a) for a, b in pairs])

    n = 0
    sum_phi = np.zeros(len(eps_grid))
    sum_wm = np.zeros((len(eps_grid), len(pairs)))
    sum_m = np.zeros(len(pairs))
    for r, lo in enumerate(range(0, mc.n_samples, _CHUNK)):
        nb = min(_CHUNK, mc.n_samples - lo)
        values, _ = sample_values(model, grid, replica_seed(mc.seed, r), n_paths=nb)
        incr = np.stack([
            np.sum((values[:, j, :] - values[:, i, :]) ** 2, axis=1) ** m0
            for i, j in idx
        ], axis=1)  # (nb, n_pairs)
        sum_m += np.sum(incr, axis=0)
        for ei, eps in enumerate(eps_grid):
            phi = eval_functional_many(family(eps), values)
            sum_phi[ei] += float(np.sum(phi))
            sum_wm[ei] += phi @ incr
        n += nb

    def fit(moments):
        x = np.log(gaps)
        y = np.log(moments)
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        dof = max(len(x) - 2, 1)
        se = math.sqrt(float(np.sum(resid**2)) / dof / float(np.sum((x - x.mean()) ** 2)))
        return float(slope), se

    un_slope, un_se = fit(sum_m / n)
    slopes, ses = [], []
    for ei in range(len(eps_grid)):
        s, se = fit(sum_wm[ei] / sum_phi[ei])
        slopes.append(s)
        ses.append(se)
    return HolderDiagnostic(eps_grid, m0, slopes, ses, un_slope, un_se)


def fourth_moment_identity(model: ProcessModel, times, coeffs, coord: int = 1):
    """Exact fourth and second moments of the linear functional
    l = sum_i c_i X_coord(t_i), from the model covariance.

    The fourth moment is computed by the Wick pairing sum over index
    quadruples, independently of the identity E l^4 = 3 (E l^2)^2 it
    instantiates.
    """
    from .processes import covariance

    times = list(times)
    c = np.asarray(coeffs, dtype=float)
    j = coord - 1
    cov = np.array([[covariance(model, s, t)[j, j] for t in times] for s in times])
    m2 = float(c @ cov @ c)
    m4 = 0.0
    for a in range(len(c)):
        for b in range(len(c)):
            for e in range(len(c)):
                for f in range(len(c)):
                    m4 += c[a] * c[b] * c[e] * c[f] * (
                        cov[a, b] * cov[e, f]
                        + cov[a, e] * cov[b, f]
                        + cov[a, f] * cov[b, e]
                    )
    return m4, m2
