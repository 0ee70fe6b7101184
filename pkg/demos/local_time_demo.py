"""Smoothed local time of Brownian motion at the origin.

Walks through the basic object of the library: the mollified occupation
functional L_eps(w) = int_0^1 p_eps(w(t)) dt.  As eps shrinks this
converges to the local time at zero, whose mean at time 1 is
sqrt(2/pi) ~ 0.7979 and whose second moment is exactly 1.
"""

import math

import numpy as np

from wcl.analytic import QuadratureRule, integrate_simplex
from wcl.functionals import LocalTime, eval_functional_many, indicator_local_time_many
from wcl.processes import BrownianMotion, TimeGrid, replica_seed, sample_values

grid = TimeGrid(4096)
model = BrownianMotion(1)
n_paths = 4000
seed = 2024

print("Monte Carlo mean of L_eps as eps -> 0")
print("eps        mean      std err   target sqrt(2/pi) = %.6f" % math.sqrt(2 / math.pi))
for eps in (1.0, 0.1, 0.01, 1e-3, 1e-4):
    sums, sq_sums, n = [], [], 0
    for r in range(0, n_paths, 1000):
        values, _ = sample_values(model, grid, replica_seed(seed, r // 1000),
                                  n_paths=min(1000, n_paths - r))
        lt = eval_functional_many(LocalTime(eps), values)
        sums.append(lt.sum())
        sq_sums.append((lt**2).sum())
        n += len(lt)
    mean = math.fsum(sums) / n
    se = math.sqrt(max(math.fsum(sq_sums) / n - mean**2, 0.0) / n)
    print(f"{eps:<10g} {mean:.5f}   {se:.5f}")

# The band-indicator estimator (1/2eps) int 1_{|w| < eps} dt approaches
# the same limit; its second Kac moment comes from a simplex integral.
print()
print("Band indicator, eps = 0.01, vs the Kac moment integrals")
values, _ = sample_values(model, grid, replica_seed(seed, 0), n_paths=2000)
ind = indicator_local_time_many(values, 0.0, 0.01)
print(f"  MC first moment   {ind.mean():.4f}")
print(f"  MC second moment  {(ind**2).mean():.4f}")

rule = QuadratureRule("gauss-legendre", 80)
second = 2.0 * (2.0 * math.pi) ** -1.0 * integrate_simplex(
    lambda t1, t2: 1.0 / np.sqrt(t1 * (t2 - t1)), 2, rule)
print(f"  simplex quadrature second moment {second:.6f}  (exact value 1)")
