"""Chaos decomposition of the smoothed self-intersection local time.

The offset functional G_eps(w) = int int_{s<t} p_eps(w(t) - w(s) - u) is
expanded in Hermite chaos order by order.  The demo prints the
second-moment spectrum of the terms, the residual left after truncating
at each order, and the closed-form mean for comparison.
"""

from wcl.chaos import (
    chaos_term_table,
    expansion_study_mc,
    self_intersection_mean_quadrature,
)
from wcl.processes import BrownianMotion, TimeGrid

grid = TimeGrid(256)
model = BrownianMotion(1)
eps, u = 0.1, [0.5]
n_samples, seed = 3000, 11

print(f"eps = {eps}, u = {u[0]}, {n_samples} paths on {grid.n_steps} steps")
print(f"quadrature mean of G_eps: "
      f"{self_intersection_mean_quadrature(eps, u, 1):.6f}")
print()

table = chaos_term_table(model, 6, eps, u, n_samples, seed, grid)
print("order   E[term^2]    std err")
for est in table:
    print(f"{est.k:<7d} {est.mean:.6f}    {est.std_error:.2e}")

print()
study = expansion_study_mc(model, 6, eps, u, n_samples, seed, grid)
print(f"Var G_eps = {study.var_g:.6f}")
print("truncation order K, residual second moment E[(G - S_K)^2]:")
for k, (res, se) in enumerate(zip(study.residual_moments,
                                  study.residual_std_errors)):
    frac = res / study.var_g
    print(f"  K = {k}: {res:.6f} +- {se:.1e}   ({100 * frac:5.1f}% of Var G)")
print()
print("Residuals shrink monotonically: each added chaos order removes an")
print("orthogonal slice of the variance.")
