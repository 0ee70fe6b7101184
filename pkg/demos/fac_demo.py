"""Uniform finite absolute continuity of weighted Wiener measures.

Pairing a functional family Phi_eps against polynomials P of the path,
the ratio |E[Phi_eps P]| / sqrt(E P^2) stays bounded uniformly in eps
when the weighted measures converge to a genuine limit.  The demo runs
the endpoint-kernel family (closed form available) and a random
polynomial study over the self-intersection family.
"""

import math

from wcl.fac import (
    MCConfig,
    PolyFunctional,
    endpoint_hermite_bound,
    fac_ratio,
    uniform_fac_study,
)
from wcl.functionals import EndpointKernel, SelfIntersection
from wcl.processes import BrownianMotion, TimeGrid

grid = TimeGrid(256)
bm = BrownianMotion(1)
mc = MCConfig(8000, 31)

print("Endpoint kernel family p_eps(w(1)) against P(w) = w(1)^2 - 1")
print("(ratio -> |H_2(0)|/(sqrt(2) sqrt(2 pi)) as eps -> 0;"
      f" bound {endpoint_hermite_bound(2):.5f})")
h2 = PolyFunctional((1.0,), (1,), (((2,), 1.0), ((0,), -1.0)))
for eps in (2.0, 1.0, 0.5, 0.1, 0.01):
    ratio, se = fac_ratio(bm, EndpointKernel(eps), h2, mc, grid)
    # |H_2(0)| (1+eps)^{-3/2} / (sqrt(2!) sqrt(2 pi))
    exact = (1.0 + eps) ** -1.5 / (math.sqrt(2.0) * math.sqrt(2.0 * math.pi))
    print(f"  eps = {eps:<5g} ratio {ratio:.5f} +- {se:.5f}   exact {exact:.5f}")

print()
print("Random-polynomial study over the self-intersection family, d = 2")
bm2 = BrownianMotion(2)
study = uniform_fac_study(
    bm2, lambda eps: SelfIntersection(eps, (0.4, 0.3)),
    [1.0, 0.5, 0.1, 0.05, 0.01], degree=4, n_random_polys=20,
    mc=MCConfig(1000, 31), grid=grid)
for eps, r, se in zip(study.eps_grid, study.max_ratios,
                      study.max_ratio_std_errors):
    print(f"  eps = {eps:<5g} max ratio {r:.4f} +- {se:.4f}")
print(f"  sup over the grid: {study.sup_ratio:.4f} -- flat in eps, as the")
print("  uniform finite-absolute-continuity property predicts.")
