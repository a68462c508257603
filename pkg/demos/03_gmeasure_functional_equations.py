"""The measures G_n and the auxiliary function H.

G_n(y) = n int_0^y (1 - e^{-x}) dF(x + r_n) carries everything about the
limit.  H_n(u) = int_1^u dG_n / (1 - e^{-x}) is computed by integrating the
tabulated G_n and, independently, as n [F(u + r_n) - F(1 + r_n)].  The limit
H is either constant (point-mass limit) or alpha (e^{-gamma u} - e^{-gamma})
(compound Poisson limit), and the fit below tells the two apart.
"""
import math

import numpy as np

from shrinklimit import Exponential, ExponentialRule, HalfNormal, HalfNormalRule
from shrinklimit.gmeasure import (
    TabulatedFn,
    check_scaled_equation,
    compute_gn,
    compute_h_direct,
    compute_hn,
    default_grid,
    fine_grid,
    fit_h_solution,
    h_direct_fn,
    probe_from_sequence,
    reconstruct_g_from_h,
)

exp_case = (Exponential(1.0), ExponentialRule(2.0, 1.0))
hn_case = (HalfNormal(), HalfNormalRule(1.0))

print("exponential case: G_n(inf) does not depend on n")
for n in (10, 1000, 10**5):
    print(f"  n={n:<6d} G_n(inf) = {compute_gn(*exp_case, n).total_mass:.12f}")

gn = compute_gn(*exp_case, 1000, grid=fine_grid())
print("\nH_n by two routes (n = 1000):")
for u in (0.5, 2.0, 5.0):
    print(f"  u={u}: integral {compute_hn(gn, u):.10f}  direct {compute_h_direct(*exp_case, 1000, u):.10f}")

u = default_grid()
fit = fit_h_solution(TabulatedFn(u, h_direct_fn(*exp_case, 10**4)(u)))
print(f"\nfit: {fit.family}, alpha={fit.alpha:.8f}, gamma={fit.gamma:.8f}  ->  {fit.limit_law()}")
probe = probe_from_sequence(exp_case[1], 10**5, 0.3)
print(f"scaled-equation residual with b = k_n/n = {probe.ratio_b:.6f}:",
      check_scaled_equation(fit, 0.3, probe.ratio_b, u))
g = reconstruct_g_from_h(fit, [0.5, 1.0, 2.0, math.inf])
print("G rebuilt from H:", g.values)

print("\nhalf-normal case: H_n flattens out only slowly")
for n in (10**3, 10**5, 10**10, 10**30):
    f = fit_h_solution(TabulatedFn(u, h_direct_fn(*hn_case, n)(u)))
    tail = np.max(np.abs(h_direct_fn(*hn_case, n)(u[u >= 1])))
    print(f"  n=1e{round(math.log10(n)):<3d} family={f.family:<8s} gamma={f.gamma:7.3f}  max|H_n(u>=1)|={tail:.4f}")
