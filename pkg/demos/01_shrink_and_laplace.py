"""Shrinking one variable and summing many.

U_r(x) = max(0, x - r) keeps only the excess over the level r.  For an
exponential summand the Laplace transform of U_r(X) has a closed form, which
we compare with adaptive quadrature, and then we watch the transform of the
n-fold sum settle down as n grows with r_n = log(n / a).
"""
import math

import numpy as np

from shrinklimit import Exponential, HalfNormal, ShrunkenLaw, laplace_shrunken, laplace_sum, u_r

print("U_2(5) =", u_r(5, 2), " U_1(U_2(5)) =", u_r(u_r(5, 2), 1), " U_3(5) =", u_r(5, 3))

law = ShrunkenLaw(Exponential(1.0), math.log(2))
print("\nP(U_r(X) = 0) =", law.atom, "(half the mass sits below the level)")
for t in (0.5, 1.0, 4.0):
    closed = laplace_shrunken(law, t, method="closed")
    quad = laplace_shrunken(law, t, method="quad")
    print(f"  t={t:<4} closed={closed:.15f}  quadrature={quad:.15f}")

# half-normal has no closed form; the quadrature runs on the conditional excess law
hn = ShrunkenLaw(HalfNormal(), 3.0)
print("\nhalf-normal, r=3: L(1) =", laplace_shrunken(hn, 1.0))

a = 2.0
print("\nsum of n shrunken exponentials with exp(-r_n) = a/n, at t = 1:")
print("  limit exp(a (1/(1+t) - 1)) =", math.exp(a * (0.5 - 1)))
for n in (10, 100, 1000, 10**4, 10**5):
    v = laplace_sum(ShrunkenLaw(Exponential(1.0), math.log(n / a)), n, 1.0)
    print(f"  n={n:<7d} L[S_n; 1] = {v:.10f}")

rng = np.random.default_rng(0)
x = law.sample(rng, 200_000)
print("\nMonte Carlo check of L(1):", np.exp(-x).mean(), "vs", laplace_shrunken(law, 1.0))
