"""Normalizing levels r_n for the two worked cases.

Exponential summands: exp(-lam r_n) = a / n, so r_n = log(n / a) / lam.
Half-normal summands: sqrt(2/pi) n / (r_n^2 exp(r_n^2 / 2)) = c, solved by
bisection on a log scale (n can be astronomically large).
"""
from shrinklimit import ExponentialRule, HalfNormalRule, rn_gaps

exp_rule = ExponentialRule(a=2.0, lam=1.0)
hn_rule = HalfNormalRule(c=1.0)

print(f"{'n':>8} {'r_n exp':>12} {'w_n exp':>12} {'r_n halfnormal':>15} {'w_n halfnormal':>15} {'residual':>10}")
for n in (10, 100, 1000, 10**4, 10**5, 10**6):
    print(f"{n:>8} {exp_rule.r(n):12.6f} {rn_gaps(exp_rule, n):12.3e} "
          f"{hn_rule.r(n):15.6f} {rn_gaps(hn_rule, n):15.3e} {hn_rule.residual(n):10.1e}")

# the gaps w_n = r_{n+1} - r_n shrink to zero in both cases, but the levels
# themselves keep growing; the half-normal ones only like sqrt(2 log n)
for e in (10, 50, 100, 300):
    print(f"half-normal r_n at n=1e{e}: {hn_rule.r(10**e):.4f}")
