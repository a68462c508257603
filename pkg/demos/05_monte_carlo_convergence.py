"""Simulating S_n and measuring how close it is to the limit.

Exact transforms give the deterministic distance; simulation adds the KS
distance and the size of the atom at zero.  The report is the same table the
``converge`` command writes.
"""
import time

from shrinklimit import CompoundPoissonExp, Degenerate, Exponential, ExponentialRule, HalfNormal, HalfNormalRule
from shrinklimit.diag import ReportConfig, full_report, lt_distance

exp_case = (Exponential(1.0), ExponentialRule(2.0, 1.0))
hn_case = (HalfNormal(), HalfNormalRule(1.0))

t0 = time.perf_counter()
rep = full_report(*exp_case, CompoundPoissonExp(2.0, 1.0), [100, 1000, 10**4],
                  ReportConfig(m=20_000, seed=7, workers=4))
print(rep.to_csv())
print(f"({time.perf_counter() - t0:.1f} s)\n")

rep = full_report(*hn_case, Degenerate(1.0), [100, 1000, 10**4],
                  ReportConfig(m=20_000, seed=7, method="exceedance"))
print(rep.to_csv())

# the point-mass limit is approached at rate ~1/r_n, i.e. very slowly in n
for e in (5, 10, 30, 60, 100):
    right = lt_distance(*hn_case, 10**e, Degenerate(1.0))
    wrong = lt_distance(*hn_case, 10**e, CompoundPoissonExp(1.0, 1.0))
    print(f"n=1e{e:<3d} distance to point mass {right:.4f}, to compound Poisson {wrong:.4f}")
