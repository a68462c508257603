"""The two possible limits: a point mass, or compound Poisson with exponential jumps."""
import numpy as np

from shrinklimit import CompoundPoissonExp, Degenerate
from shrinklimit.diag import dkw_band, ks_distance

cpe = CompoundPoissonExp(a=2.0, lam=1.0)
point = Degenerate(1.0)

print("atom at zero:", cpe.atom_at_zero, " series terms:", cpe.series_terms)
print("moments:", cpe.moments(), point.moments())
for t in (0.0, 1.0, 10.0, 1e6):
    print(f"  t={t:<9g} compound Poisson {cpe.laplace(t):.6f}   point mass {point.laplace(t):.6f}")

x = np.linspace(0, 8, 9)
print("\nCDF:", np.round(cpe.cdf(x), 6))

m = 100_000
s = cpe.sample(np.random.default_rng(1), m)
print(f"\n{m} draws: zero fraction {np.mean(s == 0):.4f}, mean {s.mean():.4f}, var {s.var():.4f}")
print(f"KS distance {ks_distance(s, cpe):.4f}  (DKW 99.9% band {dkw_band(m):.4f})")
