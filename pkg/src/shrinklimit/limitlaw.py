"""The two possible weak limits: a point mass, or compound Poisson with exponential jumps.

``CompoundPoissonExp(a, lam)`` is the law of ``Y_1 + ... + Y_N`` with
``N ~ Poisson(a)`` and ``Y_k ~ Exponential(lam)``.  It has an atom
``exp(-a)`` at zero and is absolutely continuous on ``(0, inf)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

from .errors import DomainError

SERIES_TAIL = 1e-12


class LimitLaw:
    """Common interface of the two limit variants."""

    def laplace(self, t):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        """Left limit ``P(S < x)``."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        raise NotImplementedError

    def moments(self) -> tuple[float, float]:
        raise NotImplementedError

    def quantile(self, p: float) -> float:
        raise NotImplementedError

    @property
    def atom_at_zero(self) -> float:
        raise NotImplementedError


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError("Laplace transform needs t >= 0")
    return t


def _out(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


@dataclass(frozen=True)
class Degenerate(LimitLaw):
    """All mass at ``c > 0``."""

    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError(f"Degenerate needs c > 0, got {self.c}")

    def laplace(self, t):
        t = _check_t(t)
        return _out(t, np.exp(-self.c * t))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, np.where(x >= self.c, 1.0, 0.0))

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, np.where(x > self.c, 1.0, 0.0))

    def sample(self, rng, count):
        return np.full(int(count), float(self.c))

    def moments(self):
        return float(self.c), 0.0

    def quantile(self, p):
        return float(self.c)

    @property
    def atom_at_zero(self):
        return 0.0


@dataclass(frozen=True)
class CompoundPoissonExp(LimitLaw):
    """Poisson(``a``) number of Exponential(``lam``) jumps."""

    a: float
    lam: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.lam > 0):
            raise DomainError("CompoundPoissonExp needs a > 0 and lam > 0")

    @property
    def atom_at_zero(self):
        return math.exp(-self.a)

    @property
    def series_terms(self) -> int:
        """Smallest ``K`` with ``P(Poisson(a) > K) < SERIES_TAIL``."""
        k = int(self.a + 12.0 * math.sqrt(self.a) + 20)
        while stats.poisson.sf(k, self.a) >= SERIES_TAIL:
            k += 10
        while k > 0 and stats.poisson.sf(k - 1, self.a) < SERIES_TAIL:
            k -= 1
        return k

    def laplace(self, t):
        t = _check_t(t)
        return _out(t, np.exp(self.a * (self.lam / (self.lam + t) - 1.0)))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        k = np.arange(1, self.series_terms + 1)
        w = stats.poisson.pmf(k, self.a)
        z = self.lam * np.maximum(flat, 0.0)
        # P(Gamma(k, lam) <= x) is the regularized lower incomplete gamma
        body = special.gammainc(k[None, :], z[:, None]) @ w
        out = np.where(flat < 0, 0.0, math.exp(-self.a) + body)
        return _out(x, np.minimum(out, 1.0).reshape(x.shape))

    def cdf_left(self, x):
        x = np.asarray(x, dtype=float)
        return _out(x, np.where(x > 0, self.cdf(x), 0.0))

    def density(self, x):
        """Density of the absolutely continuous part on ``(0, inf)``.

        ``exp(-a - lam x) sqrt(a lam / x) I_1(2 sqrt(a lam x))``; the Bessel
        factor is evaluated in exponentially scaled form.
        """
        x = np.asarray(x, dtype=float)
        xp = np.where(x > 0, x, 1.0)
        z = 2.0 * np.sqrt(self.a * self.lam * xp)
        out = np.exp(-self.a - self.lam * xp + z) * np.sqrt(self.a * self.lam / xp) * special.i1e(z)
        return _out(x, np.where(x > 0, out, 0.0))

    def sample(self, rng, count):
        counts = rng.poisson(self.a, size=int(count))
        out = np.zeros(int(count))
        pos = counts > 0
        out[pos] = rng.gamma(counts[pos], 1.0 / self.lam)
        return out

    def moments(self):
        return self.a / self.lam, 2.0 * self.a / self.lam**2

    def quantile(self, p):
        """Generalized inverse of ``cdf``; zero for ``p <= exp(-a)``."""
        if not 0 <= p < 1:
            raise DomainError("quantile needs 0 <= p < 1")
        if p <= self.atom_at_zero:
            return 0.0
        hi = 1.0 / self.lam
        while self.cdf(hi) < p:
            hi *= 2.0
        return optimize.brentq(lambda x: self.cdf(x) - p, 0.0, hi, xtol=1e-12)


def limit_laplace(law: LimitLaw, t):
    """``exp(-c t)`` or ``exp(a (lam / (lam + t) - 1))``."""
    return law.laplace(t)


def limit_cdf(law: LimitLaw, x):
    return law.cdf(x)


def limit_sample(law: LimitLaw, rng: np.random.Generator, count: int) -> np.ndarray:
    if count < 0:
        raise DomainError("count must be non-negative")
    return law.sample(rng, count)


def limit_moments(law: LimitLaw) -> tuple[float, float]:
    """Mean and variance: ``(c, 0)`` or ``(a / lam, 2 a / lam^2)``."""
    return law.moments()
