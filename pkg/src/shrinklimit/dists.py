"""Non-negative distributions: CDF, survival, density, quantile and sampling.

Three kinds are provided. ``Exponential`` and ``HalfNormal`` have closed
forms; ``Tabulated`` is a monotone piecewise-linear CDF read from a grid of
``(x, F(x))`` pairs (an atom at the first grid point is allowed).

All samplers use the inverse-CDF method so that a seeded generator gives the
same draws on every platform.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import special

from .errors import DomainError

TAIL_EPS = 1e-12
_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def _check_prob(p):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or np.any(p >= 1) or np.any(np.isnan(p)):
        raise DomainError("quantile needs 0 <= p < 1")
    return p


def _scalar(x, out):
    return float(out) if np.ndim(x) == 0 else out


class Distribution:
    """Base class for laws supported on ``[0, inf)``.

    Subclasses supply ``cdf``, ``sf``, ``isf`` and ``quantile``.  Laws with a
    density additionally supply ``pdf`` and ``excess_pdf``; these are the
    laws for which Stieltjes integrals are computed by adaptive quadrature.
    """

    has_density = True

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        raise NotImplementedError

    def isf(self, q):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def excess_pdf(self, x, r):
        """Density at ``x >= 0`` of ``X - r`` conditional on ``X > r``."""
        raise NotImplementedError

    def tail_point(self, eps: float = TAIL_EPS) -> float:
        """Truncation point ``quantile(1 - eps)`` for improper integrals."""
        return float(self.isf(eps))

    def excess_tail(self, r: float, eps: float = TAIL_EPS) -> float:
        """Point beyond which ``X - r`` (given ``X > r``) has mass at most ``eps``."""
        s = float(self.sf(r))
        if s <= 0.0:
            return 0.0
        return max(float(self.isf(eps * s)) - r, 0.0)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        # 1 - U lies in (0, 1], so isf never sees 0
        v = 1.0 - rng.random(count)
        return np.asarray(self.isf(v), dtype=float)

    def sample_excess(self, rng: np.random.Generator, r: float, count: int) -> np.ndarray:
        """Draws of ``X - r`` conditional on ``X > r``."""
        v = 1.0 - rng.random(count)
        s = float(self.sf(r))
        return np.maximum(np.asarray(self.isf(v * s), dtype=float) - r, 0.0)


@dataclass(frozen=True)
class Exponential(Distribution):
    """Exponential law with density ``rate * exp(-rate * x)``."""

    rate: float = 1.0

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError(f"rate must be positive, got {self.rate}")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)))
        return _scalar(x, out)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0)))
        return _scalar(x, out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)))
        return _scalar(x, out)

    def isf(self, q):
        q = np.asarray(q, dtype=float)
        return _scalar(q, -np.log(q) / self.rate)

    def quantile(self, p):
        p = _check_prob(p)
        return _scalar(p, -np.log1p(-p) / self.rate)

    def excess_pdf(self, x, r):
        # memoryless: the excess over any level is again Exponential(rate)
        return self.pdf(x)


@dataclass(frozen=True)
class HalfNormal(Distribution):
    """Law of ``|Z|`` for standard normal ``Z``; density ``sqrt(2/pi) exp(-x^2/2)``."""

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, special.erf(np.maximum(x, 0.0) / _SQRT2))
        return _scalar(x, out)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 1.0, special.erfc(np.maximum(x, 0.0) / _SQRT2))
        return _scalar(x, out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < 0, 0.0, _SQRT_2_OVER_PI * np.exp(-0.5 * x * x))
        return _scalar(x, out)

    def isf(self, q):
        q = np.asarray(q, dtype=float)
        return _scalar(q, _SQRT2 * special.erfcinv(q))

    def quantile(self, p):
        p = _check_prob(p)
        # erfinv is accurate near 0, erfcinv near 1
        out = np.where(p < 0.5, _SQRT2 * special.erfinv(p), _SQRT2 * special.erfcinv(1.0 - p))
        return _scalar(p, out)

    def excess_pdf(self, x, r):
        # f(x + r) / sf(r) with the Gaussian factor exp(-r^2/2) cancelled via erfcx
        x = np.asarray(x, dtype=float)
        out = _SQRT_2_OVER_PI * np.exp(-0.5 * x * x - x * r) / special.erfcx(r / _SQRT2)
        return _scalar(x, np.where(x < 0, 0.0, out))


@dataclass(frozen=True, eq=False)
class Tabulated(Distribution):
    """Piecewise-linear CDF through ``(x[i], F[i])``.

    ``F`` is 0 to the left of ``x[0]`` and 1 from ``x[-1]`` on, so ``F[0] > 0``
    encodes an atom at ``x[0]``.  A single point ``(c, 1)`` is a point mass.
    """

    x: np.ndarray
    F: np.ndarray
    has_density = False
    _slopes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        F = np.asarray(self.F, dtype=float)
        if x.ndim != 1 or x.shape != F.shape or x.size == 0:
            raise DomainError("x and F must be non-empty 1-d arrays of equal length")
        if x[0] < 0:
            raise DomainError("support must lie in [0, inf)")
        if np.any(np.diff(x) <= 0):
            raise DomainError("x column must be strictly increasing")
        if np.any(np.diff(F) < 0) or F[0] < 0 or abs(F[-1] - 1.0) > 1e-12:
            raise DomainError("F must be non-decreasing from >= 0 up to 1")
        F = F.copy()
        F[-1] = 1.0
        x.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "F", F)
        slopes = np.diff(F) / np.diff(x) if x.size > 1 else np.empty(0)
        object.__setattr__(self, "_slopes", slopes)

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        """Load a table with header ``x,F``."""
        with open(Path(path), newline="") as fh:
            rows = [row for row in csv.reader(line for line in fh if not line.startswith("#"))]
        if not rows or [h.strip() for h in rows[0]] != ["x", "F"]:
            raise DomainError(f"{path}: expected header 'x,F'")
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
        return cls(data[:, 0], data[:, 1])

    def __repr__(self):
        return f"Tabulated({self.x.size} points on [{self.x[0]!r}, {self.x[-1]!r}])"

    @property
    def atom(self) -> tuple[float, float]:
        """Location and mass of the atom at the first grid point."""
        return float(self.x[0]), float(self.F[0])

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x < self.x[0], 0.0, np.interp(x, self.x, self.F))
        return _scalar(x, out)

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar(x, 1.0 - np.asarray(self.cdf(x)))

    def quantile(self, p):
        p = _check_prob(p)
        j = np.searchsorted(self.F, p, side="left")
        j = np.clip(j, 0, self.x.size - 1)
        lo = np.maximum(j - 1, 0)
        dF = self.F[j] - self.F[lo]
        frac = np.divide(p - self.F[lo], dF, out=np.zeros_like(p), where=dF > 0)
        out = np.where(j == 0, self.x[0], self.x[lo] + frac * (self.x[j] - self.x[lo]))
        return _scalar(p, out)

    def isf(self, q):
        q = np.asarray(q, dtype=float)
        return self.quantile(np.clip(1.0 - q, 0.0, np.nextafter(1.0, 0.0)))

    def sample(self, rng, count):
        return np.asarray(self.quantile(rng.random(count)), dtype=float)

    def sample_excess(self, rng, r, count):
        Fr = float(self.cdf(r))
        p = Fr + rng.random(count) * (1.0 - Fr)
        p = np.minimum(p, np.nextafter(1.0, 0.0))
        return np.maximum(np.asarray(self.quantile(p), dtype=float) - r, 0.0)

    def cells(self):
        """Iterate ``(left, right, slope)`` over the interpolation cells."""
        for i, s in enumerate(self._slopes):
            yield float(self.x[i]), float(self.x[i + 1]), float(s)


def cdf(d: Distribution, x):
    """``P(X <= x)``; zero for negative ``x``."""
    return d.cdf(x)


def quantile(d: Distribution, p):
    """Generalized inverse ``inf{x >= 0 : F(x) >= p}`` for ``0 <= p < 1``."""
    return d.quantile(p)


def sample(d: Distribution, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` i.i.d. draws from ``d`` using the inverse-CDF method."""
    if count < 0:
        raise DomainError("count must be non-negative")
    return d.sample(rng, int(count))
