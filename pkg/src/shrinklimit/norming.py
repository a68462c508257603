"""Normalizing levels ``r_n`` for the shrunken sums.

Two closed rules are provided, matching the exponential and half-normal
worked cases, plus ``Explicit`` for a user-supplied table ``n -> r_n``.
Every rule caches the levels it has computed; the cache is guarded by a
lock so concurrent cold reads never observe a partially written entry.
"""
from __future__ import annotations

import csv
import math
import threading
from pathlib import Path

from scipy import optimize

from .errors import DomainError, SolverError

_HALF_LOG_2_OVER_PI = 0.5 * math.log(2.0 / math.pi)
BISECT_XTOL = 1e-10
MAX_DOUBLINGS = 200


class NormalizingSequence:
    """Base class: ``seq.r(n)`` returns the cached level for index ``n``."""

    def __init__(self):
        self._cache: dict[int, float] = {}
        self._lock = threading.Lock()

    def r(self, n: int) -> float:
        with self._lock:
            hit = self._cache.get(n)
        if hit is not None:
            return hit
        value = self._compute(n)
        with self._lock:
            return self._cache.setdefault(n, value)

    __call__ = r

    def warm(self, ns) -> None:
        """Fill the cache for every index in ``ns``."""
        for n in ns:
            self.r(n)

    def _compute(self, n: int) -> float:
        raise NotImplementedError

    def residual(self, n: int) -> float:
        """``|LHS - RHS|`` of the rule's defining equation at ``n``."""
        raise NotImplementedError


class ExponentialRule(NormalizingSequence):
    """``exp(-lam * r_n) = a / n``, defined for ``n > a``."""

    def __init__(self, a: float, lam: float = 1.0):
        super().__init__()
        if not (a > 0 and lam > 0):
            raise DomainError("ExponentialRule needs a > 0 and lam > 0")
        self.a = float(a)
        self.lam = float(lam)

    def _compute(self, n):
        return rn_exponential(self.a, self.lam, n)

    def residual(self, n):
        return abs(math.exp(-self.lam * self.r(n)) - self.a / n)

    def __repr__(self):
        return f"ExponentialRule(a={self.a!r}, lam={self.lam!r})"


class HalfNormalRule(NormalizingSequence):
    """``sqrt(2/pi) * n / (r_n^2 exp(r_n^2 / 2)) = c``."""

    def __init__(self, c: float):
        super().__init__()
        if not c > 0:
            raise DomainError("HalfNormalRule needs c > 0")
        self.c = float(c)

    def _compute(self, n):
        return rn_halfnormal(self.c, n)

    def residual(self, n):
        r = self.r(n)
        return abs(math.exp(_HALF_LOG_2_OVER_PI + math.log(n) - 2 * math.log(r) - 0.5 * r * r) - self.c)

    def __repr__(self):
        return f"HalfNormalRule(c={self.c!r})"


class Explicit(NormalizingSequence):
    """Levels read from a table; indices outside the table are an error."""

    def __init__(self, table):
        super().__init__()
        self._table = {int(k): float(v) for k, v in dict(table).items()}
        if any(v <= 0 for v in self._table.values()):
            raise DomainError("explicit levels must be positive")

    @classmethod
    def from_csv(cls, path) -> "Explicit":
        """Load a table with header ``n,r``."""
        with open(Path(path), newline="") as fh:
            reader = csv.reader(line for line in fh if not line.startswith("#"))
            header = [h.strip() for h in next(reader, [])]
            if header != ["n", "r"]:
                raise DomainError(f"{path}: expected header 'n,r'")
            return cls({int(row[0]): float(row[1]) for row in reader if row})

    def _compute(self, n):
        try:
            return self._table[n]
        except KeyError:
            raise DomainError(f"no tabulated level for n={n}") from None

    def residual(self, n):
        return 0.0

    def __repr__(self):
        return f"Explicit({len(self._table)} levels)"


def rn_exponential(a: float, lam: float, n) -> float:
    """Level solving ``exp(-lam r) = a / n``: ``log(n / a) / lam``.

    Raises
    ------
    DomainError
        If ``n <= a`` (the level would not be positive).
    """
    if not n > a:
        raise DomainError(f"need n > a, got n={n}, a={a}")
    return math.log(n / a) / lam


def k_halfnormal(x):
    """``sqrt(2/pi) x^-2 exp(-x^2/2)``; continuous and strictly decreasing on (0, inf)."""
    return math.sqrt(2.0 / math.pi) * math.exp(-0.5 * x * x) / (x * x)


def rn_halfnormal(c: float, n) -> float:
    """Unique root of ``k_halfnormal(x) = c / n`` by bracketed bisection.

    The bracket starts at ``[1e-6, 1]`` and its upper end is doubled until the
    sign changes.  The comparison is done on the log scale so that ``n`` may
    be an arbitrarily large integer.
    """
    if not (c > 0 and n >= 1):
        raise DomainError("rn_halfnormal needs c > 0 and n >= 1")
    target = math.log(c) - math.log(n)

    def f(x):
        return _HALF_LOG_2_OVER_PI - 2.0 * math.log(x) - 0.5 * x * x - target

    lo, hi = 1e-6, 1.0
    if f(lo) <= 0:
        raise SolverError(f"root below bracket start {lo} for c/n = {c}/{n}")
    for _ in range(MAX_DOUBLINGS):
        if f(hi) < 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise SolverError(f"no sign change after {MAX_DOUBLINGS} doublings")
    return optimize.bisect(f, lo, hi, xtol=BISECT_XTOL, maxiter=400)


def rn_gaps(seq: NormalizingSequence, n: int) -> float:
    """``w_n = r_{n+1} - r_n``."""
    return seq.r(n + 1) - seq.r(n)
