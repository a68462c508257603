"""Seeded Monte Carlo realizations of ``S_n = sum_k U_{r_n}(X_k)``.

Replication ``j`` draws from its own Philox stream whose key is derived from
the seed and whose counter starts at block ``j``.  A replication's values
therefore depend only on ``(seed, j)``, so any split of the replications
across worker threads gives bit-identical output.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dists import Distribution
from .errors import DomainError
from .norming import NormalizingSequence
from .shrink import u_r


def default_t_grid() -> np.ndarray:
    return np.geomspace(0.05, 20.0, 40)


@dataclass
class SimulationConfig:
    distribution: Distribution
    sequence: NormalizingSequence
    n: int
    m: int
    seed: int = 0
    t_grid: np.ndarray = field(default_factory=default_t_grid)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if self.m < 1:
            raise DomainError("replications m must be >= 1")
        t = np.asarray(self.t_grid, dtype=float)
        if t.ndim != 1 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise DomainError("t_grid must be strictly increasing and positive")
        self.t_grid = t


def _key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)


def _stream(key, j):
    # word 2 of the 256-bit counter selects the block; each block holds 2**128 draws
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, j, 0]))


def replication_stream(seed: int, j: int) -> np.random.Generator:
    """Independent generator for replication ``j`` under ``seed``."""
    return _stream(_key(seed), j)


def _one_direct(d, r, n, rng):
    return float(np.sum(u_r(d.sample(rng, n), r)))


def _one_exceedance(d, r, n, p_exceed, rng):
    k = int(rng.binomial(n, p_exceed))
    if k == 0:
        return 0.0
    return float(np.sum(d.sample_excess(rng, r, k)))


def simulate_sn(cfg: SimulationConfig, *, method: str = "direct", workers: int = 1) -> np.ndarray:
    """``cfg.m`` independent realizations of ``S_n``.

    ``method="direct"`` draws all ``n`` summands.  ``method="exceedance"``
    draws the number of summands above ``r_n`` from
    ``Binomial(n, 1 - F(r_n))`` and only those excesses; it has the same law
    and costs ``O(m n (1 - F(r_n)))``.
    """
    d, n = cfg.distribution, cfg.n
    r = cfg.sequence.r(n)
    if method == "direct":
        one = lambda rng: _one_direct(d, r, n, rng)  # noqa: E731
    elif method == "exceedance":
        p = float(d.sf(r))
        one = lambda rng: _one_exceedance(d, r, n, p, rng)  # noqa: E731
    else:
        raise ValueError(f"unknown method {method!r}")

    key = _key(cfg.seed)

    def run(js):
        return [one(_stream(key, j)) for j in js]

    if workers <= 1:
        return np.array(run(range(cfg.m)), dtype=float)
    chunks = np.array_split(np.arange(cfg.m), workers * 4)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, [c.tolist() for c in chunks]))
    return np.array([v for part in parts for v in part], dtype=float)


def _nonempty(samples):
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise DomainError("empty sample")
    return s


def empirical_laplace(samples, t):
    """Sample mean of ``exp(-t s)``; ``t`` may be an array."""
    s = _nonempty(samples)
    t = np.asarray(t, dtype=float)
    out = np.exp(-np.multiply.outer(t, s)).mean(axis=-1)
    return float(out) if out.ndim == 0 else out


def empirical_cdf(samples, x):
    """Fraction of samples ``<= x``."""
    s = np.sort(_nonempty(samples))
    x = np.asarray(x, dtype=float)
    out = np.searchsorted(s, x, side="right") / s.size
    return float(out) if out.ndim == 0 else out


def zero_fraction(samples) -> float:
    """Fraction of samples equal to exactly zero (the atom of ``S_n``)."""
    s = _nonempty(samples)
    return float(np.count_nonzero(s == 0.0)) / s.size


def samples_csv(samples, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["replication", "value"])
    for j, v in enumerate(np.asarray(samples, dtype=float)):
        w.writerow([j, repr(float(v))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def summary_stats(samples) -> dict[str, float]:
    s = _nonempty(samples)
    m = s.size
    return {
        "count": float(m),
        "mean": float(s.mean()),
        "var": float(s.var(ddof=1)) if m > 1 else 0.0,
        "stderr_mean": float(s.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0,
        "zero_fraction": zero_fraction(s),
    }


def summary_csv(stats: dict[str, float], path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["stat", "value"])
    for k, v in stats.items():
        w.writerow([k, repr(float(v))])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
