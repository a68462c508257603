"""Weak-convergence diagnostics for ``S_n`` against a candidate limit law."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dists import Distribution
from .errors import DomainError, QuadratureError, SolverError
from .gmeasure import gn_total_mass
from .limitlaw import LimitLaw
from .mc import SimulationConfig, default_t_grid, simulate_sn, zero_fraction
from .norming import NormalizingSequence
from .shrink import ShrunkenLaw, laplace_sum

REPORT_HEADER = ["n", "lt_sup", "ks", "zero_atom_gap", "gn_mass"]


def default_x_grid(law: LimitLaw, points: int = 200) -> np.ndarray:
    """``points`` equally spaced values from 0 to the law's 0.999 quantile."""
    return np.linspace(0.0, law.quantile(0.999), points)


def lt_distance(d: Distribution, seq: NormalizingSequence, n: int, law: LimitLaw, t_grid=None,
                method: str = "auto") -> float:
    """``sup_t |L[S_n; t] - L[S; t]|`` over ``t_grid`` using exact transforms."""
    t_grid = default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or np.any(t_grid <= 0):
        raise DomainError("t_grid must be non-empty and positive")
    shrunk = ShrunkenLaw(d, seq.r(n))
    pre = np.array([laplace_sum(shrunk, n, float(t), method) for t in t_grid])
    return float(np.max(np.abs(pre - np.asarray(law.laplace(t_grid)))))


def ks_distance(samples, law: LimitLaw, x_grid=None) -> float:
    """Kolmogorov distance between the empirical CDF and ``law.cdf``.

    The supremum runs over ``x_grid`` and every sample point, comparing both
    the values and the left limits, so jumps of either CDF are caught.  The
    atom at zero is compared at ``x = 0`` exactly.
    """
    s = np.sort(np.asarray(samples, dtype=float))
    if s.size == 0:
        raise DomainError("empty sample")
    m = s.size
    xs = np.unique(np.concatenate(([0.0], s, [] if x_grid is None else np.asarray(x_grid, dtype=float))))
    ecdf = np.searchsorted(s, xs, side="right") / m
    ecdf_left = np.searchsorted(s, xs, side="left") / m
    gap = np.abs(ecdf - np.asarray(law.cdf(xs)))
    gap_left = np.abs(ecdf_left - np.asarray(law.cdf_left(xs)))
    return float(max(gap.max(), gap_left.max()))


def dkw_band(m: int, alpha: float = 0.001) -> float:
    """Half-width ``eps`` with ``2 exp(-2 m eps^2) = alpha``."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * m))


@dataclass
class ReportConfig:
    """Simulation settings for ``full_report``; ``m=None`` skips Monte Carlo columns."""

    m: int | None = 10_000
    seed: int = 0
    t_grid: np.ndarray = field(default_factory=default_t_grid)
    x_grid: np.ndarray | None = None
    method: str = "direct"
    workers: int = 1


@dataclass
class ConvergenceRow:
    n: int
    lt_sup: float
    ks: float
    zero_atom_gap: float
    gn_mass: float
    error: str | None = None


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    t_grid: np.ndarray
    x_grid: np.ndarray
    seed: int
    m: int | None
    label: str = ""

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        if self.label:
            buf.write(f"# {self.label}\n")
        buf.write(f"# seed={self.seed} m={self.m}\n")
        buf.write("# t_grid=" + " ".join(repr(float(t)) for t in self.t_grid) + "\n")
        buf.write(f"# x_grid={len(self.x_grid)} points on [{float(self.x_grid[0])!r}, {float(self.x_grid[-1])!r}]\n")
        for row in self.rows:
            if row.error:
                buf.write(f"# error n={row.n}: {row.error}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for row in self.rows:
            w.writerow([row.n] + [repr(float(getattr(row, k))) for k in REPORT_HEADER[1:]])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @property
    def failed(self) -> bool:
        return any(r.error for r in self.rows)


def full_report(d: Distribution, seq: NormalizingSequence, law: LimitLaw, n_list,
                cfg: ReportConfig | None = None) -> ConvergenceReport:
    """One row per ``n``: transform distance, KS distance, zero-atom gap, ``G_n`` mass.

    A row whose computation raises a numerical or domain error is kept with
    NaN entries and the error message; later rows still run.
    """
    cfg = cfg or ReportConfig()
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError("n_list must be increasing")
    x_grid = default_x_grid(law) if cfg.x_grid is None else np.asarray(cfg.x_grid, dtype=float)
    rows = []
    for n in n_list:
        try:
            lt = lt_distance(d, seq, n, law, cfg.t_grid)
            mass = gn_total_mass(d, seq, n)
            ks = gap = math.nan
            if cfg.m:
                sim = SimulationConfig(d, seq, n, cfg.m, cfg.seed, cfg.t_grid)
                samples = simulate_sn(sim, method=cfg.method, workers=cfg.workers)
                ks = ks_distance(samples, law, x_grid)
                gap = abs(zero_fraction(samples) - law.atom_at_zero)
            rows.append(ConvergenceRow(n, lt, ks, gap, mass))
        except (DomainError, SolverError, QuadratureError) as exc:
            rows.append(ConvergenceRow(n, math.nan, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}"))
    return ConvergenceReport(rows, np.asarray(cfg.t_grid, dtype=float), x_grid, cfg.seed, cfg.m,
                             label=f"{d!r} | {seq!r} | {law!r}")
