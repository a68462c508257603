"""Finite measures ``G_n``, auxiliary functions ``H_n`` and functional-equation checks.

``G_n(y) = n int_0^y (1 - e^{-x}) dF(x + r_n)`` is tabulated on a grid.
``H_n(u) = int_1^u dG_n(x) / (1 - e^{-x})`` is computed two independent ways:
by Stieltjes integration of the tabulated ``G_n`` (``compute_hn``), and
directly as ``n [F(u + r_n) - F(1 + r_n)]`` (``compute_h_direct``).

Limits ``H`` are either constant or ``alpha (e^{-gamma u} - e^{-gamma})`` with
``alpha < 0 < gamma``; ``fit_h_solution`` decides which family a sampled
``H`` belongs to and ``reconstruct_g_from_h`` rebuilds ``G`` from the fit.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import interpolate, optimize

from .dists import Distribution
from .errors import DomainError, FitError, SolverError
from .limitlaw import CompoundPoissonExp, Degenerate, LimitLaw
from .norming import NormalizingSequence, rn_gaps
from .shrink import excess_integral

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)
LOG_GAMMA_RANGE = (-6.0, 6.0)
FIT_MIN_POINTS = 8
FIT_SPAN = (0.25, 5.0)


def default_grid() -> np.ndarray:
    """64 log-spaced points on ``[0.05, 8]`` together with ``u = 1``."""
    return np.union1d(np.geomspace(0.05, 8.0, 64), [1.0])


def fine_grid(ymax: float = 8.0, step: float = 0.01) -> np.ndarray:
    """Uniform grid on ``[0, ymax]``; fine enough for ``compute_hn`` to ~1e-7."""
    count = int(round(ymax / step)) + 1
    return np.union1d(np.linspace(0.0, ymax, count), [1.0])


@dataclass(frozen=True, eq=False)
class TabulatedFn:
    """A function tabulated on a strictly increasing grid.

    ``slopes`` (derivative at the nodes) is optional; when present the
    function is interpolated by cubic Hermite pieces, otherwise by a
    monotone PCHIP interpolant.  ``total_mass`` is set for measure-type
    functions and may exceed the last tabulated value by the tail mass.
    """

    grid: np.ndarray
    values: np.ndarray
    total_mass: float | None = None
    slopes: np.ndarray | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise DomainError("grid and values must be 1-d, equal length, at least 2 points")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if self.slopes is not None:
            object.__setattr__(self, "slopes", np.asarray(self.slopes, dtype=float))

    def interpolant(self):
        if self.slopes is not None:
            return interpolate.CubicHermiteSpline(self.grid, self.values, self.slopes)
        return interpolate.PchipInterpolator(self.grid, self.values)

    def __call__(self, x):
        return self.interpolant()(x)

    def to_csv(self, path=None) -> str:
        """Write ``x,value`` rows; ``total_mass`` goes into a comment line."""
        buf = io.StringIO()
        if self.total_mass is not None:
            buf.write(f"# total_mass={self.total_mass!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for x, v in zip(self.grid, self.values):
            w.writerow([repr(float(x)), repr(float(v))])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path) -> "TabulatedFn":
        mass = None
        rows = []
        for line in Path(path).read_text().splitlines():
            if line.startswith("#"):
                if line.startswith("# total_mass="):
                    mass = float(line.split("=", 1)[1])
                continue
            rows.append(line)
        reader = csv.reader(rows)
        if [h.strip() for h in next(reader, [])] != ["x", "value"]:
            raise DomainError(f"{path}: expected header 'x,value'")
        data = np.array([[float(v) for v in row] for row in reader if row])
        return cls(data[:, 0], data[:, 1], total_mass=mass)


@dataclass(frozen=True)
class FunctionalEquationProbe:
    """Parameters of the scaled equation ``H(u + shift) = H(u) / ratio_b + H(1 + shift)``."""

    shift: float
    ratio_b: float
    gap_limit_w: float = 0.0

    def __post_init__(self):
        if not 0 < self.shift < 1:
            raise DomainError("shift must lie in (0, 1)")
        if not self.ratio_b >= 1:
            raise DomainError("ratio_b must be >= 1")
        if not self.gap_limit_w >= 0:
            raise DomainError("gap_limit_w must lie in [0, inf]")


def _g_weight(x):
    return -np.expm1(-np.asarray(x, dtype=float))


def compute_gn(d: Distribution, seq: NormalizingSequence, n: int, grid=None) -> TabulatedFn:
    """Tabulate ``G_n`` on ``grid`` (default: ``default_grid()``).

    Each grid cell is integrated separately and the pieces accumulated.  The
    returned ``total_mass`` is the last value plus the integral beyond the
    grid.

    Raises
    ------
    QuadratureError
        If adaptive refinement exceeds its subdivision budget on some cell.
    """
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(grid < 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing and non-negative")
    r = seq.r(n)
    edges = np.concatenate(([0.0], grid))
    pieces = [n * excess_integral(d, _g_weight, r, a, b) for a, b in zip(edges[:-1], edges[1:])]
    values = np.cumsum(pieces)
    tail = n * excess_integral(d, _g_weight, r, float(grid[-1]), math.inf)
    slopes = None
    if d.has_density:
        slopes = n * float(d.sf(r)) * _g_weight(grid) * d.excess_pdf(grid, r)
    return TabulatedFn(grid, values, total_mass=float(values[-1] + tail), slopes=slopes)


def gn_total_mass(d: Distribution, seq: NormalizingSequence, n: int) -> float:
    """``G_n(inf)``; never exceeds ``n (1 - F(r_n))``."""
    return n * excess_integral(d, _g_weight, seq.r(n))


def compute_hn(gn: TabulatedFn, u: float) -> float:
    """``int_1^u dG_n(x) / (1 - e^{-x})`` from a tabulated ``G_n``.

    The interpolant's derivative is integrated against ``1 / (1 - e^{-x})``
    with 12-point Gauss-Legendre on every grid cell between 1 and ``u``.
    """
    if not u > 0:
        raise DomainError("compute_hn needs u > 0")
    lo, hi = min(u, 1.0), max(u, 1.0)
    if lo < gn.grid[0] or hi > gn.grid[-1]:
        raise DomainError(f"[{lo}, {hi}] is not covered by the grid [{gn.grid[0]}, {gn.grid[-1]}]")
    if lo == hi:
        return 0.0
    deriv = gn.interpolant().derivative()
    inner = gn.grid[(gn.grid > lo) & (gn.grid < hi)]
    knots = np.concatenate(([lo], inner, [hi]))
    a, b = knots[:-1, None], knots[1:, None]
    x = 0.5 * (b - a) * _GL_NODES[None, :] + 0.5 * (a + b)
    vals = deriv(x) / _g_weight(x)
    total = float(np.sum(0.5 * (b - a)[:, 0] * (vals @ _GL_WEIGHTS)))
    return total if u >= 1.0 else -total


def compute_h_direct(d: Distribution, seq: NormalizingSequence, n: int, u):
    """``n [F(u + r_n) - F(1 + r_n)]``, written with survival functions."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise DomainError("compute_h_direct needs u > 0")
    r = seq.r(n)
    out = n * (d.sf(1.0 + r) - np.asarray(d.sf(u + r)))
    return float(out) if out.ndim == 0 else out


def h_direct_fn(d: Distribution, seq: NormalizingSequence, n: int):
    """Vectorised callable ``u -> compute_h_direct(d, seq, n, u)``."""
    seq.r(n)
    return lambda u: compute_h_direct(d, seq, n, u)


def exp_family_h(alpha: float, gamma: float):
    """``u -> alpha (e^{-gamma u} - e^{-gamma})``."""
    return lambda u: alpha * (np.exp(-gamma * np.asarray(u, dtype=float)) - math.exp(-gamma))


def check_translation_equation(h, w: float, u_grid, *, anchor: float | None = None, steps: int = 1) -> float:
    """Max over ``u_grid`` of ``|H(u + k w) - H(u) - k H(1 + w)|`` with ``k = steps``.

    ``anchor`` replaces ``H(1 + w)``; passing ``anchor=0`` tests the constant
    solution, for which the iterated identity reads ``H(u + k w) = H(u)``.
    """
    u = np.asarray(u_grid, dtype=float)
    base = float(np.asarray(h(np.array([1.0 + w])))[0]) if anchor is None else float(anchor)
    res = np.asarray(h(u + steps * w)) - np.asarray(h(u)) - steps * base
    return float(np.max(np.abs(res)))


def check_scaled_equation(h, shift: float, ratio_b: float, u_grid) -> float:
    """Max over ``u_grid`` of ``|H(u + shift) - H(u) / ratio_b - H(1 + shift)|``."""
    u = np.asarray(u_grid, dtype=float)
    anchor = float(np.asarray(h(np.array([1.0 + shift])))[0])
    res = np.asarray(h(u + shift)) - np.asarray(h(u)) / ratio_b - anchor
    return float(np.max(np.abs(res)))


@dataclass(frozen=True)
class HFit:
    """Outcome of ``fit_h_solution``.

    ``family`` is ``"constant"`` (parameter ``kappa``) or ``"exp"``
    (parameters ``alpha < 0``, ``gamma > 0``).  ``residual`` is the RMS
    residual of the chosen family; both candidates' residuals are kept.
    """

    family: str
    kappa: float
    alpha: float
    gamma: float
    residual: float
    residual_constant: float
    residual_exp: float

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.family == "constant":
            return np.full_like(u, self.kappa) if u.ndim else self.kappa
        return exp_family_h(self.alpha, self.gamma)(u)

    def limit_law(self, mass: float | None = None) -> LimitLaw:
        """Limit law encoded by the fit: ``CompoundPoissonExp(-alpha, gamma)``, or a
        point mass at ``mass`` (the weight of ``G`` at zero) for the constant family."""
        if self.family == "exp":
            return CompoundPoissonExp(-self.alpha, self.gamma)
        if mass is None:
            raise DomainError("the constant family needs the mass of G at zero")
        return Degenerate(mass)


def _exp_profile(u, h, log_gamma):
    gamma = math.exp(log_gamma)
    basis = np.exp(-gamma * u) - math.exp(-gamma)
    bb = float(basis @ basis)
    if bb == 0.0:
        return 0.0, gamma, float(h @ h)
    alpha = float(basis @ h) / bb
    return alpha, gamma, float(np.sum((h - alpha * basis) ** 2))


def fit_h_solution(h_samples: TabulatedFn) -> HFit:
    """Classify sampled ``H`` as constant or ``alpha (e^{-gamma u} - e^{-gamma})``.

    The exponential family is fitted by least squares: ``alpha`` is solved
    linearly for each ``gamma`` and ``log gamma`` is searched on ``[-6, 6]``
    (coarse scan, then golden-section refinement).  Only ``alpha < 0`` is
    admissible.  The family with the smaller RMS residual is returned.

    Raises
    ------
    DomainError
        Fewer than 8 samples, or samples not spanning ``[0.25, 5]``.
    FitError
        Both residuals exceed 10% of the sample range.
    """
    u, h = h_samples.grid, h_samples.values
    if u.size < FIT_MIN_POINTS or u[0] > FIT_SPAN[0] or u[-1] < FIT_SPAN[1]:
        raise DomainError(f"need >= {FIT_MIN_POINTS} samples spanning {FIT_SPAN}")
    m = u.size
    kappa = float(np.mean(h))
    res_const = math.sqrt(float(np.sum((h - kappa) ** 2)) / m)

    lg = np.linspace(*LOG_GAMMA_RANGE, 241)
    prof = [_exp_profile(u, h, x) for x in lg]
    sse = np.array([p[2] if p[0] < 0 else np.inf for p in prof])
    alpha = gamma = math.nan
    res_exp = math.inf
    if np.isfinite(sse).any():
        i = int(np.argmin(sse))
        best = lg[i]
        if 0 < i < lg.size - 1 and np.isfinite(sse[i - 1]) and np.isfinite(sse[i + 1]):
            best = optimize.golden(
                lambda x: _exp_profile(u, h, x)[2], brack=(lg[i - 1], lg[i], lg[i + 1]), tol=1e-12
            )
        alpha, gamma, s = _exp_profile(u, h, float(best))
        if s > sse[i] or alpha >= 0:
            alpha, gamma, s = prof[i]
        res_exp = math.sqrt(s / m)

    spread = float(np.ptp(h))
    if res_const > 0.1 * spread and res_exp > 0.1 * spread:
        raise FitError(f"no admissible family fits: residuals {res_const:.3g}, {res_exp:.3g}, range {spread:.3g}")
    if res_exp < res_const:
        return HFit("exp", math.nan, alpha, gamma, res_exp, res_const, res_exp)
    return HFit("constant", kappa, math.nan, math.nan, res_const, res_const, res_exp)


def verify_pexider(f, phi, psi, xs, ys=None) -> float:
    """Max over pairs ``(x, y)`` of ``|f(x + y) - phi(y) f(x) - psi(y)|``."""
    xs = np.asarray(xs, dtype=float)
    ys = xs if ys is None else np.asarray(ys, dtype=float)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    res = np.asarray(f(X + Y)) - np.asarray(phi(Y)) * np.asarray(f(X)) - np.asarray(psi(Y))
    return float(np.max(np.abs(res)))


def pexider_exponential_family(alpha: float, gamma: float, c: float):
    """``f = alpha e^{gamma x} + c``, ``phi = e^{gamma x}``, ``psi = c (1 - e^{gamma x})``."""
    return (
        lambda x: alpha * np.exp(gamma * x) + c,
        lambda x: np.exp(gamma * x),
        lambda x: c * (1.0 - np.exp(gamma * x)),
    )


def pexider_additive_family(gamma: float, c: float):
    """``f = gamma x + c``, ``phi = 1``, ``psi = gamma x``."""
    return (
        lambda x: gamma * x + c,
        lambda x: np.ones_like(np.asarray(x, dtype=float)),
        lambda x: gamma * np.asarray(x, dtype=float),
    )


def reconstruct_g_from_h(fit: HFit, grid, mass: float | None = None) -> TabulatedFn:
    """Rebuild ``G`` from a fitted ``H``.

    For the exponential family
    ``G(y) = -alpha gamma int_0^y (1 - e^{-x}) e^{-gamma x} dx`` in closed
    form (``y = inf`` allowed).  For the constant family ``G`` is a point
    mass at zero whose weight ``mass`` must come from ``G_n``.
    """
    y = np.asarray(grid, dtype=float)
    if np.any(y < 0):
        raise DomainError("grid must be non-negative")
    if fit.family == "exp":
        a, g = fit.alpha, fit.gamma
        total = -a / (g + 1.0)
        with np.errstate(invalid="ignore"):
            vals = -a * g * (-np.expm1(-g * y) / g + np.expm1(-(g + 1.0) * y) / (g + 1.0))
        vals = np.where(np.isinf(y), total, vals)
        return TabulatedFn(y, vals, total_mass=total)
    if mass is None:
        raise DomainError("constant family: pass the mass of G at zero (from compute_gn)")
    vals = np.where(y > 0, mass, 0.0)
    return TabulatedFn(y, vals, total_mass=float(mass))


def subsequence_for_gap(seq: NormalizingSequence, n: int, c: float) -> int:
    """``k_n = sup{k >= n : r_k - r_n < c}`` for increasing, unbounded levels.

    Found by doubling ``k - n`` until the gap reaches ``c`` and then
    bisecting on the integer index.
    """
    if not c > 0:
        raise DomainError("gap target c must be positive")
    base = seq.r(n)
    step = 1
    while seq.r(n + step) - base < c:
        step *= 2
        if step > 2**62:
            raise SolverError("levels appear bounded; no index reaches the gap")
    lo, hi = n + step // 2 if step > 1 else n, n + step
    # invariant: r_lo - r_n < c <= r_hi - r_n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if seq.r(mid) - base < c:
            lo = mid
        else:
            hi = mid
    return lo


def probe_from_sequence(seq: NormalizingSequence, n: int, shift: float) -> FunctionalEquationProbe:
    """Estimate ``ratio_b = k_n / n`` for the given shift, and ``w_n``."""
    k = subsequence_for_gap(seq, n, shift)
    return FunctionalEquationProbe(shift=shift, ratio_b=max(k / n, 1.0), gap_limit_w=rn_gaps(seq, n))


REPORT_HEADER = ["n", "mass", "residual_eq11", "residual_eq12", "fit_family", "alpha", "gamma"]


def h_report(d: Distribution, seq: NormalizingSequence, n_list, *, shift: float = 0.3, u_grid=None):
    """Per-``n`` rows of mass, functional-equation residuals and the ``H`` fit."""
    u = default_grid() if u_grid is None else np.asarray(u_grid, dtype=float)
    rows = []
    for n in n_list:
        h = h_direct_fn(d, seq, n)
        probe = probe_from_sequence(seq, n, shift)
        fit = fit_h_solution(TabulatedFn(u, h(u)))
        rows.append({
            "n": n,
            "mass": gn_total_mass(d, seq, n),
            "residual_eq11": check_translation_equation(h, probe.gap_limit_w, u),
            "residual_eq12": check_scaled_equation(h, shift, probe.ratio_b, u),
            "fit_family": fit.family,
            "alpha": fit.alpha,
            "gamma": fit.gamma,
        })
    return rows


def h_report_csv(rows, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for row in rows:
        w.writerow([row["fit_family"] if k == "fit_family" else repr(row[k]) for k in REPORT_HEADER])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
