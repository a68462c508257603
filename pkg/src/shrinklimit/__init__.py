"""Limits of sums of shrunken non-negative i.i.d. variables.

``S_n = U_{r_n}(X_1) + ... + U_{r_n}(X_n)`` with ``U_r(x) = max(0, x - r)``
converges weakly only to a point mass or to a compound Poisson law with
exponential jumps.  This package computes the exact transforms of ``S_n``,
the measures ``G_n`` and functions ``H_n`` that drive the limit, checks the
functional equations they satisfy, and compares ``S_n`` with both limits by
exact transforms and by seeded simulation.
"""
from .dists import Distribution, Exponential, HalfNormal, Tabulated, cdf, quantile, sample
from .errors import DomainError, FitError, QuadratureError, SolverError
from .shrink import ShrunkenLaw, laplace_shrunken, laplace_sum, shrunken_cdf, u_r
from .norming import ExponentialRule, Explicit, HalfNormalRule, NormalizingSequence, rn_exponential, rn_gaps, rn_halfnormal
from .limitlaw import CompoundPoissonExp, Degenerate, LimitLaw, limit_cdf, limit_laplace, limit_moments, limit_sample
from .gmeasure import (
    FunctionalEquationProbe,
    HFit,
    TabulatedFn,
    check_scaled_equation,
    check_translation_equation,
    compute_gn,
    compute_h_direct,
    compute_hn,
    fit_h_solution,
    reconstruct_g_from_h,
    subsequence_for_gap,
    verify_pexider,
)
from .mc import SimulationConfig, empirical_cdf, empirical_laplace, simulate_sn, zero_fraction
from .diag import ConvergenceReport, ReportConfig, full_report, ks_distance, lt_distance

__version__ = "0.1.0"
