"""Acceptance suite.  Each test is one clause of a numbered criterion; the
terminal summary prints one PASS/FAIL line per criterion (see conftest.py).

Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import io
import math

import numpy as np
import pytest
from numpy.polynomial import Chebyshev
from scipy import integrate

from shrinklimit.cli import main as cli_main
from shrinklimit.diag import default_x_grid, dkw_band, ks_distance, lt_distance
from shrinklimit.dists import Exponential, HalfNormal
from shrinklimit.gmeasure import (
    TabulatedFn,
    check_scaled_equation,
    compute_gn,
    compute_h_direct,
    compute_hn,
    default_grid,
    exp_family_h,
    fine_grid,
    fit_h_solution,
    gn_total_mass,
    h_direct_fn,
    pexider_additive_family,
    pexider_exponential_family,
    subsequence_for_gap,
    verify_pexider,
)
from shrinklimit.limitlaw import CompoundPoissonExp, Degenerate, limit_laplace, limit_moments, limit_sample
from shrinklimit.mc import SimulationConfig, simulate_sn, zero_fraction
from shrinklimit.norming import ExponentialRule, HalfNormalRule

from pathlib import Path

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

A, LAM, C = 2.0, 1.0, 1.0
EX1 = (Exponential(LAM), ExponentialRule(A, LAM))
EX2 = (HalfNormal(), HalfNormalRule(C))
CPE = CompoundPoissonExp(A, LAM)
T_GRID = np.geomspace(0.05, 20, 400)

acc = pytest.mark.acceptance


# 1. compound Poisson branch

@acc("1", "Example 1 lt_distance <= 5e-5 at n=1e5 on t in [0.05, 20]")
def test_c1_distance_at_1e5():
    d = lt_distance(*EX1, 10**5, CPE, T_GRID)
    print(f"lt_distance(n=1e5) = {d:.3e}, bound a^2/(2n) = {A * A / 2e5:.1e}")
    assert d <= 5e-5


@acc("1", "Example 1 lt_distance decreasing over n in {1e2, 1e3, 1e4, 1e5}")
def test_c1_decreasing():
    vals = [lt_distance(*EX1, n, CPE, T_GRID) for n in (10**2, 10**3, 10**4, 10**5)]
    print("lt_distance:", vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


# 2. degenerate branch

@acc("2", "Example 2 lt_distance vs Degenerate(1) decreasing over n in {1e2, 1e3, 1e4}")
def test_c2_decreasing():
    vals = [lt_distance(*EX2, n, Degenerate(C), T_GRID) for n in (10**2, 10**3, 10**4)]
    print("lt_distance:", vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


@acc("2", "Example 2 lt_distance vs Degenerate(1) <= 0.05 at n=1e4")
def test_c2_final_value():
    d = lt_distance(*EX2, 10**4, Degenerate(C), T_GRID)
    print(f"lt_distance(n=1e4) = {d:.4f}")
    assert d <= 0.05


# 3. G_n exactness

@acc("3", "Example 1 G_n(inf) = 1 +- 1e-8 for every tested n")
def test_c3_example1_mass():
    masses = [compute_gn(*EX1, n).total_mass for n in (3, 10, 10**2, 10**3, 10**4, 10**5)]
    print("G_n(inf):", masses)
    assert max(abs(m - 1.0) for m in masses) <= 1e-8


@acc("3", "G_n(inf) <= n(1 - F(r_n)) + 1e-8 in all pipelines")
def test_c3_mass_bound():
    for d, seq in (EX1, EX2):
        for n in (10, 10**2, 10**3, 10**4, 10**5):
            assert gn_total_mass(d, seq, n) <= n * d.sf(seq.r(n)) + 1e-8


# 4. two routes for H

@acc("4", "|compute_hn - compute_h_direct| <= 1e-6 on u in {0.5, 1.5, 2, 5}, both pipelines, n in {1e3, 1e5}")
def test_c4_two_routes():
    worst = 0.0
    for d, seq in (EX1, EX2):
        for n in (10**3, 10**5):
            gn = compute_gn(d, seq, n, grid=fine_grid())
            for u in (0.5, 1.5, 2.0, 5.0):
                worst = max(worst, abs(compute_hn(gn, u) - compute_h_direct(d, seq, n, u)))
    print(f"max two-route gap = {worst:.2e}")
    assert worst <= 1e-6


# 5. functional equations

@acc("5", "exp family (alpha=-2, gamma=1) satisfies the scaled equation to 1e-10 for shift in {0.1, 0.3, 0.7}")
def test_c5_scaled_identity():
    u = default_grid()
    for shift in (0.1, 0.3, 0.7):
        assert check_scaled_equation(exp_family_h(-2.0, 1.0), shift, math.exp(shift), u) <= 1e-10


@acc("5", "fit_h_solution recovers (alpha, gamma) of generated exp-family samples within 1e-6")
def test_c5_fit_recovery():
    u = default_grid()
    for alpha, gamma in ((-2.0, 1.0), (-0.5, 0.3), (-3.0, 2.5)):
        fit = fit_h_solution(TabulatedFn(u, exp_family_h(alpha, gamma)(u)))
        assert fit.family == "exp"
        assert abs(fit.alpha - alpha) <= 1e-6 and abs(fit.gamma - gamma) <= 1e-6


@acc("5", "half-normal pipeline H_n at n=1e5 fits Constant with |kappa| <= 0.05")
def test_c5_halfnormal_constant():
    u = default_grid()
    fit = fit_h_solution(TabulatedFn(u, h_direct_fn(*EX2, 10**5)(u)))
    print(f"fit: family={fit.family} kappa={fit.kappa} alpha={fit.alpha:.4g} gamma={fit.gamma:.4g} "
          f"rms const={fit.residual_constant:.3g} exp={fit.residual_exp:.3g}")
    assert fit.family == "constant" and abs(fit.kappa) <= 0.05


# 6. Pexider-type equation

@acc("6", "both solution families give residual <= 1e-12 on a 20x20 grid in [0, 4]^2")
def test_c6_families():
    xs = np.linspace(0, 4, 20)
    assert verify_pexider(*pexider_exponential_family(1.0, -0.7, 3.0), xs) <= 1e-12
    assert verify_pexider(*pexider_additive_family(0.8, -1.5), xs) <= 1e-12


@acc("6", "quadratic negative control gives residual >= 1")
def test_c6_negative_control():
    xs = np.linspace(0, 4, 20)
    res = verify_pexider(lambda x: x**2, lambda y: np.ones_like(y), lambda y: y**2, xs)
    assert res >= 1


# 7. limit-law consistency

LIMITS = [CompoundPoissonExp(2.0, 1.0), CompoundPoissonExp(1.0, 2.0), CompoundPoissonExp(0.3, 0.5)]


@acc("7", "transform of limit_cdf equals limit_laplace to 1e-8")
def test_c7_transform_of_cdf():
    for law in LIMITS:
        for t in (0.5, 1.0, 2.0, 5.0):
            val, _ = integrate.quad(lambda x: t * math.exp(-t * x) * law.cdf(x), 0, np.inf, epsabs=1e-13, limit=200)
            assert abs(val - limit_laplace(law, t)) <= 1e-8


@acc("7", "sampler KS vs limit_cdf within the DKW 0.999 band at m=1e5")
def test_c7_sampler_ks():
    m = 100_000
    for i, law in enumerate(LIMITS):
        s = limit_sample(law, np.random.default_rng(100 + i), m)
        ks = ks_distance(s, law, default_x_grid(law))
        print(f"{law}: ks={ks:.4f} band={dkw_band(m):.4f}")
        assert ks <= dkw_band(m)


@acc("7", "zero-atom fraction within 4 std-errs of e^{-a}")
def test_c7_zero_atom():
    m = 100_000
    for i, law in enumerate(LIMITS):
        s = limit_sample(law, np.random.default_rng(200 + i), m)
        p = law.atom_at_zero
        assert abs(zero_fraction(s) - p) <= 4 * math.sqrt(p * (1 - p) / m)


@acc("7", "moments (a/lam, 2a/lam^2) match numerical derivatives of the transform to 1e-6")
def test_c7_moments():
    for law in LIMITS + [Degenerate(3.0)]:
        p = Chebyshev.interpolate(lambda t: limit_laplace(law, t), 20, domain=[0.0, 0.5])
        d1, d2 = p.deriv(1)(0.0), p.deriv(2)(0.0)
        mean, var = limit_moments(law)
        assert abs(-d1 - mean) <= 1e-6 and abs(d2 - d1 * d1 - var) <= 1e-6


# 8. Monte Carlo end to end

@pytest.fixture(scope="module")
def example1_samples():
    cfg = SimulationConfig(*EX1, n=10**4, m=10**5, seed=20200531)
    return simulate_sn(cfg, method="direct", workers=4)


@acc("8", "Example 1 at n=1e4, m=1e5: ks_distance vs CompoundPoissonExp(2, 1) <= 0.01")
def test_c8_ks(example1_samples):
    ks = ks_distance(example1_samples, CPE, default_x_grid(CPE))
    print(f"ks = {ks:.4f}")
    assert ks <= 0.01


@acc("8", "Example 1 at n=1e4, m=1e5: zero fraction within 4 std-errs of (1 - a/n)^n")
def test_c8_zero_fraction(example1_samples):
    n, m = 10**4, 10**5
    p = (1 - A / n) ** n
    z = zero_fraction(example1_samples)
    print(f"zero fraction {z:.5f} vs {p:.5f}")
    assert abs(z - p) <= 4 * math.sqrt(p * (1 - p) / m)


# 9. subsequence construction

@acc("9", "k_n at n=1e5: |r_{k_n} - r_n - c| <= 1e-3 and |k_n/n - e^{lam c}| <= 1e-3 for c in {0.25, 0.5, 0.9}")
def test_c9_subsequence():
    seq = EX1[1]
    n = 10**5
    for c in (0.25, 0.5, 0.9):
        k = subsequence_for_gap(seq, n, c)
        assert abs(seq.r(k) - seq.r(n) - c) <= 1e-3
        assert abs(k / n - math.exp(LAM * c)) <= 1e-3


# 10. determinism

def _converge(config, workers):
    out = io.StringIO()
    code = cli_main(["converge", str(config), "--workers", str(workers)], stdout=out)
    return code, out.getvalue().encode()


@acc("10", "converge repeated with the same seed is byte-identical under 1 and many threads")
def test_c10_determinism():
    for name in ("example1.ini", "example2.ini"):
        runs = [_converge(CONFIGS / name, w) for w in (1, 1, 8)]
        assert all(code == 0 for code, _ in runs)
        assert runs[0][1] == runs[1][1] == runs[2][1]
