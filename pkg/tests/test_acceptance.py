"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every criterion also enforces its runtime budget.  The lines are collected in
``conftest.ACCEPTANCE_LINES`` and repeated in the pytest terminal summary.
"""

import functools
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from hybridapprox.approx import approximate, c_constant, l2_error_exact, prop_error_bound, s1_bound_check
from hybridapprox.core_arith import mu, zeta
from hybridapprox.fbpoly import FbPoly
from hybridapprox.hybrid_space import (
    SpaceParams,
    WeightSpec,
    kernel_1d_korobov,
    kernel_1d_walsh,
    random_test_function,
)
from hybridapprox.pointsets import (
    build_pointset,
    cbc_construct,
    integration_error_bound_sq,
    lattice_pointset,
    trig_character_mean,
    walsh_character_mean,
)
from hybridapprox.spectrum import (
    count_A_M,
    eigenvalue_power_sum,
    enumerate_A_M,
    info_complexity_all,
    lemma_bound_A_M,
    min_error_all,
    tractability_report,
)
from hybridapprox.experiments import fit_loglog_slope

import conftest
from conftest import digit_oracle, grid_A_M

W1 = WeightSpec.constant(1.0)


def criterion(number, title, budget):
    """Time the check, enforce the runtime budget and record a PASS/FAIL line."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            detail, failure = "", None
            try:
                detail = fn(*args, **kwargs) or ""
                elapsed = time.perf_counter() - start
                assert elapsed < budget, f"runtime {elapsed:.2f} s exceeds {budget} s"
            except Exception as exc:
                failure = exc
            elapsed = time.perf_counter() - start
            status = "FAIL" if failure else "PASS"
            note = detail if failure is None else (str(failure).splitlines() or [type(failure).__name__])[0]
            line = f"criterion {number}: {status}  {title} ({elapsed:.2f} s / {budget} s) {note}".rstrip()
            conftest.ACCEPTANCE_LINES.append(line)
            print(line)
            if failure is not None:
                raise failure

        return run

    return wrap


@criterion(1, "largest eigenvalue gives min_error_all(0) = 1", 1)
def test_criterion_01_largest_eigenvalue():
    rng = np.random.default_rng(1)
    for _ in range(10):
        space = SpaceParams(int(rng.choice([2, 3, 5])), float(rng.uniform(1.1, 4)), float(rng.uniform(1.1, 4)),
                            int(rng.integers(0, 4)), int(rng.integers(0, 4)))
        fam = rng.choice(["const", "poly", "geom"])
        spec = {"const": f"const:c={rng.uniform(0.05, 1):.3f}", "poly": f"poly:a={rng.uniform(0.5, 3):.3f}",
                "geom": f"geom:q={rng.uniform(0.05, 0.95):.3f}"}[fam]
        assert min_error_all(space, WeightSpec.same(spec), 0) == 1.0
    return "10 configurations"


@criterion(2, "A_M matches brute-force grid filtering", 10)
def test_criterion_02_A_M_oracle():
    assert count_A_M(SpaceParams(2, 2.0, 2.0, 1, 0), W1, 10) == 4
    assert count_A_M(SpaceParams(2, 2.0, 2.0, 0, 1), W1, 10) == 7
    assert count_A_M(SpaceParams(2, 2.0, 2.0, 1, 1), W1, 4) == 16
    checked = 0
    for (s, t), (b, alpha, beta, weights) in itertools.product(
        [(s, t) for s in range(3) for t in range(3)],
        [(2, 2.0, 2.0, W1), (3, 1.5, 2.5, WeightSpec.same("poly:a=1")), (2, 3.0, 1.5, WeightSpec.same("geom:q=0.5"))],
    ):
        space = SpaceParams(b, alpha, beta, s, t)
        for M in (1, 4, 10, 100, 1000):
            kmax = b ** (int(math.log(M, b) / alpha) + 1)
            lmax = int(M ** (1 / beta)) + 1
            got = {(e.idx.k, e.idx.l) for e in enumerate_A_M(space, weights, M)}
            assert got == grid_A_M(space, weights, M, kmax, lmax), (space, M)
            checked += 1
    return f"{checked} (space, M) cases"


@criterion(3, "counting bound dominates |A_M|", 10)
def test_criterion_03_counting_bound():
    cases = 0
    spaces = [(SpaceParams(2, 2.0, 2.0, s, t), w) for s in range(3) for t in range(3)
              for w in (W1, WeightSpec.same("poly:a=2"))]
    spaces.append((SpaceParams(3, 1.5, 3.0, 2, 1), WeightSpec.same("geom:q=0.5")))
    for space, weights in spaces:
        theta = min(space.alpha, space.beta)
        for kappa in np.linspace(1 / theta + 0.1, 3.0, 10):
            for M in (1, 4, 10, 100, 1000):
                assert count_A_M(space, weights, M) <= lemma_bound_A_M(space, weights, M, float(kappa))
                cases += 1
    return f"{cases} cases, 0 violations"


@criterion(4, "eigenvalue partial sum at M = 1e6 within 1% of the product", 30)
def test_criterion_04_eigenvalue_sum():
    space = SpaceParams(2, 2.0, 2.0, 1, 1)
    target = (1 + mu(2, 2.0)) * (1 + 2 * zeta(2.0))
    partial = eigenvalue_power_sum(space, W1, 1e6, 1.0)
    rel = abs(partial - target) / target
    assert rel < 0.01, f"relative gap {rel:.3g}"
    return f"relative gap {rel:.2e}"


def _walsh_series(b, alpha, gamma, x, kappa_digits, blocks):
    """1 + sum_{1 <= k < K} rho(k) wal_k(x) with digits taken by floor formulas."""
    xi = np.array([digit_oracle(b, x, j + 1) for j in range(kappa_digits.shape[0])])
    phase = (xi @ kappa_digits) % b
    terms = gamma * float(b) ** (-alpha * blocks) * np.exp(2j * np.pi * phase / b)
    return 1.0 + float(np.sum(terms).real)


def _korobov_series(beta, gamma, z, L):
    """1 + sum_{0 < |l| <= L} gamma |l|^-beta e(l z), with l z reduced exactly mod 1."""
    ls = np.arange(1, L + 1, dtype=np.int64)
    frac = (ls * z.numerator % z.denominator) / z.denominator
    return 1.0 + float(np.sum(2.0 * gamma * ls ** (-beta) * np.cos(2 * np.pi * frac)))


@criterion(5, "1D kernel closed forms match 1e6-term series within 1e-6", 30)
def test_criterion_05_kernel_series():
    rng = np.random.default_rng(5)
    dens = rng.integers(2, 1001, 100)
    points = [Fraction(int(rng.integers(1, d)), int(d)) for d in dens]
    K = 10**6
    worst = 0.0
    for b, alpha, gamma in [(2, 2.0, 1.0), (3, 1.5, 0.7)]:
        ks = np.arange(1, K, dtype=np.int64)
        ndig = 1
        while b**ndig < K:
            ndig += 1
        kappa_digits = np.stack([(ks // b**j) % b for j in range(ndig)])
        blocks = np.zeros(K - 1)
        p = b
        while p < K:
            blocks += ks >= p
            p *= b
        for x in points:
            diff = abs(kernel_1d_walsh(b, alpha, gamma, x) - _walsh_series(b, alpha, gamma, x, kappa_digits, blocks))
            worst = max(worst, diff)
            assert diff < 1e-6, (b, alpha, x, diff)
    for beta, gamma in [(2.0, 1.0), (3.0, 0.5), (4.0, 1.0)]:
        for z in points:
            diff = abs(kernel_1d_korobov(beta, gamma, z) - _korobov_series(beta, gamma, z, K // 2))
            worst = max(worst, diff)
            assert diff < 1e-6, (beta, z, diff)
    return f"max deviation {worst:.1e} over 100 points"


@criterion(6, "dual-character sums are exactly 0 or 1", 5)
def test_criterion_06_dual_characters():
    b, sums = 2, 0
    for m in (1, 2, 3):
        N = b**m
        for f_low in range(N):
            f = FbPoly.from_int(b, N + f_low)
            for s in (1, 2):
                for g_ints in itertools.product(range(1, N), repeat=s):
                    ps = build_pointset(b, m, f, [FbPoly.from_int(b, c) for c in g_ints], [])
                    digits = [[[digit_oracle(b, x, j + 1) for j in range(m)] for x in p] for p, _ in ps.points()]
                    for k in itertools.product(range(N), repeat=s):
                        kd = [[(kj // b**i) % b for i in range(m)] for kj in k]
                        signs = [(-1) ** (sum(a * c for kj, xj in zip(kd, row) for a, c in zip(kj, xj)) % 2)
                                 for row in digits]
                        exact = Fraction(sum(signs), N)
                        mean = walsh_character_mean(ps, k)
                        assert exact in (0, 1) and mean == exact
                        sums += 1
    for N in range(2, 9):
        units = [z for z in range(1, N) if math.gcd(z, N) == 1]
        for t in (1, 2):
            for z in itertools.product(units, repeat=t):
                rows = np.array([[float(c) for c in r] for r in lattice_pointset(N, z)])
                m = round(math.log2(N)) if 2 ** round(math.log2(N)) == N else None
                ps = build_pointset(2, m, None, [], list(z)) if m else None
                for l in itertools.product(range(-N + 1, N), repeat=t):
                    direct = np.mean(np.exp(2j * np.pi * rows @ np.array(l)))
                    on_dual = sum(a * c for a, c in zip(l, z)) % N == 0
                    assert abs(direct - (1.0 if on_dual else 0.0)) < 1e-12
                    if ps is not None:
                        assert trig_character_mean(ps, l) == (1 if on_dual else 0)
                    sums += 1
    return f"{sums} character sums"


@criterion(7, "CBC sets satisfy the integration error bound", 120)
def test_criterion_07_cbc_bound():
    worst = 0.0
    for weights in (W1, WeightSpec.same("poly:a=2")):
        for s, t in itertools.product(range(3), repeat=2):
            if s + t == 0:
                continue
            space = SpaceParams(2, 2.0, 2.0, s, t)
            for m in range(2, 9):
                ps = cbc_construct(space, weights, m, check_bound=False)
                bound_sq = integration_error_bound_sq(space, weights, 2**m)
                ratio = ps.meta["error"] ** 2 / bound_sq
                worst = max(worst, ratio)
                assert ratio <= 1.0, (s, t, m, ratio)
    return f"max e^2/bound {worst:.3f}"


@criterion(8, "approximation error below the worst-case error bound", 300)
def test_criterion_08_worst_case_error_bound():
    space = SpaceParams(2, 2.0, 2.0, 1, 1)
    c = c_constant(space, W1, 1.0)
    worst = 0.0
    for m in range(4, 11):
        N = 2**m
        ps = cbc_construct(space, W1, m)
        M_choice, bound = prop_error_bound(space, W1, N, 1.0)
        assert bound == pytest.approx(math.sqrt(2) * (c / N) ** (1 / 6), rel=1e-14)
        for seed in range(20):
            f = random_test_function(space, W1, 64, 8, seed=seed)
            err = l2_error_exact(f, approximate(f, ps, space, W1, max(1.0, M_choice))).error
            worst = max(worst, err / bound)
            assert err <= bound, (N, seed, err, bound)
    return f"140 trials, max error/bound {worst:.3f}"


@criterion(9, "S1 < ||f||^2 / M", 10)
def test_criterion_09_s1_bound():
    space = SpaceParams(2, 2.0, 2.0, 1, 1)
    ps = cbc_construct(space, W1, 4)
    rng = np.random.default_rng(9)
    for trial in range(100):
        M = float(rng.uniform(1, 50))
        f = random_test_function(space, W1, 500, int(rng.integers(1, 16)), seed=trial)
        assert s1_bound_check(f, approximate(f, ps, space, W1, M))
    return "100 random sparse functions"


@criterion(10, "information complexity consistent with min_error_all", 30)
def test_criterion_10_complexity():
    configs = [
        (SpaceParams(2, 2.0, 2.0, 1, 1), W1),
        (SpaceParams(2, 2.0, 2.0, 2, 2), WeightSpec.same("poly:a=2")),
        (SpaceParams(3, 1.5, 2.5, 2, 1), WeightSpec.same("geom:q=0.5")),
        (SpaceParams(2, 3.0, 2.0, 1, 2), WeightSpec.same("list:0.8,0.4")),
    ]
    for space, weights in configs:
        for eps in (0.9, 0.5, 0.3, 0.1):
            n = info_complexity_all(space, weights, eps)
            assert min_error_all(space, weights, n) <= eps
            assert n == 0 or eps < min_error_all(space, weights, n - 1)
    return "4 weight configurations"


@criterion(11, "fitted complexity exponent within 0.3 of tau* = 1", 120)
def test_criterion_11_exponent():
    eps = np.logspace(-3, -1, 9)
    weights = WeightSpec.same("poly:a=2")
    slopes = {}
    for d in (1, 2, 3):
        space = SpaceParams(2, 2.0, 2.0, d, d)
        slopes[d] = fit_loglog_slope(eps, [info_complexity_all(space, weights, e) for e in eps])
    detail = "slopes " + ", ".join(f"s=t={d}: {v:.3f}" for d, v in slopes.items())
    assert abs(slopes[1] - 1.0) <= 0.3, detail
    return detail


@criterion(12, "tractability verdicts for j^-2, 1 and 1/j", 1)
def test_criterion_12_tractability():
    dec = tractability_report(2.0, 2.0, WeightSpec.same("poly:a=2"))
    assert dec.spt_all and dec.pt_all and dec.wt_all and dec.tau_all == 1.0
    assert dec.spt_std and dec.pt_std and dec.wt_std
    assert dec.tau_std_interval == (1.0, 5.0)
    const = tractability_report(2.0, 2.0, WeightSpec.same("const:c=1"))
    assert not const.wt_all and not const.wt_std
    assert not const.spt_all and not const.pt_all
    harm = tractability_report(2.0, 2.0, WeightSpec.same("poly:a=1"))
    assert harm.wt_all and harm.wt_std
    assert harm.pt_std and not harm.spt_std
    return "3 families"
