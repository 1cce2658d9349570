"""Experiment drivers behind the command-line interface.

Each driver takes a validated ExperimentConfig and returns plain rows plus
metadata; formatting and exit codes live in :mod:`hybridapprox.cli`.  All
drivers are deterministic: seeds are explicit, tie-breaks are fixed, and
parallel cells are gathered back into canonical order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approx import approximate, l2_error_exact, prop_error_bound
from .config import ExperimentConfig, UsageError
from .fbpoly import FbPoly, smallest_irreducible
from .hybrid_space import random_test_function
from .pointsets import (HybridPointSet, build_pointset, cbc_construct, integration_error_bound_sq,
                        qmc_int_error)
from .spectrum import count_A_M, info_complexity_all, min_error_all, tractability_report


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# convergence of the approximation algorithm
# ---------------------------------------------------------------------------

def _convergence_cell(args) -> list:
    space, weights, m, kappa, seeds, terms, support_m = args
    N = space.b**m
    ps = cbc_construct(space, weights, m)
    m_choice, bound = prop_error_bound(space, weights, N, kappa)
    # M(N) < 1 for small N; A_M needs M >= 1, so clamp (A_1 is the smallest truncation).
    m_used = max(1.0, m_choice)
    count = min(terms, count_A_M(space, weights, support_m))
    errors = []
    for seed in range(seeds):
        f = random_test_function(space, weights, support_m, count, seed)
        res = approximate(f, ps, space, weights, m_used)
        errors.append(l2_error_exact(f, res).error)
    return [N, m, m_choice, m_used, float(np.mean(errors)), max(errors), bound]


def run_convergence(cfg: ExperimentConfig) -> Table:
    """One row per N = b^m: CBC point set, M(N), test-function errors, error bound."""
    if not cfg.m_range:
        raise UsageError("m-range is empty")
    if cfg.seeds < 1:
        raise UsageError(f"seeds must be >= 1, got {cfg.seeds}")
    space, weights = cfg.space, cfg.weight_spec
    cells = [(space, weights, m, cfg.kappa, cfg.seeds, cfg.terms, cfg.support_m)
             for m in sorted(set(cfg.m_range))]
    if cfg.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_convergence_cell, cells))
    else:
        rows = [_convergence_cell(c) for c in cells]
    rows.sort(key=lambda r: r[0])
    cols = ["N", "m", "M_choice", "M_used", "mean_error", "max_error", "bound"]
    violations = [r[0] for r in rows if r[5] > r[6]]
    meta = {"seeds": cfg.seeds, "terms": cfg.terms, "support_m": cfg.support_m,
            "kappa": cfg.kappa, "bound_violations": violations}
    return Table(cols, rows, meta)


# ---------------------------------------------------------------------------
# spectrum tables
# ---------------------------------------------------------------------------

def tau_star(cfg: ExperimentConfig) -> float | None:
    w = cfg.weight_spec
    if not (w.gamma1.is_family and w.gamma2.is_family):
        return None
    return tractability_report(cfg.alpha, cfg.beta, w, cfg.base).tau_all


def fit_loglog_slope(eps: list[float], n: list[int]) -> float | None:
    """Least-squares slope of log n against log(1/eps), over points with n >= 1."""
    pts = [(math.log(1.0 / e), math.log(k)) for e, k in zip(eps, n) if k >= 1]
    if len({p[0] for p in pts}) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def run_spectrum(cfg: ExperimentConfig) -> dict[str, Table]:
    """(N, min_error_all) and (eps, info_complexity_all) tables with a fitted exponent."""
    space, weights = cfg.space, cfg.weight_spec
    err_rows = [[n, min_error_all(space, weights, n)] for n in sorted(set(cfg.n_grid))]
    bad = [e for e in cfg.eps_grid if not 0 < e < 1]
    if bad:
        raise UsageError(f"eps-grid values must lie in (0, 1), got {bad}")
    eps = sorted(set(cfg.eps_grid), reverse=True)
    comp_rows = [[e, info_complexity_all(space, weights, e)] for e in eps]
    slope = fit_loglog_slope([r[0] for r in comp_rows], [r[1] for r in comp_rows])
    meta = {
        "fitted_slope": slope,
        "tau_star": tau_star(cfg),
        "note": "indicative only: finite-d log factors bias the fitted slope upward",
    }
    return {
        "min_error": Table(["N", "min_error_all"], err_rows),
        "complexity": Table(["eps", "info_complexity_all"], comp_rows, meta),
    }


# ---------------------------------------------------------------------------
# tractability and point sets
# ---------------------------------------------------------------------------

def run_tract(cfg: ExperimentConfig) -> dict:
    return tractability_report(cfg.alpha, cfg.beta, cfg.weight_spec, cfg.base).to_dict()


def run_cbc(cfg: ExperimentConfig) -> list[HybridPointSet]:
    space, weights = cfg.space, cfg.weight_spec
    return [cbc_construct(space, weights, m) for m in sorted(set(cfg.m_range))]


def run_pointset(cfg: ExperimentConfig) -> HybridPointSet:
    b, m, space = cfg.base, cfg.m, cfg.space
    if space.s and cfg.gen_poly is None:
        raise UsageError(f"s={space.s} needs --gen-poly (one polynomial per coordinate)")
    if space.t and cfg.gen_int is None:
        raise UsageError(f"t={space.t} needs --gen-int (one integer per coordinate)")
    f = FbPoly.parse(b, cfg.modulus) if cfg.modulus else smallest_irreducible(b, m)
    g = [FbPoly.parse(b, p) for p in (cfg.gen_poly or ())]
    ps = build_pointset(b, m, f, g, list(cfg.gen_int or ()))
    weights = cfg.weight_spec
    ps.meta.update({"error": qmc_int_error(ps, space, weights),
                    "bound": math.sqrt(integration_error_bound_sq(space, weights, ps.N))})
    return ps
