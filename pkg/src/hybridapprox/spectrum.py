"""Eigenvalues of the embedding, the truncation sets A_M and tractability.

The eigenvalues of ``EMB^* EMB`` are the products ``rho(k) r(l)``.  Per
coordinate they come in groups that share one factor: the Walsh block
``b^a <= k < b^(a+1)`` holds ``(b-1) b^a`` indices with weight
``gamma b^(-alpha a)``, and each magnitude ``n >= 1`` holds the two
trigonometric indices ``+-n``.  All enumeration and counting walks these groups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .core_arith import mu, zeta
from .errors import DivergenceError, ParameterError, UnsupportedError
from .hybrid_space import HybridIndex, SpaceParams, WeightSeq, WeightSpec, weight_product

# Relative slack for comparing a float inverse eigenvalue against M, so that
# boundary indices such as rho(2)^-1 = 4 = M are classified as exact arithmetic would.
REL_TOL = 1e-12


@dataclass(frozen=True)
class SpectrumEntry:
    idx: HybridIndex
    eigenvalue: float


def _limit(M: float, strict: bool) -> float:
    return M * (1.0 - REL_TOL) if strict else M * (1.0 + REL_TOL)


def _fits(x: float, lim: float, strict: bool) -> bool:
    return x < lim if strict else x <= lim


def _coords(space: SpaceParams, weights: WeightSpec) -> list[tuple[str, float]]:
    g1, g2 = weights.materialize(space)
    return [("w", g) for g in g1] + [("t", g) for g in g2]


def _groups(space: SpaceParams, kind: str, gamma: float, acc: float, lim: float,
            strict: bool) -> Iterator[tuple[float, int, Callable[[], range | tuple]]]:
    """Yield (inverse weight factor, multiplicity, values) while acc * factor fits."""
    yield 1.0, 1, lambda: (0,)
    if kind == "w":
        b, alpha = space.b, space.alpha
        a = 0
        while True:
            inv = float(b) ** (alpha * a) / gamma
            if not _fits(acc * inv, lim, strict):
                return
            lo = b**a
            yield inv, (b - 1) * lo, (lambda lo=lo: range(lo, lo * b))
            a += 1
    else:
        beta = space.beta
        n = 1
        while True:
            inv = float(n) ** beta / gamma
            if not _fits(acc * inv, lim, strict):
                return
            yield inv, 2, (lambda n=n: (-n, n))
            n += 1


def _trig_nmax(beta: float, gamma: float, acc: float, lim: float, strict: bool) -> int:
    """Largest n >= 0 with acc * n^beta / gamma fitting under lim."""
    guess = int((lim * gamma / acc) ** (1.0 / beta)) if lim > 0 else 0
    n = max(guess, 0)
    while n > 0 and not _fits(acc * float(n) ** beta / gamma, lim, strict):
        n -= 1
    while _fits(acc * float(n + 1) ** beta / gamma, lim, strict):
        n += 1
    return n


def _check_M(M: float) -> None:
    if not M >= 1:
        raise ParameterError(f"A_M is defined for M >= 1, got {M}")


def enumerate_A_M(space: SpaceParams, weights: WeightSpec, M: float) -> list[SpectrumEntry]:
    """All indices with eigenvalue >= 1/M, largest eigenvalue first.

    Ties are ordered lexicographically by (k, l).
    """
    _check_M(M)
    return _enumerate(space, weights, M, strict=False)


def _enumerate(space: SpaceParams, weights: WeightSpec, M: float, strict: bool) -> list[SpectrumEntry]:
    coords = _coords(space, weights)
    lim = _limit(M, strict)
    if not _fits(1.0, lim, strict):
        return []
    raw: list[tuple[int, ...]] = []

    def rec(j: int, acc: float, prefix: tuple[int, ...]) -> None:
        if j == len(coords):
            raw.append(prefix)
            return
        kind, gamma = coords[j]
        for inv, _, values in _groups(space, kind, gamma, acc, lim, strict):
            for v in values():
                rec(j + 1, acc * inv, prefix + (v,))

    rec(0, 1.0, ())
    s = space.s
    entries = []
    for flat in raw:
        idx = HybridIndex(flat[:s], flat[s:])
        entries.append(SpectrumEntry(idx, weight_product(space, weights, idx)))
    entries.sort(key=lambda e: (-e.eigenvalue, e.idx.k, e.idx.l))
    return entries


def _count(space: SpaceParams, weights: WeightSpec, M: float, strict: bool) -> int:
    coords = _coords(space, weights)
    lim = _limit(M, strict)
    if not _fits(1.0, lim, strict):
        return 0
    last = len(coords) - 1

    def rec(j: int, acc: float) -> int:
        if j > last:
            return 1
        kind, gamma = coords[j]
        if j == last and kind == "t":
            return 1 + 2 * _trig_nmax(space.beta, gamma, acc, lim, strict)
        if j == last:
            return sum(mult for _, mult, _ in _groups(space, kind, gamma, acc, lim, strict))
        return sum(mult * rec(j + 1, acc * inv)
                   for inv, mult, _ in _groups(space, kind, gamma, acc, lim, strict))

    return rec(0, 1.0)


def count_A_M(space: SpaceParams, weights: WeightSpec, M: float) -> int:
    """|A_M| without materialising the indices."""
    _check_M(M)
    return _count(space, weights, M, strict=False)


def eigenvalue_power_sum(space: SpaceParams, weights: WeightSpec, M: float, nu: float) -> float:
    """Sum of eigenvalue^nu over A_M (a partial sum of the full trace of W^nu)."""
    _check_M(M)
    coords = _coords(space, weights)
    lim = _limit(M, False)
    terms: list[float] = []

    def rec(j: int, acc: float, mult: int) -> None:
        if j == len(coords):
            terms.append(mult * acc ** (-nu))
            return
        kind, gamma = coords[j]
        for inv, m, _ in _groups(space, kind, gamma, acc, lim, False):
            rec(j + 1, acc * inv, mult * m)

    rec(0, 1.0, 1)
    return math.fsum(terms)


def eigenvalue_power_product(space: SpaceParams, weights: WeightSpec, nu: float) -> float:
    """Closed form of the full sum of eigenvalue^nu (needs alpha nu > 1 and beta nu > 1)."""
    if space.alpha * nu <= 1 or space.beta * nu <= 1:
        raise DivergenceError(f"sum of eigenvalue^nu diverges for nu={nu}")
    g1, g2 = weights.materialize(space)
    out = 1.0
    for g in g1:
        out *= 1.0 + g**nu * mu(space.b, space.alpha * nu)
    for g in g2:
        out *= 1.0 + g**nu * 2.0 * zeta(space.beta * nu)
    return out


def lemma_bound_A_M(space: SpaceParams, weights: WeightSpec, M: float, kappa: float) -> float:
    """Upper bound M^kappa prod(1 + 2 zeta(theta kappa) (b^alpha gamma)^kappa) ... on |A_M|."""
    theta = min(space.alpha, space.beta)
    if kappa * theta <= 1:
        raise DivergenceError(f"kappa must exceed 1/theta = {1 / theta}, got {kappa}")
    z = zeta(theta * kappa)
    g1, g2 = weights.materialize(space)
    out = float(M) ** kappa
    for g in g1:
        out *= 1.0 + 2.0 * z * (float(space.b) ** space.alpha * g) ** kappa
    for g in g2:
        out *= 1.0 + 2.0 * z * g**kappa
    return out


def min_error_all(space: SpaceParams, weights: WeightSpec, N: int) -> float:
    """N-th minimal worst-case error for all linear functionals: sqrt(lambda_{N+1})."""
    if N < 0:
        raise ParameterError(f"N must be non-negative, got {N}")
    if N == 0:
        return 1.0
    if space.d == 0:
        return 0.0
    M = float(max(2, N + 1))
    while count_A_M(space, weights, M) < N + 1:
        M *= 2.0
    return math.sqrt(enumerate_A_M(space, weights, M)[N].eigenvalue)


def info_complexity_all(space: SpaceParams, weights: WeightSpec, eps: float) -> int:
    """Smallest N with min_error_all(N) <= eps: the number of eigenvalues above eps^2."""
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if eps >= 1:
        return 0
    return _count(space, weights, 1.0 / (eps * eps), strict=True)


# ---------------------------------------------------------------------------
# tractability
# ---------------------------------------------------------------------------

def _family_exponent(seq: WeightSeq) -> float:
    if seq.kind == "const":
        return math.inf
    if seq.kind == "poly":
        return 1.0 / seq.param
    if seq.kind == "geom":
        return 0.0
    raise UnsupportedError(
        "the sum exponent is an asymptotic quantity; explicit weight lists do not determine it"
    )


def sum_exponent(weights: WeightSpec) -> float:
    """inf{kappa > 0 : sum_j gamma_j^kappa < inf for both sequences} (inf if empty)."""
    return max(_family_exponent(weights.gamma1), _family_exponent(weights.gamma2))


@dataclass(frozen=True)
class _FamilyFacts:
    tends_to_zero: bool
    summable: bool
    log_bounded: bool
    growth: str


def _facts(seq: WeightSeq) -> _FamilyFacts:
    if seq.kind == "const":
        c = seq.param
        return _FamilyFacts(False, False, False, f"partial sums = {c:g} n, average -> {c:g}")
    if seq.kind == "geom":
        q = seq.param
        return _FamilyFacts(True, True, True, f"partial sums -> q/(1-q) = {q / (1 - q):g}")
    if seq.kind == "poly":
        a = seq.param
        if a > 1:
            growth = f"partial sums -> zeta({a:g}) = {zeta(a):g}"
        elif a == 1:
            growth = "partial sums ~ log n (harmonic); ratio to log(n+1) -> 1"
        else:
            growth = f"partial sums ~ n^{1 - a:g}/{1 - a:g}; ratio to log(n+1) -> inf, average -> 0"
        return _FamilyFacts(True, a > 1, a >= 1, growth)
    raise UnsupportedError("tractability needs parametric weight families, not explicit lists")


@dataclass(frozen=True)
class TractabilityReport:
    alpha: float
    beta: float
    b: int
    weights: WeightSpec
    s_gamma: float
    spt_all: bool
    pt_all: bool
    wt_all: bool
    tau_all: float | None
    spt_std: bool
    pt_std: bool
    wt_std: bool
    tau_std_interval: tuple[float, float] | None
    parameters: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=dict)
    numeric_evidence: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def num(x):
            return "inf" if x is not None and math.isinf(x) else x

        return {
            "space": {"b": self.b, "alpha": self.alpha, "beta": self.beta},
            "weights": self.weights.to_dict(),
            "s_gamma": num(self.s_gamma),
            "item1_all_spt_pt": {"holds": self.spt_all, "pt_holds": self.pt_all,
                                 "tau_star": self.tau_all, "evidence": self.evidence["item1"]},
            "item2_all_wt": {"holds": self.wt_all, "evidence": self.evidence["item2"]},
            "item3_std_spt": {"sufficient_condition_holds": self.spt_std,
                              "tau_star_interval": list(self.tau_std_interval)
                              if self.tau_std_interval else None,
                              "evidence": self.evidence["item3"]},
            "item4_std_pt": {"sufficient_condition_holds": self.pt_std,
                             "evidence": self.evidence["item4"]},
            "item5_std_wt": {"holds": self.wt_std, "evidence": self.evidence["item5"]},
            "eigenvalue_limit": self.evidence["eigenvalue_limit"],
            "parameters": {k: num(v) for k, v in self.parameters.items()},
            "numeric_evidence": {"probative": False, "rows": self.numeric_evidence},
        }


def _numeric_rows(weights: WeightSpec, ds=(10, 100, 1000, 10000)) -> list[dict]:
    rows = []
    for d in ds:
        s1 = math.fsum(weights.gamma1.take(d))
        s2 = math.fsum(weights.gamma2.take(d))
        rows.append({
            "n": d,
            "sum_gamma1": s1,
            "sum_gamma2": s2,
            "average_over_2n": (s1 + s2) / (2 * d),
            "sum_gamma1_over_log": s1 / math.log(d + 1),
            "sum_gamma2_over_log": s2 / math.log(d + 1),
        })
    return rows


def tractability_report(alpha: float, beta: float, weights: WeightSpec, b: int = 2) -> TractabilityReport:
    """Closed-form tractability verdicts for parametric weight families.

    The std-class SPT and PT flags report whether the known *sufficient*
    conditions hold; ``False`` there means "not established", not "fails".
    """
    if not alpha > 1 or not beta > 1:
        raise DivergenceError("need alpha > 1 and beta > 1")
    f1, f2 = _facts(weights.gamma1), _facts(weights.gamma2)
    s_gamma = sum_exponent(weights)
    base_rate = max(s_gamma, 1.0 / alpha, 1.0 / beta)

    spt_all = math.isfinite(s_gamma)
    pt_all = spt_all
    tau_all = 2.0 * base_rate if spt_all else None
    wt = f1.tends_to_zero and f2.tends_to_zero
    spt_std = f1.summable and f2.summable
    pt_std = (f1.log_bounded and f2.log_bounded) or spt_std
    tau_std = (2.0 * base_rate, 4.0 + 2.0 * base_rate) if spt_std else None

    if spt_std and not spt_all or pt_std and not wt or pt_all and not wt:
        raise AssertionError("tractability implications violated")  # guarded by construction

    growth = f"gamma1: {f1.growth}; gamma2: {f2.growth}"
    evidence = {
        "item1": (f"s_gamma = {s_gamma:g}; SPT <=> PT <=> s_gamma < inf"
                  + (f"; tau* = 2 max(s_gamma, 1/alpha, 1/beta) = {tau_all:g}" if spt_all else "")),
        "item2": f"WT <=> (sum gamma1 + sum gamma2)/(s+t) -> 0; {growth}",
        "item3": f"sufficient: sum_j gamma_j < inf for both sequences; {growth}",
        "item4": f"sufficient: limsup sum_(j<=n) gamma_j / log(n+1) < inf for both; {growth}",
        "item5": f"WT <=> (sum gamma1 + sum gamma2)/(s+t) -> 0; {growth}",
        "eigenvalue_limit": ("for each fixed d the eigenvalues decay polynomially "
                             f"(order min(alpha, beta) = {min(alpha, beta):g} up to logs), so "
                             "lambda_(d,j) log^2 j -> 0 holds; the weight-average limit is the "
                             "binding necessary condition"),
    }
    params = {
        "nu": base_rate + 0.1 if spt_all else None,
        "q": 0.0,
        "kappa": 1.0,
        "theta": min(alpha, beta),
    }
    return TractabilityReport(
        alpha=alpha, beta=beta, b=b, weights=weights, s_gamma=s_gamma,
        spt_all=spt_all, pt_all=pt_all, wt_all=wt, tau_all=tau_all,
        spt_std=spt_std, pt_std=pt_std, wt_std=wt, tau_std_interval=tau_std,
        parameters=params, evidence=evidence, numeric_evidence=_numeric_rows(weights),
    )
