"""Truncated-spectrum QMC approximation and its error analysis.

The algorithm estimates every Walsh-Fourier coefficient in A_M by a QMC
average over a hybrid (PL, L) point set and discards everything else.  Its L2
error splits by Parseval into the truncation part S1 and the estimation part S2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .core_arith import mu, zeta
from .errors import DivergenceError, ParameterError
from .hybrid_space import CoeffFunction, HybridIndex, SpaceParams, WeightSpec, norm_sq
from .pointsets import HybridPointSet, _check_dims, trig_exponents, walsh_exponents
from .spectrum import enumerate_A_M


@dataclass(frozen=True, eq=False)
class ApproxResult:
    space: SpaceParams
    weights: WeightSpec
    support: tuple[HybridIndex, ...]
    estimates: np.ndarray
    pointset: HybridPointSet
    M: float
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.pointset.N

    def estimate(self, idx: HybridIndex) -> complex:
        return complex(self._lookup().get(idx, 0j))

    def _lookup(self) -> dict:
        cache = self.meta.get("_lookup")
        if cache is None:
            cache = dict(zip(self.support, (complex(c) for c in self.estimates)))
            self.meta["_lookup"] = cache
        return cache

    def as_coeff_function(self) -> CoeffFunction:
        return CoeffFunction(self.space, self.weights, dict(self._lookup()))

    def refine(self, M: float) -> "ApproxResult":
        """Re-run with another truncation M, reusing the cached function values."""
        return approximate_from_values(self.values, self.pointset, self.space, self.weights, M)

    def to_dict(self, kappa: float = 1.0) -> dict:
        """CoeffFunction JSON plus N, M, generating vectors, kappa and the error bound."""
        out = self.as_coeff_function().to_dict()
        try:
            bound = prop_error_bound(self.space, self.weights, self.N, kappa)[1]
        except DivergenceError:
            bound = None
        out.update({
            "N": self.N,
            "M": self.M,
            "kappa": kappa,
            "bound": bound,
            "pointset": self.pointset.metadata(),
            **{k: v for k, v in self.meta.items() if not k.startswith("_")},
        })
        return out


def sample(f_eval: Callable, ps: HybridPointSet) -> np.ndarray:
    """Evaluate f once at every node, in node order."""
    return np.array([complex(f_eval(p)) for p in ps.points()], dtype=np.complex128)


def approximate(f_eval: Callable, ps: HybridPointSet, space: SpaceParams, weights: WeightSpec,
                M: float) -> ApproxResult:
    """Apply A_{N,s,t,M}: N function evaluations, one QMC average per index in A_M."""
    _check_dims(ps, space)
    enumerate_A_M(space, weights, M)  # validates M before spending evaluations
    return approximate_from_values(sample(f_eval, ps), ps, space, weights, M)


def approximate_from_values(values: np.ndarray, ps: HybridPointSet, space: SpaceParams,
                            weights: WeightSpec, M: float) -> ApproxResult:
    _check_dims(ps, space)
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != (ps.N,):
        raise ParameterError(f"expected {ps.N} function values, got shape {values.shape}")
    support = tuple(e.idx for e in enumerate_A_M(space, weights, M))
    N, b = ps.N, ps.b
    # wal_k(p_v) trig_l(q_v) = exp(2 pi i (e_w N + e_t b) / (b N)) with exact integer exponents.
    D = b * N
    roots = np.exp(-2j * np.pi * np.arange(D) / D)
    est = np.empty(len(support), dtype=np.complex128)
    for i, idx in enumerate(support):
        ew = walsh_exponents(ps.walsh_num, b, ps.m, idx.k)
        et = trig_exponents(ps.trig_num, N, idx.l)
        phase = (ew * N + et * b) % D
        # bucket sums accumulate in v-order; any shift invariance implies
        # invariance under D/b (generator of the minimal subgroup of Z_D),
        # which makes the sum exactly 0
        buckets = (np.bincount(phase, weights=values.real, minlength=D)
                   + 1j * np.bincount(phase, weights=values.imag, minlength=D))
        if D > 1 and np.array_equal(buckets, np.roll(buckets, D // b)):
            est[i] = 0.0
        else:
            est[i] = np.sum(buckets * roots) / N
    return ApproxResult(space, weights, support, est, ps, M, values)


class L2Error(NamedTuple):
    error: float
    s1: float
    s2: float


def _check_match(f_true: CoeffFunction, res: ApproxResult) -> None:
    if f_true.space != res.space or f_true.weights != res.weights:
        raise ParameterError("function and approximation live in different spaces")


def l2_error_exact(f_true: CoeffFunction, res: ApproxResult) -> L2Error:
    """||f - A(f)||_L2 via Parseval, with the truncation part S1 and estimation part S2."""
    _check_match(f_true, res)
    inside = res._lookup()
    s1 = math.fsum(abs(c) ** 2 for idx, c in f_true.terms.items() if idx not in inside)
    s2 = math.fsum(abs(f_true.coeff(idx) - est) ** 2 for idx, est in inside.items())
    return L2Error(math.sqrt(s1 + s2), s1, s2)


def s1_bound_check(f_true: CoeffFunction, res: ApproxResult) -> bool:
    """Whether S1 < ||f||^2 / M."""
    err = l2_error_exact(f_true, res)
    nrm = norm_sq(f_true)
    if nrm == 0:
        return err.s1 == 0
    return err.s1 < nrm / res.M


def c_constant(space: SpaceParams, weights: WeightSpec, kappa: float) -> float:
    """Constant c_{s,t,alpha,beta,gamma,kappa} of the approximation error bound."""
    theta = min(space.alpha, space.beta)
    if kappa * theta <= 1:
        raise DivergenceError(f"kappa must exceed 1/min(alpha, beta) = {1 / theta}, got {kappa}")
    g1, g2 = weights.materialize(space)
    b, alpha, beta = space.b, space.alpha, space.beta
    zk = zeta(theta * kappa)
    out = 2.0
    for g in g1:
        out *= (1.0 + 2.0 * g * mu(b, alpha)) * (1.0 + 2.0 * zk * (float(b) ** alpha * g) ** kappa)
    for g in g2:
        out *= ((1.0 + 4.0 * g * zeta(beta)) * max(1.0, 2.0**beta * g)
                * (1.0 + 2.0 * zk * g**kappa))
    return out


def _log_b_exact(b: int, N: int) -> int | None:
    m, p = 0, 1
    while p < N:
        p *= b
        m += 1
    return m if p == N else None


def prop_error_bound(space: SpaceParams, weights: WeightSpec, N: int, kappa: float = 1.0) -> tuple[float, float]:
    """(M(N), bound): M = (N/c)^(1/(2+kappa)) and sqrt(2) (c/N)^(1/(4+2 kappa))."""
    if N < 1 or _log_b_exact(space.b, N) is None:
        raise ParameterError(f"N={N} is not a power of b={space.b}")
    c = c_constant(space, weights, kappa)
    return (N / c) ** (1.0 / (2.0 + kappa)), math.sqrt(2.0) * (c / N) ** (1.0 / (4.0 + 2.0 * kappa))
