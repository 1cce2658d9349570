"""The weighted Walsh x Korobov reproducing kernel Hilbert space.

A function is represented by finitely many Walsh-Fourier coefficients
(:class:`CoeffFunction`).  The kernel is evaluated through closed forms for its
one-dimensional factors so that worst-case integration errors can be computed
exactly instead of from truncated series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

import mpmath
import numpy as np

from .core_arith import (
    as_unit,
    check_base,
    first_nonzero_digit,
    floor_log,
    mu,
    trig_multi,
    walsh_multi,
    zeta,
)
from .errors import DimensionError, DivergenceError, ParameterError

KOROBOV_TOL = 1e-10
# Largest truncation length used before falling back to the polylogarithm.
_MAX_SERIES_TERMS = 4_000_000


@dataclass(frozen=True)
class SpaceParams:
    b: int
    alpha: float
    beta: float
    s: int
    t: int

    def __post_init__(self):
        check_base(self.b)
        if not self.alpha > 1 or not self.beta > 1:
            raise DivergenceError(f"need alpha > 1 and beta > 1, got {self.alpha}, {self.beta}")
        if self.s < 0 or self.t < 0:
            raise ParameterError("dimensions s and t must be non-negative")

    @property
    def d(self) -> int:
        return self.s + self.t

    def to_dict(self) -> dict:
        return {"b": self.b, "alpha": self.alpha, "beta": self.beta, "s": self.s, "t": self.t}


_PARAM_NAMES = {"const": "c", "poly": "a", "geom": "q"}


@dataclass(frozen=True)
class WeightSeq:
    """One weight sequence gamma_1 >= gamma_2 >= ... in (0, 1].

    ``kind`` is one of ``const`` (gamma_j = c), ``poly`` (gamma_j = j^-a),
    ``geom`` (gamma_j = q^j) or ``list`` (explicit finite values).  Explicit
    lists only extend past their end when ``pad`` is set.
    """

    kind: str
    param: float | None = None
    values: tuple[float, ...] = ()
    pad: bool = False

    def __post_init__(self):
        k, p = self.kind, self.param
        if k == "const":
            if p is None or not 0 < p <= 1:
                raise ParameterError(f"const weights need 0 < c <= 1, got {p}")
        elif k == "poly":
            if p is None or not p > 0:
                raise ParameterError(f"poly weights need a > 0, got {p}")
        elif k == "geom":
            if p is None or not 0 < p < 1:
                raise ParameterError(f"geom weights need 0 < q < 1, got {p}")
        elif k == "list":
            vals = tuple(float(v) for v in self.values)
            if not vals:
                raise ParameterError("explicit weight list is empty")
            if any(not 0 < v <= 1 for v in vals):
                raise ParameterError(f"weights must lie in (0, 1]: {vals}")
            if any(a < c for a, c in zip(vals, vals[1:])):
                raise ParameterError(f"weights must be non-increasing: {vals}")
            object.__setattr__(self, "values", vals)
        else:
            raise ParameterError(f"unknown weight family {k!r}")

    @property
    def is_family(self) -> bool:
        return self.kind != "list"

    def __call__(self, j: int) -> float:
        """gamma_j for j >= 1."""
        if j < 1:
            raise ParameterError(f"weight index starts at 1, got {j}")
        if self.kind == "const":
            return float(self.param)
        if self.kind == "poly":
            return float(j) ** (-self.param)
        if self.kind == "geom":
            return float(self.param) ** j
        if j <= len(self.values):
            return self.values[j - 1]
        if self.pad:
            return self.values[-1]
        raise ParameterError(
            f"explicit weight list has {len(self.values)} entries, gamma_{j} requested "
            "(enable padding to repeat the last value)"
        )

    def take(self, n: int) -> tuple[float, ...]:
        return tuple(self(j) for j in range(1, n + 1))

    @classmethod
    def parse(cls, text: str) -> "WeightSeq":
        """Parse ``poly:a=2``, ``geom:q=0.5``, ``const:c=1`` or ``list:0.9,0.5``.

        A trailing ``+`` on a list (``list:0.9,0.5+``) enables padding.
        """
        kind, _, rest = text.strip().partition(":")
        kind = kind.strip()
        if kind == "list":
            pad = rest.endswith("+")
            rest = rest.rstrip("+")
            try:
                vals = tuple(float(v) for v in rest.split(",") if v.strip())
            except ValueError as exc:
                raise ParameterError(f"bad weight list {text!r}") from exc
            return cls("list", values=vals, pad=pad)
        names = _PARAM_NAMES
        if kind not in names:
            raise ParameterError(f"unknown weight family in {text!r}")
        key, _, val = rest.partition("=")
        if key.strip() != names[kind]:
            raise ParameterError(f"{kind} weights take parameter {names[kind]}=..., got {text!r}")
        try:
            return cls(kind, float(val))
        except ValueError as exc:
            raise ParameterError(f"bad weight parameter in {text!r}") from exc

    def spec(self) -> str:
        if self.kind == "list":
            return "list:" + ",".join(repr(v) for v in self.values) + ("+" if self.pad else "")
        return f"{self.kind}:{_PARAM_NAMES[self.kind]}={self.param!r}"


@dataclass(frozen=True)
class WeightSpec:
    gamma1: WeightSeq
    gamma2: WeightSeq

    @classmethod
    def same(cls, seq: WeightSeq | str) -> "WeightSpec":
        if isinstance(seq, str):
            seq = WeightSeq.parse(seq)
        return cls(seq, seq)

    @classmethod
    def constant(cls, c: float = 1.0) -> "WeightSpec":
        return cls.same(WeightSeq("const", c))

    def materialize(self, space: SpaceParams) -> tuple[tuple[float, ...], tuple[float, ...]]:
        return _materialize(self, space.s, space.t)

    def to_dict(self) -> dict:
        return {"gamma1": self.gamma1.spec(), "gamma2": self.gamma2.spec()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "WeightSpec":
        return cls(WeightSeq.parse(d["gamma1"]), WeightSeq.parse(d["gamma2"]))


@lru_cache(maxsize=1024)
def _materialize(weights: WeightSpec, s: int, t: int):
    return weights.gamma1.take(s), weights.gamma2.take(t)


class HybridIndex(NamedTuple):
    k: tuple[int, ...]
    l: tuple[int, ...]


def make_index(k: Iterable[int], l: Iterable[int]) -> HybridIndex:
    return HybridIndex(tuple(int(v) for v in k), tuple(int(v) for v in l))


def _check_index(space: SpaceParams, idx: HybridIndex) -> None:
    if len(idx.k) != space.s or len(idx.l) != space.t:
        raise DimensionError(
            f"index has shape ({len(idx.k)}, {len(idx.l)}), space has ({space.s}, {space.t})"
        )
    if any(kj < 0 for kj in idx.k):
        raise ParameterError(f"Walsh indices must be non-negative: {idx.k}")


# ---------------------------------------------------------------------------
# weights and eigenvalues
# ---------------------------------------------------------------------------

def rho_1d(b: int, alpha: float, gamma: float, k: int) -> float:
    if k == 0:
        return 1.0
    return gamma * float(b) ** (-alpha * floor_log(b, k))


def r_1d(beta: float, gamma: float, l: int) -> float:
    if l == 0:
        return 1.0
    return gamma * float(abs(l)) ** (-beta)


def weight_product(space: SpaceParams, weights: WeightSpec, idx: HybridIndex) -> float:
    """rho(k) r(l), the eigenvalue of the embedding attached to ``idx``."""
    _check_index(space, idx)
    g1, g2 = weights.materialize(space)
    out = 1.0
    for kj, gj in zip(idx.k, g1):
        out *= rho_1d(space.b, space.alpha, gj, kj)
    for lj, gj in zip(idx.l, g2):
        out *= r_1d(space.beta, gj, lj)
    return out


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------

def walsh_phi(b: int, alpha: float, i0: int | None) -> float:
    """sum_{k>=1} b^(-alpha floor(log_b k)) wal_k(z) for z with first nonzero digit at i0.

    ``i0=None`` stands for z = 0.  Blocks ``b^a <= k < b^(a+1)`` sum to
    ``(b-1) b^a`` while ``a < i0 - 1``, to ``-b^a`` at ``a = i0 - 1`` and to 0
    afterwards.
    """
    if alpha <= 1:
        raise DivergenceError(f"Walsh kernel needs alpha > 1, got {alpha}")
    if i0 is None:
        return mu(b, alpha)
    r = float(b) ** (1.0 - alpha)
    head = (b - 1) * math.fsum(r**a for a in range(i0 - 1))
    return head - r ** (i0 - 1)


def kernel_1d_walsh(b: int, alpha: float, gamma: float, z) -> float:
    check_base(b)
    z = as_unit(z)
    i0 = None if z == 0 else first_nonzero_digit(b, z)
    return 1.0 + gamma * walsh_phi(b, alpha, i0)


def walsh_kernel_table(b: int, alpha: float, gamma: float, m: int) -> np.ndarray:
    """Walsh kernel factor indexed by i0 in 0..m, where slot 0 means z = 0."""
    out = np.empty(m + 1)
    out[0] = 1.0 + gamma * walsh_phi(b, alpha, None)
    for i0 in range(1, m + 1):
        out[i0] = 1.0 + gamma * walsh_phi(b, alpha, i0)
    return out


@lru_cache(maxsize=64)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """B_0..B_n (with B_1 = -1/2)."""
    B = [Fraction(0)] * (n + 1)
    B[0] = Fraction(1)
    for j in range(1, n + 1):
        B[j] = -sum(math.comb(j + 1, i) * B[i] for i in range(j)) / (j + 1)
    return tuple(B)


def bernoulli_poly(n: int, x):
    """B_n(x); ``x`` may be a float or a numpy array."""
    B = bernoulli_numbers(n)
    out = 0.0
    for k in range(n + 1):
        out = out + float(math.comb(n, k) * B[k]) * x ** (n - k)
    return out


def _even_int(beta: float) -> int | None:
    if float(beta).is_integer() and int(beta) % 2 == 0:
        return int(beta)
    return None


def korobov_sigma(beta: float, z: float) -> float:
    """sum_{l != 0} |l|^-beta exp(2 pi i l z), for real z in [0, 1)."""
    if beta <= 1:
        raise DivergenceError(f"Korobov kernel needs beta > 1, got {beta}")
    n = _even_int(beta)
    if n is not None:
        return (-1) ** (n // 2 + 1) * (2 * math.pi) ** n * bernoulli_poly(n, z) / math.factorial(n)
    if z == 0:
        return 2.0 * zeta(beta)
    return _korobov_series(beta, z)


def _korobov_series(beta: float, z: float) -> float:
    # Tail after L terms is below both 2 L^(1-beta)/(beta-1) and, by Abel
    # summation, 2 (L+1)^-beta / |sin(pi z)|.
    sin = abs(math.sin(math.pi * z))
    L_abs = (2.0 / ((beta - 1.0) * KOROBOV_TOL)) ** (1.0 / (beta - 1.0))
    L_abel = (2.0 / (KOROBOV_TOL * sin)) ** (1.0 / beta) if sin > 0 else math.inf
    L = math.ceil(min(L_abs, L_abel))
    if L > _MAX_SERIES_TERMS:
        with mpmath.workdps(30):
            val = mpmath.polylog(beta, mpmath.expjpi(2 * mpmath.mpf(z)))
            return float(2 * mpmath.re(val))
    total = 0.0
    chunk = 1 << 20
    for start in range(1, L + 1, chunk):
        l = np.arange(start, min(start + chunk, L + 1), dtype=np.float64)
        total += float(np.sum(np.cos(2 * np.pi * l * z) * l ** (-beta)))
    return 2.0 * total


def _fold(z: Fraction) -> Fraction:
    # the Korobov factor is even in z; folding first keeps K(p, q) = K(q, p) bit-exact
    return min(z, 1 - z) if z else z


def kernel_1d_korobov(beta: float, gamma: float, z) -> float:
    z = as_unit(z)
    return 1.0 + gamma * korobov_sigma(beta, float(_fold(z)))


def korobov_kernel_table(beta: float, gamma: float, N: int) -> np.ndarray:
    """Korobov kernel factor at r/N for r = 0..N-1."""
    if beta <= 1:
        raise DivergenceError(f"Korobov kernel needs beta > 1, got {beta}")
    r = np.arange(N, dtype=np.int64)
    folded = np.minimum(r, N - r) if N > 1 else r
    n = _even_int(beta)
    if n is not None:
        z = folded.astype(np.float64) / N
        sig = (-1) ** (n // 2 + 1) * (2 * math.pi) ** n * bernoulli_poly(n, z) / math.factorial(n)
        return 1.0 + gamma * np.asarray(sig, dtype=np.float64)
    half = {int(f): 1.0 + gamma * korobov_sigma(beta, float(Fraction(int(f), N))) for f in set(folded)}
    return np.array([half[int(f)] for f in folded])


def _first_difference_position(b: int, x: Fraction, x2: Fraction) -> int | None:
    """i0 of x (-) x2: the first digit position where the expansions differ."""
    if x == x2:
        return None
    na, da = x.numerator, x.denominator
    nb, db = x2.numerator, x2.denominator
    i = 0
    while True:
        i += 1
        na *= b
        nb *= b
        ca, na = divmod(na, da)
        cb, nb = divmod(nb, db)
        if ca != cb:
            return i


def _split_point(space: SpaceParams, point) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    x, y = point
    if len(x) != space.s or len(y) != space.t:
        raise DimensionError(f"point has shape ({len(x)}, {len(y)}), space has ({space.s}, {space.t})")
    return tuple(as_unit(v) for v in x), tuple(as_unit(v) for v in y)


def kernel_eval(space: SpaceParams, weights: WeightSpec, point1, point2) -> float:
    """K((x, y), (x', y')) as a product of closed-form one-dimensional factors."""
    x1, y1 = _split_point(space, point1)
    x2, y2 = _split_point(space, point2)
    g1, g2 = weights.materialize(space)
    out = 1.0
    for a, c, gam in zip(x1, x2, g1):
        out *= 1.0 + gam * walsh_phi(space.b, space.alpha, _first_difference_position(space.b, a, c))
    for a, c, gam in zip(y1, y2, g2):
        out *= 1.0 + gam * korobov_sigma(space.beta, float(_fold((a - c) % 1)))
    return out


# ---------------------------------------------------------------------------
# functions with finitely many coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoeffFunction:
    space: SpaceParams
    weights: WeightSpec
    terms: Mapping[HybridIndex, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, c in self.terms.items():
            idx = make_index(*idx)
            _check_index(self.space, idx)
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ParameterError(f"non-finite coefficient at {idx}")
            clean[idx] = clean.get(idx, 0j) + c
        object.__setattr__(self, "terms", clean)

    def coeff(self, idx: HybridIndex) -> complex:
        return self.terms.get(idx, 0j)

    def __call__(self, point) -> complex:
        return eval_fn(self, point)

    def scaled(self, a: complex) -> "CoeffFunction":
        return CoeffFunction(self.space, self.weights, {i: a * c for i, c in self.terms.items()})

    def __add__(self, other: "CoeffFunction") -> "CoeffFunction":
        _check_same_space(self, other)
        terms = dict(self.terms)
        for i, c in other.terms.items():
            terms[i] = terms.get(i, 0j) + c
        return CoeffFunction(self.space, self.weights, terms)

    def __sub__(self, other: "CoeffFunction") -> "CoeffFunction":
        return self + other.scaled(-1)

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "weights": self.weights.to_dict(),
            "terms": [
                {"k": list(i.k), "l": list(i.l), "re": c.real, "im": c.imag}
                for i, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "CoeffFunction":
        space = SpaceParams(**d["space"])
        weights = WeightSpec.from_dict(d["weights"])
        terms = {make_index(t["k"], t["l"]): complex(t["re"], t["im"]) for t in d["terms"]}
        return cls(space, weights, terms)


def _check_same_space(f: CoeffFunction, g: CoeffFunction) -> None:
    if f.space != g.space or f.weights != g.weights:
        raise ParameterError("functions live in different spaces")


def norm_sq(f: CoeffFunction) -> float:
    return math.fsum(
        abs(c) ** 2 / weight_product(f.space, f.weights, idx) for idx, c in f.terms.items()
    )


def inner_product(f: CoeffFunction, g: CoeffFunction) -> complex:
    _check_same_space(f, g)
    total = 0j
    for idx, c in sorted(f.terms.items()):
        d = g.terms.get(idx)
        if d is not None:
            total += c * d.conjugate() / weight_product(f.space, f.weights, idx)
    return total


def eval_fn(f: CoeffFunction, point) -> complex:
    x, y = _split_point(f.space, point)
    total = 0j
    for idx, c in sorted(f.terms.items()):
        total += c * walsh_multi(f.space.b, idx.k, x) * trig_multi(idx.l, y)
    return total


def kernel_section(space: SpaceParams, weights: WeightSpec, point, M: float) -> CoeffFunction:
    """K(., p) truncated to the index set A_M."""
    from .spectrum import enumerate_A_M

    x, y = _split_point(space, point)
    terms = {}
    for e in enumerate_A_M(space, weights, M):
        char = walsh_multi(space.b, e.idx.k, x) * trig_multi(e.idx.l, y)
        terms[e.idx] = e.eigenvalue * char.conjugate()
    return CoeffFunction(space, weights, terms)


def random_test_function(space: SpaceParams, weights: WeightSpec, M: float, count: int,
                         seed: int) -> CoeffFunction:
    """Unit-norm function supported on ``count`` indices drawn uniformly from A_M.

    Coefficients are complex Gaussians rescaled to norm 1 and rotated so the
    coefficient of the first drawn index (in eigenvalue order) is real positive.
    """
    from .spectrum import enumerate_A_M

    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    entries = enumerate_A_M(space, weights, M)
    if count > len(entries):
        raise ParameterError(f"count={count} exceeds |A_M|={len(entries)}")
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(entries), size=count, replace=False))
    raw = rng.standard_normal(count) + 1j * rng.standard_normal(count)
    lam = np.array([entries[i].eigenvalue for i in chosen])
    raw = raw / math.sqrt(float(np.sum(np.abs(raw) ** 2 / lam)))
    raw = raw * (abs(raw[0]) / raw[0])
    terms = {entries[i].idx: complex(c) for i, c in zip(chosen, raw)}
    return CoeffFunction(space, weights, terms)
