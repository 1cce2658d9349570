"""Lattice, polynomial lattice and hybrid (PL, L) point sets.

Coordinates are stored as integer numerators: Walsh coordinates over ``b^m``
and lattice coordinates over ``N``.  Both denominators equal ``N = b^m``, so a
hybrid point set is exactly representable and every kernel evaluation is
driven by exact integer digit arithmetic.
"""

from __future__ import annotations

import io
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core_arith import check_base, mu, zeta
from .errors import ConsistencyError, DimensionError, ParameterError
from .fbpoly import FbPoly, iter_G, nu_m, nu_numerator, smallest_irreducible, warn_zero_generators
from .hybrid_space import SpaceParams, WeightSpec, korobov_kernel_table, walsh_kernel_table

# Objectives within this relative distance of the minimum count as ties.
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class HybridPointSet:
    """N = b^m nodes (p_v, q_v); ``walsh_num`` / b^m and ``trig_num`` / N are the coordinates."""

    b: int
    m: int
    walsh_num: np.ndarray
    trig_num: np.ndarray
    gen_poly: tuple[FbPoly, ...] = ()
    modulus: FbPoly | None = None
    gen_int: tuple[int, ...] = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        check_base(self.b)
        N = self.N
        wn = np.asarray(self.walsh_num, dtype=np.int64).reshape(N, -1)
        tn = np.asarray(self.trig_num, dtype=np.int64).reshape(N, -1)
        if wn.size and (wn.min() < 0 or wn.max() >= N):
            raise ParameterError("Walsh numerators must lie in [0, b^m)")
        if tn.size and (tn.min() < 0 or tn.max() >= N):
            raise ParameterError("lattice numerators must lie in [0, N)")
        for z in self.gen_int:
            if not 1 <= z < N or math.gcd(z, N) != 1:
                raise ParameterError(f"lattice generator {z} is not in Z_{N}")
        wn.flags.writeable = False
        tn.flags.writeable = False
        object.__setattr__(self, "walsh_num", wn)
        object.__setattr__(self, "trig_num", tn)

    @property
    def N(self) -> int:
        return self.b**self.m

    @property
    def s(self) -> int:
        return self.walsh_num.shape[1]

    @property
    def t(self) -> int:
        return self.trig_num.shape[1]

    @property
    def walsh_part(self) -> tuple[tuple[Fraction, ...], ...]:
        N = self.N
        return tuple(tuple(Fraction(int(a), N) for a in row) for row in self.walsh_num)

    @property
    def trig_part(self) -> tuple[tuple[Fraction, ...], ...]:
        N = self.N
        return tuple(tuple(Fraction(int(a), N) for a in row) for row in self.trig_num)

    def points(self) -> list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]]:
        return list(zip(self.walsh_part, self.trig_part))

    def permuted(self, order: Sequence[int]) -> "HybridPointSet":
        order = np.asarray(order)
        return HybridPointSet(self.b, self.m, self.walsh_num[order], self.trig_num[order],
                              self.gen_poly, self.modulus, self.gen_int, dict(self.meta))

    @classmethod
    def from_points(cls, b: int, m: int, walsh_rows, trig_rows) -> "HybridPointSet":
        """Build from explicit rational coordinates (no generating data)."""
        N = b**m
        if len(walsh_rows) != N or len(trig_rows) != N:
            raise DimensionError(f"need exactly N = {N} rows")

        def nums(rows):
            out = []
            for row in rows:
                r = []
                for v in row:
                    scaled = Fraction(v) * N
                    if scaled.denominator != 1 or not 0 <= scaled < N:
                        raise ParameterError(f"coordinate {v} is not a multiple of 1/{N} in [0, 1)")
                    r.append(int(scaled))
                out.append(r)
            return np.array(out, dtype=np.int64).reshape(N, -1)

        return cls(b, m, nums(walsh_rows), nums(trig_rows))

    def metadata(self) -> dict:
        return {
            "b": self.b,
            "m": self.m,
            "N": self.N,
            "s": self.s,
            "t": self.t,
            "f": self.modulus.serialize() if self.modulus is not None else None,
            "g": [g.serialize() for g in self.gen_poly],
            "z": list(self.gen_int),
            **self.meta,
        }


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def _check_lattice_generator(N: int, z: Sequence[int]) -> None:
    for zj in z:
        if not 1 <= zj < N or math.gcd(zj, N) != 1:
            raise ParameterError(f"generator {zj} is not in Z_{N} (need 1 <= z < N, gcd(z, N) = 1)")


def lattice_pointset(N: int, z: Sequence[int]) -> list[tuple[Fraction, ...]]:
    """Rank-1 lattice rows ({v z_1 / N}, ..., {v z_t / N}) for v = 0..N-1."""
    if N < 1:
        raise ParameterError(f"N must be positive, got {N}")
    _check_lattice_generator(N, z)
    return [tuple(Fraction(v * zj % N, N) for zj in z) for v in range(N)]


def polynomial_lattice_pointset(b: int, m: int, f: FbPoly, g: Sequence[FbPoly]) -> list[tuple[Fraction, ...]]:
    """Rows (nu_m(v g_1 / f), ..., nu_m(v g_s / f)) for v in G_{b,m} in integer order."""
    check_base(b)
    if f.degree != m:
        raise ParameterError(f"modulus must have degree m={m}, has degree {f.degree}")
    warn_zero_generators(list(g))
    return [tuple(nu_m(v, gj, f, m) for gj in g) for v in iter_G(b, m)]


def digit_matrix(values: np.ndarray, b: int, width: int) -> np.ndarray:
    """Base-b digits of each value, least significant first, shape (len, width)."""
    values = np.asarray(values, dtype=np.int64)
    out = np.empty((values.size, width), dtype=np.int64)
    rest = values.copy()
    for i in range(width):
        rest, out[:, i] = np.divmod(rest, b)
    return out


def _from_digits(digits: np.ndarray, b: int) -> np.ndarray:
    place = b ** np.arange(digits.shape[-1], dtype=np.int64)
    return digits @ place


def pl_numerators(b: int, m: int, f: FbPoly, g: FbPoly) -> np.ndarray:
    """Numerators of nu_m(v g / f) for all v, using linearity of nu_m in v."""
    N = b**m
    basis = np.array([nu_numerator(FbPoly.monomial(b, r), g, f, m) for r in range(m)], dtype=np.int64)
    basis_digits = digit_matrix(basis, b, m)
    v_digits = digit_matrix(np.arange(N), b, m)
    return _from_digits((v_digits @ basis_digits) % b, b)


def build_pointset(b: int, m: int, f: FbPoly | None, g: Sequence[FbPoly], z: Sequence[int]) -> HybridPointSet:
    check_base(b)
    N = b**m
    _check_lattice_generator(N, z)
    g = tuple(g)
    if g:
        if f is None or f.degree != m:
            raise ParameterError(f"modulus must have degree m={m}")
        warn_zero_generators(list(g))
    walsh = np.stack([pl_numerators(b, m, f, gj) for gj in g], axis=1) if g else np.zeros((N, 0), np.int64)
    v = np.arange(N, dtype=np.int64)
    trig = np.stack([v * zj % N for zj in z], axis=1) if z else np.zeros((N, 0), np.int64)
    return HybridPointSet(b, m, walsh, trig, g, f, tuple(int(x) for x in z))


# ---------------------------------------------------------------------------
# exact character sums
# ---------------------------------------------------------------------------

def exact_root_mean(exponents: Sequence[int], n: int) -> Fraction | complex:
    """Mean of exp(2 pi i e / n) over the exponents, exactly when it is 0 or 1.

    Returns ``Fraction(1)`` if every exponent is 0 mod n and ``Fraction(0)`` if the
    exponent histogram is invariant under some nonzero shift h (the sum then
    equals omega^h times itself).  Otherwise the float value is returned.
    """
    counts = Counter(int(e) % n for e in exponents)
    total = sum(counts.values())
    if counts.get(0, 0) == total:
        return Fraction(1)
    hist = [counts.get(r, 0) for r in range(n)]
    for h in range(1, n):
        if n % h == 0 and all(hist[r] == hist[(r + h) % n] for r in range(n)):
            return Fraction(0)
    return complex(sum(c * np.exp(2j * np.pi * r / n) for r, c in counts.items()) / total)


def walsh_exponents(walsh_num: np.ndarray, b: int, m: int, k: Sequence[int]) -> np.ndarray:
    """Integer e_v with wal_k(p_v) = exp(2 pi i e_v / b)."""
    N = walsh_num.shape[0]
    e = np.zeros(N, dtype=np.int64)
    for j, kj in enumerate(k):
        i = 0
        kj = int(kj)
        # xi_{i+1} is the digit of b^(m-1-i) in the numerator; zero beyond m.
        while kj and i < m:
            kj, kappa = divmod(kj, b)
            if kappa:
                xi = (walsh_num[:, j] // b ** (m - 1 - i)) % b
                e += xi * kappa
            i += 1
    return e % b


def trig_exponents(trig_num: np.ndarray, N: int, l: Sequence[int]) -> np.ndarray:
    """Integer e_v with trig_l(q_v) = exp(2 pi i e_v / N)."""
    e = np.zeros(trig_num.shape[0], dtype=np.int64)
    for j, lj in enumerate(l):
        e += trig_num[:, j] * (int(lj) % N)
    return e % N


def walsh_character_mean(ps: HybridPointSet, k: Sequence[int]) -> Fraction | complex:
    return exact_root_mean(walsh_exponents(ps.walsh_num, ps.b, ps.m, k), ps.b)


def trig_character_mean(ps: HybridPointSet, l: Sequence[int]) -> Fraction | complex:
    return exact_root_mean(trig_exponents(ps.trig_num, ps.N, l), ps.N)


# ---------------------------------------------------------------------------
# worst-case integration error
# ---------------------------------------------------------------------------

def walsh_i0(nums: np.ndarray, b: int, m: int) -> np.ndarray:
    """Position of the first nonzero digit of nums / b^m (0 encodes the value 0)."""
    nums = np.asarray(nums, dtype=np.int64)
    ndig = np.zeros(nums.shape, dtype=np.int64)
    for e in range(m):
        ndig += nums >= b**e
    return np.where(nums == 0, 0, m - ndig + 1)


def _digit_sub_nums(u: np.ndarray, w: np.ndarray, b: int, m: int) -> np.ndarray:
    """Numerator of (u / b^m) (-) (w / b^m), broadcasting u against w."""
    if b == 2:
        return np.bitwise_xor(u, w)
    out = np.zeros(np.broadcast_shapes(u.shape, w.shape), dtype=np.int64)
    for i in range(m):
        p = b**i
        out += (((u // p) % b - (w // p) % b) % b) * p
    return out


def _check_dims(ps: HybridPointSet, space: SpaceParams) -> None:
    if ps.s != space.s or ps.t != space.t or ps.b != space.b:
        raise DimensionError(
            f"point set (b={ps.b}, s={ps.s}, t={ps.t}) does not match space "
            f"(b={space.b}, s={space.s}, t={space.t})"
        )


def gram_matrix(ps: HybridPointSet, space: SpaceParams, weights: WeightSpec) -> np.ndarray:
    """K((p,q)_v, (p,q)_w) for all node pairs, from exact digit differences."""
    _check_dims(ps, space)
    N, b, m = ps.N, ps.b, ps.m
    g1, g2 = weights.materialize(space)
    G = np.ones((N, N))
    for j, gam in enumerate(g1):
        a = ps.walsh_num[:, j]
        diff = _digit_sub_nums(a[:, None], a[None, :], b, m)
        G *= walsh_kernel_table(b, space.alpha, gam, m)[walsh_i0(diff, b, m)]
    for j, gam in enumerate(g2):
        c = ps.trig_num[:, j]
        G *= korobov_kernel_table(space.beta, gam, N)[(c[:, None] - c[None, :]) % N]
    return G


def qmc_int_error(ps: HybridPointSet, space: SpaceParams, weights: WeightSpec) -> float:
    """Worst-case QMC integration error: sqrt(-1 + N^-2 sum_{v,w} K(P_v, P_w))."""
    G = gram_matrix(ps, space, weights)
    e2 = float(np.sum(G)) / ps.N**2 - 1.0
    return math.sqrt(max(e2, 0.0))


def integration_error_bound_sq(space: SpaceParams, weights: WeightSpec, N: int) -> float:
    """(2/N) prod(1 + 2 gamma mu(alpha)) prod(1 + 4 gamma zeta(beta)), a bound on e_int^2."""
    g1, g2 = weights.materialize(space)
    out = 2.0 / N
    for g in g1:
        out *= 1.0 + 2.0 * g * mu(space.b, space.alpha)
    for g in g2:
        out *= 1.0 + 4.0 * g * zeta(space.beta)
    return out


# ---------------------------------------------------------------------------
# component-by-component construction
# ---------------------------------------------------------------------------

def _argmin_tiebreak(values: np.ndarray) -> int:
    best = float(values.min())
    slack = abs(best) * TIE_RTOL + 1e-300
    return int(np.flatnonzero(values <= best + slack)[0])


def cbc_construct(space: SpaceParams, weights: WeightSpec, m: int, f: FbPoly | None = None,
                  check_bound: bool = True) -> HybridPointSet:
    """Greedy CBC: g_1..g_s over nonzero G_{b,m}, then z_1..z_t over Z_N.

    Each step minimises the squared worst-case integration error of the partial
    point set.  Because a single polynomial-lattice coordinate only depends on
    v (-) w and a lattice coordinate only on v - w, the Gram sum for a candidate
    reduces to a dot product with a per-step aggregate of the current Gram
    product.  Ties go to the smallest integer encoding.
    """
    b = space.b
    if m < 1:
        raise ParameterError(f"CBC needs m >= 1 (empty search space at m={m})")
    N = b**m
    if f is None:
        f = smallest_irreducible(b, m)
    elif f.degree != m:
        raise ParameterError(f"modulus must have degree m={m}, has degree {f.degree}")
    g1, g2 = weights.materialize(space)

    idx = np.arange(N, dtype=np.int64)
    P = np.ones((N, N))
    rows = idx[:, None]

    gens: list[FbPoly] = []
    walsh_cols = []
    if g1:
        sub = _digit_sub_nums(idx[:, None], idx[None, :], b, m)  # sub[v, u] = v (-) u
        v_digits = digit_matrix(idx, b, m)
    for gam in g1:
        table = walsh_kernel_table(b, space.alpha, gam, m)
        Q = P[rows, sub].sum(axis=0)  # Q[u] = sum_v P[v, v (-) u]
        cand_nums = []
        scores = np.empty(N - 1)
        for c in range(1, N):
            g = FbPoly.from_int(b, c)
            basis = np.array([nu_numerator(FbPoly.monomial(b, r), g, f, m) for r in range(m)],
                             dtype=np.int64)
            nums = _from_digits((v_digits @ digit_matrix(basis, b, m)) % b, b)
            cand_nums.append(nums)
            scores[c - 1] = Q @ table[walsh_i0(nums, b, m)]
        best = _argmin_tiebreak(scores)
        gens.append(FbPoly.from_int(b, best + 1))
        nums = cand_nums[best]
        walsh_cols.append(nums)
        P *= table[walsh_i0(nums, b, m)][sub]

    zs: list[int] = []
    cands = np.array([z for z in range(1, N) if math.gcd(z, N) == 1], dtype=np.int64)
    if g2:
        diff = (idx[:, None] - idx[None, :]) % N  # diff[v, r] = v - r mod N
    for gam in g2:
        table = korobov_kernel_table(space.beta, gam, N)
        Q = P[rows, diff].sum(axis=0)  # Q[r] = sum_v P[v, v - r]
        scores = np.array([Q @ table[(idx * z) % N] for z in cands])
        z = int(cands[_argmin_tiebreak(scores)])
        zs.append(z)
        P *= table[(diff * z) % N]

    walsh = np.stack(walsh_cols, axis=1) if walsh_cols else np.zeros((N, 0), np.int64)
    trig = np.stack([idx * z % N for z in zs], axis=1) if zs else np.zeros((N, 0), np.int64)
    ps = HybridPointSet(b, m, walsh, trig, tuple(gens), f, tuple(zs),
                        meta={"construction": "cbc", "order": "walsh-then-trig"})
    err = qmc_int_error(ps, space, weights)
    bound_sq = integration_error_bound_sq(space, weights, N)
    ps.meta.update({"error": err, "bound": math.sqrt(bound_sq)})
    if check_bound and err**2 > bound_sq * (1.0 + 1e-12):
        raise ConsistencyError(f"CBC error^2 {err**2:.6g} exceeds bound {bound_sq:.6g}")
    return ps


def pointset_to_csv(ps: HybridPointSet) -> str:
    """JSON metadata line (prefixed with '#'), a header row, then num/den coordinates."""
    buf = io.StringIO()
    buf.write("# " + json.dumps(ps.metadata(), sort_keys=True) + "\n")
    header = ["v"] + [f"x{j + 1}" for j in range(ps.s)] + [f"y{j + 1}" for j in range(ps.t)]
    buf.write(",".join(header) + "\n")
    N = ps.N
    for v in range(N):
        cells = [str(v)]
        cells += [f"{int(a)}/{N}" for a in ps.walsh_num[v]]
        cells += [f"{int(a)}/{N}" for a in ps.trig_num[v]]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def pointset_from_csv(text: str) -> HybridPointSet:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParameterError("point-set CSV must start with a '# {json}' metadata line")
    meta = json.loads(lines[0][1:])
    b, m, s, t = meta["b"], meta["m"], meta["s"], meta["t"]
    rows = [ln.split(",") for ln in lines[2:] if ln.strip()]
    walsh = [[Fraction(c) for c in r[1:1 + s]] for r in rows]
    trig = [[Fraction(c) for c in r[1 + s:1 + s + t]] for r in rows]
    ps = HybridPointSet.from_points(b, m, walsh, trig)
    f = FbPoly.parse(b, meta["f"]) if meta.get("f") else None
    g = tuple(FbPoly.parse(b, x) for x in meta.get("g", []))
    extra = {k: v for k, v in meta.items() if k not in {"b", "m", "N", "s", "t", "f", "g", "z"}}
    return HybridPointSet(b, m, ps.walsh_num, ps.trig_num, g, f, tuple(meta.get("z", [])), extra)
