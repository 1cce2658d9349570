"""Polynomials over the prime field F_b and the truncation map nu_m.

Polynomials are stored lowest degree first.  The integer encoding
``v = sum_r v_r b^r`` identifies ``G_{b,m}`` with ``0, ..., b^m - 1`` and fixes
the ordering of polynomial lattice points everywhere in the package.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .core_arith import check_base
from .errors import ParameterError


def _strip(coeffs) -> tuple[int, ...]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class FbPoly:
    base: int
    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        check_base(self.base)
        reduced = _strip(int(c) % self.base for c in self.coeffs)
        object.__setattr__(self, "coeffs", reduced)

    # construction / encoding

    @classmethod
    def from_int(cls, b: int, v: int) -> "FbPoly":
        if v < 0:
            raise ParameterError(f"polynomial index must be non-negative, got {v}")
        out = []
        while v:
            v, d = divmod(v, b)
            out.append(d)
        return cls(b, tuple(out))

    @classmethod
    def parse(cls, b: int, text: str) -> "FbPoly":
        """Parse ``"1,1,0,1"`` (lowest degree first) as 1 + x + x^3."""
        text = text.strip()
        if not text:
            return cls(b, ())
        try:
            coeffs = [int(c) for c in text.split(",")]
        except ValueError as exc:
            raise ParameterError(f"bad polynomial coefficient string {text!r}") from exc
        if any(not 0 <= c < b for c in coeffs):
            raise ParameterError(f"coefficients of {text!r} must lie in 0..{b - 1}")
        return cls(b, tuple(coeffs))

    @classmethod
    def monomial(cls, b: int, deg: int) -> "FbPoly":
        return cls(b, (0,) * deg + (1,))

    def to_int(self) -> int:
        v = 0
        for c in reversed(self.coeffs):
            v = v * self.base + c
        return v

    def serialize(self) -> str:
        return ",".join(str(c) for c in self.coeffs) if self.coeffs else "0"

    # arithmetic

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else float("-inf")

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "FbPoly") -> None:
        if not isinstance(other, FbPoly):
            raise TypeError(f"expected FbPoly, got {type(other).__name__}")
        if other.base != self.base:
            raise ParameterError(f"base mismatch: {self.base} vs {other.base}")

    def __add__(self, other: "FbPoly") -> "FbPoly":
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        c = other.coeffs + (0,) * (n - len(other.coeffs))
        return FbPoly(self.base, tuple(x + y for x, y in zip(a, c)))

    def __neg__(self) -> "FbPoly":
        return FbPoly(self.base, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "FbPoly") -> "FbPoly":
        return self + (-other)

    def __mul__(self, other: "FbPoly") -> "FbPoly":
        self._check(other)
        if self.is_zero() or other.is_zero():
            return FbPoly(self.base, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, c in enumerate(other.coeffs):
                    out[i + j] += a * c
        return FbPoly(self.base, tuple(out))

    def __divmod__(self, other: "FbPoly") -> tuple["FbPoly", "FbPoly"]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        b = self.base
        rem = list(self.coeffs)
        dd = len(other.coeffs) - 1
        inv_lead = pow(other.coeffs[-1], -1, b)
        quot = [0] * max(len(rem) - dd, 0)
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i] * inv_lead % b
            if c:
                quot[i - dd] = c
                for j, oc in enumerate(other.coeffs):
                    rem[i - dd + j] = (rem[i - dd + j] - c * oc) % b
        return FbPoly(b, tuple(quot)), FbPoly(b, tuple(rem[:dd]))

    def __floordiv__(self, other: "FbPoly") -> "FbPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "FbPoly") -> "FbPoly":
        return divmod(self, other)[1]

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = str(c) if (c != 1 or i == 0) else ""
            terms.append(coef + mono)
        return " + ".join(reversed(terms))


def poly_mul_mod(a: FbPoly, c: FbPoly, f: FbPoly) -> FbPoly:
    """(a * c) mod f over F_b."""
    if f.is_zero():
        raise ZeroDivisionError("modulus is the zero polynomial")
    if not (a.base == c.base == f.base):
        raise ParameterError("base mismatch in poly_mul_mod")
    return (a * c) % f


def nu_numerator(v: FbPoly, g: FbPoly, f: FbPoly, m: int) -> int:
    """Numerator over b^m of nu_m(v g / f).

    The digits t_1..t_m of the Laurent expansion are the coefficients of
    x^(m-1), ..., x^0 in the polynomial quotient of v g x^m by f; coefficients
    of higher powers belong to the integer part and are discarded.
    """
    if f.degree != m:
        raise ParameterError(f"modulus must have degree m={m}, has degree {f.degree}")
    if not v.is_zero() and v.degree >= m:
        raise ParameterError(f"index polynomial must have degree < {m}")
    b = f.base
    q = (v * g * FbPoly.monomial(b, m)) // f
    num = 0
    for r in range(min(m, len(q.coeffs)) - 1, -1, -1):
        num = num * b + q.coeffs[r]
    return num


def nu_m(v: FbPoly, g: FbPoly, f: FbPoly, m: int) -> Fraction:
    return Fraction(nu_numerator(v, g, f, m), f.base**m)


def iter_G(b: int, m: int) -> Iterator[FbPoly]:
    """G_{b,m} in integer-index order."""
    for v in range(b**m):
        yield FbPoly.from_int(b, v)


def is_irreducible(f: FbPoly) -> bool:
    """Brute-force trial division by every monic polynomial of degree <= deg f / 2."""
    if f.is_zero() or f.degree < 1:
        return False
    b, n = f.base, f.degree
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(b), repeat=d):
            if (f % FbPoly(b, low + (1,))).is_zero():
                return False
    return True


def smallest_irreducible(b: int, m: int) -> FbPoly:
    """Monic irreducible polynomial of degree m with the smallest integer encoding."""
    check_base(b)
    if m < 1:
        raise ParameterError(f"degree must be >= 1, got {m}")
    for low in range(b**m):
        f = FbPoly.from_int(b, low + b**m)
        if is_irreducible(f):
            return f
    raise AssertionError("no irreducible polynomial found")  # cannot happen over a field


def warn_zero_generators(g: list[FbPoly]) -> None:
    for j, gj in enumerate(g):
        if gj.is_zero():
            warnings.warn(f"generator component {j + 1} is zero; that coordinate collapses to 0",
                          stacklevel=3)
