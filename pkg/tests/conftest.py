"""Shared brute-force oracles and strategies.

Oracles here deliberately avoid the package's own digit helpers: digits come
from ``floor(x * b^j) mod b`` and kernels from truncated series.
"""

import json
import math
from fractions import Fraction
from importlib import resources

import numpy as np
import pytest
from hypothesis import strategies as st

from hybridapprox.core_arith import index_sub
from hybridapprox.hybrid_space import CoeffFunction, SpaceParams, WeightSpec, make_index


def digit_oracle(b, x, j):
    """j-th b-adic digit (1-based) of a rational x in [0, 1)."""
    return math.floor(x * b**j) % b


def walsh_oracle(b, k, x):
    """exp(2 pi i / b * sum_j kappa_j xi_{j+1}) with digits from floor formulas."""
    total, j = 0, 0
    while k:
        total += (k % b) * digit_oracle(b, x, j + 1)
        k //= b
        j += 1
    return np.exp(2j * np.pi * (total % b) / b)


def rho_oracle(b, alpha, gamma, k):
    if k == 0:
        return 1.0
    a = 0
    while b ** (a + 1) <= k:
        a += 1
    return gamma * float(b) ** (-alpha * a)


def r_oracle(beta, gamma, l):
    return 1.0 if l == 0 else gamma * abs(l) ** (-beta)


def eig_oracle(space, g1, g2, k, l):
    out = 1.0
    for kj, gj in zip(k, g1):
        out *= rho_oracle(space.b, space.alpha, gj, kj)
    for lj, gj in zip(l, g2):
        out *= r_oracle(space.beta, gj, lj)
    return out


def _coord_eigs(space, g1, g2, kmax, lmax):
    ks = np.arange(kmax + 1)
    ls = np.arange(-lmax, lmax + 1)
    walsh = [np.array([rho_oracle(space.b, space.alpha, g, int(k)) for k in ks]) for g in g1]
    trig = [np.array([r_oracle(space.beta, g, int(l)) for l in ls]) for g in g2]
    return ks, ls, walsh + trig


def eig_grid(space, weights, kmax, lmax):
    """Eigenvalues on the box [0, kmax]^s x [-lmax, lmax]^t as an (s+t)-dim array."""
    g1, g2 = weights.materialize(space)
    ks, ls, factors = _coord_eigs(space, g1, g2, kmax, lmax)
    grid = np.ones(())
    for f in factors:
        grid = np.multiply.outer(grid, f)
    return ks, ls, grid


def grid_A_M(space, weights, M, kmax, lmax):
    """A_M by filtering the box [0, kmax]^s x [-lmax, lmax]^t."""
    ks, ls, grid = eig_grid(space, weights, kmax, lmax)
    out = set()
    for pos in np.argwhere(1.0 / grid <= M * (1 + 1e-12)):
        k = tuple(int(ks[i]) for i in pos[:space.s])
        l = tuple(int(ls[i]) for i in pos[space.s:])
        out.add((k, l))
    return out


def outside_box_max(space, weights, kmax, lmax):
    """Largest eigenvalue of any index outside the box (other coordinates at most 1)."""
    g1, g2 = weights.materialize(space)
    vals = [rho_oracle(space.b, space.alpha, g, kmax + 1) for g in g1]
    vals += [r_oracle(space.beta, g, lmax + 1) for g in g2]
    return max(vals, default=0.0)


def modulate(f, k, l):
    """f * conj(wal_k trig_l): coefficient at (h, m) is f^(k (+) h, l + m)."""
    b = f.space.b
    terms = {}
    for idx, c in f.terms.items():
        h = tuple(index_sub(b, K, kj) for K, kj in zip(idx.k, k))
        m = tuple(L - lj for L, lj in zip(idx.l, l))
        terms[make_index(h, m)] = c
    return CoeffFunction(f.space, f.weights, terms)


def rationals(max_den=2000):
    return st.builds(
        lambda den, num: Fraction(num % den, den),
        st.integers(min_value=1, max_value=max_den),
        st.integers(min_value=0, max_value=10**6),
    )


def dyadic(b, m):
    return st.integers(min_value=0, max_value=b**m - 1).map(lambda n: Fraction(n, b**m))


def load_schema_registry():
    """All shipped schemas as a referencing.Registry keyed by their $id."""
    from referencing import Registry, Resource

    root = resources.files("hybridapprox") / "schemas"
    schemas = {}
    for entry in root.iterdir():
        if entry.name.endswith(".schema.json"):
            schemas[entry.name] = json.loads(entry.read_text())
    registry = Registry().with_resources(
        (name, Resource.from_contents(body)) for name, body in schemas.items()
    )
    return schemas, registry


@pytest.fixture(scope="session")
def schema_validator():
    from jsonschema import Draft202012Validator

    schemas, registry = load_schema_registry()

    def validate(instance, name):
        Draft202012Validator(schemas[name], registry=registry).validate(instance)

    return validate


@pytest.fixture
def unit_space():
    return SpaceParams(2, 2.0, 2.0, 1, 1)


@pytest.fixture
def unit_weights():
    return WeightSpec.constant(1.0)


# one "PASS/FAIL" line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
