"""Experiment configuration: INI file plus command-line overrides.

Precedence, lowest to highest: built-in defaults, the ``--config`` file,
explicit command-line flags.  Every key is validated before any computation
starts; unknown sections or keys are rejected with their line number.

Example file::

    [space]
    base = 2
    alpha = 2
    beta = 2
    s = 1
    t = 1

    [weights]
    weights = poly:a=2        # both sequences; or gamma1 / gamma2 separately

    [experiment]
    m-range = 2..8
    eps-grid = 1e-3:1e-1:9    # log-spaced lo:hi:count, or a comma list
    kappa = 1
    seeds = 10
    jobs = 1

    [output]
    out = results.csv
    format = csv
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, fields, replace
from typing import Any

import numpy as np

from .errors import HybridError
from .hybrid_space import SpaceParams, WeightSeq, WeightSpec


class UsageError(HybridError):
    """Invalid command line or configuration; maps to exit code 2."""


# section -> key -> attribute name on ExperimentConfig
_KEYS: dict[str, dict[str, str]] = {
    "space": {"base": "base", "alpha": "alpha", "beta": "beta", "s": "s", "t": "t"},
    "weights": {"weights": "weights", "gamma1": "gamma1", "gamma2": "gamma2"},
    "experiment": {
        "m-range": "m_range", "m": "m", "eps-grid": "eps_grid", "n-grid": "n_grid",
        "kappa": "kappa", "seeds": "seeds", "terms": "terms", "support-m": "support_m",
        "jobs": "jobs",
    },
    "pointset": {"modulus": "modulus", "gen-poly": "gen_poly", "gen-int": "gen_int"},
    "output": {"out": "out", "format": "format"},
}

KINDS = ("pointset", "cbc", "spectrum", "complexity", "approx", "tract")


@dataclass
class ExperimentConfig:
    kind: str = "spectrum"
    base: int = 2
    alpha: float = 2.0
    beta: float = 2.0
    s: int = 1
    t: int = 1
    weights: str | None = None
    gamma1: str = "const:c=1"
    gamma2: str = "const:c=1"
    m_range: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    m: int | None = None
    eps_grid: tuple[float, ...] = (0.9, 0.5, 0.3, 0.1)
    n_grid: tuple[int, ...] = (0, 1, 2, 4, 8, 16, 32, 64)
    kappa: float = 1.0
    seeds: int = 10
    terms: int = 8
    support_m: float = 64.0
    jobs: int = 1
    modulus: str | None = None
    gen_poly: tuple[str, ...] | None = None
    gen_int: tuple[int, ...] | None = None
    out: str | None = None
    format: str | None = None

    @property
    def space(self) -> SpaceParams:
        return SpaceParams(self.base, self.alpha, self.beta, self.s, self.t)

    @property
    def weight_spec(self) -> WeightSpec:
        if self.weights is not None:
            return WeightSpec.same(self.weights)
        return WeightSpec(WeightSeq.parse(self.gamma1), WeightSeq.parse(self.gamma2))

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if not f.name.startswith("_")}


# ---------------------------------------------------------------------------
# value parsers (text -> typed value); each raises ValueError on bad input
# ---------------------------------------------------------------------------

def parse_int_range(text: str) -> tuple[int, ...]:
    """``"2..8"`` (inclusive) or ``"2,4,6"``."""
    text = text.strip()
    if not text:
        return ()
    m = re.fullmatch(r"(-?\d+)\s*\.\.\s*(-?\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        return tuple(range(lo, hi + 1))
    return tuple(int(x) for x in text.split(","))


def parse_float_grid(text: str) -> tuple[float, ...]:
    """``"lo:hi:count"`` (log-spaced, inclusive) or ``"0.9,0.5"``."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("log grid must be lo:hi:count")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if lo <= 0 or hi <= 0 or n < 1:
            raise ValueError("log grid needs positive bounds and count >= 1")
        return tuple(float(x) for x in np.logspace(math.log10(lo), math.log10(hi), n))
    return tuple(float(x) for x in text.split(","))


def _poly_list(text: str) -> tuple[str, ...]:
    # generator polynomials are separated by ';' since coefficients use ','
    return tuple(p.strip() for p in text.split(";") if p.strip())


_CONVERTERS: dict[str, Any] = {
    "base": int, "alpha": float, "beta": float, "s": int, "t": int,
    "weights": str, "gamma1": str, "gamma2": str,
    "m_range": parse_int_range, "m": int, "eps_grid": parse_float_grid,
    "n_grid": parse_int_range, "kappa": float, "seeds": int, "terms": int,
    "support_m": float, "jobs": int,
    "modulus": str, "gen_poly": _poly_list, "gen_int": parse_int_range,
    "out": str, "format": str,
}


def convert(attr: str, raw: str, where: str) -> Any:
    try:
        return _CONVERTERS[attr](raw)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{where}: invalid value {raw!r} for {attr.replace('_', '-')}: {exc}") from exc


# ---------------------------------------------------------------------------
# file loading
# ---------------------------------------------------------------------------

def _line_of(lines: list[str], section: str, key: str | None) -> int:
    current = None
    for n, line in enumerate(lines, 1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if key is None and current == section:
                return n
        elif key is not None and current == section:
            name = re.split(r"[=:]", stripped, maxsplit=1)[0].strip().lower()
            if name == key:
                return n
    return 0


def load_config_file(path: str) -> dict[str, Any]:
    """Parse an INI file into ``{attr: value}``; every problem reports path:line."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    lines = text.splitlines()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        raise UsageError(f"{path}: {exc}") from exc

    values: dict[str, Any] = {}
    for section in parser.sections():
        if section not in _KEYS:
            raise UsageError(f"{path}:{_line_of(lines, section, None)}: unknown section [{section}]")
        for key, raw in parser.items(section):
            where = f"{path}:{_line_of(lines, section, key)}"
            if key not in _KEYS[section]:
                allowed = ", ".join(sorted(_KEYS[section]))
                raise UsageError(f"{where}: unknown key {key!r} in [{section}] (allowed: {allowed})")
            attr = _KEYS[section][key]
            values[attr] = convert(attr, raw, where)
    return values


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Check everything the selected experiment needs; raise UsageError otherwise."""
    if cfg.kind not in KINDS:
        raise UsageError(f"unknown experiment kind {cfg.kind!r}")
    try:
        space = cfg.space
        weights = cfg.weight_spec
    except (ValueError, TypeError) as exc:
        raise UsageError(f"invalid space or weights: {exc}") from exc
    if cfg.format is not None and cfg.format not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.jobs < 1:
        raise UsageError(f"jobs must be >= 1, got {cfg.jobs}")

    if cfg.kind in ("cbc", "approx"):
        if not cfg.m_range:
            raise UsageError("m-range is empty")
        if min(cfg.m_range) < 1:
            raise UsageError(f"m-range values must be >= 1, got {list(cfg.m_range)}")
    if cfg.kind == "approx":
        if cfg.seeds < 1:
            raise UsageError(f"seeds must be >= 1, got {cfg.seeds}")
        if cfg.terms < 1:
            raise UsageError(f"terms must be >= 1, got {cfg.terms}")
        if cfg.support_m < 1:
            raise UsageError(f"support-m must be >= 1, got {cfg.support_m}")
    if cfg.kind == "approx":
        theta = min(space.alpha, space.beta)
        if not cfg.kappa * theta > 1:
            raise UsageError(f"kappa must exceed 1/min(alpha, beta) = {1 / theta:g}")
    if cfg.kind == "complexity":
        if not cfg.eps_grid:
            raise UsageError("eps-grid is empty")
        bad = [e for e in cfg.eps_grid if not 0 < e < 1]
        if bad:
            raise UsageError(f"eps-grid values must lie in (0, 1), got {bad}")
    if cfg.kind == "spectrum":
        if not cfg.n_grid or min(cfg.n_grid) < 0:
            raise UsageError("n-grid must be a nonempty list of non-negative integers")
    if cfg.kind == "tract":
        if not (weights.gamma1.is_family and weights.gamma2.is_family):
            raise UsageError("tract needs parametric weight families (poly/geom/const), "
                             "explicit lists cannot be classified as s, t -> infinity")
        if cfg.format == "csv":
            raise UsageError("tract emits a JSON report only")
    if cfg.kind == "pointset":
        if cfg.m is None:
            raise UsageError("pointset needs --m")
        if cfg.gen_poly is not None and len(cfg.gen_poly) != space.s:
            raise UsageError(f"gen-poly has {len(cfg.gen_poly)} entries, s={space.s}")
        if cfg.gen_int is not None and len(cfg.gen_int) != space.t:
            raise UsageError(f"gen-int has {len(cfg.gen_int)} entries, t={space.t}")
    return cfg


def build_config(kind: str, file_values: dict[str, Any], overrides: dict[str, Any]) -> ExperimentConfig:
    cfg = ExperimentConfig(kind=kind)
    cfg = replace(cfg, **file_values)
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return validate(cfg)
