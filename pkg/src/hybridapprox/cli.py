"""Command-line front end: ``hybridapprox <command> [options]``.

Exit codes: 0 success, 2 usage or configuration error, 3 internal consistency
failure (a computed error exceeding its proven bound).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from . import __version__
from .config import KINDS, UsageError, build_config, convert, load_config_file
from .errors import ConsistencyError, ParameterError, UnsupportedError
from .pointsets import pointset_to_csv
from .experiments import Table, run_cbc, run_convergence, run_pointset, run_spectrum, run_tract

EXIT_OK, EXIT_USAGE, EXIT_CONSISTENCY = 0, 2, 3

# flag -> ExperimentConfig attribute
_FLAGS = {
    "--base": "base", "--alpha": "alpha", "--beta": "beta", "--s": "s", "--t": "t",
    "--weights": "weights", "--gamma1": "gamma1", "--gamma2": "gamma2",
    "--m-range": "m_range", "--m": "m", "--eps-grid": "eps_grid", "--n-grid": "n_grid",
    "--kappa": "kappa", "--seeds": "seeds", "--terms": "terms", "--support-m": "support_m",
    "--jobs": "jobs", "--modulus": "modulus", "--gen-poly": "gen_poly", "--gen-int": "gen_int",
    "--out": "out", "--format": "format",
}

_HELP = {
    "pointset": "build a (polynomial lattice, lattice) point set from explicit generators",
    "cbc": "component-by-component construction for each m in --m-range",
    "spectrum": "minimal worst-case error table over --n-grid",
    "complexity": "information complexity table over --eps-grid with a fitted exponent",
    "approx": "convergence study of the approximation algorithm over --m-range",
    "tract": "tractability report for parametric weight families (JSON)",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    for flag in _FLAGS:
        common.add_argument(flag, dest=_FLAGS[flag], default=None, metavar="VALUE")
    parser = argparse.ArgumentParser(
        prog="hybridapprox",
        description="Hybrid Walsh-Korobov approximation experiments.",
        epilog="Flags override values from --config; weight specs look like poly:a=2, "
               "geom:q=0.5, const:c=1 or list:0.9,0.5,0.25.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sub.add_parser(kind, parents=[common], help=_HELP[kind])
    return parser


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    if table.meta:
        buf.write("# " + json.dumps(table.meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    w.writerows([repr(x) if isinstance(x, float) else x for x in row] for row in table.rows)
    return buf.getvalue()


def table_to_json(kind: str, config: dict, table: Table) -> dict:
    return {"kind": kind, "config": config, "columns": table.columns,
            "rows": table.rows, "meta": table.meta}


def pointset_to_json(ps) -> dict:
    N = ps.N
    pts = [{"x": [f"{int(a)}/{N}" for a in ps.walsh_num[v]],
            "y": [f"{int(a)}/{N}" for a in ps.trig_num[v]]} for v in range(N)]
    return {"kind": "pointset", "metadata": ps.metadata(), "points": pts}


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _render(kind: str, cfg) -> tuple[str, bool]:
    """Run the experiment; return (text, consistent)."""
    fmt = cfg.format or ("json" if kind == "tract" else "csv")
    config = cfg.to_dict()
    if kind == "tract":
        return _dumps(run_tract(cfg)), True
    if kind == "pointset":
        ps = run_pointset(cfg)
        return (pointset_to_csv(ps) if fmt == "csv" else _dumps(pointset_to_json(ps))), True
    if kind == "cbc":
        sets = run_cbc(cfg)
        if fmt == "json":
            return _dumps({"kind": "cbc", "config": config,
                           "pointsets": [ps.metadata() for ps in sets]}), True
        rows = [[ps.m, ps.N, ";".join(g.serialize() for g in ps.gen_poly),
                 ";".join(str(z) for z in ps.gen_int), ps.meta["error"], ps.meta["bound"]]
                for ps in sets]
        table = Table(["m", "N", "g", "z", "error", "bound"], rows)
        return table_to_csv(table), True
    if kind in ("spectrum", "complexity"):
        table = run_spectrum(cfg)["min_error" if kind == "spectrum" else "complexity"]
    else:
        table = run_convergence(cfg)
    text = table_to_csv(table) if fmt == "csv" else _dumps(table_to_json(kind, config, table))
    return text, not table.meta.get("bound_violations")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    kind = args.command
    try:
        file_values = load_config_file(args.config) if args.config else {}
        overrides = {}
        for flag, attr in _FLAGS.items():
            raw = getattr(args, attr)
            if raw is not None:
                overrides[attr] = convert(attr, raw, flag)
        cfg = build_config(kind, file_values, overrides)
        text, consistent = _render(kind, cfg)
    except (UsageError, ParameterError, UnsupportedError) as exc:
        print(f"hybridapprox {kind}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"hybridapprox {kind}: consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY

    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not consistent:
        print(f"hybridapprox {kind}: consistency failure: error exceeds bound", file=sys.stderr)
        return EXIT_CONSISTENCY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
