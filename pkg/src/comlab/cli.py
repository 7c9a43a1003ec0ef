"""Command-line entry point: ``python -m comlab {sweep,verify,cmc-fit,newton}``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical domain error.  ``COMLAB_THREADS`` caps the worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .errors import ComlabError, ConfigError, ConsistencyError, ContractError, DomainError
from .limits import RadiusLadder, classify
from .quadrature import sphere_grid

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3

RUN_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["command", "family", "ladder", "grid"],
    "properties": {
        "command": {"enum": ["sweep", "cmc-fit", "newton"]},
        "family": {"type": "object"},
        "ladder": {
            "type": "object",
            "additionalProperties": False,
            "required": ["r0", "ratio", "count"],
            "properties": {
                "r0": {"type": "number", "exclusiveMinimum": 0},
                "ratio": {"type": "number", "exclusiveMinimum": 1},
                "count": {"type": "integer", "minimum": 1},
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["ntheta", "nphi"],
            "properties": {
                "ntheta": {"type": "integer", "minimum": 1},
                "nphi": {"type": "integer", "minimum": 2, "multipleOf": 2},
            },
        },
    },
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def thread_cap() -> int:
    """Worker count from ``COMLAB_THREADS`` (default: CPU count)."""
    raw = os.environ.get("COMLAB_THREADS")
    if raw is None or raw == "":
        return max(1, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"COMLAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"COMLAB_THREADS must be a positive integer, got {raw!r}")
    return n


def _load_params(text: str | None) -> dict:
    if text is None:
        return {}
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--params is neither a file nor valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("--params must be a JSON object")
    return obj


def _family_block(args) -> dict:
    block = _load_params(args.params)
    if args.family is not None:
        if "kind" in block and block["kind"] != args.family:
            raise ConfigError(f"--family {args.family} conflicts with kind {block['kind']!r} in --params")
        block["kind"] = args.family
    if "kind" not in block:
        raise ConfigError("a family kind is required (--family or 'kind' in --params)")
    return block


def build_config(args) -> dict:
    """Assemble and validate the run configuration."""
    block = _family_block(args)
    m = float(block.get("m", 1.0)) if isinstance(block.get("m", 1.0), (int, float)) else 1.0
    default_r0 = {"sweep": 100.0 * m, "cmc-fit": 200.0 * m, "newton": 100.0}[args.command]
    default_ratio = math.exp(math.pi / 4) if args.command == "cmc-fit" else math.exp(math.pi / 8)
    default_count = 9 if args.command == "cmc-fit" else 48
    default_grid = (16, 32) if args.command == "cmc-fit" else (24, 48)
    cfg = {
        "command": args.command,
        "family": block,
        "ladder": {
            "r0": default_r0 if args.r0 is None else args.r0,
            "ratio": default_ratio if args.ratio is None else args.ratio,
            "count": default_count if args.count is None else args.count,
        },
        "grid": {
            "ntheta": default_grid[0] if args.ntheta is None else args.ntheta,
            "nphi": default_grid[1] if args.nphi is None else args.nphi,
        },
    }
    try:
        jsonschema.validate(cfg, RUN_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(f"config {path}: {exc.message}") from exc
    return cfg


def _header(cfg, grid) -> list[str]:
    return [
        f"# comlab {__version__}",
        f"# config {json.dumps(cfg, sort_keys=True)}",
        f"# grid ntheta={grid.n_theta} nphi={grid.n_phi} degree={grid.degree}",
    ]


def _emit(cfg, grid, rows, footer, args):
    """Write rows (list of dicts) as CSV or JSON.

    A CSV carries the footer as trailing ``#`` comment lines and, when
    written to a file, a ``<out>.json`` sidecar as well.
    """
    if args.format == "json":
        doc = {"version": __version__, "config": cfg,
               "grid": {"ntheta": grid.n_theta, "nphi": grid.n_phi, "degree": grid.degree},
               "rows": rows, **footer}
        text = json.dumps(doc, indent=2, allow_nan=False, default=_nan_free) + "\n"
        _write(text, args.out)
        return
    buf = io.StringIO()
    buf.write("\n".join(_header(cfg, grid)) + "\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _cell(v) for k, v in row.items()})
    for key, val in footer.items():
        buf.write(f"# {key} {json.dumps(val, sort_keys=True, allow_nan=False)}\n")
    _write(buf.getvalue(), args.out)
    if args.out and args.out != "-" and footer:
        side = {"version": __version__, "config": cfg, **footer}
        Path(str(args.out) + ".json").write_text(json.dumps(side, indent=2, allow_nan=False) + "\n")


def _nan_free(x):
    raise TypeError(f"not serialisable: {x!r}")


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _write(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _ladder(cfg) -> np.ndarray:
    L = cfg["ladder"]
    return RadiusLadder(L["r0"], L["ratio"], L["count"]).radii


def _verdict(seq):
    seq = [(r, v) for r, v in seq if v is not None and np.all(np.isfinite(v))]
    if len(seq) < 8:
        return {"class": "undetermined", "params": {}, "residuals": {},
                "diagnostics": [f"only {len(seq)} points; need 8"]}
    return classify(seq).to_dict()


def cmd_sweep(args) -> int:
    from .adm import sweep
    from .metric import family_from_json

    cfg = build_config(args)
    fam = family_from_json(cfg["family"])
    grid = sphere_grid(cfg["grid"]["ntheta"], cfg["grid"]["nphi"])
    recs = sweep(fam, _ladder(cfg), grid, workers=thread_cap())
    rows = [{k: _clean(v) for k, v in r.row().items()} for r in recs]
    footer = {"verdict": {"com": _verdict([(r.r, r.z_adm) for r in recs]),
                          "mass": _verdict([(r.r, [r.m_adm]) for r in recs])}}
    if fam.kind == "graph_slice":
        footer["verdict"]["momentum"] = _verdict([(r.r, r.p_adm) for r in recs])
    _emit(cfg, grid, rows, footer, args)
    return EXIT_OK


def cmd_cmc_fit(args) -> int:
    from .cmc import cmc_center_sweep
    from .metric import family_from_json

    cfg = build_config(args)
    fam = family_from_json(cfg["family"])
    grid = sphere_grid(cfg["grid"]["ntheta"], cfg["grid"]["nphi"])
    fits = cmc_center_sweep(fam, _ladder(cfg), grid=grid)
    rows = []
    for s, f in fits:
        if f is None:
            rows.append({"sigma": s, "cx": None, "cy": None, "cz": None, "radius": None,
                         "mean_H": None, "residual": None, "iterations": 0, "converged": False})
        else:
            rows.append({"sigma": s, "cx": float(f.center[0]), "cy": float(f.center[1]),
                         "cz": float(f.center[2]), "radius": f.radius, "mean_H": f.mean_H,
                         "residual": f.residual, "iterations": f.iterations, "converged": f.converged})
    footer = {"verdict": {"center": _verdict([(s, f.center if f else None) for s, f in fits])}}
    _emit(cfg, grid, rows, footer, args)
    return EXIT_OK


def cmd_newton(args) -> int:
    from .newtonian import density_from_json, newton_mass, newton_moment

    cfg = build_config(args)
    d = density_from_json(cfg["family"])
    grid = sphere_grid(cfg["grid"]["ntheta"], cfg["grid"]["nphi"])
    radii = _ladder(cfg)
    rows, seq = [], []
    for R in radii:
        mass = newton_mass(d, R, grid)
        num = newton_moment(d, R, grid)
        com = num / mass if mass > 0 else np.full(3, np.nan)
        seq.append((R, com))
        rows.append({"R": float(R), "mass": mass, "mx": float(num[0]), "my": float(num[1]), "mz": float(num[2]),
                     "comx": _clean(float(com[0])), "comy": _clean(float(com[1])), "comz": _clean(float(com[2]))})
    footer = {"verdict": {"com": _verdict(seq)}}
    _emit(cfg, grid, rows, footer, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suite

    if args.suite not in SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    thread_cap()
    checks = run_suite(args.suite, report=lambda c: print(c.line(), flush=True))
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="comlab", description="ADM / CMC / Newtonian center-of-mass laboratory")
    p.add_argument("--version", action="version", version=f"comlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, family_help):
        sp.add_argument("--family", help=family_help)
        sp.add_argument("--params", help="JSON object or path to a JSON file with the family parameters")
        sp.add_argument("--r0", type=float, help="first ladder radius")
        sp.add_argument("--ratio", type=float, help="ladder ratio (> 1)")
        sp.add_argument("--count", type=int, help="number of ladder radii")
        sp.add_argument("--ntheta", type=int, help="Gauss-Legendre nodes in cos(theta)")
        sp.add_argument("--nphi", type=int, help="uniform nodes in phi (even)")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    kinds = "schwarzschild, translated_schwarzschild, york_perturbed or graph_slice"
    common(sub.add_parser("sweep", help="ADM mass, center and momentum over a radius ladder"), kinds)
    common(sub.add_parser("cmc-fit", help="round-sphere CMC centers over a sigma ladder"), kinds)
    common(sub.add_parser("newton", help="truncated Newtonian mass and center over a radius ladder"),
           "divergent_u or prescribed")
    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("suite", help="schwarzschild, prescribed, divergent, newtonian, cmc, properties or all")
    return p


COMMANDS = {"sweep": cmd_sweep, "cmc-fit": cmd_cmc_fit, "newton": cmd_newton, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ConsistencyError, ContractError, ComlabError, FloatingPointError) as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        # bad ladder or grid arguments, unreadable files
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
