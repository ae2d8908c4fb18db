"""Command line: ``dptell {tabulate,spectrum,verify,limit}``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or parameter
error.  Every number written here comes from a library call.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import classical as cl
from .classical import Model, Params
from .errors import DptellError, ParameterError
from .limit import jacobi_to_laguerre_limit
from .numerics import DEFAULT_GRID_POINTS, DEFAULT_QUAD_ORDER, DEFAULT_SEED, TOL_QUAD, TOL_RESIDUAL, x_grid
from .spectra import DeformedSystem
from .suite import SuiteConfig, run_invariant_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_H_LIST = (1e2, 1e3, 1e4)
DEFAULT_J1_H = 3.0

REPORT_SCHEMA = {
    "type": "object",
    "required": ["config", "entries", "summary"],
    "properties": {
        "config": {"type": "object"},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "residual", "residual_str", "tolerance", "pass", "params"],
                "properties": {
                    "name": {"type": "string"},
                    "residual": {"type": ["number", "null"]},
                    "residual_str": {"type": "string"},
                    "tolerance": {"type": "number"},
                    "pass": {"type": "boolean"},
                    "params": {"type": "object"},
                    "detail": {"type": "string"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["total", "passed", "failed", "all_passed"],
        },
    },
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "J1"
    g: float = 2.0
    h: float | None = None
    ell: float = 0.5
    n_max: int = 4
    grid_points: int = DEFAULT_GRID_POINTS
    quad_order: int = DEFAULT_QUAD_ORDER
    tol_residual: float = TOL_RESIDUAL
    tol_quad: float = TOL_QUAD
    seed: int = DEFAULT_SEED
    format: str = "csv"
    output: str | None = None

    @property
    def params(self) -> Params:
        return Params(self.g, self.h, self.ell)

    def echo(self) -> dict:
        # the output path is left out so that reports compare byte for byte
        d = asdict(self)
        d.pop("output")
        return d


def _finite_or_none(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _finite_or_none(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_finite_or_none(x) for x in v]
    return v


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    # an optional nested "tolerances" map is flattened
    tol = data.pop("tolerances", {}) or {}
    for k, v in tol.items():
        data.setdefault(f"tol_{k}", v)
    return data


def resolve_config(args: argparse.Namespace, default_format: str = "csv") -> RunConfig:
    """Flags override the config file, which overrides the defaults."""
    names = {f.name for f in fields(RunConfig)}
    merged: dict = {"format": default_format}
    file_vals = _load_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_vals) - names - {"h_list", "x_L"}
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    merged.update({k: v for k, v in file_vals.items() if k in names})
    for name in names:
        v = getattr(args, name, None)
        if v is not None:
            merged[name] = v
    model = str(merged.get("model", "J1"))
    if model not in ("J1", "L1"):
        raise UsageError(f"unknown model {model!r}")
    if model == "L1" and merged.get("h") is not None:
        raise UsageError("L1 takes no h")
    if model == "J1" and merged.get("h") is None:
        merged["h"] = DEFAULT_J1_H
    if merged.get("format") not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    cfg = replace(RunConfig(), **merged)
    if cfg.n_max < 0 or cfg.grid_points < 2 or cfg.quad_order < 1:
        raise UsageError("n-max must be >= 0, grid-points >= 2 and quad-order >= 1")
    cl.validate(Model(cfg.model), cfg.params, deform=cfg.ell > 0)
    return cfg


# -- writers --------------------------------------------------------------------

def _csv_text(cfg: RunConfig, columns: list[str], rows, meta: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write("# dptell\n")
    buf.write("# config: " + json.dumps(_finite_or_none(cfg.echo())) + "\n")
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {_fmt(v)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json_text(obj: dict) -> str:
    return json.dumps(_finite_or_none(obj), indent=2, allow_nan=False) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(cfg: RunConfig, columns, rows, meta=None) -> str:
    if cfg.format == "csv":
        return _csv_text(cfg, columns, rows, meta)
    body = {"config": cfg.echo(), "columns": list(columns),
            "rows": [[float(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in rows]}
    if meta:
        body["meta"] = meta
    return _json_text(body)


# -- commands --------------------------------------------------------------------

def tabulate_rows(cfg: RunConfig):
    sys_ = DeformedSystem(Model(cfg.model), cfg.params, cfg.grid_points)
    x = x_grid(sys_.model, cfg.grid_points)
    cols = {"x": x, "eta": cl.sinusoidal(sys_.model, x), "V": sys_.potential(x),
            "psi_ell": sys_.psi_ell(x), "xi": sys_.xi_eta(cl.sinusoidal(sys_.model, x))[0]}
    for n in range(cfg.n_max + 1):
        cols[f"phi_{n}"] = sys_.deformed_eigenfunction(n, x)
    names = list(cols)
    return names, [list(r) for r in zip(*(cols[k] for k in names))]


def spectrum_rows(cfg: RunConfig):
    sys_ = DeformedSystem(Model(cfg.model), cfg.params, cfg.grid_points)
    rows = []
    for n in range(cfg.n_max + 1):
        line = sys_.spectral_line(n)
        rows.append([n, line.energy, line.norm])
    return ["n", "energy", "norm"], rows


def cmd_tabulate(cfg: RunConfig) -> int:
    cols, rows = tabulate_rows(cfg)
    _emit(cfg, _table(cfg, cols, rows))
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    cols, rows = spectrum_rows(cfg)
    _emit(cfg, _table(cfg, cols, rows))
    return EXIT_OK


def suite_config(cfg: RunConfig) -> SuiteConfig:
    return SuiteConfig(grid_points=cfg.grid_points, quad_order=cfg.quad_order, tol_residual=cfg.tol_residual,
                       tol_quad=cfg.tol_quad, seed=cfg.seed)


def verify_report(cfg: RunConfig) -> dict:
    rep = run_invariant_suite(Model(cfg.model), cfg.params, cfg.n_max, suite_config(cfg))
    return {"config": {**cfg.echo(), "suite": suite_config(cfg).as_dict()},
            "entries": [e.as_dict() for e in rep.entries], "summary": rep.summary()}


def cmd_verify(cfg: RunConfig) -> int:
    report = verify_report(cfg)
    if cfg.format == "json":
        text = _json_text(report)
    else:
        rows = [[e["name"], e["residual"], e["tolerance"], e["pass"], e["detail"]] for e in report["entries"]]
        text = _csv_text(cfg, ["name", "residual", "tolerance", "pass", "detail"], rows, report["summary"])
    _emit(cfg, text)
    if not report["summary"]["all_passed"]:
        for e in report["entries"]:
            if not e["pass"]:
                print(f"FAIL {e['name']}: residual {e['residual_str']} > {e['tolerance']!r} {e['detail']}",
                      file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_limit(cfg: RunConfig, h_list, x_L: float) -> int:
    rec = jacobi_to_laguerre_limit(cfg.g, cfg.ell, h_list, x_L)
    rows = [[r.h, r.x, r.xi_error, r.prepotential_error, r.w0_error] for r in rec.rows]
    na = "not-available"
    meta = {"x_L": x_L,
            "xi_exponent": na if rec.xi_exponent is None else rec.xi_exponent,
            "prepotential_exponent": na if rec.prepotential_exponent is None else rec.prepotential_exponent,
            "w0_exponent": na if rec.w0_exponent is None else rec.w0_exponent,
            "monotone": rec.monotone}
    _emit(cfg, _table(cfg, ["h", "x", "xi_error", "prepotential_error", "w0_error"], rows, meta))
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=["J1", "L1"])
    common.add_argument("--g", type=float)
    common.add_argument("--h", type=float)
    common.add_argument("--ell", type=float)
    common.add_argument("--n-max", dest="n_max", type=int)
    common.add_argument("--grid-points", dest="grid_points", type=int)
    common.add_argument("--quad-order", dest="quad_order", type=int)
    common.add_argument("--tol-residual", dest="tol_residual", type=float)
    common.add_argument("--tol-quad", dest="tol_quad", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--config", help="JSON file with default settings")

    p = argparse.ArgumentParser(prog="dptell", description="Deformed DPT / radial oscillator systems.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("tabulate", parents=[common], help="potential, xi, psi and eigenfunctions on a grid")
    sub.add_parser("spectrum", parents=[common], help="energies and norms")
    sub.add_parser("verify", parents=[common], help="run the invariant suite (JSON report by default)")
    lim = sub.add_parser("limit", parents=[common], help="Jacobi to Laguerre limit study")
    lim.add_argument("--h-list", dest="h_list", type=_float_list)
    lim.add_argument("--x-l", dest="x_L", type=float)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "limit":
            file_vals = _load_config_file(args.config) if args.config else {}
            h_list = args.h_list or file_vals.get("h_list") or list(DEFAULT_H_LIST)
            x_L = args.x_L if args.x_L is not None else float(file_vals.get("x_L", 1.0))
            # the limit compares J1 with L1, so h is not a free parameter here
            if args.h is not None or "h" in file_vals:
                raise UsageError("limit takes --h-list, not --h")
            args.model = "L1"
            cfg = resolve_config(args)
            return cmd_limit(cfg, h_list, x_L)
        cfg = resolve_config(args, "json" if args.command == "verify" else "csv")
        if args.command == "tabulate":
            return cmd_tabulate(cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        return cmd_verify(cfg)
    except (UsageError, ParameterError, DptellError, ValueError) as exc:
        print(f"dptell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dptell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
