"""Command-line front end.

Subcommands::

    cmc-simons verify CONFIG      run identity checks on a configured surface
    cmc-simons formal --count N --seed S
    cmc-simons simons CONFIG      Simons functional of a compact cmc surface
    cmc-simons bounds --kappa K --tau T --H H --C C [--A-sq X]
    cmc-simons sweep RANGES       CSV table of pinching bounds

Exit codes: 0 pass, 1 a check failed (or was inconclusive), 2 configuration
or usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional

import jsonschema

from . import __version__
from . import formal as F
from . import identities as I
from . import pinching as P
from .ambient import ModelParams
from .errors import CmcRequired, CmcSimonsError, ConfigError, NonCompact
from .hopf import HopfTorusSpec, SurfaceKind, TestSurfaceSpec, build_surface
from .quadrature import GridSpec, simons_functional
from .surface import evaluate_surface

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SCHEMA_VERSION = 1

_NUM = {"type": "number"}
_RANGE = {"oneOf": [_NUM, {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}]}

RUN_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "model", "surface"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "model": {
            "type": "object",
            "required": ["kappa", "tau"],
            "additionalProperties": False,
            "properties": {"kappa": _NUM, "tau": _NUM},
        },
        "surface": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": [k.value for k in SurfaceKind]},
                "s": _NUM,
                "amplitude": _NUM,
                "frequency": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                "phase": _NUM,
                "radius": _NUM,
                "half_width": _NUM,
                "coefficients": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
                "H": _NUM,
                "g0": _NUM,
                "g1": _NUM,
                "y_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            },
            "additionalProperties": False,
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"n_u": {"type": "integer", "minimum": 8}, "n_v": {"type": "integer", "minimum": 8}},
        },
        "checks": {"oneOf": [{"type": "string"}, {"type": "array", "items": {"type": "string"}, "minItems": 1}]},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        "degree": {"enum": [3, 4]},
        "seed": {"type": "integer"},
    },
}

SWEEP_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "ranges"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "ranges": {
            "type": "object",
            "required": ["kappa", "tau", "H", "C"],
            "additionalProperties": False,
            "properties": {"kappa": _RANGE, "tau": _RANGE, "H": _RANGE, "C": _RANGE},
        },
        "samples": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "require": {"enum": ["corridor"]},
    },
}


# -- config handling ------------------------------------------------------


def load_config(path: str, schema: dict) -> tuple[dict, str]:
    """Parse and validate a JSON config; returns the config and its sha256."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    try:
        jsonschema.validate(cfg, schema)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"{path}: {exc.message}") from exc
    return cfg, hashlib.sha256(raw).hexdigest()


def surface_from_config(cfg: dict):
    params = ModelParams(float(cfg["model"]["kappa"]), float(cfg["model"]["tau"]))
    s = dict(cfg["surface"])
    kind = SurfaceKind(s.pop("kind"))
    if kind is SurfaceKind.HOPF_TORUS:
        spec = HopfTorusSpec(params, float(s.get("s", math.pi / 4)))
    elif kind is SurfaceKind.NIL_TRANSLATION:
        spec = TestSurfaceSpec(kind, params, extra=s)
    else:
        if "frequency" in s:
            s["frequency"] = tuple(s["frequency"])
        if "coefficients" in s:
            s["coefficients"] = tuple(s["coefficients"])
        spec = TestSurfaceSpec(kind, params, **s)
    try:
        return build_surface(spec)
    except (ValueError, CmcSimonsError) as exc:
        raise ConfigError(f"cannot build surface: {exc}") from exc


def _clean(obj):
    """Replace non-finite floats by None so the JSON stays standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_report(report: dict, out: Optional[str]) -> None:
    text = json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def provenance(config_hash: Optional[str], seed: Optional[int]) -> dict:
    return {"config_sha256": config_hash, "seed": seed, "tool": "cmc-simons", "version": __version__}


# -- subcommands ----------------------------------------------------------


def cmd_verify(args) -> int:
    cfg, digest = load_config(args.config, RUN_SCHEMA)
    imm = surface_from_config(cfg)
    names = I.names_for(cfg.get("checks", "all-general"))
    checks = [I.get_check(n) for n in names]
    if any(c.group is I.Group.CMC for c in checks) and not imm.cmc_tag:
        raise ConfigError(f"cmc checks requested on non-cmc surface {imm.name}")
    grid = cfg.get("grid", {})
    n_u, n_v = grid.get("n_u", 16), grid.get("n_v", 16)
    degree = cfg.get("degree", 4 if any(c.needs_laplacian for c in checks) else 3)
    u, v = imm.grid(n_u, n_v)
    data = evaluate_surface(imm, u, v, degree=degree)
    try:
        results = I.run_checks(data, names, cfg.get("tolerances"))
    except CmcRequired as exc:
        raise ConfigError(str(exc)) from exc
    records = [r.as_dict() for r in results]
    inconclusive = any(r.inconclusive for r in results)
    ok = all(r.passed for r in results)
    report = {
        "command": "verify",
        "surface": {"name": imm.name, "spec": imm.spec, "cmc_tag": imm.cmc_tag},
        "model": {"kappa": imm.params.kappa, "tau": imm.params.tau},
        "grid": {"n_u": n_u, "n_v": n_v, "degree": degree, "n_points": int(data.n_points)},
        "records": records,
        "verdict": "inconclusive" if inconclusive else ("pass" if ok else "fail"),
        "provenance": provenance(digest, cfg.get("seed")),
    }
    dump_report(report, args.output)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_formal(args) -> int:
    if args.count < 1:
        raise ConfigError("--count must be >= 1")
    if args.mutate:
        with F.mutation():
            rep = F.run_formal(args.count, args.seed)
    else:
        rep = F.run_formal(args.count, args.seed)
    report = {
        "command": "formal",
        "count": rep.count,
        "records": [{"name": k, "verdict": "pass" if v else "fail"} for k, v in sorted(rep.passed.items())],
        "failures": rep.failures,
        "mutation": bool(args.mutate),
        "verdict": "pass" if rep.ok else "fail",
        "provenance": provenance(None, args.seed),
    }
    dump_report(report, args.output)
    return EXIT_PASS if rep.ok else EXIT_FAIL


def cmd_simons(args) -> int:
    cfg, digest = load_config(args.config, RUN_SCHEMA)
    imm = surface_from_config(cfg)
    grid = cfg.get("grid", {})
    gs = GridSpec(grid.get("n_u", 16), grid.get("n_v", 16))
    try:
        res = simons_functional(imm, gs, tol=args.tol)
    except (CmcRequired, NonCompact) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from exc
    k, t = imm.params.kappa, imm.params.tau
    report = {
        "command": "simons",
        "surface": {"name": imm.name, "spec": imm.spec},
        "model": {"kappa": k, "tau": t},
        "result": res.as_dict(),
        "space_form": bool(k == 4 * t * t),
        "verdict": "pass" if res.nonnegative else "fail",
        "provenance": provenance(digest, cfg.get("seed")),
    }
    dump_report(report, args.output)
    return EXIT_PASS if res.nonnegative else EXIT_FAIL


def cmd_bounds(args) -> int:
    inp = P.PinchingInput(args.kappa, args.tau, args.H, args.C)
    row = P.sweep_row(inp)
    report = {"command": "bounds", "input": {"kappa": inp.kappa, "tau": inp.tau, "H": inp.H, "C": inp.C}, "row": row}
    ok = True
    if row["a"] is not None:
        report["consistency"] = P.quadratic_consistency(inp)
    if inp.regime == P.CORRIDOR and row["a"] is not None:
        report["special_corridor"] = list(P.special_corridor(inp))
        ok = bool(row["ordering_ok"])
        if args.A_sq is not None:
            report["corridor_check"] = P.corridor_check(args.A_sq, inp).as_dict()
    report["verdict"] = "pass" if ok else "fail"
    report["provenance"] = provenance(None, None)
    dump_report(report, args.output)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    cfg, digest = load_config(args.ranges, SWEEP_SCHEMA)
    ranges = dict(cfg["ranges"])
    if "require" in cfg:
        ranges["require"] = cfg["require"]
    try:
        summary = P.sweep(ranges, cfg.get("samples", 1000), cfg.get("seed", 0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=P.CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in summary.rows:
        writer.writerow({k: ("" if row[k] is None else repr(row[k]) if isinstance(row[k], float) else row[k]) for k in P.CSV_COLUMNS})
    if args.output:
        Path(args.output).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    sys.stderr.write(
        f"rows={len(summary.rows)} ordering_violations={summary.violations} "
        f"open_regime_rows={summary.open_rows} negative_discriminant={summary.negative_discriminant} "
        f"config_sha256={digest}\n"
    )
    return EXIT_PASS if summary.violations == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmc-simons", description="Verification toolkit for cmc surfaces in E(kappa, tau).")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run identity checks on a configured surface")
    v.add_argument("config")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("formal", help="exact rational replay of the cmc derivation chain")
    f.add_argument("--count", type=int, default=1000)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--mutate", action="store_true", help="flip a sign in the beta11 constraint (self-test)")
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_formal)

    s = sub.add_parser("simons", help="Simons functional of a compact cmc surface")
    s.add_argument("config")
    s.add_argument("--tol", type=float, default=1e-7)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_simons)

    b = sub.add_parser("bounds", help="pinching interval at one point")
    b.add_argument("--kappa", type=float, required=True)
    b.add_argument("--tau", type=float, required=True)
    b.add_argument("--H", type=float, required=True)
    b.add_argument("--C", type=float, required=True)
    b.add_argument("--A-sq", dest="A_sq", type=float)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bounds)

    w = sub.add_parser("sweep", help="CSV sweep of pinching bounds")
    w.add_argument("ranges")
    w.add_argument("-o", "--output")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except CmcSimonsError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
