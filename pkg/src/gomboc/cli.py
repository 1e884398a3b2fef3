"""Command-line front end.

Exit codes: 0 pass, 1 verdict fail, 2 usage or configuration error,
3 internal numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import dataclass

from gomboc import __version__
from gomboc.curvature import DEFAULT_BRACKET, DEFAULT_GRID, beta_max, convexity_scan
from gomboc.equilibria import DEFAULT_SCAN, census
from gomboc.errors import BadBracket, GombocError, MeshIOError, ShapeError
from gomboc.kernels import BACKEND
from gomboc.mesh import (
    edge_use_counts,
    is_outward,
    is_watertight,
    tessellate,
    write_obj,
    write_stl,
)
from gomboc.moments import DEFAULT_N_PHI, DEFAULT_N_THETA, SphericalGrid, com_residuals
from gomboc.surface import PRESETS, CosineCubic, LinearWrap, PhaseFunction, ShapeSpec, eta_phase, linear_phase

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
PRESET_BETA = {"g1": 0.15, "g2": 0.17}
FORMATS = ("stl-bin", "stl-ascii", "obj")

log = logging.getLogger("gomboc")


class ConfigError(ValueError):
    pass


def _phase_from_parts(kind: str, params: dict) -> PhaseFunction:
    allowed = {
        "linear-wrap": {"n"},
        "cosine-cubic": set(),
        "linear": {"slope"},
        "eta-linear": {"multiplier"},
    }
    if kind not in allowed:
        raise ConfigError(f"unknown phase kind {kind!r}; expected one of {sorted(allowed)}")
    extra = set(params) - allowed[kind]
    if extra:
        raise ConfigError(f"unknown parameters for phase {kind!r}: {sorted(extra)}")
    try:
        if kind == "linear-wrap":
            return LinearWrap(int(params.get("n", 5)))
        if kind == "cosine-cubic":
            return CosineCubic()
        if kind == "linear":
            return linear_phase(float(params["slope"]))
        return eta_phase(float(params["multiplier"]))
    except KeyError as exc:
        raise ConfigError(f"phase {kind!r} needs parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad phase parameters for {kind!r}: {exc}") from None


def parse_phase(text: str) -> PhaseFunction:
    """Parse ``kind[:value]``, e.g. ``linear-wrap:5``, ``cosine-cubic``, ``linear:3``, ``eta-linear:2``."""
    kind, _, value = text.partition(":")
    key = {"linear-wrap": "n", "linear": "slope", "eta-linear": "multiplier"}.get(kind)
    params = {key: value} if key and value else {}
    if value and not key:
        raise ConfigError(f"phase {kind!r} takes no parameter")
    return _phase_from_parts(kind, params)


def phase_from_dict(d) -> PhaseFunction:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("phase must be an object with a 'kind' field")
    extra = set(d) - {"kind", "params"}
    if extra:
        raise ConfigError(f"unknown phase fields: {sorted(extra)}")
    params = d.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ConfigError("phase 'params' must be an object")
    return _phase_from_parts(d["kind"], params)


def _dims(d, name):
    if not isinstance(d, dict) or set(d) - {"n_theta", "n_phi"}:
        raise ConfigError(f"'{name}' must be an object with n_theta / n_phi")
    try:
        return tuple(int(d[k]) for k in ("n_theta", "n_phi"))
    except (KeyError, TypeError, ValueError):
        raise ConfigError(f"'{name}' needs integer n_theta and n_phi") from None


@dataclass
class ShapeConfig:
    preset: str | None = None
    beta: float | None = None
    phase: PhaseFunction | None = None
    scale_r0: float = 1.0
    quadrature: tuple = (DEFAULT_N_THETA, DEFAULT_N_PHI)
    scan: tuple = DEFAULT_SCAN
    convexity: tuple = DEFAULT_GRID
    mesh: tuple = (256, 512)
    tol: float = 1e-4
    bracket: tuple = DEFAULT_BRACKET

    FIELDS = ("preset", "beta", "phase", "scale_r0", "quadrature", "scan", "convexity", "mesh", "tol", "bracket")

    @classmethod
    def from_dict(cls, d: dict) -> "ShapeConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d = dict(d)
        d.pop("schema", None)
        unknown = set(d) - set(cls.FIELDS)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls()
        try:
            if "preset" in d:
                cfg.preset = d["preset"]
            if "beta" in d:
                cfg.beta = float(d["beta"])
            if "phase" in d:
                cfg.phase = phase_from_dict(d["phase"])
            if "scale_r0" in d:
                cfg.scale_r0 = float(d["scale_r0"])
            for name in ("quadrature", "scan", "convexity", "mesh"):
                if name in d:
                    setattr(cfg, name, _dims(d[name], name))
            if "tol" in d:
                cfg.tol = float(d["tol"])
            if "bracket" in d:
                lo, hi = d["bracket"]
                cfg.bracket = (float(lo), float(hi))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config value: {exc}") from None
        return cfg

    def shape(self) -> ShapeSpec:
        if self.preset is not None and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; expected one of {sorted(PRESETS)}")
        preset = self.preset or ("g1" if self.phase is None else None)
        beta = self.beta if self.beta is not None else PRESET_BETA.get(preset)
        if beta is None:
            raise ConfigError("a custom phase needs an explicit beta")
        try:
            if self.phase is not None:
                return ShapeSpec(beta, self.phase, self.scale_r0)
            return PRESETS[preset](beta, self.scale_r0)
        except ShapeError as exc:
            raise ConfigError(str(exc)) from None


def _dims_arg(args, default):
    nt = args.ntheta if args.ntheta is not None else default[0]
    nphi = args.nphi if args.nphi is not None else default[1]
    return nt, nphi


def load_config(args) -> ShapeConfig:
    if args.config:
        try:
            with open(args.config) as f:
                cfg = ShapeConfig.from_dict(json.load(f))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config!r} is not valid JSON: {exc}") from None
    else:
        cfg = ShapeConfig()
    if args.preset is not None:
        cfg.preset = args.preset
        if args.phase is None:
            cfg.phase = None
    if args.phase is not None:
        cfg.phase = parse_phase(args.phase)
    if args.beta is not None:
        cfg.beta = args.beta
    if args.scale is not None:
        cfg.scale_r0 = args.scale
    if getattr(args, "tol", None) is not None:
        cfg.tol = args.tol
    if getattr(args, "bracket", None) is not None:
        cfg.bracket = tuple(args.bracket)
    # --ntheta/--nphi mean different grids per subcommand
    target = {"verify": "quadrature", "report": "quadrature", "equilibria": "scan",
              "convexity": "convexity", "beta-max": "convexity", "mesh": "mesh"}[args.command]
    setattr(cfg, target, _dims_arg(args, getattr(cfg, target)))
    return cfg


def _base_report(command, shape):
    return {
        "schema": SCHEMA,
        "tool": {"name": "gomboc", "version": __version__},
        "command": command,
        "shape": shape.describe(),
    }


def _timed(timings, key, fn, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    timings[key] = time.perf_counter() - t0
    return out


def _write_json(report, path):
    if not path:
        return
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
    try:
        with open(path, "w") as f:
            f.write(text + "\n")
    except OSError as exc:
        raise MeshIOError(f"cannot write report {path!r}: {exc.strerror}") from None


def _phase_label(d):
    params = ",".join(f"{k}={v:g}" for k, v in sorted(d.items()) if k != "kind")
    return d["kind"] + (f"({params})" if params else "")


def _fmt_angle(x):
    return f"{x / math.pi:.12f} pi"


def run_verify(cfg: ShapeConfig, timings: dict) -> dict:
    shape = cfg.shape()
    moments = _timed(timings, "moments", com_residuals, shape, SphericalGrid.build(*cfg.quadrature))
    eq = _timed(timings, "equilibria", census, shape, *cfg.scan)
    conv = _timed(timings, "convexity", convexity_scan, shape, *cfg.convexity)
    verdict = {
        "com_ok": moments.satisfied(),
        "is_mono_monostatic": eq.is_mono_monostatic,
        "is_convex": conv.is_convex,
    }
    verdict["is_gomboc"] = all(verdict.values())
    report = _base_report("verify", shape)
    report.update(moments=moments.to_dict(), equilibria=eq.to_dict(), convexity=conv.to_dict(), verdict=verdict)
    return report


def print_verify(report, out, detailed=False):
    m, e, c, v = report["moments"], report["equilibria"], report["convexity"], report["verdict"]
    ok = {True: "ok", False: "FAIL"}
    print(f"shape      beta={report['shape']['beta']:g} phase={_phase_label(report['shape']['phase'])} "
          f"r0={report['shape']['scale_r0']:g}", file=out)
    print(f"volume     {m['volume']:.10f}", file=out)
    print(f"com        |res_z|={abs(m['com_residual_z']):.3e} |res_xy|={m['com_residual_xy_abs']:.3e}  [{ok[v['com_ok']]}]", file=out)
    print(f"equilibria {e['counts']} index_sum={e['index_sum']}  [{ok[v['is_mono_monostatic']]}]", file=out)
    print(f"convexity  min kappa1={c['min_kappa1']:.6g} at theta={_fmt_angle(c['argmin']['theta'])}, "
          f"phi={_fmt_angle(c['argmin']['phi'])}  [{ok[v['is_convex']]}]", file=out)
    if detailed:
        _print_points(e["points"], out)
        print(f"com vector {m['com']}", file=out)
        print(f"grids      quadrature {m['grid']['n_theta']}x{m['grid']['n_phi']}, scan "
              f"{e['scan']['n_theta']}x{e['scan']['n_phi']}, curvature "
              f"{c['grid']['n_theta']}x{c['grid']['n_phi']} + caps", file=out)
    print(f"is_gomboc  {v['is_gomboc']}", file=out)


def _print_points(points, out):
    print(f"{'theta':>20} {'phi':>20} {'kind':>9} {'grad_norm':>11} {'F':>12}", file=out)
    for p in points:
        print(f"{_fmt_angle(p['theta']):>20} {_fmt_angle(p['phi']):>20} {p['kind']:>9} "
              f"{p['grad_norm']:11.3e} {p['F']:12.9f}", file=out)


def cmd_verify(cfg, args, out):
    timings = {}
    report = run_verify(cfg, timings)
    report["timings"] = timings
    print_verify(report, out, detailed=args.command == "report")
    _write_json(report, args.json)
    return EXIT_OK if report["verdict"]["is_gomboc"] else EXIT_FAIL


def cmd_equilibria(cfg, args, out):
    shape = cfg.shape()
    timings = {}
    eq = _timed(timings, "equilibria", census, shape, *cfg.scan)
    report = _base_report("equilibria", shape)
    report.update(equilibria=eq.to_dict(), timings=timings)
    _print_points(report["equilibria"]["points"], out)
    print(f"counts {eq.counts} index_sum={eq.index_sum} mono-monostatic={eq.is_mono_monostatic}", file=out)
    _write_json(report, args.json)
    return EXIT_OK if eq.is_mono_monostatic else EXIT_FAIL


def cmd_convexity(cfg, args, out):
    shape = cfg.shape()
    timings = {}
    conv = _timed(timings, "convexity", convexity_scan, shape, *cfg.convexity)
    report = _base_report("convexity", shape)
    report.update(convexity=conv.to_dict(), timings=timings)
    print(f"min kappa1 {conv.min_kappa1:.9g} at theta={_fmt_angle(conv.argmin[0])}, phi={_fmt_angle(conv.argmin[1])}", file=out)
    print(f"min mean   {conv.min_mean:.9g}", file=out)
    print(f"is_convex  {conv.is_convex}", file=out)
    _write_json(report, args.json)
    return EXIT_OK if conv.is_convex else EXIT_FAIL


def cmd_beta_max(cfg, args, out):
    shape = cfg.shape()
    timings = {}
    res = _timed(timings, "beta_max", beta_max, shape.phase, cfg.tol, cfg.bracket, *cfg.convexity)
    report = _base_report("beta-max", shape)
    del report["shape"]["beta"]
    report.update(beta_max=res.to_dict(), timings=timings)
    print(f"phase      {shape.phase.name}", file=out)
    print(f"beta_max   {res.beta_max:.8f}  (bracket {res.bracket[0]:.8f} .. {res.bracket[1]:.8f})", file=out)
    print(f"grid       {res.grid[0]}x{res.grid[1]}, {len(res.trace)} scans, verified={res.verified}", file=out)
    _write_json(report, args.json)
    return EXIT_OK


def cmd_mesh(cfg, args, out):
    shape = cfg.shape()
    nt, nphi = cfg.mesh
    try:
        mesh = tessellate(shape, nt, nphi)
    except ShapeError as exc:
        raise ConfigError(str(exc)) from None
    if not args.output:
        raise ConfigError("mesh needs an output path (-o)")
    fmt = args.format
    if fmt == "obj":
        write_obj(mesh, args.output)
    else:
        write_stl(mesh, args.output, "binary" if fmt == "stl-bin" else "ascii")
    watertight = is_watertight(mesh)
    outward = is_outward(mesh)
    report = _base_report("mesh", shape)
    report["mesh"] = {
        "path": str(args.output),
        "format": fmt,
        "grid": {"n_theta": nt, "n_phi": nphi},
        "vertices": int(len(mesh.vertices)),
        "triangles": int(len(mesh.triangles)),
        "volume": mesh.volume(),
        "watertight": watertight,
        "edge_use_histogram": {str(k): v for k, v in edge_use_counts(mesh).items()},
        "outward": outward,
    }
    print(f"wrote {args.output} ({fmt}, {len(mesh.triangles)} triangles, {len(mesh.vertices)} vertices)", file=out)
    print(f"volume     {mesh.volume():.10g}", file=out)
    print(f"watertight {watertight}  outward {outward}", file=out)
    _write_json(report, args.json)
    return EXIT_OK if watertight and outward else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "report": cmd_verify,
    "equilibria": cmd_equilibria,
    "convexity": cmd_convexity,
    "beta-max": cmd_beta_max,
    "mesh": cmd_mesh,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gomboc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config document; flags override it")
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--beta", type=float)
    common.add_argument("--phase", help="linear-wrap:N | cosine-cubic | linear:SLOPE | eta-linear:M")
    common.add_argument("--scale", type=float, help="size factor r0")
    common.add_argument("--ntheta", type=int)
    common.add_argument("--nphi", type=int)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="COM, equilibria and convexity checks (--ntheta/--nphi: quadrature)")
    sub.add_parser("report", parents=[common], help="verify with a detailed printout")
    sub.add_parser("equilibria", parents=[common], help="equilibrium census (--ntheta/--nphi: scan grid)")
    sub.add_parser("convexity", parents=[common], help="curvature scan (--ntheta/--nphi: curvature grid)")
    bm = sub.add_parser("beta-max", parents=[common], help="largest convex beta (--ntheta/--nphi: curvature grid)")
    bm.add_argument("--tol", type=float)
    bm.add_argument("--bracket", type=float, nargs=2, metavar=("LO", "HI"))
    me = sub.add_parser("mesh", parents=[common], help="tessellate and export (--ntheta/--nphi: mesh grid)")
    me.add_argument("-o", "--output")
    me.add_argument("--format", choices=FORMATS, default="stl-bin")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg, args, out)
    except (ConfigError, BadBracket, MeshIOError) as exc:
        print(f"gomboc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GombocError as exc:
        print(f"gomboc: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"gomboc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
