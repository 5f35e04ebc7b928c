"""Command line entry point.

    disappear verify --profile exponential --epsilon 0.25
    disappear boundary-scan --eps 0.25 --samples 100000 --seed 7
    disappear energy-trace --profile exponential --t0 0 --t1 5 --samples 101
    disappear simulate --bc gamma --delta 0.5
    disappear nogo-demo --case quiet

Every option may also come from ``--config file.json`` (keys are the option
names with dashes replaced by underscores); explicit flags win.  Exit status
is 0 when all checks pass, 1 on a failed check and 2 on bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import boundary, diffops, nogo, quadrature, radial
from .errors import ParameterError
from .fields import eval_pair
from .profiles import Profile, make_bump, make_exponential
from .reporting import SCHEMA_VERSION, dumps_report, emit_svg, write_csv, write_trace_csv

_NUM = {"type": "number"}
_INT = {"type": "integer"}
_STR = {"type": "string"}

# option -> (json schema, default, help)
OPTIONS = {
    "profile": ({"enum": ["exponential", "bump"]}, None, "profile family"),
    "epsilon": (_NUM, 0.25, "eps of the exponential profile"),
    "b": (_NUM, None, "bump half-width (> 1)"),
    "delta": (_NUM, 0.5, "bound on |gamma| used to choose b"),
    "seed": (_INT, 0, "random / low-discrepancy seed"),
    "points": (_INT, 200, "number of sample points"),
    "step": (_NUM, 1e-3, "finite-difference step"),
    "levels": (_INT, 3, "refinement levels"),
    "tol": (_NUM, 1e-5, "residual tolerance at the coarsest step"),
    "eps": (_NUM, 0.25, "boundary parameter eps"),
    "samples": (_INT, None, "number of samples"),
    "frames": (_INT, 16, "random frames for rank checks"),
    "t0": (_NUM, 0.0, "first time"),
    "t1": (_NUM, 5.0, "last time"),
    "bc": (_STR, None, "boundary condition: eps:<value> or gamma"),
    "R": (_NUM, None, "outer radius"),
    "dr": (_NUM, None, "radial spacing"),
    "t_end": (_NUM, None, "final time"),
    "cfl": (_NUM, 0.8, "dt / dr"),
    "outer": ({"enum": ["dirichlet", "extrapolation"]}, None, "outer boundary policy"),
    "case": ({"enum": ["modulated", "quiet", "georgiev"]}, "modulated", "demonstration"),
    "out": (_STR, None, "JSON report path (default stdout)"),
    "csv": (_STR, None, "CSV table path"),
    "svg": (_STR, None, "SVG plot path"),
}

COMMANDS = {
    "verify": ["profile", "epsilon", "b", "seed", "points", "step", "levels", "tol", "out"],
    "boundary-scan": ["eps", "samples", "seed", "frames", "out"],
    "energy-trace": ["profile", "epsilon", "b", "t0", "t1", "samples", "out", "csv", "svg"],
    "simulate": ["profile", "epsilon", "b", "delta", "bc", "R", "dr", "t_end", "cfl", "outer",
                 "out", "csv", "svg"],
    "nogo-demo": ["case", "seed", "points", "step", "levels", "out", "csv"],
}


_OUTPUTS = ("out", "csv", "svg")


class UsageError(Exception):
    pass


def config_schema(command: str) -> dict:
    props = {name: OPTIONS[name][0] for name in COMMANDS[command]}
    props["command"] = {"const": command}
    return {"type": "object", "properties": props, "additionalProperties": False}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="disappear", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command, names in COMMANDS.items():
        sp = sub.add_parser(command)
        sp.add_argument("--config", help="JSON config file")
        for name in names:
            schema, _, help_ = OPTIONS[name]
            kw = {"default": None, "help": help_, "dest": name}
            if schema.get("type") == "number":
                kw["type"] = float
            elif schema.get("type") == "integer":
                kw["type"] = int
            if "enum" in schema:
                kw["choices"] = schema["enum"]
            sp.add_argument("--" + name.replace("_", "-"), **kw)
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        try:
            jsonschema.validate(cfg, config_schema(args.command))
        except jsonschema.ValidationError as exc:
            raise UsageError(f"invalid config: {exc.message}") from exc
        cfg.pop("command", None)
    for name in COMMANDS[args.command]:
        val = getattr(args, name)
        if val is not None:
            cfg[name] = val
        cfg.setdefault(name, OPTIONS[name][1])
    return cfg


def _profile(cfg) -> Profile:
    if cfg["profile"] == "bump":
        if cfg["b"] is None:
            raise ParameterError("bump profile needs --b")
        return make_bump(cfg["b"])
    return make_exponential(cfg["epsilon"])


def cmd_verify(cfg):
    cfg["profile"] = cfg["profile"] or "exponential"
    prof = _profile(cfg)
    t, x = diffops.sample_annulus(cfg["points"], seed=cfg["seed"])
    scheme = diffops.FDScheme(step=cfg["step"], levels=cfg["levels"])
    rep = diffops.maxwell_residual(prof, t, x, scheme)
    results = {"maxwell": rep.to_dict(), "maxwell_components": rep.components}
    checks = {
        "maxwell_order": bool(1.8 <= rep.order <= 2.3 or rep.at_floor),
        "maxwell_tolerance": bool(rep.norms[0] < cfg["tol"]),
    }

    lhs, rhs = boundary.boundary_residue(prof, t, x)
    residue_err = float(np.max(np.linalg.norm(lhs - rhs, axis=-1) / (1.0 + np.linalg.norm(rhs, axis=-1))))
    results["residue_identity_max"] = residue_err
    checks["residue_identity"] = residue_err <= 1e-12

    omega = x / np.linalg.norm(x, axis=-1, keepdims=True)
    if prof.kind == "exponential":
        u = eval_pair(prof, t, omega)
        res = boundary.neps_residual(u, omega, prof.epsilon)
        scale = max(1.0, float(np.max(np.abs(u.E))), float(np.max(np.abs(u.B))))
        results["boundary_residual"] = float(np.max(np.abs(res))) / scale
        checks["boundary_condition"] = results["boundary_residual"] <= 1e-12
    elif prof.width <= 1.0 + boundary.find_mu():
        tg = np.linspace(0.0, prof.width - 1.0, 64)
        res = boundary.gamma_residual(prof.width, tg[:, None], omega[None, :8])
        results["boundary_residual"] = float(np.max(np.abs(res)))
        checks["boundary_condition"] = results["boundary_residual"] <= 1e-10
    return results, checks


def cmd_boundary_scan(cfg):
    samples = cfg["samples"] or 100_000
    scan = boundary.dissipativity_scan(cfg["eps"], samples, cfg["seed"], cfg["frames"])
    scan["kappa"] = boundary.measure_kappa()
    checks = {
        "dissipative": scan["c_estimate"] > 0 and scan["min_margin"] < 0,
        "rank_four": scan["rank_checks"]["ranks"] == [4],
        "dim_neps_four": scan["rank_checks"]["dim_neps"] == [4],
        "kernel_in_neps": scan["rank_checks"]["kernel_in_neps"],
    }
    return scan, checks


def _trace_outputs(cfg, trace, title, extra=None):
    if cfg.get("csv"):
        write_trace_csv(cfg["csv"], trace, extra)
    if cfg.get("svg"):
        emit_svg(trace, cfg["svg"], title)


def cmd_energy_trace(cfg):
    cfg["profile"] = cfg["profile"] or "exponential"
    prof = _profile(cfg)
    n = cfg["samples"] or 101
    times = np.linspace(cfg["t0"], cfg["t1"], n)
    trace = quadrature.energy_trace(prof, times)
    _trace_outputs(cfg, trace, f"shell energy, {prof.kind} profile")
    results = {"profile": prof.describe(), "times": [cfg["t0"], cfg["t1"], n],
               "energy_first": float(trace.energy[0]), "energy_last": float(trace.energy[-1])}
    checks = {"non_increasing": bool(np.all(np.diff(trace.energy) <= 1e-12 * trace.energy[0]))}
    if np.count_nonzero(trace.energy > 0) >= 3:
        rate = quadrature.decay_rate(trace, exclude_nonpositive=True)
        results["fitted_rate"] = rate
        if prof.kind == "exponential":
            results["expected_rate"] = prof.rate
            checks["rate_within_1pct"] = abs(rate / prof.rate - 1.0) <= 0.01
    return results, checks


def _parse_bc(text):
    if text == "gamma":
        return "gamma", None
    if text.startswith("eps:"):
        try:
            return "eps", float(text[4:])
        except ValueError:
            pass
    raise ParameterError(f"--bc must be eps:<value> or gamma, got {text!r}")


def cmd_simulate(cfg):
    if cfg["bc"] is None:
        cfg["bc"] = "gamma" if cfg["profile"] == "bump" else f"eps:{cfg['epsilon']}"
    kind, eps = _parse_bc(cfg["bc"])
    results = {}
    if kind == "gamma":
        if cfg["profile"] == "exponential":
            raise ParameterError("the gamma boundary condition is built for the bump profile")
        cfg["profile"] = "bump"
        mu = boundary.find_mu()
        b = cfg["b"] if cfg["b"] is not None else boundary.choose_b(cfg["delta"], mu)
        cfg["b"] = b
        prof = make_bump(b)
        bc = boundary.BoundarySpace.bump_gamma(b)
        results.update(b=b, mu=mu, sup_gamma=boundary.gamma_sup(b), delta=cfg["delta"])
        R = cfg["R"] or b + 0.05
        dr = cfg["dr"] or (b - 1.0) / 1000.0
        t_end = cfg["t_end"] if cfg["t_end"] is not None else (b - 1.0) + 0.02
        outer = cfg["outer"] or "extrapolation"
    else:
        cfg["profile"] = cfg["profile"] or "exponential"
        prof = _profile(cfg)
        bc = boundary.BoundarySpace.constant(eps)
        R = cfg["R"] or 12.0
        dr = cfg["dr"] or 0.0025
        t_end = cfg["t_end"] if cfg["t_end"] is not None else 3.0
        outer = cfg["outer"] or "dirichlet"
    cfg.update(R=R, dr=dr, t_end=t_end, outer=outer)

    r = radial.radial_grid(R, dr)
    state = radial.init_from_profile(prof, r)
    nsteps = max(1, int(math.ceil(t_end / (cfg["cfl"] * dr))))
    trace, final = radial.run(state, t_end, cfg["cfl"] * dr, bc, outer,
                              prof if outer == "dirichlet" else None,
                              record_every=max(1, nsteps // 400))
    _trace_outputs(cfg, trace, f"radial energy, {prof.kind} profile",
                   {"boundary_residual": trace.boundary_residual,
                    "constraint_residual": trace.constraint_residual})
    e0 = float(trace.energy[0])
    checks = {"energy_non_increasing": bool(np.all(np.diff(trace.energy) <= 1e-12 * e0))}
    results.update(profile=prof.describe(), bc=bc.describe(), energy_initial=e0,
                   energy_final=float(trace.energy[-1]),
                   max_constraint_residual=float(np.max(trace.constraint_residual)),
                   max_boundary_residual=float(np.max(trace.boundary_residual)))
    if prof.kind == "exponential":
        rate = quadrature.decay_rate(trace)
        results.update(fitted_rate=rate, expected_rate=prof.rate, disappearance_time=None)
        if bc.kind == "eps" and abs(bc.eps - (prof.epsilon or math.nan)) < 1e-15:
            checks["rate_within_2pct"] = abs(rate / prof.rate - 1.0) <= 0.02
    else:
        small = np.nonzero(trace.energy <= 1e-6 * e0)[0]
        t_dis = float(trace.times[small[0]]) if small.size else None
        post = trace.energy[trace.times >= prof.width - 1.0]
        ratio = float(np.max(post) / e0) if post.size else None
        results.update(disappearance_time=t_dis, post_energy_ratio=ratio,
                       fitted_rate=None, expected_rate=None)
        checks["disappears_by_b_minus_1"] = t_dis is not None and t_dis <= prof.width - 1.0
        if ratio is not None:
            checks["post_energy_below_1e-6"] = ratio <= 1e-6
        if bc.kind == "gamma":
            checks["sup_gamma_below_delta_half"] = results["sup_gamma"] <= cfg["delta"] / 2
    return results, checks


def cmd_nogo(cfg):
    scheme = diffops.FDScheme(step=cfg["step"], levels=cfg["levels"])
    case = cfg["case"]
    results, checks, rows = {"label": nogo.LABEL, "case": case}, {}, []
    if case == "modulated":
        for name, pe in (("dipole", nogo.dipole_profile()), ("longitude", nogo.longitude_profile()),
                         ("quadrupole", nogo.quadrupole_profile())):
            o = nogo.obstruction_vs_exact(pe, cfg["points"], cfg["seed"], scheme)
            results[name] = o
            checks[f"{name}_obstructed"] = bool(o["ratio"] > 10 and o["change_order"] > 1.5)
            rows += [(name, s, m, o["exact_residual"]) for s, m in zip(o["steps"], o["level_max"])]
        header = ["profile", "step", "max_abs_div", "exact_field_residual"]
    elif case == "quiet":
        for name, pe in (("dipole", nogo.dipole_profile()), ("longitude", nogo.longitude_profile()),
                         ("rotated", nogo.rotated_profile([1.0, 2.0, 3.0])),
                         ("quadrupole", nogo.quadrupole_profile()),
                         ("incoming_E", nogo.incoming_E_profile())):
            q = nogo.quiet_spot_find(pe, 1.3)
            results[name] = q
            checks[f"{name}_quiet_spot"] = q["certified"]
            rows.append((name, *q["omega_star"], q["min_norm"], q["scale"]))
        header = ["profile", "omega1", "omega2", "omega3", "min_norm", "scale"]
    else:
        pe = nogo.georgiev_profile()
        o = nogo.obstruction_vs_exact(pe, cfg["points"], cfg["seed"], scheme)
        sweep = nogo.axis_sweep(pe)
        results.update(obstruction=o, axis_sweep=sweep)
        vals = sweep["max_abs_div"]
        checks["obstructed"] = bool(o["ratio"] > 10)
        checks["grows_toward_axis"] = bool(all(b > a for a, b in zip(vals, vals[1:])))
        rows = list(zip(sweep["tube_radius"], vals))
        header = ["tube_radius", "max_abs_div"]
    if cfg.get("csv"):
        write_csv(cfg["csv"], header, rows)
    return results, checks


HANDLERS = {
    "verify": cmd_verify,
    "boundary-scan": cmd_boundary_scan,
    "energy-trace": cmd_energy_trace,
    "simulate": cmd_simulate,
    "nogo-demo": cmd_nogo,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        results, checks = HANDLERS[args.command](cfg)
    except (UsageError, ParameterError) as exc:
        print(f"disappear {args.command}: error: {exc}", file=sys.stderr)
        return 2
    checks = {k: bool(v) for k, v in checks.items()}
    passed = all(checks.values())
    report = {
        "schema": SCHEMA_VERSION,
        "command": args.command,
        "config": {k: v for k, v in cfg.items() if k not in _OUTPUTS},
        "results": results,
        "checks": checks,
        "passed": passed,
    }
    text = dumps_report(report)
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    if not passed:
        failed = ", ".join(k for k, v in checks.items() if not v)
        print(f"disappear {args.command}: failed checks: {failed}", file=sys.stderr)
    return 0 if passed else 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
