"""Command-line front end.

Subcommands: simulate (closed-loop runs), analyze (fixed points and Q
portrait), scan (saddle-node location), fields (spectral maps to CSV),
synth-wake (generate a sampled wake bundle).

Configuration comes from an optional JSON file (--config) overlaid with
command-line flags; the resolved configuration is embedded in the summary
output so any run can be reproduced from its own records.

Exit codes: 0 success, 2 configuration or validation error, 3 sensing
failure, 4 scan found no transition.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import agent, analysis, wake
from .fields import RadialField, wrap_phase
from .sensing import DegenerateMagnitudeError, SensingConfig
from .wake import (
    BundleFormatError,
    GridPeriodError,
    SpectralGrids,
    field_from_bundle,
    load_bundle,
    save_bundle,
    spectral_grids,
    synth_wake,
)


class ConfigError(ValueError):
    """The resolved configuration cannot be run."""


SIM_DEFAULTS = {
    "field": {},
    "law": {"kind": "static", "g0": 0.5, "m_floor": 1e-6},
    "agent": {"v": 1.0, "inits": None},
    "integration": {"dt": 1e-3, "t_end": 100.0, "r_stop": 0.05,
                    "r_escape": None},
    "sensing": {"mode": "auto", "n_samples": 64, "stencil_h": 0.01,
                "m_floor": 1e-9},
    "output": {"dir": ".", "prefix": "run"},
}

WAKE_DEFAULTS = {
    "a_w": 2.0, "k_x": 1.0, "omega": 1.0, "sigma": 2.0, "decay_l": 10.0,
    "x0": -2.0, "y0": -6.0, "dx": 0.2, "dy": 0.2, "nx": 81, "ny": 61,
    "nt": 64,
}


def _deep_merge(base, overlay):
    out = dict(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        elif value is not None:
            out[key] = value
    return out


def _load_config_file(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config file must hold a JSON object")
    # allow pointing --config at a previous run's summary
    if "config" in config and isinstance(config["config"], dict):
        config = config["config"]
    return config


def _parse_floats(text, n, what):
    parts = text.split(",")
    if len(parts) != n:
        raise ConfigError(f"{what} needs {n} comma-separated numbers: {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"bad number in {what}: {text!r}") from exc


def _build_field(field_cfg):
    kind = field_cfg.get("kind")
    if kind == "radial":
        ell = field_cfg.get("ell")
        if ell is None:
            raise ConfigError("radial field needs ell")
        return RadialField(float(ell))
    if kind == "bundle":
        path = field_cfg.get("path")
        if path is None:
            raise ConfigError("bundle field needs a path")
        return field_from_bundle(load_bundle(path))
    if kind == "synth_wake":
        params = {k: field_cfg[k] for k in WAKE_DEFAULTS if k in field_cfg}
        params = _deep_merge(WAKE_DEFAULTS, params)
        return field_from_bundle(synth_wake(**params))
    if kind is None:
        raise ConfigError("no field specified (use --field or a config file)")
    raise ConfigError(f"unknown field kind {kind!r}")


def _default_inits(field_cfg):
    kind = field_cfg.get("kind")
    if kind is None:
        raise ConfigError("no field specified (use --field or a config file)")
    if kind != "radial":
        raise ConfigError("initial poses are required for gridded fields")
    # successively more distant starts on the +x axis, heading tangentially
    theta = math.pi / 2
    return [[float(r), 0.0, theta] for r in (2.0, 4.0, 6.0, 8.0, 10.0)]


def _resolve_sim_config(args):
    file_cfg = _load_config_file(args.config)
    flag_cfg = {
        "field": {},
        "law": {},
        "agent": {},
        "integration": {},
        "sensing": {},
        "output": {},
    }
    if args.field is not None:
        flag_cfg["field"]["kind"] = args.field.replace("-", "_")
    if args.ell is not None:
        flag_cfg["field"]["ell"] = args.ell
    if args.bundle is not None:
        flag_cfg["field"]["path"] = args.bundle
    if args.gain is not None:
        flag_cfg["law"]["kind"] = args.gain
    if args.g0 is not None:
        flag_cfg["law"]["g0"] = args.g0
    if args.gain_m_floor is not None:
        flag_cfg["law"]["m_floor"] = args.gain_m_floor
    if args.v is not None:
        flag_cfg["agent"]["v"] = args.v
    if args.init:
        flag_cfg["agent"]["inits"] = [
            _parse_floats(text, 3, "--init") for text in args.init
        ]
    for name in ("dt", "t_end", "r_stop", "r_escape"):
        value = getattr(args, name)
        if value is not None:
            flag_cfg["integration"][name] = value
    if args.sensing is not None:
        flag_cfg["sensing"]["mode"] = args.sensing
    if args.n_samples is not None:
        flag_cfg["sensing"]["n_samples"] = args.n_samples
    if args.stencil_h is not None:
        flag_cfg["sensing"]["stencil_h"] = args.stencil_h
    if args.sensing_m_floor is not None:
        flag_cfg["sensing"]["m_floor"] = args.sensing_m_floor
    if args.out is not None:
        flag_cfg["output"]["dir"] = args.out
    if args.prefix is not None:
        flag_cfg["output"]["prefix"] = args.prefix

    config = _deep_merge(_deep_merge(SIM_DEFAULTS, file_cfg), flag_cfg)
    if config["agent"]["inits"] is None:
        config["agent"]["inits"] = _default_inits(config["field"])
    return config


def cmd_simulate(args):
    config = _resolve_sim_config(args)
    field = _build_field(config["field"])
    try:
        law = agent.GainLaw(
            kind=config["law"]["kind"],
            g0=float(config["law"]["g0"]),
            m_floor=float(config["law"]["m_floor"]),
        )
        sensing_cfg = SensingConfig(
            n_samples=int(config["sensing"]["n_samples"]),
            stencil_h=float(config["sensing"]["stencil_h"]),
            m_floor=float(config["sensing"]["m_floor"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    out_dir = Path(config["output"]["dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = config["output"]["prefix"]
    integ = config["integration"]

    runs = []
    any_sensing_failure = False
    for index, init in enumerate(config["agent"]["inits"]):
        x0, y0, theta0 = (float(v) for v in init)
        state = agent.AgentState(x=x0, y=y0, theta=theta0, t=0.0)
        try:
            traj = agent.simulate(
                state, field, law, sensing_cfg,
                dt=float(integ["dt"]), t_end=float(integ["t_end"]),
                r_stop=float(integ["r_stop"]),
                r_escape=(None if integ["r_escape"] is None
                          else float(integ["r_escape"])),
                v=float(config["agent"]["v"]),
                sensing=config["sensing"]["mode"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        csv_name = f"{prefix}_run{index:03d}.csv"
        sidecar_name = f"{prefix}_run{index:03d}.json"
        traj.write_csv(out_dir / csv_name)
        traj.write_sidecar(out_dir / sidecar_name)
        if traj.termination == agent.TERM_SENSING:
            any_sensing_failure = True
        drift = traj.q_drift()
        runs.append({
            "index": index,
            "init": [x0, y0, theta0],
            "csv": csv_name,
            "sidecar": sidecar_name,
            "termination": traj.termination,
            "n_samples": len(traj),
            "t_final": float(traj.t[-1]),
            "r_min": float(np.min(traj.r)),
            "r_max": float(np.max(traj.r)),
            "q_drift": None if math.isnan(drift) else drift,
        })

    summary = {"config": config, "runs": runs}
    summary_path = out_dir / f"{prefix}_summary.json"
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(summary_path)
    return 3 if any_sensing_failure else 0


def cmd_analyze(args):
    if args.rho is None or not args.rho > 0:
        raise ConfigError("analyze needs a positive --rho")
    kind = args.gain
    if kind != "static" and (args.ell is None or not args.ell > 0):
        raise ConfigError(f"{kind} gain needs a positive --ell")
    grid = analysis.PortraitGrid()
    if args.grid is not None:
        values = _parse_floats(args.grid, 6, "--grid")
        grid = analysis.PortraitGrid(
            u_min=values[0], u_max=values[1], w_min=values[2],
            w_max=values[3], nu=int(values[4]), nw=int(values[5]),
        )
    try:
        report = analysis.portrait(kind, args.rho, args.ell, v=args.v,
                                   grid=grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / f"{args.prefix}_report.json"
    grid_path = out_dir / f"{args.prefix}_q_grid.csv"
    report.write_json(report_path)
    report.write_grid_csv(grid_path)
    print(report_path)
    print(grid_path)
    return 0


def cmd_scan(args):
    if args.rho is None or not args.rho > 0:
        raise ConfigError("scan needs a positive --rho")
    if args.ell_min is None or args.ell_max is None:
        raise ConfigError("scan needs --ell-min and --ell-max")
    ell_critical = analysis.bifurcation_scan(
        args.rho, args.ell_min, args.ell_max, step=args.step,
        refine_tol=args.refine_tol,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = {
        "rho": args.rho,
        "ell_min": args.ell_min,
        "ell_max": args.ell_max,
        "step": args.step,
        "ell_critical": ell_critical,
    }
    path = out_dir / f"{args.prefix}_scan.json"
    with open(path, "w") as fh:
        json.dump(result, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(path)
    return 0


def _radial_spectral_grids(ell, x_range, y_range, nx, ny):
    xs = np.linspace(x_range[0], x_range[1], nx)
    ys = np.linspace(y_range[0], y_range[1], ny)
    xx, yy = np.meshgrid(xs, ys)
    rr = np.hypot(xx, yy)
    m = np.exp(-rr / ell)
    phi = wrap_phase(-rr)
    with np.errstate(invalid="ignore", divide="ignore"):
        gx = np.where(rr > 0, -xx / rr, np.nan)
        gy = np.where(rr > 0, -yy / rr, np.nan)
    grad = np.stack([gx, gy], axis=-1)
    # the gradient points at the source by construction
    delta = np.where(rr > 0, 0.0, np.nan)
    return SpectralGrids(x=xs, y=ys, m_grid=m, phi_grid=phi,
                         grad_phi_grid=grad, delta_grid=delta)


def cmd_fields(args):
    if args.field == "radial":
        if args.ell is None:
            raise ConfigError("radial field needs --ell")
        x_range = _parse_floats(args.x_range, 2, "--x-range")
        y_range = _parse_floats(args.y_range, 2, "--y-range")
        grids = _radial_spectral_grids(args.ell, x_range, y_range,
                                       args.nx, args.ny)
    else:
        if args.field == "bundle":
            if args.bundle is None:
                raise ConfigError("bundle field needs --bundle")
            bundle = load_bundle(args.bundle)
        else:  # synth-wake
            bundle = synth_wake()
        source = None
        if args.source is not None:
            source = _parse_floats(args.source, 2, "--source")
        grids = spectral_grids(bundle, source=source,
                               m_floor=args.m_floor)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    grids.write_csv(out)
    print(out)
    return 0


def cmd_synth_wake(args):
    params = {key: getattr(args, key.replace("-", "_"))
              for key in WAKE_DEFAULTS}
    try:
        bundle = synth_wake(
            **params, meta_re=args.meta_re, meta_st=args.meta_st,
            meta_a=args.meta_a,
        )
    except (ValueError, GridPeriodError) as exc:
        raise ConfigError(str(exc)) from exc
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    save_bundle(bundle, out)
    print(out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phaseseek",
        description="Source seeking from time-periodic signal fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the closed loop")
    p_sim.add_argument("--config", help="JSON config file")
    p_sim.add_argument("--field", choices=["radial", "bundle", "synth-wake"])
    p_sim.add_argument("--ell", type=float)
    p_sim.add_argument("--bundle", help="WAVF1 bundle path")
    p_sim.add_argument("--gain",
                       choices=["static", "proportional", "inverse"])
    p_sim.add_argument("--g0", type=float)
    p_sim.add_argument("--gain-m-floor", type=float)
    p_sim.add_argument("--v", type=float)
    p_sim.add_argument("--init", action="append",
                       help="x,y,theta (repeatable)")
    p_sim.add_argument("--dt", type=float)
    p_sim.add_argument("--t-end", type=float)
    p_sim.add_argument("--r-stop", type=float)
    p_sim.add_argument("--r-escape", type=float)
    p_sim.add_argument("--sensing",
                       choices=["auto", "analytic", "windowed"])
    p_sim.add_argument("--n-samples", type=int)
    p_sim.add_argument("--stencil-h", type=float)
    p_sim.add_argument("--sensing-m-floor", type=float)
    p_sim.add_argument("--out")
    p_sim.add_argument("--prefix")
    p_sim.set_defaults(func=cmd_simulate)

    p_an = sub.add_parser("analyze", help="fixed points and Q portrait")
    p_an.add_argument("--gain", required=True,
                      choices=["static", "proportional", "inverse"])
    p_an.add_argument("--rho", type=float, required=True)
    p_an.add_argument("--ell", type=float)
    p_an.add_argument("--v", type=float, default=1.0)
    p_an.add_argument("--grid", help="u_min,u_max,w_min,w_max,nu,nw")
    p_an.add_argument("--out", default=".")
    p_an.add_argument("--prefix", default="portrait")
    p_an.set_defaults(func=cmd_analyze)

    p_scan = sub.add_parser("scan", help="locate the saddle-node threshold")
    p_scan.add_argument("--rho", type=float, required=True)
    p_scan.add_argument("--ell-min", type=float, required=True)
    p_scan.add_argument("--ell-max", type=float, required=True)
    p_scan.add_argument("--step", type=float, default=0.1)
    p_scan.add_argument("--refine-tol", type=float, default=1e-9)
    p_scan.add_argument("--out", default=".")
    p_scan.add_argument("--prefix", default="bifurcation")
    p_scan.set_defaults(func=cmd_scan)

    p_f = sub.add_parser("fields", help="spectral maps to CSV")
    p_f.add_argument("--field", required=True,
                     choices=["radial", "bundle", "synth-wake"])
    p_f.add_argument("--ell", type=float)
    p_f.add_argument("--bundle")
    p_f.add_argument("--x-range", default="-15,15")
    p_f.add_argument("--y-range", default="-15,15")
    p_f.add_argument("--nx", type=int, default=101)
    p_f.add_argument("--ny", type=int, default=101)
    p_f.add_argument("--source", help="x,y of the known source")
    p_f.add_argument("--m-floor", type=float, default=1e-9)
    p_f.add_argument("--out", required=True)
    p_f.set_defaults(func=cmd_fields)

    p_w = sub.add_parser("synth-wake", help="write a synthetic wake bundle")
    p_w.add_argument("--a-w", type=float, default=WAKE_DEFAULTS["a_w"])
    p_w.add_argument("--k-x", type=float, default=WAKE_DEFAULTS["k_x"])
    p_w.add_argument("--omega", type=float, default=WAKE_DEFAULTS["omega"])
    p_w.add_argument("--sigma", type=float, default=WAKE_DEFAULTS["sigma"])
    p_w.add_argument("--decay-l", type=float,
                     default=WAKE_DEFAULTS["decay_l"])
    p_w.add_argument("--x0", type=float, default=WAKE_DEFAULTS["x0"])
    p_w.add_argument("--y0", type=float, default=WAKE_DEFAULTS["y0"])
    p_w.add_argument("--dx", type=float, default=WAKE_DEFAULTS["dx"])
    p_w.add_argument("--dy", type=float, default=WAKE_DEFAULTS["dy"])
    p_w.add_argument("--nx", type=int, default=WAKE_DEFAULTS["nx"])
    p_w.add_argument("--ny", type=int, default=WAKE_DEFAULTS["ny"])
    p_w.add_argument("--nt", type=int, default=WAKE_DEFAULTS["nt"])
    p_w.add_argument("--meta-re", type=float)
    p_w.add_argument("--meta-st", type=float)
    p_w.add_argument("--meta-a", type=float)
    p_w.add_argument("--out", required=True)
    p_w.set_defaults(func=cmd_synth_wake)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except analysis.NoTransitionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except DegenerateMagnitudeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, BundleFormatError, GridPeriodError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
