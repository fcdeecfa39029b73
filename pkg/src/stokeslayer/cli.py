"""Command line interface.

Subcommands:

    run      --config PATH [--output PATH] [--quiet]   march a configured run
    check    --config PATH [--quiet]                   validate + print derived quantities
    selftest [--quiet]                                 fast invariant suite

Exit codes: 0 success, 2 config error, 3 numerical stop (positivity,
arc-chord, non-finite, energy ceiling, or selftest failure), 4 I/O error.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import diagnostics, geometry
from .config import build_initial_state, parse_config
from .errors import ConfigError, RunIOError, StokesLayerError
from .evolution import run as run_evolution
from .snapshots import SnapshotWriter


def _load_config(path, output_override):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    cfg = parse_config(text)
    if output_override:
        cfg = replace(cfg, output_path=output_override)
    return cfg


def _cmd_run(args, say):
    cfg = _load_config(args.config, args.output)
    state = build_initial_state(cfg)
    say(f"initial curve: N={cfg.N} L={state.curve.length:.12g} "
        f"area={diagnostics.enclosed_area(state.curve):.12g}")
    writer = SnapshotWriter(cfg.output_path)
    try:
        result = run_evolution(
            state, cfg.step_config(), cfg.flow_params(), cfg.T,
            sink=writer, snapshot_stride=cfg.snapshot_stride,
            arc_chord_factor=cfg.stop_arc_chord_factor,
            energy_ceiling=cfg.stop_energy_ceiling,
        )
    finally:
        writer.close()
    say(f"run {result.reason}: t={result.state.t:.6g} steps={result.steps} "
        f"snapshots={result.snapshots} L={result.state.curve.length:.12g}")
    say(f"wrote {writer.jsonl_path} and {writer.csv_path}")
    return 0 if result.reason == "completed" else 3


def _cmd_check(args, say):
    cfg = _load_config(args.config, args.output)
    state = build_initial_state(cfg)
    curve = state.curve
    diag = diagnostics.compute(state)
    say(f"config ok: N={cfg.N} dt={cfg.dt:g} T={cfg.T:g} mu={cfg.mu:g} "
        f"mollify_eps={cfg.mollify_eps:g} reg_eps={cfg.reg_eps:g}")
    say(f"curve: L={curve.length:.12g} area={diag.area:.12g} "
        f"iso_ratio={diag.iso_ratio:.9g}")
    say(f"monitors: arc_chord={diag.arc_chord_sup:.6g} energy={diag.energy:.6g} "
        f"h_min={diag.h_min:.6g} min_spacing={diagnostics.min_node_spacing(curve):.6g}")
    dt_max = 5.6 * cfg.mu * curve.length / (np.pi * cfg.N)
    say(f"empirical rk4 stability bound dt_max ~ {dt_max:.3g} (configured dt={cfg.dt:g})")
    return 0


def _selftest_cases():
    from . import evolution, singular_ops, stokes_field

    n = 128
    eta = np.arange(n) / n
    circle = geometry.PeriodicCurve(
        np.stack([np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1), 2 * np.pi)
    params = stokes_field.FlowParams()

    def circle_equilibrium():
        u = stokes_field.velocity_on_curve(circle, params)
        return np.abs(u).max() < 1e-10

    def curvature_sign():
        return np.abs(geometry.curvature(circle) + 1.0).max() < 1e-10

    def hilbert_involution():
        f = np.sin(2 * np.pi * eta) + 0.3 * np.cos(6 * np.pi * eta)
        hh = singular_ops.hilbert(singular_ops.hilbert(f))
        return np.abs(hh + (f - f.mean())).max() < 1e-12

    def half_laplacian_root_square():
        f = np.cos(8 * np.pi * eta)
        a = singular_ops.half_laplacian_root(singular_ops.half_laplacian_root(f))
        return np.abs(a - singular_ops.half_laplacian(f)).max() < 1e-12

    def mollify_adjoint():
        rng = np.random.default_rng(0)
        a, b = rng.standard_normal(n), rng.standard_normal(n)
        lhs = np.mean(a * singular_ops.mollify(b, 0.05))
        rhs = np.mean(singular_ops.mollify(a, 0.05) * b)
        return abs(lhs - rhs) < 1e-12

    def log_layer_circle():
        return np.abs(singular_ops.log_layer(np.ones(n), circle)).max() < 1e-10

    def resample_idempotent():
        c2 = geometry.resample_arclength(circle)
        return np.abs(c2.samples - circle.samples).max() < 1e-10

    def circle_fixed_point():
        state = evolution.SimState(curve=circle, h=np.ones(n), t=0.0)
        cfg = evolution.StepConfig(dt=1e-3)
        out = evolution.run(state, cfg, params, 0.01)
        drift = np.abs(out.state.curve.samples - circle.samples).max()
        return out.reason == "completed" and drift < 1e-9

    return [
        ("circle equilibrium velocity", circle_equilibrium),
        ("clockwise circle has curvature -1/R", curvature_sign),
        ("hilbert involution H(H(f)) = -(f - mean)", hilbert_involution),
        ("half-laplacian root squares back", half_laplacian_root_square),
        ("mollifier is self-adjoint", mollify_adjoint),
        ("log layer vanishes on the unit circle", log_layer_circle),
        ("arc-length resampling idempotent", resample_idempotent),
        ("circle is a fixed point of the dynamics", circle_fixed_point),
    ]


def _cmd_selftest(args, say):
    failures = 0
    for name, case in _selftest_cases():
        try:
            ok = case()
        except StokesLayerError as exc:
            ok = False
            say(f"FAIL {name}: {exc}")
        if ok:
            say(f"pass {name}")
        else:
            failures += 1
            say(f"FAIL {name}")
    if failures:
        say(f"selftest: {failures} failure(s)")
        return 3
    say("selftest: all checks passed")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="stokeslayer", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "check"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--output", default=None, help="override output_path")
        p.add_argument("--quiet", action="store_true")
    p = sub.add_parser("selftest")
    p.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    def say(msg):
        if not args.quiet:
            print(msg)

    try:
        if args.command == "run":
            return _cmd_run(args, say)
        if args.command == "check":
            return _cmd_check(args, say)
        return _cmd_selftest(args, say)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RunIOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except StokesLayerError as exc:
        print(f"numerical stop: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
