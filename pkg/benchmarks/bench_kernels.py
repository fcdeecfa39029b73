#!/usr/bin/env python3
"""Benchmark the hot kernels: numba backend vs pure-numpy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 128,256,512] [--repeats 5]

The same comparison can be forced package-wide with STOKESLAYER_NO_NUMBA=1.
"""

import argparse
import time

import numpy as np

from stokeslayer import accel, geometry
from stokeslayer.evolution import SimState, StepConfig, evaluate_flow, step
from stokeslayer.singular_ops import _log2sin_table
from stokeslayer.stokes_field import FlowParams


def make_ellipse(n):
    eta = np.arange(n) / n
    gam = np.stack([2.0 * np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1)
    dg = geometry.derivative(gam, 1)
    curve = geometry.PeriodicCurve(gam, float(np.hypot(dg[:, 0], dg[:, 1]).mean()))
    return geometry.resample_arclength(curve)


def timeit(fn, repeats):
    fn()  # warm up (also triggers jit compilation)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_size(n, repeats):
    curve = make_ellipse(n)
    nrm = geometry.normal(curve)
    kap = geometry.curvature(curve)
    fdens = kap[:, None] * nrm
    log2sin = _log2sin_table(n)
    pts = 3.0 * curve.samples[: max(n // 4, 8)]
    coef = geometry.fourier_coefficients(kap)
    xq = np.random.default_rng(0).random(n)
    diag = np.ones(n)
    state = SimState(curve=curve, h=np.ones(n), t=0.0)
    cfg = StepConfig(dt=1e-4)
    params = FlowParams()

    cases = {
        "self_velocity": lambda: accel.self_velocity_smooth(
            curve.samples, nrm, kap, fdens, curve.length, log2sin),
        "self_velocity_reg": lambda: accel.self_velocity_reg(
            curve.samples, nrm, kap, fdens, curve.length, 1e-2),
        "field_velocity": lambda: accel.field_velocity(curve.samples, nrm, kap, pts),
        "arc_chord": lambda: accel.arc_chord_pairs(curve.samples, curve.length, diag),
        "trig_eval": lambda: accel.trig_eval(coef, xq),
        "rhs_eval": lambda: evaluate_flow(state, params),
        "rk4_step": lambda: step(state, cfg, params),
    }
    rows = []
    for name, fn in cases.items():
        times = {}
        for backend in ("numba", "numpy"):
            try:
                accel.set_backend(backend)
            except RuntimeError:
                times[backend] = float("nan")
                continue
            times[backend] = timeit(fn, repeats)
        rows.append((name, times["numba"], times["numpy"]))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="128,256,512")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"{'kernel':<20} {'N':>5} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for n in sizes:
        for name, tb, tn in bench_size(n, args.repeats):
            ratio = tn / tb if tb > 0 else float("nan")
            print(f"{name:<20} {n:>5} {tb * 1e3:>10.3f}ms {tn * 1e3:>10.3f}ms {ratio:>8.1f}x")
    accel.set_backend("numba" if accel.HAVE_NUMBA else "numpy")


if __name__ == "__main__":
    main()
