"""Run configuration: flat JSON schema, validation, initial-state construction.

Schema (all keys optional unless noted; defaults in parentheses):

    ic                  initial curve, tagged object (circle of radius 1):
                          {"circle": {"R": r}}
                          {"ellipse": {"a": a, "b": b}}
                          {"fourier": {"R": r, "modes": [[k, amp, phase], ...]}}
    h0                  initial thickness, tagged object (constant 1):
                          {"constant": {"c": c}}
                          {"fourier": {"mean": m, "modes": [[k, amp, phase], ...]}}
    N                   node count, even, >= 16 (256)
    dt                  time step (0.001)
    T                   final time (1.0)
    resample_every      arc-length resampling cadence in steps (10)
    mollify_eps         smoothing width for the regularized dynamics (0.0)
    reg_eps             kernel regularization for the velocity (0.0)
    mu                  outer viscosity (1.0)
    ambient             "none" or {"linear": {"A": [[a,b],[c,d]]}}, trace-free ("none")
    output_path         JSONL snapshot path ("snapshots.jsonl"); a CSV
                        diagnostics file is written next to it
    snapshot_stride     steps between snapshots (10)
    stop_arc_chord_factor  abort when arc-chord sup exceeds this multiple of
                        its initial value (100.0)
    stop_energy_ceiling abort when the energy monitor reaches this value
                        (null = disabled)

Unknown keys are rejected. Curves are built clockwise; the initial curve is
resampled to uniform arc length, so |dGamma/d eta| = L holds at t = 0.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry
from .errors import ConfigError, SelfIntersectionError
from .evolution import SimState, StepConfig
from .stokes_field import FlowParams, linear_ambient

_DEFAULTS = {
    "ic": {"circle": {"R": 1.0}},
    "h0": {"constant": {"c": 1.0}},
    "N": 256,
    "dt": 1e-3,
    "T": 1.0,
    "resample_every": 10,
    "mollify_eps": 0.0,
    "reg_eps": 0.0,
    "mu": 1.0,
    "ambient": "none",
    "output_path": "snapshots.jsonl",
    "snapshot_stride": 10,
    "stop_arc_chord_factor": 100.0,
    "stop_energy_ceiling": None,
}


@dataclass(frozen=True)
class RunConfig:
    ic: dict
    h0: dict
    N: int
    dt: float
    T: float
    resample_every: int
    mollify_eps: float
    reg_eps: float
    mu: float
    ambient: object
    output_path: str
    snapshot_stride: int
    stop_arc_chord_factor: float
    stop_energy_ceiling: Optional[float] = None

    def step_config(self):
        return StepConfig(dt=self.dt, integrator="rk4",
                          mollify_eps=self.mollify_eps,
                          resample_every=self.resample_every)

    def flow_params(self):
        ambient = None
        if isinstance(self.ambient, dict) and "linear" in self.ambient:
            ambient = linear_ambient(np.asarray(self.ambient["linear"]["A"], dtype=float))
        return FlowParams(mu=self.mu, ambient=ambient, reg_eps=self.reg_eps)


def _require_number(cfg, key, positive=False, nonnegative=False, integer=False):
    v = cfg[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"key {key!r} must be a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"key {key!r} must be an integer, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"key {key!r} must be positive, got {v!r}")
    if nonnegative and v < 0:
        raise ConfigError(f"key {key!r} must be nonnegative, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"key {key!r} must be finite, got {v!r}")
    return int(v) if integer else float(v)


def _check_tagged(name, value, tags):
    if not isinstance(value, dict) or len(value) != 1:
        raise ConfigError(f"key {name!r} must be an object with exactly one of {tags}")
    tag = next(iter(value))
    if tag not in tags:
        raise ConfigError(f"key {name!r} has unknown variant {tag!r}; expected one of {tags}")
    if not isinstance(value[tag], dict):
        raise ConfigError(f"key {name!r}: variant {tag!r} must be an object")
    return tag


def _check_modes(name, modes):
    if not isinstance(modes, list):
        raise ConfigError(f"key {name!r}: 'modes' must be a list of [mode, amplitude, phase]")
    out = []
    for entry in modes:
        if (not isinstance(entry, (list, tuple)) or len(entry) != 3
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)):
            raise ConfigError(f"key {name!r}: each mode entry must be [mode, amplitude, phase]")
        k, amp, phase = entry
        if int(k) != k or k < 1:
            raise ConfigError(f"key {name!r}: mode numbers must be positive integers, got {k!r}")
        out.append((int(k), float(amp), float(phase)))
    return out


def parse_config(text):
    """Parse and validate a flat JSON config document into a RunConfig."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a single JSON object")
    unknown = set(raw) - set(_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = dict(_DEFAULTS)
    cfg.update(raw)

    n = _require_number(cfg, "N", positive=True, integer=True)
    if n < 16 or n % 2:
        raise ConfigError(f"key 'N' must be even and at least 16, got {n}")
    dt = _require_number(cfg, "dt", positive=True)
    T = _require_number(cfg, "T", nonnegative=True)
    resample_every = _require_number(cfg, "resample_every", positive=True, integer=True)
    mollify_eps = _require_number(cfg, "mollify_eps", nonnegative=True)
    reg_eps = _require_number(cfg, "reg_eps", nonnegative=True)
    mu = _require_number(cfg, "mu", positive=True)
    stride = _require_number(cfg, "snapshot_stride", positive=True, integer=True)
    acf = _require_number(cfg, "stop_arc_chord_factor", positive=True)
    ceiling = cfg["stop_energy_ceiling"]
    if ceiling is not None:
        ceiling = _require_number(cfg, "stop_energy_ceiling", positive=True)
    if not isinstance(cfg["output_path"], str) or not cfg["output_path"]:
        raise ConfigError("key 'output_path' must be a non-empty string")

    ic = cfg["ic"]
    tag = _check_tagged("ic", ic, ("circle", "ellipse", "fourier"))
    body = ic[tag]
    if tag == "circle":
        if set(body) != {"R"}:
            raise ConfigError("key 'ic': circle takes exactly {'R'}")
        if not (isinstance(body["R"], (int, float)) and body["R"] > 0):
            raise ConfigError("key 'ic': circle radius R must be positive")
    elif tag == "ellipse":
        if set(body) != {"a", "b"}:
            raise ConfigError("key 'ic': ellipse takes exactly {'a', 'b'}")
        if not all(isinstance(body[k], (int, float)) and body[k] > 0 for k in ("a", "b")):
            raise ConfigError("key 'ic': ellipse semi-axes a, b must be positive")
    else:
        if set(body) != {"R", "modes"}:
            raise ConfigError("key 'ic': fourier takes exactly {'R', 'modes'}")
        if not (isinstance(body["R"], (int, float)) and body["R"] > 0):
            raise ConfigError("key 'ic': fourier base radius R must be positive")
        _check_modes("ic", body["modes"])

    h0 = cfg["h0"]
    tag = _check_tagged("h0", h0, ("constant", "fourier"))
    body = h0[tag]
    if tag == "constant":
        if set(body) != {"c"}:
            raise ConfigError("key 'h0': constant takes exactly {'c'}")
        if not (isinstance(body["c"], (int, float)) and body["c"] > 0):
            raise ConfigError(
                "key 'h0': initial thickness must be strictly positive everywhere"
            )
    else:
        if set(body) != {"mean", "modes"}:
            raise ConfigError("key 'h0': fourier takes exactly {'mean', 'modes'}")
        modes = _check_modes("h0", body["modes"])
        mean = body["mean"]
        if not isinstance(mean, (int, float)):
            raise ConfigError("key 'h0': 'mean' must be a number")
        if mean <= sum(abs(a) for _, a, _ in modes):
            raise ConfigError(
                "key 'h0': initial thickness must be strictly positive everywhere "
                "(mean must exceed the sum of mode amplitudes)"
            )

    ambient = cfg["ambient"]
    if ambient != "none":
        if not (isinstance(ambient, dict) and set(ambient) == {"linear"}):
            raise ConfigError("key 'ambient' must be \"none\" or {\"linear\": {\"A\": ...}}")
        lin = ambient["linear"]
        if not (isinstance(lin, dict) and set(lin) == {"A"}):
            raise ConfigError("key 'ambient': linear takes exactly {'A'}")
        a = np.asarray(lin["A"], dtype=float)
        if a.shape != (2, 2):
            raise ConfigError("key 'ambient': A must be a 2x2 matrix")
        if abs(a[0, 0] + a[1, 1]) > 1e-12:
            raise ConfigError("key 'ambient': A must be trace-free (divergence-free flow)")

    return RunConfig(
        ic=cfg["ic"], h0=cfg["h0"], N=n, dt=dt, T=T,
        resample_every=resample_every, mollify_eps=mollify_eps, reg_eps=reg_eps,
        mu=mu, ambient=ambient, output_path=cfg["output_path"],
        snapshot_stride=stride, stop_arc_chord_factor=acf,
        stop_energy_ceiling=ceiling,
    )


def _build_curve(ic, n):
    eta = np.arange(n) / n
    # clockwise base parametrization: (sin, cos)
    if "circle" in ic:
        r = float(ic["circle"]["R"])
        samples = r * np.stack([np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1)
        return geometry.PeriodicCurve(samples, 2 * np.pi * r)
    if "ellipse" in ic:
        a, b = float(ic["ellipse"]["a"]), float(ic["ellipse"]["b"])
        samples = np.stack([a * np.sin(2 * np.pi * eta), b * np.cos(2 * np.pi * eta)], axis=1)
    else:
        body = ic["fourier"]
        r0 = float(body["R"])
        rho = np.full(n, 1.0)
        for k, amp, phase in _check_modes("ic", body["modes"]):
            rho += amp * np.cos(2 * np.pi * k * eta + phase)
        if np.any(rho <= 0):
            raise ConfigError("key 'ic': fourier radius perturbation reaches zero")
        rho *= r0
        samples = rho[:, None] * np.stack(
            [np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1)
    dg = geometry.derivative(samples, 1)
    length = float(np.hypot(dg[:, 0], dg[:, 1]).mean())
    return geometry.PeriodicCurve(samples, length)


def _sample_h0(h0, n):
    eta = np.arange(n) / n
    if "constant" in h0:
        return np.full(n, float(h0["constant"]["c"]))
    body = h0["fourier"]
    vals = np.full(n, float(body["mean"]))
    for k, amp, phase in _check_modes("h0", body["modes"]):
        vals += amp * np.cos(2 * np.pi * k * eta + phase)
    return vals


def build_initial_state(cfg):
    """Construct the initial state: clockwise curve, resampled to arc length,
    with the thickness profile sampled on the same grid."""
    curve = _build_curve(cfg.ic, cfg.N)
    try:
        ac = geometry.arc_chord(curve)
    except SelfIntersectionError as exc:
        raise ConfigError(f"key 'ic': initial curve self-intersects ({exc})") from exc
    if not np.isfinite(ac) or ac > 1e6:
        raise ConfigError(
            f"key 'ic': initial curve is too close to self-intersection "
            f"(arc-chord sup {ac:.3e})"
        )
    curve = geometry.resample_arclength(curve)
    h = _sample_h0(cfg.h0, cfg.N)
    if np.any(h <= 0):
        raise ConfigError("key 'h0': initial thickness must be strictly positive everywhere")
    return SimState(curve=curve, h=h, t=0.0)
