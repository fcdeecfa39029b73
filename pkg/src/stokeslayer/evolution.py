"""Time integration of the fixed-domain curve/length/thickness system.

State is the curve on the unit periodic grid, its length L, and the layer
thickness h. One right-hand-side evaluation assembles:

* the boundary-integral velocity u on the curve,
* the tangential gauge field psi (cumulative integral of L * kappa * u.n,
  anchored to zero at node 0) that preserves arc-length parametrization,
* dL/dt = -L * mean(kappa * u.n),
* the curve velocity (u.n) n + (psi + dL/dt * eta) tau, whose tangential
  coefficient is periodic because the linear ramps cancel,
* the thickness transport right-hand side in the same fixed-domain
  variables.

With mollify_eps > 0 the right-hand side is assembled in the self-adjoint
smoothed pattern: the log-kernel density is smoothed, normal/tangent vectors
are smoothed inside products, and each velocity term is smoothed once more
on the outside. The smoothing operator is a symmetric Fourier multiplier,
so <a, J b> = <J a, b> holds exactly on the grid.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import diagnostics, geometry, stokes_field, thickness
from .errors import (
    ArcChordStop,
    EnergyCeilingStop,
    InvalidArgumentError,
    NonFiniteStop,
    PositivityStop,
)
from .singular_ops import mollify


@dataclass(frozen=True)
class SimState:
    """Complete dynamical state: curve, thickness field, time."""

    curve: geometry.PeriodicCurve
    h: np.ndarray
    t: float = 0.0
    steps: int = 0

    def __post_init__(self):
        h = np.ascontiguousarray(self.h, dtype=np.float64)
        if h.shape != (self.curve.n,):
            raise InvalidArgumentError("thickness must be sampled on the curve grid")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)


@dataclass(frozen=True)
class StepConfig:
    """Explicit time stepping knobs.

    Stability is empirical: capillary Stokes relaxation has first-order
    (in mode number) stiffness, dt_max ~ 5.6 * mu * L / (pi * N) for rk4 on
    O(1) curves (about 4e-2 at N=256, L=2 pi, mu=1). The default dt=1e-3
    sits far inside that bound.
    """

    dt: float = 1e-3
    integrator: str = "rk4"
    mollify_eps: float = 0.0
    resample_every: int = 10

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidArgumentError("dt must be positive")
        if self.integrator not in ("euler", "rk4"):
            raise InvalidArgumentError(f"unknown integrator {self.integrator!r}")
        if self.mollify_eps < 0:
            raise InvalidArgumentError("mollify_eps must be nonnegative")
        if self.resample_every < 1:
            raise InvalidArgumentError("resample_every must be a positive integer")


@dataclass(frozen=True)
class FlowOnCurve:
    """Everything one right-hand-side evaluation produces."""

    u: np.ndarray            # velocity field on the curve (ambient included)
    un: np.ndarray           # u . outward normal
    u_tau: np.ndarray        # u . tangent
    psi: np.ndarray          # tangential gauge, psi(0) = 0 (includes the ramp)
    tangential: np.ndarray   # periodic tangential coefficient psi + dL/dt * eta
    nn_grad: np.ndarray      # n . grad(u) n on the curve
    dLdt: float
    velocity: np.ndarray     # curve velocity (smoothed when mollify_eps > 0)
    velocity_raw: np.ndarray  # same before the outer smoothing pass
    dhdt: np.ndarray


def compute_psi(curve, un):
    """Tangential gauge: cumulative integral from 0 to eta of L*kappa*un.

    The zero-mean part is integrated spectrally, the mean contributes a
    linear ramp; psi(0) = 0. Note psi(1) - psi(0) = -dL/dt.
    """
    un = np.asarray(un, dtype=np.float64)
    integrand = curve.length * geometry.curvature(curve) * un
    p, m = geometry.periodic_antiderivative(integrand)
    return p + m * curve.eta


def dL_dt(curve, un):
    """Length ODE right-hand side: -L * mean(kappa * un)."""
    un = np.asarray(un, dtype=np.float64)
    return float(-curve.length * np.mean(geometry.curvature(curve) * un))


def evaluate_flow(state, params, mollify_eps=0.0):
    """Assemble the full right-hand side at a state."""
    curve = state.curve
    L = curve.length
    tau = geometry.tangent(curve)
    nrm = np.stack([-tau[:, 1], tau[:, 0]], axis=1)
    kap = geometry.curvature(curve)

    if mollify_eps > 0.0:
        u = stokes_field.velocity_on_curve(
            curve, params, kappa_log=mollify(kap, mollify_eps)
        )
        nrm_s = mollify(nrm, mollify_eps)
        tau_s = mollify(tau, mollify_eps)
    else:
        u = stokes_field.velocity_on_curve(curve, params)
        nrm_s = nrm
        tau_s = tau

    un = u[:, 0] * nrm[:, 0] + u[:, 1] * nrm[:, 1]
    u_tau = u[:, 0] * tau[:, 0] + u[:, 1] * tau[:, 1]
    p, m = geometry.periodic_antiderivative(L * kap * un)
    dLdt = -m
    tangential = p  # psi + dL/dt * eta; the ramps cancel
    psi = p + m * curve.eta
    nn = stokes_field.normal_normal_gradient(curve, u)

    if mollify_eps > 0.0:
        un_s = u[:, 0] * nrm_s[:, 0] + u[:, 1] * nrm_s[:, 1]
        raw = un_s[:, None] * nrm_s + tangential[:, None] * tau_s
        velocity = mollify(raw, mollify_eps)
    else:
        raw = un[:, None] * nrm + tangential[:, None] * tau
        velocity = raw

    flow = FlowOnCurve(
        u=u, un=un, u_tau=u_tau, psi=psi, tangential=tangential, nn_grad=nn,
        dLdt=dLdt, velocity=velocity, velocity_raw=raw,
        dhdt=np.zeros(curve.n),
    )
    dhdt = thickness.advect_h_mol(state, flow)
    return replace_flow_dhdt(flow, dhdt)


def replace_flow_dhdt(flow, dhdt):
    return FlowOnCurve(
        u=flow.u, un=flow.un, u_tau=flow.u_tau, psi=flow.psi,
        tangential=flow.tangential, nn_grad=flow.nn_grad, dLdt=flow.dLdt,
        velocity=flow.velocity, velocity_raw=flow.velocity_raw, dhdt=dhdt,
    )


def rhs(state, params, mollify_eps=0.0):
    """(curve velocity, dL/dt, dh/dt) at a state."""
    flow = evaluate_flow(state, params, mollify_eps)
    return flow.velocity, flow.dLdt, flow.dhdt


def _shifted(state, dt, vel, dLdt, dhdt):
    curve = geometry.PeriodicCurve(
        state.curve.samples + dt * vel, state.curve.length + dt * dLdt
    )
    return SimState(curve=curve, h=state.h + dt * dhdt, t=state.t + dt,
                    steps=state.steps)


def step(state, cfg, params, arc_chord_limit=None, first_flow=None):
    """Advance one explicit step; resample to arc length on cadence.

    Raises PositivityStop / ArcChordStop / NonFiniteStop when the
    corresponding monitor fires after the step.
    """
    dt = cfg.dt
    eps = cfg.mollify_eps
    try:
        f1 = first_flow if first_flow is not None else evaluate_flow(state, params, eps)
        if cfg.integrator == "euler":
            new = _shifted(state, dt, f1.velocity, f1.dLdt, f1.dhdt)
        else:
            s2 = _shifted(state, 0.5 * dt, f1.velocity, f1.dLdt, f1.dhdt)
            f2 = evaluate_flow(s2, params, eps)
            s3 = _shifted(state, 0.5 * dt, f2.velocity, f2.dLdt, f2.dhdt)
            f3 = evaluate_flow(s3, params, eps)
            s4 = _shifted(state, dt, f3.velocity, f3.dLdt, f3.dhdt)
            f4 = evaluate_flow(s4, params, eps)
            vel = (f1.velocity + 2.0 * f2.velocity + 2.0 * f3.velocity + f4.velocity) / 6.0
            dL = (f1.dLdt + 2.0 * f2.dLdt + 2.0 * f3.dLdt + f4.dLdt) / 6.0
            dh = (f1.dhdt + 2.0 * f2.dhdt + 2.0 * f3.dhdt + f4.dhdt) / 6.0
            new = _shifted(state, dt, vel, dL, dh)
    except InvalidArgumentError as exc:
        # stage construction rejects non-finite samples
        raise NonFiniteStop(f"non-finite values during step: {exc}") from exc
    new = SimState(curve=new.curve, h=new.h, t=state.t + dt, steps=state.steps + 1)

    if not (np.all(np.isfinite(new.curve.samples)) and np.isfinite(new.curve.length)
            and np.all(np.isfinite(new.h))):
        raise NonFiniteStop("non-finite values after step")

    if (new.steps % cfg.resample_every == 0
            or geometry.arclength_deviation(new.curve) > geometry.DEFAULT_PARAM_TOL):
        curve2, h2 = geometry.resample_arclength(new.curve, new.h)
        new = SimState(curve=curve2, h=h2, t=new.t, steps=new.steps)

    if np.min(new.h) <= 0.0:
        stop = PositivityStop(
            f"thickness lost positivity: min h = {np.min(new.h):.3e} at t = {new.t:.6g}",
            diagnostics=diagnostics.compute(new, dt_used=dt),
        )
        stop.state = new
        raise stop
    if arc_chord_limit is not None:
        ac = geometry.arc_chord(new.curve)
        if ac >= arc_chord_limit:
            stop = ArcChordStop(
                f"arc-chord sup {ac:.3e} reached the stop threshold at t = {new.t:.6g}",
                diagnostics=diagnostics.compute(new, dt_used=dt),
            )
            stop.state = new
            raise stop
    return new


@dataclass(frozen=True)
class RunResult:
    state: SimState
    reason: str            # 'completed' or a stop-condition reason code
    steps: int
    snapshots: int
    stop_diagnostics: Optional[diagnostics.Diagnostics] = None


def run(state0, cfg, params, T, sink=None, snapshot_stride=1,
        arc_chord_factor=100.0, energy_ceiling=None, history=None):
    """March the state to time T, emitting snapshots and optional history.

    sink, when given, is called as sink(t, curve, L, h, diag) at t=0, every
    snapshot_stride steps, and at the final state. history, when given,
    records the per-step velocity data needed by the characteristic
    thickness solver. Stop conditions terminate the run early with a
    machine-readable reason code in the result.
    """
    if T < 0:
        raise InvalidArgumentError("final time T must be nonnegative")
    n_steps = int(round(T / cfg.dt))
    if abs(n_steps * cfg.dt - T) > 1e-9 * max(1.0, T):
        n_steps = int(np.ceil(T / cfg.dt - 1e-12))
    limit = arc_chord_factor * geometry.arc_chord(state0.curve) if arc_chord_factor else None

    state = state0
    written = 0

    def emit(st, dt_used):
        nonlocal written
        if sink is not None:
            sink(st.t, st.curve, st.curve.length, st.h, diagnostics.compute(st, dt_used))
            written += 1

    emit(state, 0.0)
    reason = "completed"
    stop_diag = None
    for i in range(n_steps):
        flow = evaluate_flow(state, params, cfg.mollify_eps)
        if history is not None:
            history.record(state, flow)
        try:
            state = step(state, cfg, params, arc_chord_limit=limit, first_flow=flow)
        except (PositivityStop, ArcChordStop, NonFiniteStop) as stop:
            reason = stop.reason
            stop_diag = stop.diagnostics
            stop_state = getattr(stop, "state", None)
            if stop_state is not None:
                state = stop_state
                emit(state, cfg.dt)
            break
        if energy_ceiling is not None:
            en = diagnostics.energy(state.curve)
            if en >= energy_ceiling:
                reason = EnergyCeilingStop.reason
                emit(state, cfg.dt)
                stop_diag = diagnostics.compute(state, dt_used=cfg.dt)
                break
        if (i + 1) % snapshot_stride == 0 and i + 1 < n_steps:
            emit(state, cfg.dt)
    else:
        if history is not None:
            history.record(state, evaluate_flow(state, params, cfg.mollify_eps))
        if n_steps > 0:
            emit(state, cfg.dt)
    return RunResult(state=state, reason=reason, steps=state.steps,
                     snapshots=written, stop_diagnostics=stop_diag)
