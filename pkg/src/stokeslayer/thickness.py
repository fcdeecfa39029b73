"""Thin-layer thickness transport and its independent characteristic solver.

Two routes to the same h:

* method of lines (``advect_h_mol``), the term used inside the coupled time
  stepper: dh/dt = -(u.tau - tangential) * dh/d eta / L + (n.grad(u) n) h in
  fixed-domain variables;
* the characteristic formula (``solve_h_characteristics``): labels gamma in
  [0, L0] are carried by d alpha/dt = (u.tau - psi)(alpha, t) in arc-length
  coordinates, and h(alpha(t, gamma), t) = h0(gamma) * exp(-integral of
  n.grad(u)n along the path). The label map stays strictly monotone, and
  alpha(t, L0) - alpha(t, 0) must reproduce L(t) exactly (checked by
  ``verify_label_period``).

The cross-method agreement is the module's core acceptance check; the
exponential representation also certifies positivity structurally.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import accel, geometry
from .errors import CharacteristicCrossingError, InvalidArgumentError


def advect_h_mol(state, flow):
    """Method-of-lines thickness rate in fixed-domain variables."""
    h = np.asarray(state.h, dtype=np.float64)
    dh = geometry.derivative(h, 1)
    adv = (flow.u_tau - flow.tangential) / state.curve.length
    return -adv * dh + flow.nn_grad * h


@dataclass(frozen=True)
class CharacteristicTrace:
    """One label's path alpha(t, gamma) and its accumulated source exponent."""

    gamma0: float
    times: np.ndarray
    path: np.ndarray
    exponent: float


class RunHistory:
    """Per-step velocity/geometry records consumed by the characteristic solver.

    Records, at every accepted step time: L, the periodic advection field
    u.tau - tangential (as trigonometric coefficients), the mean
    m = -dL/dt entering the gauge ramp, and n.grad(u)n. Feed instances to
    ``stokeslayer.evolution.run(history=...)``.
    """

    def __init__(self):
        self.times = []
        self.lengths = []
        self.means = []
        self._adv_coeffs = []
        self._nn_coeffs = []
        self.h0 = None
        self.L0 = None

    def record(self, state, flow):
        if self.h0 is None:
            self.h0 = np.array(state.h, dtype=np.float64)
            self.L0 = float(state.curve.length)
        self.times.append(float(state.t))
        self.lengths.append(float(state.curve.length))
        self.means.append(float(-flow.dLdt))
        self._adv_coeffs.append(geometry.fourier_coefficients(flow.u_tau - flow.tangential))
        self._nn_coeffs.append(geometry.fourier_coefficients(flow.nn_grad))

    # -- array views -------------------------------------------------------
    def _stacked(self):
        if not self.times:
            raise InvalidArgumentError("empty history")
        t = np.asarray(self.times)
        if t.shape[0] > 1:
            dts = np.diff(t)
            if not np.allclose(dts, dts[0], rtol=1e-9, atol=1e-12):
                raise InvalidArgumentError("history must be recorded at a uniform stride")
        return (t, np.asarray(self.lengths), np.asarray(self.means),
                np.asarray(self._adv_coeffs), np.asarray(self._nn_coeffs))

    def length_at(self, t):
        times, lengths, _, _, _ = self._stacked()
        return float(_interp_time(lengths, times, t))


def _interp_time(values, times, tq):
    """Cubic Lagrange interpolation on the uniform time grid (clamped window)."""
    n = times.shape[0]
    if n == 1:
        return values[0]
    dt = times[1] - times[0]
    s = (tq - times[0]) / dt
    i = int(np.floor(s))
    i = min(max(i - 1, 0), n - 4) if n >= 4 else 0
    if n < 4:
        # linear fallback for very short histories
        j = min(max(int(np.floor(s)), 0), n - 2)
        w = s - j
        return (1 - w) * values[j] + w * values[j + 1]
    xs = np.arange(i, i + 4)
    w = np.ones(4)
    for a in range(4):
        for b in range(4):
            if a != b:
                w[a] *= (s - xs[b]) / (xs[a] - xs[b])
    return np.tensordot(w, values[i:i + 4], axes=(0, 0))


def _advection(alpha, adv_c, L, m):
    """d alpha/dt at arc positions alpha (unwrapped): periodic part minus ramp."""
    frac = np.mod(alpha / L, 1.0)
    return accel.trig_eval(adv_c, frac) - m * (alpha / L)


def _source(alpha, nn_c, L):
    frac = np.mod(alpha / L, 1.0)
    return accel.trig_eval(nn_c, frac)


def _integrate_labels(history, gammas, t_final, keep_paths=False):
    """RK4 on the label ODEs with cubic-in-time field interpolation.

    Returns (alpha at t_final, exponent integrals, optional paths)."""
    times, lengths, means, adv_cs, nn_cs = history._stacked()
    if t_final < times[0] - 1e-12 or t_final > times[-1] + 1e-9:
        raise InvalidArgumentError(
            f"history covers [{times[0]:.6g}, {times[-1]:.6g}], asked for t={t_final:.6g}"
        )
    n_hist = times.shape[0]
    alpha = np.array(gammas, dtype=np.float64)
    expo = np.zeros_like(alpha)
    paths = [alpha.copy()] if keep_paths else None
    if n_hist == 1 or t_final <= times[0]:
        return alpha, expo, paths

    dt = times[1] - times[0]
    n_steps = int(round((t_final - times[0]) / dt))
    if abs(times[0] + n_steps * dt - t_final) > 1e-9:
        raise InvalidArgumentError("t must lie on the recorded time grid")

    def fields_at(tq):
        return (_interp_time(adv_cs, times, tq), _interp_time(nn_cs, times, tq),
                float(_interp_time(lengths, times, tq)), float(_interp_time(means, times, tq)))

    for k in range(n_steps):
        t0 = times[0] + k * dt
        a_c0, n_c0, L0_, m0 = adv_cs[k], nn_cs[k], lengths[k], means[k]
        a_cm, n_cm, Lm, mm = fields_at(t0 + 0.5 * dt)
        a_c1, n_c1, L1_, m1 = adv_cs[k + 1], nn_cs[k + 1], lengths[k + 1], means[k + 1]

        k1a = _advection(alpha, a_c0, L0_, m0)
        k1e = _source(alpha, n_c0, L0_)
        k2a = _advection(alpha + 0.5 * dt * k1a, a_cm, Lm, mm)
        k2e = _source(alpha + 0.5 * dt * k1a, n_cm, Lm)
        k3a = _advection(alpha + 0.5 * dt * k2a, a_cm, Lm, mm)
        k3e = _source(alpha + 0.5 * dt * k2a, n_cm, Lm)
        k4a = _advection(alpha + dt * k3a, a_c1, L1_, m1)
        k4e = _source(alpha + dt * k3a, n_c1, L1_)

        alpha = alpha + dt / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
        expo = expo + dt / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e)
        if keep_paths:
            paths.append(alpha.copy())
    return alpha, expo, paths


def trace_labels(history, gammas, t):
    """Integrate selected labels, returning full CharacteristicTrace records."""
    gammas = np.atleast_1d(np.asarray(gammas, dtype=np.float64))
    alpha, expo, paths = _integrate_labels(history, gammas, t, keep_paths=True)
    times, _, _, _, _ = history._stacked()
    n_steps = len(paths)
    tgrid = times[:n_steps]
    out = []
    for j, g in enumerate(gammas):
        path = np.array([p[j] for p in paths])
        out.append(CharacteristicTrace(gamma0=float(g), times=tgrid.copy(),
                                       path=path, exponent=float(expo[j])))
    return out


def solve_h_characteristics(history, h0, t):
    """Thickness at time t on the uniform arc-length grid, by characteristics.

    Integrates the label map forward from uniform labels, accumulates the
    source exponent, and resamples to the uniform grid by Newton inversion of
    the (strictly monotone) label-to-position map.
    """
    h0 = np.asarray(h0, dtype=np.float64)
    n = h0.shape[0]
    L0 = history.L0
    gammas = np.arange(n) / n * L0
    alpha, expo, _ = _integrate_labels(history, gammas, t)
    Lt = history.length_at(t)

    # periodic part of the label map; q(gamma + L0) = q(gamma)
    q = alpha - gammas * (Lt / L0)
    qc = geometry.fourier_coefficients(q)
    dq = geometry.derivative(q, 1)  # derivative in the gamma/L0 grid variable
    dqc = geometry.fourier_coefficients(dq)

    slope_grid = Lt / L0 + dq / L0
    if np.any(slope_grid <= 0):
        raise CharacteristicCrossingError(
            "label-to-position map is not monotone on the grid "
            f"(min slope {slope_grid.min():.3e}); refine dt or N"
        )

    targets = np.arange(n) / n * Lt
    # choose the branch of each target nearest the map's range
    alpha0 = alpha[0]
    targets = targets + Lt * np.ceil((alpha0 - targets) / Lt - 1e-13)
    gam = (targets - alpha0) * (L0 / Lt)
    for _ in range(60):
        val = gam * (Lt / L0) + accel.trig_eval(qc, np.mod(gam / L0, 1.0)) - targets
        der = Lt / L0 + accel.trig_eval(dqc, np.mod(gam / L0, 1.0)) / L0
        if np.any(der <= 0):
            raise CharacteristicCrossingError("lost monotonicity during inversion")
        gam = gam - val / der
        if np.abs(val).max() < 1e-13 * max(1.0, Lt):
            break

    gfrac = np.mod(gam / L0, 1.0)
    h0c = geometry.fourier_coefficients(h0)
    exc = geometry.fourier_coefficients(expo)
    return accel.trig_eval(h0c, gfrac) * np.exp(-accel.trig_eval(exc, gfrac))


def verify_label_period(history, t):
    """| alpha(t, L0) - alpha(t, 0) - L(t) |, the discrete label-period defect."""
    L0 = history.L0
    alpha, _, _ = _integrate_labels(history, np.array([0.0, L0]), t)
    return float(abs(alpha[1] - alpha[0] - history.length_at(t)))


@dataclass(frozen=True)
class PositivityReport:
    min_h: float
    argmin_eta: float
    positive: bool


def positivity_certificate(h):
    """Minimum thickness, its grid location, and the strict-positivity verdict."""
    h = np.asarray(h, dtype=np.float64)
    j = int(np.argmin(h))
    return PositivityReport(min_h=float(h[j]), argmin_eta=j / h.shape[0],
                            positive=bool(h[j] > 0.0))
