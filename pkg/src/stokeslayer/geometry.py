"""Closed planar curves on a uniform periodic grid, with spectral calculus.

A curve is N samples of a map from the unit circle into the plane, traversed
clockwise, together with its length L. Fields live on the same grid: scalar
fields are (N,) arrays, vector fields (N, 2) arrays. All derivatives are
discrete-Fourier-transform derivatives, so every identity below is exact on
band-limited data.

Sign conventions, fixed once and used everywhere:

* the tangent is the normalized parametric derivative,
* the outward normal is the quarter-turn rotation (x, y) -> (-y, x) of the
  tangent (outward because the traversal is clockwise),
* hence the signed curvature of a circle of radius R is -1/R.
"""

from dataclasses import dataclass

import numpy as np

from . import accel
from .errors import DegenerateCurveError, InvalidArgumentError, SelfIntersectionError

#: relative tolerance on | |dGamma/d eta| / L - 1 | before resampling is advised
DEFAULT_PARAM_TOL = 1e-3

_MIN_SPEED_FACTOR = 1e-8


@dataclass(frozen=True)
class PeriodicCurve:
    """N uniform samples of a closed curve plus its length.

    samples[j] is the position at parameter eta_j = j/N; the curve is
    1-periodic in eta and no endpoint is duplicated. N must be even and
    at least 16 so spectral differentiation is well defined.
    """

    samples: np.ndarray
    length: float

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise InvalidArgumentError("curve samples must have shape (N, 2)")
        n = samples.shape[0]
        if n < 16 or n % 2 != 0:
            raise InvalidArgumentError(f"need N >= 16 and N even, got N={n}")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgumentError("curve samples must be finite")
        if not (self.length > 0.0 and np.isfinite(self.length)):
            raise InvalidArgumentError(f"curve length must be positive, got {self.length}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "length", float(self.length))

    @property
    def n(self):
        return self.samples.shape[0]

    @property
    def eta(self):
        return np.arange(self.n) / self.n


def derivative(values, order=1):
    """Spectral derivative of a periodic scalar or vector field.

    The Fourier multiplier is (2*pi*i*n)^order with the Nyquist mode zeroed
    for odd orders (keeps the result real and antisymmetric). Exact for
    band-limited fields.
    """
    if not (isinstance(order, (int, np.integer)) and 1 <= order <= 4):
        raise InvalidArgumentError(f"derivative order must be an integer in 1..4, got {order}")
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n % 2 != 0:
        raise InvalidArgumentError("spectral derivative needs an even number of samples")
    k = np.fft.fftfreq(n) * n
    mult = (2j * np.pi * k) ** order
    if order % 2 == 1:
        mult[n // 2] = 0.0
    shape = (n,) + (1,) * (values.ndim - 1)
    out = np.fft.ifft(np.fft.fft(values, axis=0) * mult.reshape(shape), axis=0)
    return np.real(out)


def fourier_coefficients(values):
    """fft(values)/N, the coefficients used by trigonometric interpolation."""
    values = np.asarray(values, dtype=np.float64)
    return np.fft.fft(values, axis=0) / values.shape[0]


def trig_interp(values, x):
    """Evaluate the trigonometric interpolant of a real periodic field at x."""
    values = np.asarray(values, dtype=np.float64)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if values.ndim == 1:
        return accel.trig_eval(fourier_coefficients(values), x)
    cols = [accel.trig_eval(fourier_coefficients(values[:, j]), x) for j in range(values.shape[1])]
    return np.stack(cols, axis=1)


def periodic_antiderivative(values):
    """Split the antiderivative of a periodic field into (periodic part, mean).

    Returns (p, m) with integral_0^eta values = p(eta) + m*eta and p(0) = 0.
    """
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    m = values.mean()
    vh = np.fft.fft(values - m)
    k = np.fft.fftfreq(n) * n
    with np.errstate(divide="ignore", invalid="ignore"):
        ah = vh / (2j * np.pi * k)
    ah[0] = 0.0
    p = np.real(np.fft.ifft(ah))
    return p - p[0], float(m)


def _speed(curve):
    dg = derivative(curve.samples, 1)
    sp = np.hypot(dg[:, 0], dg[:, 1])
    if sp.min() < _MIN_SPEED_FACTOR * curve.length:
        raise DegenerateCurveError(
            f"parametrization speed {sp.min():.3e} below {_MIN_SPEED_FACTOR:g} * L"
        )
    return dg, sp


def arclength_deviation(curve):
    """max_j | |dGamma/d eta|(eta_j) / L - 1 |; > DEFAULT_PARAM_TOL flags resampling."""
    _, sp = _speed(curve)
    return float(np.abs(sp / curve.length - 1.0).max())


def tangent(curve):
    """Unit tangent field (parametric derivative over L, re-normalized)."""
    dg, sp = _speed(curve)
    return dg / sp[:, None]


def normal(curve):
    """Outward unit normal: the rotation (x, y) -> (-y, x) of the tangent."""
    tau = tangent(curve)
    return np.stack([-tau[:, 1], tau[:, 0]], axis=1)


def curvature(curve):
    """Signed curvature; -1/R on a clockwise circle of radius R.

    Computed as cross(dGamma, d2Gamma)/|dGamma|^3, which reduces to
    d2Gamma . n / L^2 when the parametrization is arc length.
    """
    dg, sp = _speed(curve)
    d2g = derivative(curve.samples, 2)
    return (dg[:, 0] * d2g[:, 1] - dg[:, 1] * d2g[:, 0]) / sp**3


def arc_chord(curve):
    """Sup over node pairs of (arc separation)^2 / (chord distance)^2.

    Arc separation is the signed distance along the curve mapped to
    [-L/2, L/2]; the diagonal uses the parametric limit 1/(speed/L)^2.
    Blows up as the curve approaches self-intersection.
    """
    _, sp = _speed(curve)
    diag = (curve.length / sp) ** 2
    sup, ok = accel.arc_chord_pairs(curve.samples, curve.length, diag)
    if not ok:
        raise SelfIntersectionError("distinct nodes coincide; arc-chord functional is infinite")
    return float(sup)


def resample_arclength(curve, h=None):
    """Re-interpolate the curve (and optionally a companion scalar field) to
    nodes uniform in arc length.

    The new length is the trapezoid arc length of the input. Idempotent on
    already-uniform curves. Node 0 is kept fixed, preserving the gauge.
    """
    dg = derivative(curve.samples, 1)
    sp = np.hypot(dg[:, 0], dg[:, 1])
    if sp.min() < _MIN_SPEED_FACTOR * curve.length:
        raise DegenerateCurveError("cumulative arc length is not strictly increasing")
    L = float(sp.mean())
    p, _ = periodic_antiderivative(sp)
    dp = derivative(p, 1)
    pc = fourier_coefficients(p)
    dpc = fourier_coefficients(dp)
    n = curve.n
    targets = np.arange(n) / n * L
    eta = targets / L
    for _ in range(30):
        resid = L * eta + accel.trig_eval(pc, eta) - targets
        eta = eta - resid / (L + accel.trig_eval(dpc, eta))
        if np.abs(resid).max() < 1e-14 * L:
            break
    new_samples = trig_interp(curve.samples, eta)
    new_curve = PeriodicCurve(new_samples, L)
    if h is None:
        return new_curve
    return new_curve, trig_interp(h, eta)


def inner_boundary(curve, h, eps):
    """Offset curve: samples - eps*h*normal, with its own computed length.

    Requires eps * max(h) * max|curvature| < 1/2 (no swallowtail).
    """
    if eps < 0:
        raise InvalidArgumentError("offset eps must be nonnegative")
    h = np.asarray(h, dtype=np.float64)
    kap = curvature(curve)
    if eps * np.abs(h).max() * np.abs(kap).max() >= 0.5:
        raise InvalidArgumentError(
            "offset too large: eps * max(h) * max|curvature| must stay below 1/2"
        )
    nrm = normal(curve)
    samples = curve.samples - eps * h[:, None] * nrm
    dg = derivative(samples, 1)
    L = float(np.hypot(dg[:, 0], dg[:, 1]).mean())
    return PeriodicCurve(samples, L)


def offset_frame(curve, h, eps):
    """Exact tangent/normal/curvature of the offset curve, referenced to the
    base curve's arc-length parameter.

    The offset curve keeps the base parametrization, so its frame carries
    the reversed orientation: tangent = normalized parametric derivative,
    outer normal = -(quarter turn) of it, and the curvature is defined by
    the frame equations in the base parameter (d tau/d xi = -kappa n). For
    a unit circle offset by a constant h this curvature is exactly
    kappa - eps * h'' = -1, independent of eps. First-order counterparts in
    :func:`lemma1_expansions`.
    """
    inner = inner_boundary(curve, h, eps)
    dg = derivative(inner.samples, 1)
    d2g = derivative(inner.samples, 2)
    speed2 = dg[:, 0] ** 2 + dg[:, 1] ** 2
    tau_eps = dg / np.sqrt(speed2)[:, None]
    nrm_eps = np.stack([tau_eps[:, 1], -tau_eps[:, 0]], axis=1)
    kap_eps = (dg[:, 0] * d2g[:, 1] - dg[:, 1] * d2g[:, 0]) / (curve.length * speed2)
    return tau_eps, nrm_eps, kap_eps


def lemma1_expansions(curve, h, eps):
    """First-order tangent/normal/curvature of the offset curve.

    Returns (tau - eps*h'*n, -n - eps*h'*tau, kappa - eps*h'') with the
    h-derivatives taken in arc length. Accurate to O(eps^2) against the
    exact frame of :func:`offset_frame`.
    """
    if eps < 0:
        raise InvalidArgumentError("offset eps must be nonnegative")
    h = np.asarray(h, dtype=np.float64)
    tau = tangent(curve)
    nrm = np.stack([-tau[:, 1], tau[:, 0]], axis=1)
    kap = curvature(curve)
    hp = derivative(h, 1) / curve.length
    hpp = derivative(h, 2) / curve.length**2
    tau_eps = tau - eps * hp[:, None] * nrm
    nrm_eps = -nrm - eps * hp[:, None] * tau
    kap_eps = kap - eps * hpp
    return tau_eps, nrm_eps, kap_eps
