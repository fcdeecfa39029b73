"""Boundary-integral velocity and pressure driven by curvature forcing.

The on-curve velocity is assembled as F + G + ambient:

* F, the logarithmic (Stokeslet) part, evaluated through the singular/smooth
  splitting of :func:`stokeslayer.singular_ops.log_layer`,
* G, the dipole-type part, whose integrand extends continuously by zero on
  the diagonal, evaluated by the trapezoid rule,
* an optional user-supplied divergence-free ambient field standing in for
  any container-driven background flow.

On a circle F and G cancel exactly (uniform curvature forcing is
equilibrated by pressure alone), which the tests use as a sharp oracle.

Pressure sign: the jump across the curve equals twice the signed curvature
(p_inner - p_outer = 2*kappa = -2/R on a clockwise circle). The dipole
kernel is oriented here to realize that jump.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import accel, geometry
from .errors import InvalidArgumentError, NearSingularEvaluationError, SelfIntersectionError
from .singular_ops import log_singular_table, _log2sin_table

#: off-curve evaluation must keep this many grid spacings away from the curve
NEAR_CURVE_FACTOR = 10.0


def linear_ambient(matrix):
    """Ambient field x -> A x for a trace-free 2x2 matrix A (divergence-free)."""
    a = np.asarray(matrix, dtype=np.float64)
    if a.shape != (2, 2):
        raise InvalidArgumentError("ambient matrix must be 2x2")
    if abs(a[0, 0] + a[1, 1]) > 1e-12:
        raise InvalidArgumentError("ambient matrix must be trace-free (divergence-free flow)")

    def apply(points):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return pts @ a.T

    apply.matrix = a
    return apply


@dataclass(frozen=True)
class FlowParams:
    """Outer viscosity, optional ambient field, and kernel regularization.

    ambient is None (quiescent far field) or a callable mapping (M, 2)
    points to (M, 2) velocities; it must be divergence-free and smooth near
    the curve. reg_eps > 0 switches the on-curve kernels to their
    regularized forms (log(|dGamma|^2 + eps^2 L^2) / denominator shift).
    """

    mu: float = 1.0
    ambient: Optional[Callable] = None
    reg_eps: float = 0.0

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidArgumentError(f"viscosity mu must be positive, got {self.mu}")
        if self.reg_eps < 0:
            raise InvalidArgumentError("reg_eps must be nonnegative")

    def ambient_at(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.ambient is None:
            return np.zeros_like(pts)
        out = np.asarray(self.ambient(pts), dtype=np.float64)
        if out.shape != pts.shape:
            raise InvalidArgumentError("ambient field must return one 2-vector per point")
        return out


def velocity_on_curve(curve, params, kappa_log=None, kappa_dipole=None):
    """Velocity of the curvature-driven flow restricted to the curve nodes.

    The optional kappa_log / kappa_dipole override the curvature density in
    the logarithmic and dipole kernels separately (used by the mollified
    evolution scheme); both default to the curve's curvature.
    """
    kap = geometry.curvature(curve)
    nrm = geometry.normal(curve)
    klog = kap if kappa_log is None else np.asarray(kappa_log, dtype=np.float64)
    kdip = kap if kappa_dipole is None else np.asarray(kappa_dipole, dtype=np.float64)
    fdens = klog[:, None] * nrm
    L, mu = curve.length, params.mu
    if params.reg_eps > 0.0:
        sf, sg = accel.self_velocity_reg(
            curve.samples, nrm, kdip, fdens, L, params.reg_eps
        )
        u = (L / (2.0 * np.pi * mu)) * (sg - sf)
    else:
        sf_smooth, sg, ok = accel.self_velocity_smooth(
            curve.samples, nrm, kdip, fdens, L, _log2sin_table(curve.n)
        )
        if not ok:
            raise SelfIntersectionError("coincident curve nodes in velocity evaluation")
        sf = log_singular_table(curve.n).apply(fdens) + sf_smooth
        u = (L / (2.0 * np.pi * mu)) * (sg - sf)
    return u + params.ambient_at(curve.samples)


def _check_far_enough(curve, pts):
    d = pts[:, None, :] - curve.samples[None, :, :]
    dist = np.sqrt(d[..., 0] ** 2 + d[..., 1] ** 2).min(axis=1)
    limit = NEAR_CURVE_FACTOR * curve.length / curve.n
    if np.any(dist <= limit):
        raise NearSingularEvaluationError(
            f"evaluation point within {limit:.3g} of the curve; "
            "use the on-curve evaluation instead"
        )


def velocity_at_points(curve, points, params):
    """Off-curve velocity by plain trapezoid quadrature (points must stay
    farther than NEAR_CURVE_FACTOR grid spacings from the curve)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    _check_far_enough(curve, pts)
    kap = geometry.curvature(curve)
    nrm = geometry.normal(curve)
    sf, sg = accel.field_velocity(curve.samples, nrm, kap, pts)
    u = (curve.length / (2.0 * np.pi * params.mu)) * (sg - sf)
    return u + params.ambient_at(pts)


def velocity_at_point(curve, x, params):
    return velocity_at_points(curve, np.asarray(x, dtype=np.float64).reshape(1, 2), params)[0]


def pressure_at_points(curve, points, params):
    """Off-curve pressure; oriented so that p_inner - p_outer = 2*kappa."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    _check_far_enough(curve, pts)
    kap = geometry.curvature(curve)
    nrm = geometry.normal(curve)
    raw = accel.field_pressure(curve.samples, nrm, kap, pts)
    return -(curve.length / np.pi) * raw


def pressure_at_point(curve, x, params):
    return float(pressure_at_points(curve, np.asarray(x, dtype=np.float64).reshape(1, 2), params)[0])


def normal_normal_gradient(curve, u_on_curve):
    """n . grad(u) n on the curve from tangential data alone.

    grad(u) is continuous across the curve and trace-free, so
    n.grad(u)n = -tau.grad(u)tau = -tau . d(u o Gamma)/d(arc length).
    """
    u = np.asarray(u_on_curve, dtype=np.float64)
    if u.shape != (curve.n, 2):
        raise InvalidArgumentError("u_on_curve must be sampled on the curve grid")
    tau = geometry.tangent(curve)
    du = geometry.derivative(u, 1) / curve.length
    return -(tau[:, 0] * du[:, 0] + tau[:, 1] * du[:, 1])


@dataclass(frozen=True)
class InnerGradientReport:
    """Velocity gradients just outside (B1) and inside (B2) the thin layer.

    Diagnostic only: the limit dynamics never uses the layer viscosity mu2.
    Both matrices are trace-free and B2 - B1 is rank one along tau (x) n.
    """

    B1: np.ndarray
    B2: np.ndarray
    mu2: float


def inner_gradient_B2(B1, tau, n, mu, mu2):
    """Layer-side velocity gradient from the outer gradient B1.

    B2 = B1 + (mu/mu2 - 1) * (tau . (B1 + B1^T) n) * (tau (x) n).
    """
    B1 = np.asarray(B1, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    if mu2 <= 0 or mu <= 0:
        raise InvalidArgumentError("viscosities must be positive")
    if abs(np.trace(B1)) > 1e-12:
        raise InvalidArgumentError("B1 must be trace-free")
    if abs(tau @ n) > 1e-12 or abs(tau @ tau - 1) > 1e-10 or abs(n @ n - 1) > 1e-10:
        raise InvalidArgumentError("tau and n must be orthonormal")
    coef = (mu / mu2 - 1.0) * (tau @ (B1 + B1.T) @ n)
    B2 = B1 + coef * np.outer(tau, n)
    return InnerGradientReport(B1=B1, B2=B2, mu2=float(mu2))
