"""Blow-up monitors and conserved-quantity trackers."""

from dataclasses import dataclass, asdict

import numpy as np

from . import geometry
from .errors import SelfIntersectionError


@dataclass(frozen=True)
class Diagnostics:
    t: float
    energy: float
    arc_chord_sup: float
    length: float
    area: float
    layer_mass: float
    iso_ratio: float
    h_min: float
    dt_used: float

    def as_dict(self):
        return asdict(self)

    FIELDS = ("t", "energy", "arc_chord_sup", "length", "area",
              "layer_mass", "iso_ratio", "h_min", "dt_used")


def energy(curve):
    """Monitor controlling local existence: arc-chord sup squared plus the
    mean-square of the curve and of its third spectral derivative.

    No decay along the flow is asserted anywhere; this is logged, not
    minimized. Self-intersecting node data reports infinite energy.
    """
    try:
        ac = geometry.arc_chord(curve)
    except SelfIntersectionError:
        return float("inf")
    g = curve.samples
    d3 = geometry.derivative(g, 3)
    return float(ac**2 + np.mean(np.sum(g * g, axis=1)) + np.mean(np.sum(d3 * d3, axis=1)))


def enclosed_area(curve):
    """Area enclosed by the curve: Green's theorem with the spectral
    derivative (spectrally accurate); absolute value, orientation-agnostic."""
    g = curve.samples
    dg = geometry.derivative(g, 1)
    return float(abs(0.5 * np.mean(g[:, 0] * dg[:, 1] - g[:, 1] * dg[:, 0])))


def layer_mass(curve, h):
    """L * mean(h): discrete proxy for the conserved thin-layer area."""
    return float(curve.length * np.mean(np.asarray(h, dtype=np.float64)))


def iso_ratio(curve):
    """L^2 / (4 pi A) >= 1, equality exactly for circles."""
    return float(curve.length**2 / (4.0 * np.pi * enclosed_area(curve)))


def min_node_spacing(curve):
    g = curve.samples
    d = np.roll(g, -1, axis=0) - g
    return float(np.hypot(d[:, 0], d[:, 1]).min())


def compute(state, dt_used=0.0):
    """Full diagnostics record for a simulation state."""
    curve = state.curve
    a = enclosed_area(curve)
    return Diagnostics(
        t=float(state.t),
        energy=energy(curve),
        arc_chord_sup=geometry.arc_chord(curve),
        length=float(curve.length),
        area=a,
        layer_mass=layer_mass(curve, state.h),
        iso_ratio=float(curve.length**2 / (4.0 * np.pi * a)),
        h_min=float(np.min(state.h)),
        dt_used=float(dt_used),
    )
