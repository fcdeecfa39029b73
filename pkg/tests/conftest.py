import numpy as np
import pytest

from stokeslayer import geometry


def circle(n=256, radius=1.0, center=(0.0, 0.0)):
    eta = np.arange(n) / n
    samples = np.stack(
        [center[0] + radius * np.sin(2 * np.pi * eta),
         center[1] + radius * np.cos(2 * np.pi * eta)], axis=1)
    return geometry.PeriodicCurve(samples, 2 * np.pi * radius)


def ellipse(n=256, a=2.0, b=1.0):
    eta = np.arange(n) / n
    samples = np.stack([a * np.sin(2 * np.pi * eta), b * np.cos(2 * np.pi * eta)], axis=1)
    dg = geometry.derivative(samples, 1)
    raw = geometry.PeriodicCurve(samples, float(np.hypot(dg[:, 0], dg[:, 1]).mean()))
    return geometry.resample_arclength(raw)


def fourier_curve(n=256, base=1.0, modes=((2, 0.08, 0.3), (3, 0.05, 1.1), (4, 0.03, 2.0))):
    eta = np.arange(n) / n
    rho = np.full(n, 1.0)
    for k, amp, phase in modes:
        rho += amp * np.cos(2 * np.pi * k * eta + phase)
    samples = base * rho[:, None] * np.stack(
        [np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1)
    dg = geometry.derivative(samples, 1)
    raw = geometry.PeriodicCurve(samples, float(np.hypot(dg[:, 0], dg[:, 1]).mean()))
    return geometry.resample_arclength(raw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
