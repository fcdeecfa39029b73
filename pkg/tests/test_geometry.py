import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stokeslayer import geometry
from stokeslayer.errors import (
    DegenerateCurveError,
    InvalidArgumentError,
    SelfIntersectionError,
)

from conftest import circle, ellipse, fourier_curve


def eta_grid(n):
    return np.arange(n) / n


class TestDerivative:
    def test_sine_first_order(self):
        eta = eta_grid(128)
        got = geometry.derivative(np.sin(2 * np.pi * eta), 1)
        assert np.allclose(got, 2 * np.pi * np.cos(2 * np.pi * eta), atol=1e-12)

    def test_constant_any_order(self):
        f = np.full(64, 3.7)
        for order in (1, 2, 3, 4):
            assert np.abs(geometry.derivative(f, order)).max() < 1e-12

    def test_cos_second_order(self):
        eta = eta_grid(128)
        got = geometry.derivative(np.cos(4 * np.pi * eta), 2)
        assert np.allclose(got, -16 * np.pi**2 * np.cos(4 * np.pi * eta), atol=1e-10)

    def test_exact_on_band_limited(self, rng):
        n = 64
        eta = eta_grid(n)
        f = np.zeros(n)
        df = np.zeros(n)
        for k in range(1, n // 2):  # strictly below Nyquist
            a, b = rng.standard_normal(2) / (1 + k) ** 2
            f += a * np.cos(2 * np.pi * k * eta) + b * np.sin(2 * np.pi * k * eta)
            df += 2 * np.pi * k * (-a * np.sin(2 * np.pi * k * eta) + b * np.cos(2 * np.pi * k * eta))
        assert np.abs(geometry.derivative(f, 1) - df).max() < 1e-9

    def test_rejects_bad_order(self):
        f = np.ones(32)
        with pytest.raises(InvalidArgumentError):
            geometry.derivative(f, 5)
        with pytest.raises(InvalidArgumentError):
            geometry.derivative(f, 0)

    def test_rejects_odd_n(self):
        with pytest.raises(InvalidArgumentError):
            geometry.derivative(np.ones(33), 1)


class TestCurveValidation:
    def test_needs_even_n_at_least_16(self):
        with pytest.raises(InvalidArgumentError):
            geometry.PeriodicCurve(np.zeros((14, 2)), 1.0)
        with pytest.raises(InvalidArgumentError):
            geometry.PeriodicCurve(np.ones((17, 2)), 1.0)

    def test_needs_positive_length(self):
        c = circle(32)
        with pytest.raises(InvalidArgumentError):
            geometry.PeriodicCurve(c.samples, 0.0)

    def test_samples_frozen(self):
        c = circle(32)
        with pytest.raises(ValueError):
            c.samples[0, 0] = 99.0


class TestFrameAndCurvature:
    def test_tangent_circle(self):
        c = circle(256)
        tau = geometry.tangent(c)
        assert np.allclose(tau[0], [1.0, 0.0], atol=1e-12)
        assert np.allclose(tau[64], [0.0, -1.0], atol=1e-12)  # eta = 1/4

    def test_tangent_ellipse_example(self):
        # (a cos, b sin) parametrization: derivative at 0 is (0, 2 pi b)
        n = 64
        eta = eta_grid(n)
        samples = np.stack([2 * np.cos(2 * np.pi * eta), np.sin(2 * np.pi * eta)], axis=1)
        dg = geometry.derivative(samples, 1)
        c = geometry.PeriodicCurve(samples, float(np.hypot(dg[:, 0], dg[:, 1]).mean()))
        assert np.allclose(geometry.tangent(c)[0], [0.0, 1.0], atol=1e-12)

    def test_normal_circle_outward(self):
        c = circle(256)
        nrm = geometry.normal(c)
        assert np.allclose(nrm[0], [0.0, 1.0], atol=1e-12)
        assert np.allclose(nrm[64], [1.0, 0.0], atol=1e-12)

    def test_frame_orthonormal(self):
        c = fourier_curve(128)
        tau = geometry.tangent(c)
        nrm = geometry.normal(c)
        assert np.abs((tau * nrm).sum(axis=1)).max() < 1e-12
        assert np.abs(np.hypot(tau[:, 0], tau[:, 1]) - 1).max() < 1e-12
        assert np.abs(np.hypot(nrm[:, 0], nrm[:, 1]) - 1).max() < 1e-12

    def test_curvature_circle_sign(self):
        for n in (64, 128, 256):
            c = circle(n, radius=2.5)
            kap = geometry.curvature(c)
            assert np.abs(kap + 1 / 2.5).max() < 1e-10

    def test_curvature_large_radius_flat(self):
        c = circle(64, radius=1e3)
        assert np.abs(geometry.curvature(c)).max() <= 1.001e-3

    def test_curvature_ellipse_closed_form(self):
        # kappa(eta) = -ab / (a^2 cos^2 + b^2 sin^2)^(3/2) for the clockwise
        # (a sin, b cos) parametrization; extrema -b/a^2 and -a/b^2.
        n = 256
        a, b = 2.0, 1.0
        eta = eta_grid(n)
        samples = np.stack([a * np.sin(2 * np.pi * eta), b * np.cos(2 * np.pi * eta)], axis=1)
        dg = geometry.derivative(samples, 1)
        c = geometry.PeriodicCurve(samples, float(np.hypot(dg[:, 0], dg[:, 1]).mean()))
        kap = geometry.curvature(c)
        co, si = np.cos(2 * np.pi * eta), np.sin(2 * np.pi * eta)
        exact = -a * b / (a**2 * co**2 + b**2 * si**2) ** 1.5
        assert np.abs(kap - exact).max() < 1e-9
        assert abs(kap[0] + b / a**2) < 1e-10
        assert abs(kap[n // 4] + a / b**2) < 1e-10

    def test_degenerate_speed_raises(self):
        samples = np.zeros((32, 2))
        samples[:, 0] = 1e-12 * np.sin(2 * np.pi * eta_grid(32))
        samples[:, 1] = 1e-12 * np.cos(2 * np.pi * eta_grid(32))
        c = geometry.PeriodicCurve(samples + 5.0, 1.0)
        with pytest.raises(DegenerateCurveError):
            geometry.tangent(c)


class TestArcChord:
    def test_circle_value(self):
        # chord = 2R sin(xi/2R) makes the sup (pi R)^2/(2R)^2 = pi^2/4,
        # attained at the antipodal pair, hence exact for even N.
        for n in (64, 128, 256):
            assert abs(geometry.arc_chord(circle(n)) - np.pi**2 / 4) < 1e-10

    def test_circle_grid_convergence(self):
        vals = [geometry.arc_chord(circle(n)) for n in (32, 64, 128, 256)]
        target = np.pi**2 / 4
        errs = [abs(v - target) / target for v in vals]
        assert errs[-1] <= 1e-3
        assert all(e2 <= e1 + 1e-14 for e1, e2 in zip(errs, errs[1:]))

    def test_matches_bruteforce_on_peanut(self):
        n = 256
        eta = eta_grid(n)
        for pinch in (0.40, 0.44):
            rho = 1.0 - pinch * np.cos(4 * np.pi * eta)
            samples = rho[:, None] * np.stack(
                [np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1)
            dg = geometry.derivative(samples, 1)
            L = float(np.hypot(dg[:, 0], dg[:, 1]).mean())
            c = geometry.resample_arclength(geometry.PeriodicCurve(samples, L))
            got = geometry.arc_chord(c)
            # independent brute force over all node pairs
            g = c.samples
            best = 0.0
            for i in range(n):
                d = g[i] - g
                dist2 = d[:, 0] ** 2 + d[:, 1] ** 2
                k = np.minimum((i - np.arange(n)) % n, (np.arange(n) - i) % n)
                sep = c.length * k / n
                mask = k != 0
                best = max(best, (sep[mask] ** 2 / dist2[mask]).max())
            best = max(best, 1.0)
            assert got == pytest.approx(best, rel=1e-12)

    def test_grows_as_lobes_approach(self):
        def peanut(pinch):
            n = 256
            eta = eta_grid(n)
            rho = 1.0 - pinch * np.cos(4 * np.pi * eta)
            samples = rho[:, None] * np.stack(
                [np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1)
            dg = geometry.derivative(samples, 1)
            return geometry.PeriodicCurve(samples, float(np.hypot(dg[:, 0], dg[:, 1]).mean()))

        vals = [geometry.arc_chord(peanut(p)) for p in (0.2, 0.35, 0.45)]
        assert vals[0] < vals[1] < vals[2]

    def test_diagonal_uses_parametric_speed(self):
        # clustered parametrization: diagonal term (L/speed)^2 can dominate
        n = 128
        eta = eta_grid(n)
        warp = eta + 0.14 * np.sin(2 * np.pi * eta) / (2 * np.pi)
        samples = np.stack([np.sin(2 * np.pi * warp), np.cos(2 * np.pi * warp)], axis=1)
        c = geometry.PeriodicCurve(samples, 2 * np.pi)
        dg = geometry.derivative(samples, 1)
        speed = np.hypot(dg[:, 0], dg[:, 1])
        assert geometry.arc_chord(c) >= (c.length / speed.min()) ** 2 - 1e-9

    def test_coincident_nodes_raise(self):
        samples = circle(64).samples.copy()
        samples[10] = samples[40]
        c = geometry.PeriodicCurve(samples, 2 * np.pi)
        with pytest.raises(SelfIntersectionError):
            geometry.arc_chord(c)


class TestResample:
    def test_idempotent_on_circle(self):
        c = circle(128)
        c2 = geometry.resample_arclength(c)
        assert np.abs(c2.samples - c.samples).max() < 1e-12
        assert abs(c2.length - c.length) < 1e-12

    def test_clustered_circle_becomes_uniform(self):
        n = 128
        eta = eta_grid(n)
        warp = eta + 0.2 * np.sin(2 * np.pi * eta) / (2 * np.pi)
        samples = np.stack([np.sin(2 * np.pi * warp), np.cos(2 * np.pi * warp)], axis=1)
        c = geometry.PeriodicCurve(samples, 2 * np.pi)
        c2 = geometry.resample_arclength(c)
        gaps = np.hypot(*(np.roll(c2.samples, -1, axis=0) - c2.samples).T)
        # equidistant on the circle: every chord equals 2 R sin(pi/n)
        assert np.abs(gaps - 2 * np.sin(np.pi / n)).max() < 1e-8
        assert gaps.max() - gaps.min() < 1e-10

    def test_constant_h_stays_constant(self):
        n = 128
        eta = eta_grid(n)
        warp = eta + 0.1 * np.sin(2 * np.pi * eta) / (2 * np.pi)
        samples = np.stack([np.sin(2 * np.pi * warp), np.cos(2 * np.pi * warp)], axis=1)
        c = geometry.PeriodicCurve(samples, 2 * np.pi)
        _, h2 = geometry.resample_arclength(c, np.full(n, 0.9))
        assert np.abs(h2 - 0.9).max() < 1e-10

    def test_double_resample_stable(self):
        c = fourier_curve(128)
        c2 = geometry.resample_arclength(c)
        c3 = geometry.resample_arclength(c2)
        assert np.abs(c3.samples - c2.samples).max() < 1e-10


class TestInnerBoundary:
    def test_circle_offsets_inward(self):
        c = circle(128, radius=1.0)
        inner = geometry.inner_boundary(c, np.ones(128), 0.1)
        radii = np.hypot(inner.samples[:, 0], inner.samples[:, 1])
        assert np.abs(radii - 0.9).max() < 1e-12
        assert abs(inner.length - 2 * np.pi * 0.9) < 1e-10

    def test_zero_offset_identity(self):
        c = fourier_curve(128)
        inner = geometry.inner_boundary(c, np.ones(128), 0.0)
        assert np.abs(inner.samples - c.samples).max() == 0.0

    def test_swallowtail_rejected(self):
        c = circle(64, radius=1.0)  # |kappa| = 1
        with pytest.raises(InvalidArgumentError):
            geometry.inner_boundary(c, np.ones(64), 0.6)


class TestLemma1Expansions:
    def test_constant_h(self):
        c = circle(128)
        tau_e, nrm_e, kap_e = geometry.lemma1_expansions(c, np.ones(128), 0.05)
        assert np.abs(tau_e - geometry.tangent(c)).max() < 1e-12
        assert np.abs(nrm_e + geometry.normal(c)).max() < 1e-12
        assert np.abs(kap_e - geometry.curvature(c)).max() < 1e-12

    def test_zero_eps(self):
        c = circle(128)
        h = 1 + 0.3 * np.sin(2 * np.pi * eta_grid(128))
        tau_e, nrm_e, kap_e = geometry.lemma1_expansions(c, h, 0.0)
        assert np.abs(tau_e - geometry.tangent(c)).max() == 0.0
        assert np.abs(nrm_e + geometry.normal(c)).max() == 0.0
        assert np.abs(kap_e - geometry.curvature(c)).max() == 0.0

    def test_curvature_error_second_order(self):
        # exact offset-frame curvature vs first-order expansion: O(eps^2)
        n = 256
        c = circle(n)
        h = 1 + 0.1 * np.cos(2 * np.pi * eta_grid(n))
        eps_list = [1e-1, 1e-1 / 2, 1e-1 / 4, 1e-1 / 8, 1e-1 / 16, 1e-1 / 32, 1e-3]
        errs = []
        for eps in eps_list:
            _, _, kap_exact = geometry.offset_frame(c, h, eps)
            _, _, kap_first = geometry.lemma1_expansions(c, h, eps)
            errs.append(np.abs(kap_exact - kap_first).max())
        slope = np.polyfit(np.log(eps_list), np.log(errs), 1)[0]
        assert abs(slope - 2.0) <= 0.1

    def test_offset_frame_circle_constant_h(self):
        # constant offset of a circle: the map-referenced curvature stays -1/R
        c = circle(128)
        for eps in (0.05, 0.2, 0.4):
            tau_e, nrm_e, kap_e = geometry.offset_frame(c, np.ones(128), eps)
            assert np.abs(kap_e + 1.0).max() < 1e-10
            assert np.abs(tau_e - geometry.tangent(c)).max() < 1e-10
            assert np.abs(nrm_e + geometry.normal(c)).max() < 1e-10

    def test_full_frame_second_order(self):
        n = 256
        c = circle(n)
        h = 1 + 0.1 * np.cos(2 * np.pi * eta_grid(n))
        errs = []
        eps_list = [4e-2, 2e-2, 1e-2]
        for eps in eps_list:
            t_exact, n_exact, _ = geometry.offset_frame(c, h, eps)
            tau_e, nrm_e, _ = geometry.lemma1_expansions(c, h, eps)
            errs.append(max(np.abs(tau_e - t_exact).max(), np.abs(nrm_e - n_exact).max()))
        ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
        assert all(3.3 < r < 4.7 for r in ratios)


@settings(max_examples=25, deadline=None)
@given(
    amp2=st.floats(-0.15, 0.15),
    amp3=st.floats(-0.12, 0.12),
    phase=st.floats(0.0, 2 * np.pi),
)
def test_frame_invariants_random_curves(amp2, amp3, phase):
    n = 64
    eta = eta_grid(n)
    rho = 1.0 + amp2 * np.cos(4 * np.pi * eta + phase) + amp3 * np.cos(6 * np.pi * eta)
    samples = rho[:, None] * np.stack([np.sin(2 * np.pi * eta), np.cos(2 * np.pi * eta)], axis=1)
    dg = geometry.derivative(samples, 1)
    c = geometry.PeriodicCurve(samples, float(np.hypot(dg[:, 0], dg[:, 1]).mean()))
    tau = geometry.tangent(c)
    nrm = geometry.normal(c)
    assert np.abs((tau * nrm).sum(axis=1)).max() < 1e-12
    assert np.abs(np.hypot(nrm[:, 0], nrm[:, 1]) - 1).max() < 1e-12
