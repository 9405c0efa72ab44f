import math

import numpy as np
import pytest

import rckit
from rckit import PlantParams, SignalSpec, backstepping_control, observer_step, plant_deriv
from rckit.arm import secondary_deriv


@pytest.fixture
def quiet_signals():
    """Reference and disturbances switched off."""
    return SignalSpec(r_amp=0.0, r_offset=0.0, d1_amp=0.0, d2_amp=0.0)


class TestPlantParams:
    def test_injected_drift_is_hurwitz(self, plant):
        eig = np.linalg.eigvals(plant.A)
        assert np.all(eig.real < 0)

    def test_unstabilizing_injection_rejected(self):
        with pytest.raises(ValueError, match="Hurwitz"):
            PlantParams(p=(0.0, 0.0, 0.0, 0.0))

    def test_raw_drift_matches_constants(self, plant):
        A0 = plant.A0
        assert A0[1, 0] == pytest.approx(-0.025)
        assert A0[1, 1] == pytest.approx(-0.1)
        assert A0[3, 3] == pytest.approx(-0.4)
        assert plant.gravity_gain == pytest.approx(1.225)

    def test_normalized_nonlinearity(self, plant):
        y = 0.37
        expected = plant.phi0(y) - np.asarray(plant.p) * y
        assert np.allclose(plant.phi(y), expected, rtol=0, atol=0)

    def test_bad_inertia_rejected(self):
        with pytest.raises(ValueError):
            PlantParams(J_l=0.0)


class TestSignals:
    def test_true_period_scaling(self):
        s = SignalSpec(alpha=0.02)
        assert s.T_true == pytest.approx(s.T_nominal * 1.02, rel=1e-15)

    def test_disturbances_vanish_at_zero(self, signals):
        assert signals.d1(0.0) == 0.0
        assert signals.d2(0.0) == 0.0

    def test_reference_derivatives_by_finite_difference(self):
        s = SignalSpec(alpha=-0.01)
        h = 1e-6
        for t in (0.0, 1.7, 13.4):
            fd1 = (s.reference(t + h) - s.reference(t - h)) / (2 * h)
            fd2 = (s.reference_dot(t + h) - s.reference_dot(t - h)) / (2 * h)
            assert s.reference_dot(t) == pytest.approx(fd1, abs=1e-8)
            assert s.reference_ddot(t) == pytest.approx(fd2, abs=1e-8)

    def test_negative_period_rejected(self):
        with pytest.raises(ValueError):
            SignalSpec(alpha=-1.5)


class TestPlantDeriv:
    def test_origin_is_equilibrium(self, plant, quiet_signals):
        d = plant_deriv(np.zeros(4), 0.0, 0.0, plant, quiet_signals)
        assert np.array_equal(d, np.zeros(4))

    def test_right_angle_link(self, plant, quiet_signals):
        # hand arithmetic: second entry -K/J_l * (pi/2) - M g l / J_l * sin(pi/2),
        # fourth entry K/J_m * (pi/2)
        d = plant_deriv(np.array([np.pi / 2, 0.0, 0.0, 0.0]), 0.0, 0.0,
                        plant, quiet_signals)
        assert d[0] == 0.0
        assert d[1] == pytest.approx(-0.025 * np.pi / 2 - 1.225, rel=1e-14)
        assert d[2] == 0.0
        assert d[3] == pytest.approx(0.1 * np.pi / 2, rel=1e-14)
        # four-significant-figure values of the published constants
        assert d[1] == pytest.approx(-0.0393 - 1.225, abs=5e-4)
        assert d[3] == pytest.approx(0.1571, abs=5e-5)

    def test_disturbance_entries(self, plant, signals):
        t = 2.3
        d = plant_deriv(np.zeros(4), 0.0, t, plant, signals)
        assert d[1] == pytest.approx(signals.d1(t), rel=1e-15)
        assert d[3] == pytest.approx(signals.d2(t), rel=1e-15)


def analytic_gradient(plant, r, r_dot, r_ddot):
    """Hand-derived gradient of the stabilizer at zero deviation."""
    kl, fl = plant.K / plant.J_l, plant.F_l / plant.J_l
    km, fm = plant.K / plant.J_m, plant.F_m / plant.J_m
    g1 = plant.gravity_gain
    s, c = math.sin(r), math.cos(r)
    e1 = np.array([1.0, 0.0, 0.0, 0.0])
    e2 = np.array([0.0, 1.0, 0.0, 0.0])
    d_eta3 = np.array([-kl - g1 * c, -fl, kl, 0.0])
    d_eta4 = -fl * d_eta3 + np.array([g1 * r_dot * s, -kl - g1 * c, 0.0, kl])
    d_v = np.array([-7.5, -19.0, 0.0, 0.0]) - 17.0 * d_eta3 - 7.0 * d_eta4
    d_mu1 = -d_eta3 + np.array([km, 0.0, -km, -fm])
    d_mu2 = (fl * d_eta4 + g1 * c * d_eta3
             + (-g1 * r_ddot * s - g1 * r_dot ** 2 * c) * e1
             + (-2.0 * g1 * r_dot * s) * e2)
    return d_mu1 + plant.J_l / plant.K * (d_v + d_mu2)


class TestBackstepping:
    def test_origin_maps_to_zero_for_any_reference(self, plant):
        for r, dr, ddr in ((0.0, 0.0, 0.0), (0.13, -0.4, 2.2), (-1.0, 0.5, 0.1)):
            assert backstepping_control(np.zeros(4), r, dr, ddr, plant) == 0.0

    def test_hand_evaluated_sample(self, plant):
        # worked by hand from the printed law with the bundled constants
        value = backstepping_control((0.0, 0.0, 0.0, 1.0), 0.0, 0.0, 0.0, plant)
        assert value == pytest.approx(-7.3, rel=1e-12)

    def test_gradient_matches_finite_difference(self, plant):
        rng = np.random.default_rng(19)
        r, r_dot, r_ddot = 0.3, 0.1, -0.05
        grad = analytic_gradient(plant, r, r_dot, r_ddot)
        for _ in range(6):
            direction = rng.standard_normal(4)
            eps = 1e-5
            plus = backstepping_control(eps * direction, r, r_dot, r_ddot, plant)
            minus = backstepping_control(-eps * direction, r, r_dot, r_ddot, plant)
            fd = (plus - minus) / (2 * eps)
            assert fd == pytest.approx(float(grad @ direction), abs=1e-6)

    def test_small_amplitude_limit(self, plant):
        # u_s(eps x)/eps converges to the gradient action as eps shrinks
        r, r_dot, r_ddot = -0.2, 0.4, 0.15
        grad = analytic_gradient(plant, r, r_dot, r_ddot)
        x = np.array([0.3, -0.7, 0.2, 0.9])
        target = float(grad @ x)
        gaps = []
        for eps in (1e-3, 1e-4, 1e-5):
            ratio = backstepping_control(eps * x, r, r_dot, r_ddot, plant) / eps
            gaps.append(abs(ratio - target))
        assert gaps[-1] < 1e-6
        assert gaps[0] >= gaps[-1] * 0.999  # shrinking with eps


class TestObserverStep:
    def test_matched_output_keeps_zero_state(self, plant):
        r_fn = lambda t: 0.1 + 0.05 * math.sin(0.3 * t)
        out = observer_step(np.zeros(4), r_fn, r_fn, 0.0, plant,
                            t0=0.0, window=0.01, h_int=1e-3)
        assert np.array_equal(out, np.zeros(4))

    def test_one_step_euler_limit(self, plant):
        eps = 0.1
        r_val = 0.2
        y_fn = lambda t: r_val + eps
        r_fn = lambda t: r_val
        h = 1e-3
        out = observer_step(np.zeros(4), y_fn, r_fn, 0.0, plant,
                            t0=0.0, window=h, h_int=h)
        drive = plant.phi(r_val + eps) - plant.phi(r_val)
        euler = h * drive
        # deviation from the one-step Euler value is second order in h
        second_order_scale = h ** 2 * np.linalg.norm(plant.A @ drive)
        assert np.linalg.norm(out - euler) < 2.0 * second_order_scale

    def test_window_must_divide(self, plant):
        with pytest.raises(ValueError):
            observer_step(np.zeros(4), lambda t: 0.0, lambda t: 0.0, 0.0,
                          plant, t0=0.0, window=0.0105, h_int=1e-3)

    def test_matches_secondary_deriv_integration(self, plant):
        # one RK4 step cross-checked against a manual stage computation
        y_fn = lambda t: 0.1 * math.sin(t) + 0.02
        r_fn = lambda t: 0.1 * math.sin(t)
        h = 1e-3
        x0 = np.array([0.01, -0.02, 0.005, 0.0])
        out = observer_step(x0, y_fn, r_fn, 0.7, plant, t0=0.5, window=h, h_int=h)
        k1 = secondary_deriv(x0, 0.7, y_fn(0.5), r_fn(0.5), plant)
        ym, rm = y_fn(0.5 + h / 2), r_fn(0.5 + h / 2)
        k2 = secondary_deriv(x0 + h / 2 * k1, 0.7, ym, rm, plant)
        k3 = secondary_deriv(x0 + h / 2 * k2, 0.7, ym, rm, plant)
        k4 = secondary_deriv(x0 + h * k3, 0.7, y_fn(0.5 + h), r_fn(0.5 + h), plant)
        manual = x0 + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        assert np.allclose(out, manual, rtol=0, atol=0)
