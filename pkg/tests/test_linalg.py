import numpy as np
import pytest
import scipy.linalg

import rckit
from rckit import ContinuousStateSpace, mat_exp, ss_to_tf, zoh_discretize


class TestMatExp:
    def test_zero_matrix(self):
        assert np.array_equal(mat_exp(np.zeros((4, 4))), np.eye(4))

    def test_diagonal(self):
        d = np.array([0.3, -1.2, 2.0, -0.1])
        got = mat_exp(np.diag(d))
        assert np.allclose(got, np.diag(np.exp(d)), rtol=1e-13, atol=0)

    def test_robot_arm_eigenvalues(self, plant):
        # injected drift was placed so the 0.1 s transition matrix has these modes
        F = mat_exp(plant.A * 0.1)
        eig = np.sort(np.linalg.eigvals(F).real)[::-1]
        expected = [0.9512, 0.9418, 0.9324, 0.9231]
        assert np.allclose(eig, expected, rtol=5e-4)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            mat_exp(np.ones((2, 3)))

    def test_non_finite_rejected(self):
        M = np.eye(2)
        M[0, 1] = np.nan
        with pytest.raises(ValueError):
            mat_exp(M)

    def test_inverse_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            M = rng.standard_normal((4, 4))
            M *= rng.uniform(0.1, 5.0) / np.linalg.norm(M, 2)
            resid = mat_exp(M) @ mat_exp(-M) - np.eye(4)
            assert np.linalg.norm(resid, "fro") < 1e-10

    def test_additivity_in_scalar(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            M = rng.standard_normal((3, 3))
            s, t = rng.uniform(0.1, 1.5, size=2)
            lhs = mat_exp((s + t) * M)
            rhs = mat_exp(s * M) @ mat_exp(t * M)
            assert np.linalg.norm(lhs - rhs, "fro") < 1e-10

    def test_against_scipy(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            M = rng.standard_normal((5, 5)) * rng.uniform(0.1, 2.0)
            ours = mat_exp(M)
            ref = scipy.linalg.expm(M)
            assert np.allclose(ours, ref, rtol=1e-12, atol=1e-13)


class TestZohDiscretize:
    def test_scalar_integrator(self):
        sys = ContinuousStateSpace(np.array([[0.0]]), [1.0], [1.0])
        dss = zoh_discretize(sys, 0.1)
        assert dss.F[0, 0] == pytest.approx(1.0, abs=1e-15)
        assert dss.g[0] == pytest.approx(0.1, rel=1e-14)

    def test_scalar_lag_closed_form(self):
        sys = ContinuousStateSpace(np.array([[-1.0]]), [1.0], [1.0])
        dss = zoh_discretize(sys, 1.0)
        assert dss.F[0, 0] == pytest.approx(np.exp(-1.0), rel=1e-14)
        assert dss.g[0] == pytest.approx(1.0 - np.exp(-1.0), rel=1e-14)

    def test_bad_step_rejected(self, plant):
        with pytest.raises(ValueError):
            zoh_discretize(plant.continuous(), 0.0)

    def test_small_step_limit(self, plant):
        sys = plant.continuous()
        for Ts in (1e-3, 1e-4):
            dss = zoh_discretize(sys, Ts)
            # F - I - A Ts = O(Ts^2)
            resid = np.linalg.norm(dss.F - np.eye(4) - sys.A * Ts, "fro")
            bound = 2.0 * np.linalg.norm(sys.A @ sys.A, "fro") * Ts ** 2
            assert resid < bound
            assert np.linalg.norm(dss.g) < 2.0 * Ts


class TestSsToTf:
    def test_pure_delay(self):
        dss = rckit.DiscreteStateSpace(np.array([[0.0]]), [1.0], [1.0], 1.0)
        tf = ss_to_tf(dss)
        assert np.allclose(tf.num.coeffs, [1.0])
        assert np.allclose(tf.den.coeffs, [0.0, 1.0])

    def test_first_order_closed_form(self):
        a, b = 0.63, 1.7
        dss = rckit.DiscreteStateSpace(np.array([[a]]), [b], [1.0], 1.0)
        tf = ss_to_tf(dss)
        assert np.allclose(tf.num.coeffs, [b])
        assert np.allclose(tf.den.coeffs, [-a, 1.0])

    def test_robot_arm_pole_zero_gain(self, plant_tf):
        # bundled study: published factored form, three significant figures
        assert plant_tf.num.leading == pytest.approx(9.9e-8, rel=5e-3)
        zeros = np.sort(rckit.poly_roots(plant_tf.num).real)
        assert np.allclose(zeros, [-9.399, -0.9493, -0.09589], rtol=5e-3)
        poles = np.sort(rckit.poly_roots(plant_tf.den).real)[::-1]
        assert np.allclose(poles, [0.9512, 0.9418, 0.9324, 0.9231], rtol=5e-3)

    def test_dc_consistency(self, plant):
        rng = np.random.default_rng(11)
        for _ in range(10):
            M = rng.standard_normal((4, 4)) * 0.4
            g = rng.standard_normal(4)
            c = rng.standard_normal(4)
            dss = rckit.DiscreteStateSpace(M, g, c, 0.1)
            if abs(np.linalg.det(np.eye(4) - M)) < 1e-6:
                continue
            tf = ss_to_tf(dss)
            direct = c @ np.linalg.solve(np.eye(4) - M, g)
            assert tf(1.0) == pytest.approx(direct, abs=1e-10 * max(1.0, abs(direct)))
