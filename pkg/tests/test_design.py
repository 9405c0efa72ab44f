import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import rckit
from rckit import (DesignError, Polynomial, RationalFunction, make_weight,
                   samples_per_period, sensitivity_curve, stability_margin,
                   synthesize, zpetc)
from rckit.design import RcDesign, condition_profile

from conftest import small_test_plant

# small-gain certificate values of the bundled study, frozen from the first
# verified 8192-point grid run (cross-checked in test_margins_match_direct_grid)
FROZEN_MARGIN_TRADITIONAL = 0.6938748394595234
FROZEN_MARGIN_HIGHER_ORDER = 2.0811656667922893


class TestSamplesPerPeriod:
    def test_bundled_period(self):
        assert samples_per_period(20.0 * np.pi / 3.0, 0.1) == 209

    def test_exact_division(self):
        assert samples_per_period(1.0, 0.5) == 2

    def test_nearest_integer(self):
        assert samples_per_period(1.04, 0.1) == 10

    def test_half_rounds_away_from_zero(self):
        assert samples_per_period(0.25, 0.1) == 3

    def test_below_one_sample_rejected(self):
        with pytest.raises(DesignError):
            samples_per_period(0.04, 0.1)


class TestZpetc:
    def test_minimum_phase_biproper_gives_exact_inverse(self):
        # T with stable zeros and poles, equal degrees: L = 1/T and T L = 1
        T = RationalFunction(
            0.8 * rckit.poly_from_roots([-0.5, 0.2]),
            rckit.poly_from_roots([0.3, 0.4]))
        L, advance = zpetc(T)
        assert advance == 0
        z = np.exp(1j * np.linspace(0.0, np.pi, 9))
        product = T(z) * L(z)
        assert np.allclose(product, 1.0, atol=1e-12)

    def test_all_zeros_uncancelable(self):
        # single zero outside the circle: cancelable part degenerates to the gain
        T = RationalFunction(0.1 * rckit.poly_from_roots([-2.0]),
                             rckit.poly_from_roots([0.3, 0.4]))
        L, advance = zpetc(T)
        assert advance == 1
        assert T(1.0) * (1.0 ** advance * L(1.0)) == pytest.approx(1.0, abs=1e-12)

    def test_unity_dc_product(self, design_traditional, design_higher_order):
        for d in (design_traditional, design_higher_order):
            prod = d.comp_sensitivity(1.0) * d.full_filter_response(1.0)
            assert prod.real == pytest.approx(1.0, abs=1e-10)
        T = small_test_plant().feedback()
        L, a = zpetc(T)
        assert T(1.0) * L(1.0) == pytest.approx(1.0, abs=1e-10)

    def test_unstable_poles_rejected(self):
        T = RationalFunction(Polynomial([0.5]), rckit.poly_from_roots([1.5, 0.2]))
        with pytest.raises(DesignError):
            zpetc(T)

    def test_bundled_product_matches_reflected_form(self, plant_tf, design_higher_order):
        # T L must equal z^{-1} (1 + zeta z^{-1})(1 + zeta z) / (1 + zeta)^2
        # with zeta the reflected uncancelable zero
        d = design_higher_order
        split = rckit.split_zeros(plant_tf.num)
        zeta = -rckit.poly_roots(split.unstable_factor)[0].real
        theta = np.linspace(0.0, np.pi, 33)
        z = np.exp(1j * theta)
        product = d.comp_sensitivity(z) * d.full_filter_response(z)
        reference = z ** -1 * (1 + zeta * z ** -1) * (1 + zeta * z) / (1 + zeta) ** 2
        assert np.max(np.abs(product - reference)) < 1e-9

    def test_zero_phase_after_delay_factored_out(self, plant_tf, design_traditional):
        d = design_traditional
        n_T = d.comp_sensitivity.relative_degree
        theta = 2.0 * np.pi * np.arange(2048) / 2048
        z = np.exp(1j * theta)
        product = z ** n_T * d.comp_sensitivity(z) * d.full_filter_response(z)
        assert np.max(np.abs(np.angle(product))) < 1e-9


class TestWeightFunction:
    def test_traditional_is_unity(self):
        w = make_weight([1.0], 7)
        z = np.exp(1j * np.linspace(0.1, 3.0, 5))
        assert np.allclose(w(z), 1.0, atol=1e-15)

    def test_two_tap_robust_form(self):
        w = make_weight([2.0, -1.0], 5)
        z = np.exp(1j * 0.3)
        assert w(z) == pytest.approx(2.0 - z ** -5, abs=1e-14)

    def test_unit_sum_at_dc(self):
        w = make_weight([0.5, 0.3, 0.2], 4)
        assert w(np.array([1.0 + 0.0j]))[0] == pytest.approx(1.0, abs=1e-12)

    def test_bad_sum_rejected(self):
        with pytest.raises(DesignError):
            make_weight([0.5, 0.4], 5)

    @given(st.lists(st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
                    min_size=1, max_size=4))
    @settings(max_examples=50, deadline=None)
    def test_sum_rule_is_sharp(self, weights):
        total = sum(weights)
        if abs(total - 1.0) <= 1e-12:
            make_weight(weights, 3)
        else:
            with pytest.raises(DesignError):
                make_weight(weights, 3)

    def test_expanded_taps(self):
        w = make_weight([2.0, -1.0], 3)
        assert np.array_equal(w.delay_taps(), [2.0, 0.0, 0.0, -1.0])


class TestStabilityMargin:
    def test_ideal_loop_has_zero_margin(self):
        one = RationalFunction(Polynomial([1.0]), Polynomial([1.0]))
        design = RcDesign(period_samples=5, q_taps=[1.0], w_weights=[1.0],
                          learning_filter=one, advance=0,
                          comp_sensitivity=one, margin=0.0)
        P = RationalFunction(Polynomial([1.0]), Polynomial([1.0]))
        assert stability_margin(P, design) == 0.0

    def test_bundled_margins_frozen(self, plant_tf, design_traditional,
                                    design_higher_order):
        assert design_traditional.margin == pytest.approx(
            FROZEN_MARGIN_TRADITIONAL, rel=1e-9)
        assert design_higher_order.margin == pytest.approx(
            FROZEN_MARGIN_HIGHER_ORDER, rel=1e-9)

    def test_margins_match_direct_grid(self, plant_tf, design_traditional):
        # independent evaluation of the certificate on the same grid
        d = design_traditional
        theta = 2.0 * np.pi * np.arange(8192) / 8192
        z = np.exp(1j * theta)
        zi = np.exp(-1j * theta)
        q = np.zeros_like(z)
        for j, tap in enumerate(d.q_taps):
            q += tap * zi ** j
        w = np.zeros_like(z)
        for i, wi in enumerate(d.w_weights):
            w += wi * zi ** (i * d.period_samples)
        tl = d.comp_sensitivity(z) * d.full_filter_response(z)
        direct = np.max(np.abs(q * w * zi ** d.period_samples * (1.0 - tl)))
        assert stability_margin(plant_tf, d) == pytest.approx(direct, rel=1e-12)

    def test_grid_refinement_monotone(self, plant_tf, design_traditional):
        _, coarse = condition_profile(plant_tf, design_traditional, 1024)
        _, fine = condition_profile(plant_tf, design_traditional, 8192)
        assert np.max(fine) >= np.max(coarse) - 1e-6

    def test_unstable_factor_reported(self):
        bad = RationalFunction(Polynomial([0.5]), rckit.poly_from_roots([1.2, 0.1]))
        one = RationalFunction(Polynomial([1.0]), Polynomial([1.0]))
        design = RcDesign(period_samples=5, q_taps=[1.0], w_weights=[1.0],
                          learning_filter=one, advance=0,
                          comp_sensitivity=one, margin=0.0)
        with pytest.raises(DesignError, match="P"):
            stability_margin(bad, design)

    def test_exact_counter_confirms_small_gain(self, tool_config):
        # certified variant: the exact winding check must agree that the
        # loop is stable
        design = tool_config.synthesize([1.0], exact_check=True)
        assert design.certified
        assert design.unstable_pole_count == 0


class TestSensitivityCurve:
    def test_dc_notch_exact_for_exact_taps(self, plant_tf, tool_config):
        design = synthesize(plant_tf, tool_config.Ts, tool_config.signals.T_nominal,
                            [0.5, 0.25, 0.25], [2.0, -1.0])
        curve = sensitivity_curve(plant_tf, design, [0.0], tool_config.Ts)
        assert curve.magnitudes[0] == 0.0

    def test_harmonic_notch_values(self, plant_tf, tool_config,
                                   design_traditional, design_higher_order):
        # regression values computed by the independent direct evaluation
        # in test_matches_independent_evaluation below
        N = design_traditional.period_samples
        w1 = 2.0 * np.pi / (N * tool_config.Ts)
        c1 = sensitivity_curve(plant_tf, design_traditional, [w1, 1.01 * w1],
                               tool_config.Ts)
        c2 = sensitivity_curve(plant_tf, design_higher_order, [w1, 1.01 * w1],
                               tool_config.Ts)
        assert c1.magnitudes[0] == pytest.approx(0.027521770633, rel=1e-9)
        assert c1.magnitudes[1] == pytest.approx(0.091983219535, rel=1e-9)
        assert c2.magnitudes[0] == pytest.approx(0.027521770633, rel=1e-9)
        assert c2.magnitudes[1] == pytest.approx(0.028356142386, rel=1e-9)
        # robustness ordering at the perturbed harmonic
        assert c2.magnitudes[1] <= c1.magnitudes[1]

    def test_matches_independent_evaluation(self, plant_tf, tool_config,
                                            design_higher_order):
        # direct complex arithmetic from the factored pieces, using the
        # reflected-zero closed form for the compensated loop
        d = design_higher_order
        split = rckit.split_zeros(plant_tf.num)
        zeta = -rckit.poly_roots(split.unstable_factor)[0].real
        N, Ts = d.period_samples, tool_config.Ts
        omegas = np.linspace(0.01, np.pi / Ts * 0.99, 40)
        z = np.exp(1j * omegas * Ts)
        zi = 1.0 / z
        q = sum(tap * zi ** j for j, tap in enumerate(d.q_taps))
        w = sum(wi * zi ** (i * N) for i, wi in enumerate(d.w_weights))
        tl = zi * (1 + zeta * zi) * (1 + zeta * z) / (1 + zeta) ** 2
        pz = plant_tf(z)
        g = q * w * zi ** N
        expected = np.abs(1.0 / (1.0 + pz) * (1.0 - g) / (1.0 - g * (1.0 - tl)))
        got = sensitivity_curve(plant_tf, d, omegas, Ts).magnitudes
        assert np.allclose(got, expected, rtol=1e-8)

    def test_csv_format(self, plant_tf, tool_config, design_traditional, tmp_path):
        curve = sensitivity_curve(plant_tf, design_traditional,
                                  [0.1, 0.2, 0.3], tool_config.Ts)
        path = tmp_path / "curve.csv"
        curve.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "omega_rad_s,magnitude"
        assert len(lines) == 4
        om, mag = lines[1].split(",")
        assert float(om) == 0.1
        assert float(mag) == curve.magnitudes[0]


class TestSynthesize:
    def test_bundled_design_shape(self, design_higher_order):
        d = design_higher_order
        assert d.period_samples == 209
        assert d.advance == 1
        assert d.learning_filter.num.degree == 5
        assert d.learning_filter.den.degree == 5

    def test_advance_larger_than_period_rejected(self):
        # two reflected zeros need a two-sample advance, more than N = 1 allows
        P = RationalFunction(
            0.05 * rckit.poly_from_roots([2.0, -3.0, -0.1]),
            rckit.poly_from_roots([0.3, 0.4, 0.2, 0.1]))
        assert rckit.is_schur_stable(P.den + P.num)
        with pytest.raises(DesignError):
            synthesize(P, 0.1, 0.05, [1.0], [1.0])
