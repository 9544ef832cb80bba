"""Planner tests: rate inversion, curves, TRS values, doubling scenarios."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trs_planner.coverage import ConfigError, LoadModel, NetworkConfig, user_rate
from trs_planner.trs import (
    InfeasibleError,
    Lever,
    ScaleMode,
    TrsValue,
    doubling_scenario,
    indifference_curve,
    log_grid,
    make_operating_point,
    required_antennas,
    required_density,
    required_spectrum,
    trs_spectrum_antennas,
    trs_spectrum_density,
)

SPARSE = dict(lambda_b=10.0, antennas=1, lambda_u=100.0)
DENSE = dict(lambda_b=1000.0, antennas=1, lambda_u=100.0)


class TestRequiredSpectrum:
    def test_zero_rate(self):
        assert required_spectrum(0.0, **SPARSE) == 0.0

    def test_linearity(self):
        w1 = required_spectrum(15.0, **SPARSE)
        w2 = required_spectrum(30.0, **SPARSE)
        assert w2 == pytest.approx(2.0 * w1, rel=1e-12)

    def test_roundtrip_through_user_rate(self):
        w = required_spectrum(15.0, **SPARSE)
        cfg = NetworkConfig(lambda_b=10.0, lambda_u=100.0, antennas=1, bandwidth_mhz=w)
        assert user_rate(cfg) == pytest.approx(15.0, rel=1e-10)

    @settings(max_examples=15, deadline=None)
    @given(
        rate=st.floats(1.0, 200.0),
        lam=st.floats(1.0, 400.0),
        m=st.integers(1, 4),
    )
    def test_roundtrip_property(self, rate, lam, m):
        w = required_spectrum(rate, lam, m, 100.0)
        cfg = NetworkConfig(lambda_b=lam, lambda_u=100.0, antennas=m, bandwidth_mhz=w)
        back = required_spectrum(user_rate(cfg), lam, m, 100.0)
        assert back == pytest.approx(w, rel=1e-8)


class TestRequiredDensity:
    def test_roundtrip_sparse_point(self):
        w = required_spectrum(15.0, **SPARSE)
        lam = required_density(15.0, w, 1, 100.0)
        assert lam == pytest.approx(10.0, rel=1e-6)

    def test_rate_monotone_in_density(self):
        w = 50.0
        rates = [
            user_rate(NetworkConfig(lambda_b=lam, lambda_u=100.0, bandwidth_mhz=w))
            for lam in log_grid(0.5, 5000.0, 12)
        ]
        assert all(b > a for a, b in zip(rates, rates[1:]))

    def test_supplied_bracket_without_sign_change(self):
        with pytest.raises(InfeasibleError):
            required_density(500.0, 10.0, 1, 100.0, bracket=(1.0, 2.0))

    def test_infeasible_demand_detected(self):
        # rate grows ~logarithmically once the share saturates; an absurd
        # demand at tiny bandwidth exhausts the bracket expansion
        with pytest.raises(InfeasibleError):
            required_density(1e9, 1.0, 1, 100.0)


class TestRequiredAntennas:
    def test_single_antenna_suffices(self):
        w = required_spectrum(15.0, **SPARSE)
        assert required_antennas(10.0, w, 10.0, 100.0) == 1

    def test_sparse_rate_doubling_needs_six(self):
        w = required_spectrum(15.0, **SPARSE)
        assert required_antennas(30.0, w, 10.0, 100.0) == 6

    def test_dense_usage_doubling_needs_three(self):
        w = required_spectrum(420.0, **DENSE)
        assert required_antennas(420.0, w, 1000.0, 200.0) == 3

    def test_cap_reached(self):
        w = required_spectrum(15.0, **SPARSE)
        with pytest.raises(InfeasibleError):
            required_antennas(200.0, w, 10.0, 100.0, max_antennas=16)


class TestIndifferenceCurve:
    def test_single_point_reproduces_required_spectrum(self):
        curve = indifference_curve(15.0, 100.0, "w-m", [4], lambda_b=10.0)
        assert curve.samples[0].axis2 == pytest.approx(
            required_spectrum(15.0, 10.0, 4, 100.0), rel=1e-12
        )

    def test_density_curve_monotone_tradeoff(self):
        curve = indifference_curve(15.0, 100.0, "w-density", log_grid(1.0, 30.0, 10), antennas=1)
        ws = [s.axis2 for s in curve.samples]
        assert all(s.feasible for s in curve.samples)
        assert all(b < a for a, b in zip(ws, ws[1:]))

    def test_antenna_curve_monotone_tradeoff(self):
        curve = indifference_curve(15.0, 100.0, "w-m", list(range(1, 9)), lambda_b=10.0)
        ws = [s.axis2 for s in curve.samples]
        assert all(b < a for a, b in zip(ws, ws[1:]))

    def test_curve_points_satisfy_demand(self):
        curve = indifference_curve(15.0, 100.0, "w-density", [2.0, 10.0, 25.0], antennas=1)
        for s in curve.samples:
            cfg = NetworkConfig(lambda_b=s.axis1, lambda_u=100.0, bandwidth_mhz=s.axis2)
            assert user_rate(cfg) == pytest.approx(15.0, rel=1e-9)

    def test_sparse_overlay_coincides(self):
        # doubling the rate and doubling the users need the same spectrum in
        # the sparse regime (1% pointwise)
        grid = log_grid(1.0, 10.0, 6)
        double_rate = indifference_curve(30.0, 100.0, "w-density", grid, antennas=1)
        double_usage = indifference_curve(15.0, 200.0, "w-density", grid, antennas=1)
        for a, b in zip(double_rate.samples, double_usage.samples):
            assert abs(a.axis2 - b.axis2) / a.axis2 <= 0.01

    def test_grid_validation(self):
        with pytest.raises(ConfigError):
            indifference_curve(15.0, 100.0, "w-m", [], lambda_b=10.0)
        with pytest.raises(ConfigError):
            indifference_curve(15.0, 100.0, "w-m", [4, 2], lambda_b=10.0)
        with pytest.raises(ConfigError):
            indifference_curve(15.0, 100.0, "w-density", [1.0], antennas=None)
        with pytest.raises(ConfigError):
            indifference_curve(15.0, 100.0, "nope", [1.0], antennas=1)


class TestTrsValues:
    def test_antenna_trs_positive_and_increasing(self):
        sparse = [
            trs_spectrum_antennas(15.0, 10.0, m, 100.0).magnitude for m in (1, 4, 8, 16)
        ]
        dense = [
            trs_spectrum_antennas(420.0, 1000.0, m, 100.0).magnitude for m in (1, 4, 8, 16)
        ]
        for row in (sparse, dense):
            assert all(v > 0 for v in row)
            assert all(b > a for a, b in zip(row, row[1:]))

    def test_density_trs_policies_consistent_where_smooth(self):
        # at the dense points one station is a small relative step, so the
        # unit-step and derivative policies agree closely
        for lam in (500.0, 1000.0):
            unit = trs_spectrum_density(420.0, lam, 1, 100.0).magnitude
            deriv = trs_spectrum_density(
                420.0, lam, 1, 100.0, policy="central-derivative"
            ).magnitude
            assert unit == pytest.approx(deriv, rel=0.01)

    def test_derivative_matches_curve_secant(self):
        # implicit-function value vs a secant along the traced curve, at
        # every published-table operating point
        points = (
            (15.0, 1.0, 1), (15.0, 5.0, 1), (15.0, 10.0, 1),
            (420.0, 100.0, 1), (420.0, 500.0, 1), (420.0, 1000.0, 1),
        )
        for rate, lam, m in points:
            h = 1e-3 * lam
            w_lo = required_spectrum(rate, lam - h, m, 100.0)
            w_hi = required_spectrum(rate, lam + h, m, 100.0)
            secant = 2.0 * h / (w_lo - w_hi)
            deriv = trs_spectrum_density(rate, lam, m, 100.0, policy="central-derivative").magnitude
            assert deriv == pytest.approx(secant, rel=0.01)

    def test_step_policy_recorded(self):
        v = trs_spectrum_density(15.0, 10.0, 1, 100.0)
        assert v.step_policy == "forward-unit-step dlambda_b=1"
        assert v.units == "lambda_b_per_mhz"
        v2 = trs_spectrum_antennas(15.0, 10.0, 1, 100.0)
        assert v2.step_policy == "forward-unit-step dM=1"

    def test_unknown_policy_rejected(self):
        with pytest.raises(ConfigError):
            trs_spectrum_density(15.0, 10.0, 1, 100.0, policy="secant-of-doom")

    def test_infinite_value_representation(self):
        v = TrsValue(
            pair="spectrum-density", magnitude=math.inf, units="lambda_b_per_mhz",
            step_policy="forward-unit-step dlambda_b=1", target_rate_mbps=1.0,
            lambda_u=100.0, lambda_b=10.0, antennas=1, bandwidth_mhz=5.0,
            note="densifying saves no spectrum here",
        )
        assert v.is_infinite


class TestDoublingScenario:
    def test_sparse_spectrum_lever_ratio_two(self):
        base = make_operating_point(15.0, 10.0, 1, 100.0)
        for mode in (ScaleMode.DOUBLE_RATE, ScaleMode.DOUBLE_USAGE):
            report = doubling_scenario(base, mode, Lever.SPECTRUM)
            assert report.feasible
            assert report.ratio == pytest.approx(2.0, rel=0.01)

    def test_dense_density_lever_usage_doubling(self):
        base = make_operating_point(420.0, 1000.0, 1, 100.0)
        report = doubling_scenario(base, ScaleMode.DOUBLE_USAGE, Lever.DENSITY)
        assert report.feasible
        assert report.ratio == pytest.approx(2.0, rel=0.01)

    def test_factor_one_is_identity(self):
        base = make_operating_point(15.0, 10.0, 1, 100.0)
        for lever in (Lever.SPECTRUM, Lever.DENSITY, Lever.ANTENNAS):
            report = doubling_scenario(base, ScaleMode.DOUBLE_RATE, lever, factor=1.0)
            assert report.feasible
            assert report.ratio == pytest.approx(1.0, rel=1e-5)

    def test_antenna_lever_sparse_rate_doubling(self):
        base = make_operating_point(15.0, 10.0, 1, 100.0)
        report = doubling_scenario(base, ScaleMode.DOUBLE_RATE, Lever.ANTENNAS)
        assert report.feasible
        assert report.lever_value == 6.0

    def test_dense_usage_doubling_cheaper_than_rate_doubling(self):
        # waking idle stations absorbs extra users, so doubled usage needs
        # strictly less spectrum than doubled per-user rate in dense networks
        w_rate = required_spectrum(840.0, 1000.0, 1, 100.0)
        w_usage = required_spectrum(420.0, 1000.0, 1, 200.0)
        assert w_usage < w_rate

    def test_infeasible_is_a_result_not_an_exception(self):
        base = make_operating_point(15.0, 10.0, 1, 100.0)
        report = doubling_scenario(
            base, ScaleMode.DOUBLE_RATE, Lever.ANTENNAS, factor=20.0, max_antennas=32
        )
        assert not report.feasible
        assert report.lever_value is None
        assert "antenna-infeasible" in report.note

    def test_operating_point_validation(self):
        with pytest.raises(ConfigError):
            make_operating_point(-1.0, 10.0, 1, 100.0)
