import logging
import math

import numpy as np
import pytest

from app.exceptions import InvalidGrid, NotUnderdamped, ZeroLocalDamping
from app.service.analysis import (
    advantage_region_scan,
    chi,
    gap,
    gap_direct,
    golden_section_max,
    local_minima,
    minima_times,
    optimal_rescaling,
    optimized_config,
    rescaled_steady_energy,
)
from app.service.closedform import energy_battery_reciprocal, steady_battery_energy_nr
from app.service.params import derive, is_nonreciprocal, make_config


class TestGoldenSection:

    def test_finds_parabola_peak(self):
        assert golden_section_max(lambda u: -(u - 2.0) ** 2, -30.0, 30.0) == pytest.approx(2.0, abs=1e-9)

    def test_peak_at_bracket_edge(self):
        assert golden_section_max(lambda u: u, 0.0, 1.0) == pytest.approx(1.0, abs=1e-9)


class TestOptimalRescaling:

    def test_matches_analytic_optimum(self, fig4_config):
        result = optimal_rescaling(fig4_config)
        assert result.x_opt == pytest.approx(math.sqrt(0.1 / 0.003), rel=1e-6)
        assert result.x_analytic == pytest.approx(math.sqrt(0.1 / 0.003), rel=1e-15)
        expected = 16 * 0.01 ** 2 * 0.1 ** 2 / (0.01 + math.sqrt(0.1 * 0.003)) ** 4
        assert result.energy_opt == pytest.approx(expected, rel=1e-9)
        assert result.energy_analytic == pytest.approx(expected, rel=1e-12)

    def test_diagnostic_curve_peaks_at_optimum(self, fig4_config):
        result = optimal_rescaling(fig4_config)
        assert result.x_grid.shape == result.energy_grid.shape
        assert result.x_grid[0] < result.x_opt < result.x_grid[-1]
        assert np.all(result.energy_grid <= result.energy_opt * (1 + 1e-12))

    def test_unit_rescaling_is_the_plain_steady_energy(self, fig4_config):
        assert rescaled_steady_energy(fig4_config, 1.0) == pytest.approx(
            steady_battery_energy_nr(fig4_config), rel=1e-12,
        )

    def test_symmetric_damping_needs_no_rescaling(self, fig2_config):
        assert optimal_rescaling(fig2_config).x_opt == pytest.approx(1.0, rel=1e-6)

    def test_undriven_system(self, fig4_config):
        undriven = fig4_config.model_copy(update={"drive": fig4_config.drive.model_copy(update={"amplitude": 0.0})})
        result = optimal_rescaling(undriven)
        assert result.x_opt == pytest.approx(math.sqrt(0.1 / 0.003), rel=1e-6)
        assert result.energy_opt == 0.0

    def test_needs_local_damping(self):
        with pytest.raises(ZeroLocalDamping):
            optimal_rescaling(make_config(kappa_a=0.1, kappa_b=0.0, Gamma=0.01, J=0.005j, drive_amplitude=0.1))

    def test_summary_keys(self, fig4_config):
        assert set(optimal_rescaling(fig4_config).summary()) == {"x_opt", "energy_opt", "x_analytic", "energy_analytic"}


class TestOptimizedConfig:

    def test_partner_is_nonreciprocal_with_optimal_rates(self, fig4_config):
        partner = optimized_config(fig4_config)
        derived = derive(partner)
        xi = math.sqrt(0.1 / 0.003)
        assert is_nonreciprocal(partner)
        assert derived.gamma_a == pytest.approx(0.01 * xi, rel=1e-6)
        assert derived.gamma_b == pytest.approx(0.01 / xi, rel=1e-6)
        assert steady_battery_energy_nr(partner) == pytest.approx(optimal_rescaling(fig4_config).energy_opt, rel=1e-9)

    def test_reciprocal_config_uses_coherent_coupling(self, fig3_reciprocal):
        partner = optimized_config(fig3_reciprocal)
        assert partner.Gamma == pytest.approx(2 * abs(fig3_reciprocal.J), rel=1e-15)
        assert abs(partner.J) == pytest.approx(abs(fig3_reciprocal.J), rel=1e-12)


class TestGap:

    def test_both_evaluations_agree(self, fig3_reciprocal):
        t = np.linspace(0.0, 3000.0, 301)
        r = fig3_reciprocal.charger.kappa / 0.02
        expected = gap_direct(r, 1.0, 0.02, 0.1, t)
        np.testing.assert_allclose(gap(fig3_reciprocal, t), expected, rtol=1e-9, atol=1e-9)

    def test_minima_follow_chi(self):
        J_abs, r, y, F = 0.02, 0.6, 0.1, 0.1
        scale = 8 * F ** 2 / J_abs ** 2
        times = minima_times(J_abs, r, y, k_max=3)
        for k, t in enumerate(times):
            assert gap_direct(r, y, J_abs, F, t) == pytest.approx(scale * chi(r, y, k), rel=1e-10)

    def test_sampled_minima_sit_at_predicted_times(self):
        J_abs, r, y = 0.02, 0.6, 0.1
        predicted = minima_times(J_abs, r, y, k_max=2)
        t = np.linspace(0.0, predicted[-1] * 1.2, 20001)
        found = local_minima(t, gap_direct(r, y, J_abs, 0.1, t))
        spacing = t[1] - t[0]
        np.testing.assert_allclose(found[:3], predicted, atol=spacing)

    def test_overdamped_pair_rejected(self, fig4_config):
        with pytest.raises(NotUnderdamped):
            gap(fig4_config.model_copy(update={"Gamma": 0.0}), 10.0)

    def test_gap_direct_rejects_overdamped_variables(self):
        with pytest.raises(NotUnderdamped):
            gap_direct(5.0, 0.0, 0.02, 0.1, 1.0)

    def test_local_minima(self):
        values = np.array([3.0, 1.0, 2.0, 0.5, 4.0])
        np.testing.assert_array_equal(local_minima(np.arange(5.0), values), [1.0, 3.0])


class TestChi:

    def test_reference_value(self):
        assert chi(1.0, 0.0) == pytest.approx(0.23924, abs=1e-5)

    def test_vanishes_without_local_damping(self):
        np.testing.assert_allclose(chi(0.0, np.linspace(0.0, 0.21, 5)), 0.0, atol=1e-15)

    def test_broadcasts(self):
        values = chi(np.linspace(0.1, 1.0, 4)[:, None], np.linspace(0.0, 0.2, 3)[None, :])
        assert values.shape == (4, 3)
        assert isinstance(chi(0.5, 0.1), float)

    def test_later_minima_are_larger(self):
        assert chi(0.5, 0.1, 0) < chi(0.5, 0.1, 1) < chi(0.5, 0.1, 2)


class TestAdvantageScan:

    def test_default_region_has_no_violation(self):
        scan = advantage_region_scan()
        assert scan.chi_values.shape == (101, 22)
        assert scan.violation_points == []
        assert scan.min_gap > 0
        assert scan.certified_region
        assert scan.first_violation_y == {}
        assert len(scan.boundary_points) == 22
        assert all(r == 0.0 for r, _ in scan.boundary_points)

    def test_exploratory_scan_finds_violations(self, caplog):
        with caplog.at_level(logging.WARNING):
            scan = advantage_region_scan(r_points=11, y_points=51, y_max=0.5)
        assert not scan.certified_region
        assert scan.violation_points
        assert scan.min_gap < 0
        assert min(scan.first_violation_y.values()) >= 0.22
        assert "certified region" in caplog.text

    def test_first_violations_are_violations(self):
        scan = advantage_region_scan(r_points=11, y_points=51, y_max=0.5)
        violations = set(scan.violation_points)
        for r, y in scan.first_violation_y.items():
            assert (r, y) in violations
            assert all(v_y >= y for v_r, v_y in violations if v_r == r)
        assert {r for r, _ in violations} == set(scan.first_violation_y)

    @pytest.mark.parametrize("r_points, y_points, y_max", [(1, 22, 0.21), (101, 1, 0.21), (11, 11, 1.0), (11, 11, -0.1)])
    def test_invalid_grid(self, r_points, y_points, y_max):
        with pytest.raises(InvalidGrid):
            advantage_region_scan(r_points, y_points, y_max)

    def test_summary(self):
        summary = advantage_region_scan(r_points=11, y_points=5).summary()
        assert summary["violations"] == []
        assert summary["boundary_points"] == 5
        assert summary["argmin_r"] > 0


class TestOracles:

    def test_optimizer_on_random_damping(self):
        rng = np.random.default_rng(7)
        for kappa_a, kappa_b in 10 ** rng.uniform(-3, 0, size=(100, 2)):
            config = make_config(kappa_a=kappa_a, kappa_b=kappa_b, Gamma=0.1, J=0.05j, drive_amplitude=0.1)
            result = optimal_rescaling(config)
            assert result.x_opt == pytest.approx(math.sqrt(kappa_a / kappa_b), rel=1e-6)
            assert result.energy_opt == pytest.approx(result.energy_analytic, rel=1e-9)

    def test_figure5_charger_weight(self, fig5_config):
        assert abs(optimized_config(fig5_config).charger.p) == pytest.approx(5 ** 0.25, rel=1e-6)

    def test_gap_never_below_first_minimum(self):
        rng = np.random.default_rng(11)
        J_abs, F = 0.02, 0.1
        scale = 8 * F ** 2 / J_abs ** 2
        for r, y in zip(rng.uniform(0.01, 1.0, 50), rng.uniform(0.0, 0.21, 50)):
            t = np.linspace(0.0, 20 * minima_times(J_abs, r, y, k_max=0)[0], 10000)
            floor = scale * chi(r, y, 0)
            assert np.all(gap_direct(r, y, J_abs, F, t) >= floor - 1e-9 * scale)
            assert floor > 0

    def test_optimum_ignores_drive_strength(self, fig4_config):
        stronger = fig4_config.model_copy(update={"drive": fig4_config.drive.model_copy(update={"amplitude": 3.7})})
        assert optimal_rescaling(stronger).x_opt == pytest.approx(optimal_rescaling(fig4_config).x_opt, rel=1e-12)

    def test_figure5_optimized_energy(self, fig5_config):
        result = optimal_rescaling(fig5_config)
        assert result.x_opt == pytest.approx(math.sqrt(5), rel=1e-6)
        expected = 64 * 0.04 / (0.4 + math.sqrt(0.0005)) ** 4
        assert result.energy_opt / 0.1 ** 2 == pytest.approx(expected, rel=1e-9)


class TestGapShape:

    def test_gap_starts_at_stationary_energy(self, fig3_reciprocal):
        partner = optimized_config(fig3_reciprocal, Gamma=0.04)
        assert gap(fig3_reciprocal, 0.0) == pytest.approx(steady_battery_energy_nr(partner), rel=1e-9)
        assert gap(fig3_reciprocal, 0.0) > 0

    def test_brute_force_minimum_at_first_predicted_time(self):
        r, y, J_abs, F = 1.0, 0.21, 1.0, 1.0
        t_first = minima_times(J_abs, r, y, k_max=0)[0]
        t = np.linspace(t_first / 1000, 10 * t_first, 100001)
        values = gap_direct(r, y, J_abs, F, t)
        assert abs(t[np.argmin(values)] - t_first) <= t[1] - t[0]
        assert values.min() > 0

    def test_first_minimum_is_the_deepest(self):
        r, y, J_abs, F = 0.8, 0.15, 0.02, 0.1
        depths = gap_direct(r, y, J_abs, F, minima_times(J_abs, r, y, k_max=10))
        assert np.all(depths[0] <= depths[1:])

    def test_late_minima_limit_is_non_negative(self):
        r = np.linspace(0.0, 1.0, 11)[:, None]
        y = np.linspace(0.0, 0.21, 8)[None, :]
        limit = 8 / (r * np.sqrt(y) + 2) ** 4 - 2 / (r ** 2 * y + 4) ** 2
        assert np.all(limit >= 0)
        assert np.all(chi(r, y, 50) <= limit + 1e-15)

    @pytest.mark.parametrize("r, y", [(0.15, 1.0), (0.6, 0.1), (1.0, 0.21), (2.0, 0.5)])
    def test_expanded_form_matches_reciprocal_energy(self, r, y):
        J_abs, F = 0.02, 0.1
        config = make_config(kappa_a=r * J_abs, kappa_b=r * y * J_abs, Gamma=0.0, J=J_abs * 1j, drive_amplitude=F)
        t = np.linspace(0.0, 4000.0, 2001)
        stationary = 8 * F ** 2 / J_abs ** 2 * 8 / (r * math.sqrt(y) + 2) ** 4
        expected = stationary - energy_battery_reciprocal(config, t)
        np.testing.assert_allclose(gap_direct(r, y, J_abs, F, t), expected, rtol=1e-9, atol=1e-9 * stationary)

    def test_reciprocal_energy_never_negative_in_expanded_form(self):
        r, y, J_abs, F = 0.6, 0.1, 0.02, 0.1
        stationary = 8 * F ** 2 / J_abs ** 2 * 8 / (r * math.sqrt(y) + 2) ** 4
        t = np.linspace(0.0, 50.0, 501)
        assert np.all(gap_direct(r, y, J_abs, F, t) <= stationary * (1 + 1e-12))
        assert gap_direct(r, y, J_abs, F, 0.0) == pytest.approx(stationary, rel=1e-12)
