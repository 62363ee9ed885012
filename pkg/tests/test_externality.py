import numpy as np
import pytest

import hysim as h


class TestFamilies:
    def test_power_family_values(self, power_model):
        assert power_model.f(0.0) == pytest.approx(1.8)
        assert power_model.f(1.0) == pytest.approx(1.0)
        assert power_model.g(0.0) == pytest.approx(1.0)
        assert power_model.g(1.0) == pytest.approx(1.2)
        # s_a at eta_l = 0 evaluates f at full white-space occupancy x = 1
        assert power_model.s_a(0.0, 1.0) == pytest.approx(2.2)

    def test_linear_family_values(self, linear_model):
        assert linear_model.f(0.5) == pytest.approx(0.75)
        assert linear_model.g(0.5) == pytest.approx(0.15)

    def test_constant_model(self, constant_model):
        grid = np.linspace(0, 1, 7)
        assert np.allclose(constant_model.f(grid), 1.0)
        assert np.allclose(constant_model.g(grid), 0.5)

    def test_rejects_negative_f_at_one(self):
        with pytest.raises(h.ParameterError):
            h.make_power_family(0.5, 0.8, 0.8, 0.0, 0.5, 0.6, 6.0)

    def test_rejects_bad_exponent(self):
        with pytest.raises(h.ParameterError):
            h.make_power_family(1.8, 0.8, 1.5, 1.0, 1.2, 0.6, 8.0)

    def test_rejects_dominated_leasing(self):
        with pytest.raises(h.ParameterError):
            h.make_power_family(1.8, 0.8, 0.8, 1.0, 1.2, 0.6, 3.0)
        with pytest.raises(h.ParameterError):
            h.make_constant_model(1.0, 0.5, 1.5)


class TestTableModel:
    def test_round_trips_through_interpolation(self):
        x = np.linspace(0, 1, 11)
        m = h.make_table_model(x, 2.0 - x, x, 0.5 * x, 6.0)
        assert m.f(0.35) == pytest.approx(1.65)
        assert m.g(0.35) == pytest.approx(0.175)

    def test_rejects_noncovering_grid(self):
        x = np.linspace(0.1, 1.0, 10)
        with pytest.raises(h.GridError):
            h.make_table_model(x, 2.0 - x, x, 0.5 * x, 6.0)

    def test_rejects_nonmonotone_table(self):
        x = np.linspace(0, 1, 11)
        f_vals = 2.0 - x
        f_vals[5] += 0.5  # bump breaks nonincreasing f
        with pytest.raises(h.ShapeError):
            h.make_table_model(x, f_vals, x, 0.5 * x, 6.0)

    def test_rejects_dominated_table(self):
        x = np.linspace(0, 1, 11)
        with pytest.raises(h.ParameterError):
            h.make_table_model(x, 2.0 - x, x, 0.5 * x, 2.0)


class TestValidation:
    def test_analytic_families_pass(self, power_model, linear_model, constant_model):
        for m in (power_model, linear_model, constant_model):
            assert h.validate_model(m).passed

    def test_reports_convexity_violation(self):
        m = h.ExternalityModel(
            f=lambda x: 2.0 - np.square(np.asarray(x, float)),  # concave f
            g=lambda y: 0.5 * np.asarray(y, float),
            R_L=6.0, family="custom")
        report = h.validate_model(m)
        assert not report.passed
        assert any(c.name == "f_convex" for c in report.failures())

    def test_g_derivative_analytic_vs_numeric(self, power_model):
        y = np.array([0.2, 0.5, 0.9])
        analytic = h.g_derivative(power_model, y)
        stripped = h.ExternalityModel(f=power_model.f, g=power_model.g,
                                      R_L=power_model.R_L, family="custom")
        numeric = h.g_derivative(stripped, y)
        assert np.allclose(analytic, numeric, atol=1e-5)
