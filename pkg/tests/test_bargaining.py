import numpy as np
import pytest

import hysim as h
from conftest import random_model


class TestPureInfoOptimum:
    def test_constant_g_closed_form(self, constant_model):
        # max 0.5 eta (1 - eta): eta = 1/2, value 1/8, price 1/4
        eta_a, p_a, value = h.pure_info_optimum(constant_model)
        assert eta_a == pytest.approx(0.5, abs=1e-6)
        assert p_a == pytest.approx(0.25, abs=1e-6)
        assert value == pytest.approx(0.125, abs=1e-9)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            m = random_model(rng)
            _, _, value = h.pure_info_optimum(m)
            grid = np.linspace(0, 1, 200001)
            brute = float(np.max((1 - grid) * np.asarray(m.g(grid), float) * grid))
            assert value == pytest.approx(brute, abs=1e-7)

    def test_zero_g_worthless(self):
        m = h.make_constant_model(1.0, 0.0, 6.0)
        _, _, value = h.pure_info_optimum(m)
        assert value == 0.0


class TestDisagreement:
    def test_licensee_gets_nothing(self, constant_model):
        d = h.disagreement_points(constant_model)
        assert d.u_sl == 0.0
        assert d.u_db == pytest.approx(0.125, abs=1e-9)


class TestNashObjective:
    def test_zero_g_symmetric_split(self):
        # without an information product the bargain splits leasing revenue:
        # the objective factorizes into delta(1 - delta) times a constant
        m = h.make_constant_model(1.0, 0.0, 6.0)
        out = h.solve_bargaining(m, grid_n=41)
        assert out.delta_star == pytest.approx(0.5, abs=1e-4)
        assert out.feasible

    def test_delta_star_beats_audit_grid(self, constant_model):
        out = h.solve_bargaining(constant_model, grid_n=41)
        d = out.disagreement
        audit = np.linspace(0.0, 1.0 - 1e-9, 101)
        best_audit = max(h.nash_objective(constant_model, x, disagreement=d)
                         for x in audit)
        assert out.nash_product >= best_audit - 1e-6

    def test_pairing_switch_changes_value(self, constant_model):
        own = h.nash_objective(constant_model, 0.4)
        printed = h.nash_objective(constant_model, 0.4, pairing="as_printed")
        assert own != pytest.approx(printed)

    def test_unknown_pairing(self, constant_model):
        with pytest.raises(ValueError):
            h.nash_objective(constant_model, 0.4, pairing="bogus")


class TestOutcome:
    def test_participation_constraints_hold(self, power_model):
        out = h.solve_bargaining(power_model, grid_n=21)
        assert out.feasible
        assert out.payoffs.u_db >= out.disagreement.u_db - 1e-6
        assert out.payoffs.u_sl >= -1e-9

    def test_summary_scalars(self, power_model):
        out = h.solve_bargaining(power_model, grid_n=21)
        eq = out.equilibrium
        assert out.w_equiv == pytest.approx(out.delta_star * eq.shares.eta_l)
        assert out.revenue_transfer == pytest.approx(
            out.delta_star * eq.prices.p_l * eq.shares.eta_l)
        assert h.equivalent_wholesale_price(out.delta_star, eq) == out.w_equiv
