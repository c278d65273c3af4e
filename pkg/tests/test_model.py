import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commitment_lab.model import (
    ConfigError,
    Preferences,
    TaxSchedule,
    marginal_utility_consumption,
    marginal_utility_hours,
    period_utility,
    tax_net_income,
)

RNG = np.random.default_rng(42)


def fd(f, x, eps=1e-6):
    return (f(x + eps) - f(x - eps)) / (2 * eps)


class TestPeriodUtility:
    def test_crra_at_unit_consumption(self):
        prefs = Preferences(gamma=2.0, psi=0.0)
        assert period_utility(prefs, 0, q=1.0, h=0.0) == pytest.approx(-1.0)

    def test_log_limit(self):
        prefs = Preferences(gamma=1.0, psi=0.0)
        assert period_utility(prefs, 0, q=math.e, h=0.0) == pytest.approx(1.0)

    def test_domain_errors(self):
        prefs = Preferences()
        with pytest.raises(ValueError):
            period_utility(prefs, 0, q=0.0, h=1.0)
        with pytest.raises(ValueError):
            period_utility(prefs, 0, q=1.0, h=-1.0)
        with pytest.raises(ValueError):
            marginal_utility_hours(prefs, 1, q=-2.0, h=1.0)

    def test_gradients_match_finite_differences(self):
        # both spouses, both separable and coupled preferences
        for coupling in (0.0, 0.05):
            prefs = Preferences(
                gamma=(1.5, 2.0), phi=(0.55, 0.33), psi=(0.8, 1.2),
                coupling=coupling, pi_q=((0.1,), (0.05,)), pi_h=((0.02,), (0.03,)),
            )
            xi = [0.4]
            for _ in range(200):
                q = float(RNG.uniform(0.2, 5.0))
                h = float(RNG.uniform(0.2, 3.0))
                for j in (0, 1):
                    du_q = fd(lambda x: period_utility(prefs, j, x, h, xi), q, eps=1e-6 * q)
                    du_h = fd(lambda x: period_utility(prefs, j, q, x, xi), h, eps=1e-6 * h)
                    assert marginal_utility_consumption(prefs, j, q, h, xi) == pytest.approx(du_q, rel=1e-6)
                    assert marginal_utility_hours(prefs, j, q, h, xi) == pytest.approx(du_h, rel=1e-6)

    def test_regularity_at_random_interior_points(self):
        # u_q > 0, u_h < 0, u_qq < 0, u_hh < 0 on a broad interior sample
        prefs = Preferences(gamma=(1.5, 2.0), phi=(0.55, 0.33), psi=(0.8, 1.2), coupling=0.002)
        q = RNG.uniform(0.3, 6.0, size=10_000)
        h = RNG.uniform(0.2, 3.0, size=10_000)
        eps = 1e-5
        for j in (0, 1):
            uq = marginal_utility_consumption(prefs, j, q, h)
            uh = marginal_utility_hours(prefs, j, q, h)
            assert np.all(uq > 0)
            assert np.all(uh < 0)
            uqq = (marginal_utility_consumption(prefs, j, q + eps, h)
                   - marginal_utility_consumption(prefs, j, q - eps, h)) / (2 * eps)
            uhh = (marginal_utility_hours(prefs, j, q, h + eps)
                   - marginal_utility_hours(prefs, j, q, h - eps)) / (2 * eps)
            assert np.all(uqq < 0)
            assert np.all(uhh < 0)

    def test_no_labor_disutility_gives_zero_hours_margin(self):
        prefs = Preferences(psi=0.0)
        h = RNG.uniform(0.0, 3.0, size=50)
        assert np.all(marginal_utility_hours(prefs, 0, 1.0, h) == 0.0)

    def test_hours_margin_negative_when_working(self):
        prefs = Preferences(psi=(0.5, 0.5))
        assert marginal_utility_hours(prefs, 0, 1.0, 0.7) < 0

    @given(st.floats(0.2, 8.0), st.floats(0.05, 3.0))
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_consumption_and_hours(self, q, h):
        prefs = Preferences(gamma=(1.2, 1.2), phi=(0.5, 0.5), psi=(1.0, 1.0))
        up = period_utility(prefs, 0, q * 1.01, h)
        down = period_utility(prefs, 0, q, h)
        assert up > down
        assert period_utility(prefs, 0, q, h * 1.01) < down

    def test_invalid_preferences_rejected(self):
        with pytest.raises(ConfigError):
            Preferences(gamma=-1.0)
        with pytest.raises(ConfigError):
            Preferences(beta=1.5)
        with pytest.raises(ConfigError):
            Preferences(consumption="private", gamma=(1.0, 2.0))


class TestTaxSchedule:
    def test_no_tax_identity(self):
        tax = TaxSchedule(chi=0.0, kappa=0.0)
        assert tax_net_income(tax, 0, 50_000.0) == pytest.approx(50_000.0)

    def test_proportional(self):
        tax = TaxSchedule(chi=0.3, kappa=0.0)
        assert tax_net_income(tax, 0, 50_000.0) == pytest.approx(35_000.0)

    def test_progressive_formula(self):
        # independent evaluation: (1 - 0.1) * 50000^(1 - 0.185) = 6079.99...
        expected = 0.9 * math.exp(0.815 * math.log(50_000.0))
        tax = TaxSchedule(chi=0.1, kappa=0.185)
        assert tax_net_income(tax, 0, 50_000.0) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(6079.99, abs=0.01)

    def test_monotone_in_gross(self):
        tax = TaxSchedule(chi=0.2, kappa=0.185)
        y = np.linspace(0.01, 10.0, 500)
        net = tax_net_income(tax, 0, y)
        assert np.all(np.diff(net) > 0)

    def test_weakly_concave_when_progressive(self):
        tax = TaxSchedule(chi=0.1, kappa=0.4)
        y = np.linspace(0.5, 20.0, 400)
        net = tax_net_income(tax, 0, y)
        second = np.diff(net, 2)
        assert np.all(second <= 1e-12)

    def test_per_period_paths(self):
        tax = TaxSchedule(chi=(0.1, 0.2), kappa=(0.0, 0.1))
        assert tax_net_income(tax, 0, 1.0) == pytest.approx(0.9)
        assert tax_net_income(tax, 1, 1.0) == pytest.approx(0.8)
        assert tax_net_income(tax, 5, 1.0) == pytest.approx(0.8)  # last value persists

    def test_chi_above_one_rejected(self):
        with pytest.raises(ConfigError):
            TaxSchedule(chi=1.0)

    def test_negative_gross_rejected(self):
        with pytest.raises(ValueError):
            tax_net_income(TaxSchedule(), 0, -1.0)
