"""Closed-form two-period benchmark: log utility, no savings, exogenous incomes.

Each spouse consumes a share of total income y_t; the three regimes differ
only in how the expenditure shares respond to the income draws.  The module is
independent of the dynamic-programming solver and serves as its ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "TwoPeriodEconomy",
    "default_outside_value",
    "fc_shares",
    "lc_shares",
    "nc_shares",
    "nash_share",
]

# outside(spouse, own_income) -> lifetime reservation utility
OutsideMap = Callable[[int, float], float]


def default_outside_value(z: float, scale: float = 1.0) -> float:
    """Lifetime reservation utility 2*ln(scale*z): both-period log consumption at scale*z."""
    return 2.0 * np.log(scale * z)


def _never_binding(spouse: int, z: float) -> float:
    return -np.inf


@dataclass(frozen=True)
class TwoPeriodEconomy:
    """Incomes ``incomes[j][t]`` (> 0), initial weights summing to one, outside-value map.

    ``outside(j, z)`` returns spouse j's lifetime reservation utility given
    j's own current income realization z.
    """

    incomes: tuple[tuple[float, float], tuple[float, float]]
    mu: tuple[float, float] = (0.5, 0.5)
    outside: OutsideMap = field(default=_never_binding)

    def __post_init__(self):
        z = np.asarray(self.incomes, dtype=float)
        if z.shape != (2, 2) or np.any(z <= 0):
            raise ValueError("incomes must be a positive 2x2 (spouse, period) array")
        mu = np.asarray(self.mu, dtype=float)
        if np.any(mu <= 0) or np.any(mu >= 1) or abs(mu.sum() - 1.0) > 1e-12:
            raise ValueError("weights must lie in (0,1) and sum to one")

    def total_income(self, t: int) -> float:
        return float(self.incomes[0][t] + self.incomes[1][t])


def fc_shares(econ: TwoPeriodEconomy) -> np.ndarray:
    """Expenditure shares under a permanently fixed weight: (2 spouses, 2 periods)."""
    mu = np.asarray(econ.mu, dtype=float)
    return np.repeat((mu / mu.sum())[:, None], 2, axis=1)


@dataclass(frozen=True)
class LcSolution:
    shares: np.ndarray  # (2, 2)
    binding_spouse: int | None
    nu: float
    divorce: bool = False


def _lifetime_log_value(share: float, econ: TwoPeriodEconomy) -> float:
    return np.log(share * econ.total_income(0)) + np.log(share * econ.total_income(1))


def lc_shares(econ: TwoPeriodEconomy) -> LcSolution:
    """Shares when first-period participation can bind (second-period outside options very low).

    If the fixed-weight solution satisfies both first-period constraints it is
    returned with nu = 0.  When spouse j's constraint is violated, j's weight
    rises by the smallest nu making the lifetime value equal the outside
    value; shares become ((mu_j + nu)/(1 + nu), mu_-j/(1 + nu)) in both
    periods.
    """
    base = fc_shares(econ)
    outside = np.array([econ.outside(j, econ.incomes[j][0]) for j in range(2)])
    inside = np.array([_lifetime_log_value(base[j, 0], econ) for j in range(2)])
    violated = inside < outside - 1e-12
    if not violated.any():
        return LcSolution(shares=base, binding_spouse=None, nu=0.0)
    if violated.all():
        return LcSolution(shares=base, binding_spouse=None, nu=np.nan, divorce=True)
    j = int(np.argmax(violated))
    # smallest share for j satisfying ln(s*y1) + ln(s*y2) = outside_j
    target = np.exp((outside[j] - np.log(econ.total_income(0)) - np.log(econ.total_income(1))) / 2.0)
    if target >= 1.0:
        return LcSolution(shares=base, binding_spouse=None, nu=np.nan, divorce=True)
    nu = (target - econ.mu[j]) / (1.0 - target)
    other = 1 - j
    partner_share = econ.mu[other] / (1.0 + nu)
    if _lifetime_log_value(partner_share, econ) < econ.outside(other, econ.incomes[other][0]) - 1e-12:
        return LcSolution(shares=base, binding_spouse=None, nu=np.nan, divorce=True)
    shares = np.empty((2, 2))
    shares[j, :] = target
    shares[other, :] = partner_share
    return LcSolution(shares=shares, binding_spouse=j, nu=float(nu))


@dataclass(frozen=True)
class NcSolution:
    shares: np.ndarray  # (2, 2)
    divorce: bool = False


def nash_share(payoff: Callable[[float, int], float], threat: tuple[float, float]) -> float:
    """Spouse-0 share maximizing the symmetric Nash product.

    ``payoff(share_0, j)`` is spouse j's value when spouse 0 receives
    ``share_0`` of the pie.  Raises ValueError when no share gives both
    spouses positive surplus.
    """

    def neg_product(s: float) -> float:
        g0 = payoff(s, 0) - threat[0]
        g1 = payoff(s, 1) - threat[1]
        if g0 <= 0 or g1 <= 0:
            return 0.0
        return -np.log(g0) - np.log(g1)

    res = minimize_scalar(neg_product, bounds=(1e-9, 1 - 1e-9), method="bounded",
                          options={"xatol": 1e-13})
    s = float(res.x)
    if payoff(s, 0) - threat[0] <= 0 or payoff(s, 1) - threat[1] <= 0:
        raise ValueError("empty bargaining set")
    return s


def nc_shares(econ: TwoPeriodEconomy, bargaining_rule=nash_share) -> NcSolution:
    """Period-by-period bargaining: second-period outcome depends only on (y_2, outside values)."""
    shares = np.empty((2, 2))
    try:
        # period 2 (terminal): static Nash over period payoffs
        def payoff2(s0: float, j: int) -> float:
            own = s0 if j == 0 else 1.0 - s0
            return np.log(own * econ.total_income(1))

        threat2 = tuple(econ.outside(j, econ.incomes[j][1]) for j in range(2))
        s2 = bargaining_rule(payoff2, threat2)
        shares[:, 1] = (s2, 1.0 - s2)

        # period 1: lifetime values; period-2 outcome is not at stake today
        cont = tuple(np.log(shares[j, 1] * econ.total_income(1)) for j in range(2))

        def payoff1(s0: float, j: int) -> float:
            own = s0 if j == 0 else 1.0 - s0
            return np.log(own * econ.total_income(0)) + cont[j]

        threat1 = tuple(econ.outside(j, econ.incomes[j][0]) for j in range(2))
        s1 = bargaining_rule(payoff1, threat1)
        shares[:, 0] = (s1, 1.0 - s1)
    except ValueError:
        return NcSolution(shares=np.full((2, 2), np.nan), divorce=True)
    return NcSolution(shares=shares)
