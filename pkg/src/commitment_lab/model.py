"""Economic primitives shared by the solver, the two-period oracle, and the simulator.

Conventions used throughout the package:

* spouses are indexed 0 and 1 (arrays of length 2);
* money is measured in units of average annual household earnings, hours in
  raw hours per year;
* a model period is one survey wave.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "Preferences",
    "TaxSchedule",
    "WageProcess",
    "FactorProcess",
    "GridSpec",
    "SimulationSpec",
    "ModelConfig",
    "ConfigError",
    "period_utility",
    "marginal_utility_consumption",
    "marginal_utility_hours",
    "tax_net_income",
    "tax_marginal_net",
]


class ConfigError(ValueError):
    """Raised when a configuration violates a model invariant."""


def _pair(x, name: str) -> tuple[float, float]:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size == 1:
        arr = np.repeat(arr, 2)
    if arr.size != 2:
        raise ConfigError(f"{name} must be a scalar or a pair, got {x!r}")
    return float(arr[0]), float(arr[1])


@dataclass(frozen=True)
class Preferences:
    """CRRA-separable flow utility with demographic scale shifters.

    Curvature over consumption is ``gamma``; ``phi`` is the labor-disutility
    curvature (equal to the Frisch elasticity when ``coupling`` is zero) and
    ``psi`` scales the disutility of hours.  ``coupling`` adds a bilinear
    consumption-hours interaction so consumption and hours need not be
    separable.  ``pi_q``/``pi_h`` map the shifter vector onto consumption and
    hours scales.  ``single_shift`` is the additive utility difference of
    living alone.
    """

    gamma: tuple[float, float] = (1.0, 1.0)
    phi: tuple[float, float] = (0.5, 0.5)
    psi: tuple[float, float] = (1e-9, 1e-9)
    coupling: tuple[float, float] = (0.0, 0.0)
    pi_q: tuple[tuple[float, ...], tuple[float, ...]] = ((0.0,), (0.0,))
    pi_h: tuple[tuple[float, ...], tuple[float, ...]] = ((0.0,), (0.0,))
    beta: float = 0.92
    single_shift: tuple[float, float] = (0.0, 0.0)
    consumption: str = "joint"  # "joint" (public good) or "private" (optimal split)

    def __post_init__(self):
        object.__setattr__(self, "gamma", _pair(self.gamma, "gamma"))
        object.__setattr__(self, "phi", _pair(self.phi, "phi"))
        object.__setattr__(self, "psi", _pair(self.psi, "psi"))
        object.__setattr__(self, "coupling", _pair(self.coupling, "coupling"))
        object.__setattr__(self, "single_shift", _pair(self.single_shift, "single_shift"))
        if any(g <= 0 for g in self.gamma):
            raise ConfigError("gamma must be positive")
        if any(p <= 0 for p in self.phi):
            raise ConfigError("phi must be positive")
        if any(p < 0 for p in self.psi):
            raise ConfigError("psi must be non-negative")
        if not (0.0 < self.beta <= 1.0):
            raise ConfigError("beta must lie in (0, 1]")
        if self.consumption not in ("joint", "private"):
            raise ConfigError("consumption must be 'joint' or 'private'")
        if self.consumption == "private" and self.gamma[0] != self.gamma[1]:
            raise ConfigError("private consumption mode requires a common gamma")

    def scales(self, spouse: int, xi: Sequence[float] | None):
        """Demographic scale factors exp(-pi'xi) for consumption and hours."""
        if xi is None:
            return 1.0, 1.0
        xi = np.asarray(xi, dtype=float)
        eq = float(np.exp(-np.dot(self.pi_q[spouse][: xi.size], xi)))
        eh = float(np.exp(-np.dot(self.pi_h[spouse][: xi.size], xi)))
        return eq, eh


def _crra(x, gamma):
    x = np.asarray(x, dtype=float)
    if gamma == 1.0:
        return np.log(x)
    return x ** (1.0 - gamma) / (1.0 - gamma)


def period_utility(prefs: Preferences, spouse: int, q, h, xi=None):
    """Flow utility of one spouse from consumption ``q`` and hours ``h``.

    ``q`` must be strictly positive and ``h`` non-negative; violations raise
    a domain error.  Increasing in q, decreasing in h for h > 0.
    """
    q = np.asarray(q, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(q <= 0):
        raise ValueError("consumption must be strictly positive")
    if np.any(h < 0):
        raise ValueError("hours must be non-negative")
    eq, eh = prefs.scales(spouse, xi)
    qd = q * eq
    hd = h * eh
    gamma = prefs.gamma[spouse]
    phi = prefs.phi[spouse]
    psi = prefs.psi[spouse]
    c = prefs.coupling[spouse]
    u = _crra(qd, gamma) - psi * hd ** (1.0 + 1.0 / phi) / (1.0 + 1.0 / phi)
    if c != 0.0:
        u = u - c * qd * hd
    return u if u.shape else float(u)


def marginal_utility_consumption(prefs: Preferences, spouse: int, q, h, xi=None):
    q = np.asarray(q, dtype=float)
    h = np.asarray(h, dtype=float)
    eq, eh = prefs.scales(spouse, xi)
    gamma = prefs.gamma[spouse]
    out = eq * (q * eq) ** (-gamma)
    c = prefs.coupling[spouse]
    if c != 0.0:
        out = out - c * eq * (h * eh)
    return out if np.shape(out) else float(out)


def marginal_utility_hours(prefs: Preferences, spouse: int, q, h, xi=None):
    """Analytic derivative of :func:`period_utility` with respect to hours."""
    q = np.asarray(q, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(q <= 0):
        raise ValueError("consumption must be strictly positive")
    if np.any(h < 0):
        raise ValueError("hours must be non-negative")
    eq, eh = prefs.scales(spouse, xi)
    phi = prefs.phi[spouse]
    psi = prefs.psi[spouse]
    c = prefs.coupling[spouse]
    out = -psi * eh * (h * eh) ** (1.0 / phi)
    if c != 0.0:
        out = out - c * eh * (q * eq)
    return out if np.shape(out) else float(out)


@dataclass(frozen=True)
class TaxSchedule:
    """Net income schedule net(y) = (1 - chi_t) * y^(1 - kappa_t).

    ``chi`` and ``kappa`` may be scalars or per-period sequences; kappa = 0
    gives a proportional system.
    """

    chi: tuple[float, ...] = (0.25,)
    kappa: tuple[float, ...] = (0.185,)

    def __post_init__(self):
        chi = tuple(float(c) for c in np.atleast_1d(np.asarray(self.chi, dtype=float)))
        kappa = tuple(float(k) for k in np.atleast_1d(np.asarray(self.kappa, dtype=float)))
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "kappa", kappa)
        if any(c >= 1.0 for c in chi):
            raise ConfigError("chi must be < 1 so net income is increasing")
        if any(k < 0 or k >= 1.0 for k in kappa):
            raise ConfigError("kappa must lie in [0, 1)")

    def at(self, t: int) -> tuple[float, float]:
        chi = self.chi[min(t, len(self.chi) - 1)]
        kappa = self.kappa[min(t, len(self.kappa) - 1)]
        return chi, kappa


def tax_net_income(tax: TaxSchedule, t: int, y):
    """Disposable income for gross earnings ``y`` >= 0 in period ``t``."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("gross earnings must be non-negative")
    chi, kappa = tax.at(t)
    out = (1.0 - chi) * y ** (1.0 - kappa)
    return out if out.shape else float(out)


def tax_marginal_net(tax: TaxSchedule, t: int, y):
    """d net / d y, used in the hours first-order condition."""
    y = np.asarray(y, dtype=float)
    chi, kappa = tax.at(t)
    out = (1.0 - chi) * (1.0 - kappa) * y ** (-kappa)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class WageProcess:
    """Per-spouse log-wage law: deterministic age profile plus an AR(1) state.

    log w_jt = profile_j(age_jt) + x_jt with x persistent at ``rho`` and
    innovation s.d. ``sigma``.  ``corr`` correlates the spouses' innovations.
    ``n_states`` Markov points per spouse discretize x.  ``log_wage_path``,
    when given, overrides the polynomial profile with explicit per-period
    log-wage levels (used for deterministic economies).
    """

    profile_const: tuple[float, float] = (0.0, 0.0)
    profile_age: tuple[float, float] = (0.0, 0.0)
    profile_age2: tuple[float, float] = (0.0, 0.0)
    rho: float = 0.95
    sigma: tuple[float, float] = (0.2, 0.2)
    corr: float = 0.0
    n_states: int = 5
    log_wage_path: tuple[tuple[float, ...], tuple[float, ...]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "profile_const", _pair(self.profile_const, "profile_const"))
        object.__setattr__(self, "profile_age", _pair(self.profile_age, "profile_age"))
        object.__setattr__(self, "profile_age2", _pair(self.profile_age2, "profile_age2"))
        object.__setattr__(self, "sigma", _pair(self.sigma, "sigma"))
        if not (-1.0 < self.rho <= 1.0):
            raise ConfigError("wage persistence must lie in (-1, 1]")
        if not (-1.0 < self.corr < 1.0):
            raise ConfigError("cross-spouse innovation correlation must lie in (-1, 1)")
        if self.n_states < 1:
            raise ConfigError("need at least one wage state per spouse")
        if self.log_wage_path is not None:
            path = tuple(tuple(float(v) for v in p) for p in self.log_wage_path)
            object.__setattr__(self, "log_wage_path", path)

    def profile(self, spouse: int, t: int, age: float) -> float:
        """Deterministic component of log wage at period t."""
        if self.log_wage_path is not None:
            return self.log_wage_path[spouse][min(t, len(self.log_wage_path[spouse]) - 1)]
        return (
            self.profile_const[spouse]
            + self.profile_age[spouse] * age
            + self.profile_age2[spouse] * age ** 2
        )


@dataclass(frozen=True)
class FactorProcess:
    """Assignable outside-option shifters.

    Each spouse carries a persistent factor x_z (AR(1), discretized on
    ``n_states`` points) that enters the own singles' flow utility additively
    with weight ``utility_weight``; the observable factor column is
    exp(x_z) so its log growth is the utility-relevant innovation.  The
    initial factors are two independent Bernoulli(``theta_prob``) indicators;
    spouse j's indicator shifts the log of j's initial weight by
    ``theta_weight_shift``.
    """

    rho: float = 0.9
    sigma: tuple[float, float] = (0.1, 0.1)
    n_states: int = 3
    utility_weight: float = 1.0
    theta_prob: float = 0.5
    theta_weight_shift: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "sigma", _pair(self.sigma, "sigma"))
        if not (-1.0 < self.rho <= 1.0):
            raise ConfigError("factor persistence must lie in (-1, 1]")
        if self.n_states < 1:
            raise ConfigError("need at least one factor state per spouse")
        if not (0.0 <= self.theta_prob <= 1.0):
            raise ConfigError("theta_prob must lie in [0, 1]")

    def initial_weight(self, theta0: Sequence[float]) -> float:
        """Spouse-0 Pareto weight implied by the initial factor draw."""
        m = np.exp(self.theta_weight_shift * np.asarray(theta0, dtype=float))
        return float(m[0] / (m[0] + m[1]))


@dataclass(frozen=True)
class GridSpec:
    n_assets: int = 30
    a_min: float = 0.05
    a_max: float = 8.0
    n_weights: int = 25
    weight_lo: float = 0.03
    weight_hi: float = 0.97
    horizon: int = 8
    h_max: float = 4200.0
    interp: str = "cubic"  # continuation interpolation over assets

    def __post_init__(self):
        if self.n_assets < 1 or (self.n_assets > 1 and self.a_max <= self.a_min):
            raise ConfigError("asset grid must be increasing")
        if self.a_min < 0:
            raise ConfigError("assets must be non-negative")
        if not (0.0 < self.weight_lo < self.weight_hi < 1.0):
            raise ConfigError("weight grid must lie strictly inside (0, 1)")
        if self.horizon < 1:
            raise ConfigError("horizon must be at least one period")
        if self.interp not in ("linear", "cubic"):
            raise ConfigError("interp must be 'linear' or 'cubic'")

    def asset_grid(self) -> np.ndarray:
        if self.n_assets == 1:
            return np.array([self.a_min])
        # log-spaced so curvature near the borrowing floor is resolved
        g = np.geomspace(1.0, 1.0 + (self.a_max - self.a_min), self.n_assets)
        return self.a_min + (g - 1.0)

    def weight_grid(self) -> np.ndarray:
        return np.linspace(self.weight_lo, self.weight_hi, self.n_weights)


@dataclass(frozen=True)
class SimulationSpec:
    interest_rate: float = 0.06
    asset_split: float = 0.5
    initial_assets_mean: float = 0.8
    initial_assets_sd: float = 0.4
    age0: tuple[float, float] = (30.0, 28.0)
    years_per_period: float = 2.0
    n_households: int = 2000
    seed: int = 20260810

    def __post_init__(self):
        object.__setattr__(self, "age0", _pair(self.age0, "age0"))
        if not (0.0 < self.asset_split < 1.0):
            raise ConfigError("asset_split must lie in (0, 1)")
        if self.initial_assets_mean <= 0:
            raise ConfigError("initial assets must be positive")


@dataclass(frozen=True)
class ModelConfig:
    """Everything needed to solve and simulate one economy."""

    preferences: Preferences = field(default_factory=Preferences)
    tax: TaxSchedule = field(default_factory=TaxSchedule)
    wages: WageProcess = field(default_factory=WageProcess)
    factors: FactorProcess = field(default_factory=FactorProcess)
    grids: GridSpec = field(default_factory=GridSpec)
    simulation: SimulationSpec = field(default_factory=SimulationSpec)

    def replace(self, **kwargs) -> "ModelConfig":
        return replace(self, **kwargs)
