"""Lifecycle collective-household simulator and commitment-regime test harness."""

from .model import (
    ConfigError,
    FactorProcess,
    GridSpec,
    ModelConfig,
    Preferences,
    SimulationSpec,
    TaxSchedule,
    WageProcess,
    marginal_utility_hours,
    period_utility,
    tax_net_income,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FactorProcess",
    "GridSpec",
    "ModelConfig",
    "Preferences",
    "SimulationSpec",
    "TaxSchedule",
    "WageProcess",
    "marginal_utility_hours",
    "period_utility",
    "tax_net_income",
    "__version__",
]
