"""Discretization of the stochastic processes and Markov-chain utilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import multivariate_normal, norm

from .model import ConfigError, FactorProcess, ModelConfig, WageProcess

__all__ = [
    "rouwenhorst",
    "MarkovChain",
    "joint_chain",
    "wage_chains",
    "factor_chains",
    "wage_transition",
]


def rouwenhorst(n: int, rho: float, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Discretize a zero-mean AR(1) with persistence rho and innovation s.d. sigma.

    Returns (grid, transition).  The stationary distribution is binomial, so
    the unconditional variance sigma^2/(1-rho^2) is matched exactly.
    """
    if n == 1:
        return np.zeros(1), np.ones((1, 1))
    if sigma == 0.0:
        return np.zeros(n), np.eye(n)
    p = (1.0 + rho) / 2.0
    trans = np.array([[p, 1.0 - p], [1.0 - p, p]])
    for m in range(3, n + 1):
        prev = trans
        trans = np.zeros((m, m))
        trans[:-1, :-1] += p * prev
        trans[:-1, 1:] += (1.0 - p) * prev
        trans[1:, :-1] += (1.0 - p) * prev
        trans[1:, 1:] += p * prev
        trans[1:-1, :] /= 2.0
    span = sigma / np.sqrt(1.0 - rho ** 2) * np.sqrt(n - 1.0)
    grid = np.linspace(-span, span, n)
    return grid, trans


@dataclass(frozen=True)
class MarkovChain:
    """Finite chain over joint (spouse-0, spouse-1) states.

    ``values`` has shape (n_states, 2): per-spouse latent levels at each joint
    state.  Rows of ``transition`` sum to one.
    """

    values: np.ndarray
    transition: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def stationary(self) -> np.ndarray:
        """Left eigenvector for eigenvalue one, normalized to a distribution."""
        w, v = np.linalg.eig(self.transition.T)
        k = int(np.argmin(np.abs(w - 1.0)))
        pi = np.real(v[:, k])
        pi = np.abs(pi)
        return pi / pi.sum()

    def simulate(self, n_steps: int, rng: np.random.Generator, start: int | None = None) -> np.ndarray:
        cum = np.cumsum(self.transition, axis=1)
        if start is None:
            start = int(rng.choice(self.n, p=self.stationary()))
        out = np.empty(n_steps, dtype=np.int64)
        out[0] = start
        u = rng.random(n_steps)
        for t in range(1, n_steps):
            out[t] = np.searchsorted(cum[out[t - 1]], u[t])
        return out

    def step_many(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Advance a vector of states one period (used by the panel simulator)."""
        cum = np.cumsum(self.transition, axis=1)
        u = rng.random(states.shape[0])
        rows = cum[states]
        return (u[:, None] > rows).sum(axis=1).astype(np.int64)


def _copula_rectangle_probs(cdf1: np.ndarray, cdf2: np.ndarray, corr: float) -> np.ndarray:
    """Joint cell probabilities of a Gaussian copula over two marginal CDF partitions."""
    z1 = norm.ppf(np.clip(cdf1, 1e-12, 1 - 1e-12))
    z2 = norm.ppf(np.clip(cdf2, 1e-12, 1 - 1e-12))
    z1 = np.concatenate(([-np.inf], z1[:-1], [np.inf]))
    z2 = np.concatenate(([-np.inf], z2[:-1], [np.inf]))
    mvn = multivariate_normal(mean=[0.0, 0.0], cov=[[1.0, corr], [corr, 1.0]])

    def Phi2(a, b):
        if np.isinf(a) and a < 0 or np.isinf(b) and b < 0:
            return 0.0
        aa = min(a, 8.0) if not np.isinf(a) else 8.0
        bb = min(b, 8.0) if not np.isinf(b) else 8.0
        return mvn.cdf([aa, bb])

    n1, n2 = len(z1) - 1, len(z2) - 1
    out = np.zeros((n1, n2))
    for i in range(n1):
        for k in range(n2):
            out[i, k] = (
                Phi2(z1[i + 1], z2[k + 1])
                - Phi2(z1[i], z2[k + 1])
                - Phi2(z1[i + 1], z2[k])
                + Phi2(z1[i], z2[k])
            )
    out = np.clip(out, 0.0, None)
    s = out.sum()
    return out / s if s > 0 else out


def joint_chain(
    grids: tuple[np.ndarray, np.ndarray],
    transitions: tuple[np.ndarray, np.ndarray],
    corr: float = 0.0,
) -> MarkovChain:
    """Couple two per-spouse chains into one joint chain.

    With ``corr`` = 0 the joint transition is the Kronecker product; otherwise
    the two conditional next-state distributions are coupled through a
    Gaussian copula with parameter ``corr``.
    """
    g0, g1 = grids
    t0, t1 = transitions
    n0, n1 = len(g0), len(g1)
    values = np.column_stack([np.repeat(g0, n1), np.tile(g1, n0)])
    if corr == 0.0 or n0 == 1 or n1 == 1:
        trans = np.kron(t0, t1)
    else:
        trans = np.zeros((n0 * n1, n0 * n1))
        for i in range(n0):
            for k in range(n1):
                joint = _copula_rectangle_probs(np.cumsum(t0[i]), np.cumsum(t1[k]), corr)
                trans[i * n1 + k] = joint.reshape(-1)
    return MarkovChain(values=values, transition=trans)


def wage_chains(proc: WageProcess) -> tuple[tuple[np.ndarray, np.ndarray], MarkovChain]:
    g0, t0 = rouwenhorst(proc.n_states, proc.rho, proc.sigma[0])
    g1, t1 = rouwenhorst(proc.n_states, proc.rho, proc.sigma[1])
    return ((g0, g1), joint_chain((g0, g1), (t0, t1), proc.corr))


def factor_chains(proc: FactorProcess) -> tuple[tuple[np.ndarray, np.ndarray], MarkovChain]:
    g0, t0 = rouwenhorst(proc.n_states, proc.rho, proc.sigma[0])
    g1, t1 = rouwenhorst(proc.n_states, proc.rho, proc.sigma[1])
    return ((g0, g1), joint_chain((g0, g1), (t0, t1), 0.0))


def wage_levels(cfg: ModelConfig, t: int, chain: MarkovChain) -> np.ndarray:
    """Wage levels (n_joint_states, 2) at period t, profile included."""
    ages = ages_at(cfg, t)
    prof = np.array([cfg.wages.profile(j, t, ages[j]) for j in range(2)])
    return np.exp(prof[None, :] + chain.values)


def ages_at(cfg: ModelConfig, t: int) -> np.ndarray:
    a0 = np.asarray(cfg.simulation.age0)
    return a0 + t * cfg.simulation.years_per_period


def wage_transition(
    proc: WageProcess, spouse: int, state: int, rng: np.random.Generator
) -> tuple[int, float, float]:
    """One step of the own-spouse wage chain.

    Returns (next_state, deterministic part of dlog w, realized shock), where
    the split matches the estimation convention: the shock is the grid-value
    change and the deterministic part is the profile growth (zero here since
    the profile is handled outside the chain).
    """
    grid, trans = rouwenhorst(proc.n_states, proc.rho, proc.sigma[spouse])
    if not (0 <= state < len(grid)):
        raise IndexError(f"state {state} outside chain of size {len(grid)}")
    nxt = int(rng.choice(len(grid), p=trans[state]))
    shock = float(grid[nxt] - grid[state])
    return nxt, 0.0, shock
