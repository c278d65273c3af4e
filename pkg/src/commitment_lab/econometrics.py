"""Estimation kernel: clustered OLS, Wald tests, two-step GMM, delta method.

Everything here is generic linear-algebra machinery; the commitment test
builds on it but it knows nothing about the household model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, stats

__all__ = [
    "RegressionResult",
    "GmmResult",
    "RankError",
    "ols_cluster",
    "wald_test",
    "gmm_two_step",
    "delta_method",
]


class RankError(ValueError):
    """Design matrix is rank deficient; carries the offending column names."""

    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"collinear columns: {', '.join(map(str, self.columns))}")


@dataclass
class RegressionResult:
    names: list[str]
    coef: np.ndarray
    cov: np.ndarray
    n_obs: int
    n_clusters: int
    residuals: np.ndarray = field(repr=False)

    def se(self) -> np.ndarray:
        return np.sqrt(np.diag(self.cov))

    def __getitem__(self, name: str) -> float:
        return float(self.coef[self.names.index(name)])

    def to_dict(self) -> dict:
        se = self.se()
        return {
            "coefficients": {
                n: {"estimate": float(b), "se": float(s)}
                for n, b, s in zip(self.names, self.coef, se)
            },
            "n_obs": int(self.n_obs),
            "n_clusters": int(self.n_clusters),
        }


def _check_rank(X: np.ndarray, names: Sequence[str]) -> None:
    if X.shape[0] < X.shape[1]:
        raise RankError(names)
    diag = np.abs(np.diag(np.linalg.qr(X, mode="r")))
    scale = diag.max() if diag.size else 0.0
    if scale == 0.0 or np.any(diag < 1e-10 * scale):
        # pivoted QR points at the columns that break full rank
        import scipy.linalg as sla

        R, piv = sla.qr(X, mode="r", pivoting=True)[-2:]
        d = np.abs(np.diag(R))
        bad = piv[np.where(d < 1e-10 * (d.max() if d.size else 1.0))[0]]
        if bad.size == 0:
            bad = piv[-1:]
        raise RankError([names[k] for k in np.atleast_1d(bad)])


def ols_cluster(
    y: np.ndarray,
    X: np.ndarray,
    cluster_ids: np.ndarray,
    names: Sequence[str] | None = None,
) -> RegressionResult:
    """OLS with cluster-robust covariance.

    Covariance is (X'X)^-1 (sum_g X_g' u_g u_g' X_g) (X'X)^-1 scaled by the
    G/(G-1) small-cluster correction.  With every observation its own cluster
    this is the HC0 estimator times n/(n-1).
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if names is None:
        names = [f"x{i}" for i in range(k)]
    names = list(names)
    if len(names) != k:
        raise ValueError("names length must match the column count")
    if y.shape[0] != n:
        raise ValueError("y and X have different lengths")
    cluster_ids = np.asarray(cluster_ids)
    if cluster_ids.shape[0] != n:
        raise ValueError("cluster_ids length must match observations")
    _check_rank(X, names)

    XtX = X.T @ X
    beta = np.linalg.solve(XtX, X.T @ y)
    u = y - X @ beta

    codes, inverse = np.unique(cluster_ids, return_inverse=True)
    G = codes.size
    if G < 2:
        raise ValueError("need at least two clusters")
    # per-cluster score sums via bincount on each column product
    Xu = X * u[:, None]
    S = np.zeros((G, k))
    for j in range(k):
        S[:, j] = np.bincount(inverse, weights=Xu[:, j], minlength=G)
    meat = S.T @ S
    bread = np.linalg.inv(XtX)
    cov = bread @ meat @ bread * (G / (G - 1.0))
    return RegressionResult(names=names, coef=beta, cov=cov, n_obs=n, n_clusters=G, residuals=u)


@dataclass
class WaldResult:
    statistic: float
    dof: int
    p_value: float
    singular: bool = False


def wald_test(result, restrict: Sequence[str]) -> WaldResult:
    """Test that the named coefficients are jointly zero.

    Works on any result exposing ``names``, ``coef`` and ``cov``.  A singular
    restricted covariance falls back to the pseudo-inverse with a flag.
    """
    idx = []
    for name in restrict:
        if name not in result.names:
            raise KeyError(f"unknown coefficient {name!r}")
        idx.append(result.names.index(name))
    idx = np.asarray(idx, dtype=int)
    b = np.asarray(result.coef)[idx]
    V = np.asarray(result.cov)[np.ix_(idx, idx)]
    singular = False
    try:
        W = float(b @ np.linalg.solve(V, b))
        if not np.isfinite(W) or W < 0:
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        singular = True
        warnings.warn("restricted covariance singular; using pseudo-inverse")
        W = float(b @ np.linalg.pinv(V) @ b)
    dof = len(idx)
    p = float(stats.chi2.sf(W, dof)) if W > 0 else 1.0
    return WaldResult(statistic=W, dof=dof, p_value=p, singular=singular)


@dataclass
class GmmResult:
    names: list[str]
    coef: np.ndarray
    cov: np.ndarray
    objective: float
    converged: bool
    n_obs: int
    n_clusters: int
    moment_names: list[str] = field(default_factory=list)
    moment_values: np.ndarray | None = None
    first_step_objective: float = np.nan

    def se(self) -> np.ndarray:
        return np.sqrt(np.abs(np.diag(self.cov)))

    def __getitem__(self, name: str) -> float:
        return float(self.coef[self.names.index(name)])

    def to_dict(self) -> dict:
        se = self.se()
        return {
            "parameters": {
                n: {"estimate": float(b), "se": float(s)}
                for n, b, s in zip(self.names, self.coef, se)
            },
            "objective": float(self.objective),
            "converged": bool(self.converged),
            "n_obs": int(self.n_obs),
            "n_clusters": int(self.n_clusters),
        }


def _numerical_jacobian(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, rel=1e-6):
    f0 = f(x)
    J = np.zeros((f0.size, x.size))
    for i in range(x.size):
        h = rel * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        J[:, i] = (f(xp) - f(xm)) / (2 * h)
    return J


def gmm_two_step(
    moments: Callable[[np.ndarray], np.ndarray],
    init: np.ndarray,
    names: Sequence[str] | None = None,
    n_starts: int = 5,
    seed: int = 0,
    spread: float = 0.25,
    maxiter: int = 4000,
    gtol: float = 1e-7,
) -> GmmResult:
    """Two-step GMM with diagonal weighting.

    ``moments(params)`` returns a (n_clusters, n_moments) matrix of
    per-cluster moment contributions (already summed within cluster).  Step
    one minimizes the quadratic form under inverse-variance diagonal weights
    at ``init``; step two re-weights with the inverse diagonal of the
    first-step moment variance.  Each step runs a Nelder-Mead search followed
    by a BFGS polish; ``n_starts`` jittered restarts guard against local
    minima.  The covariance is the standard sandwich with a numerical
    Jacobian.
    """
    init = np.asarray(init, dtype=float).reshape(-1)
    p = init.size
    if names is None:
        names = [f"p{i}" for i in range(p)]
    names = list(names)
    g0 = moments(init)
    G, m = g0.shape
    if m < p:
        raise ValueError("need at least as many moments as parameters")

    def diag_weights(at: np.ndarray, include_mean: bool) -> np.ndarray:
        g = moments(at)
        v = g.var(axis=0, ddof=1)
        if include_mean:  # scale normalization when params are far from truth
            v = v + g.mean(axis=0) ** 2
        v = np.where(v > 1e-300, v, 1.0)
        return 1.0 / v

    def make_objective(w: np.ndarray):
        def Q(theta: np.ndarray) -> float:
            gbar = moments(theta).mean(axis=0)
            return float(gbar @ (w * gbar))

        return Q

    rng = np.random.default_rng(seed)

    def minimize_multistart(Q, x0):
        best = None
        starts = [x0] + [
            x0 * (1.0 + spread * rng.standard_normal(p)) + 1e-3 * rng.standard_normal(p)
            for _ in range(max(0, n_starts - 1))
        ]
        for s in starts:
            r = optimize.minimize(Q, s, method="Nelder-Mead",
                                  options={"maxiter": maxiter, "xatol": 1e-10, "fatol": 1e-14})
            r2 = optimize.minimize(Q, r.x, method="BFGS",
                                   options={"maxiter": 500, "gtol": gtol})
            cand = r2 if r2.fun <= r.fun else r
            if best is None or cand.fun < best.fun:
                best = cand
        return best

    w1 = diag_weights(init, include_mean=True)
    Q1 = make_objective(w1)
    step1 = minimize_multistart(Q1, init)

    w2 = diag_weights(step1.x, include_mean=False)
    Q2 = make_objective(w2)
    step2 = minimize_multistart(Q2, step1.x)

    theta = step2.x
    grad = optimize.approx_fprime(theta, Q2, 1e-7 * np.maximum(1.0, np.abs(theta)))
    converged = bool(np.isfinite(step2.fun)) and float(np.max(np.abs(grad))) < 1e-4

    gbar = lambda th: moments(th).mean(axis=0)
    J = _numerical_jacobian(gbar, theta)
    gmat = moments(theta)
    S = np.cov(gmat, rowvar=False, ddof=1) / G
    W = np.diag(w2)
    JWJ = J.T @ W @ J
    try:
        JWJ_inv = np.linalg.inv(JWJ)
        cov = JWJ_inv @ J.T @ W @ S @ W @ J @ JWJ_inv * G / max(G - 1, 1)
    except np.linalg.LinAlgError:
        cov = np.full((p, p), np.nan)
        converged = False

    return GmmResult(
        names=names,
        coef=theta,
        cov=cov,
        objective=float(step2.fun),
        converged=converged,
        n_obs=G,
        n_clusters=G,
        moment_values=gbar(theta),
        first_step_objective=float(Q2(step1.x)),
    )


def delta_method(result, transform: Callable[[np.ndarray], float | np.ndarray]):
    """Estimate and standard error of a smooth transform of the coefficients."""
    theta = np.asarray(result.coef, dtype=float)
    V = np.asarray(result.cov, dtype=float)

    def f(x):
        return np.atleast_1d(np.asarray(transform(x), dtype=float))

    val = f(theta)
    J = _numerical_jacobian(f, theta)
    cov = J @ V @ J.T
    se = np.sqrt(np.abs(np.diag(cov)))
    if val.size == 1:
        return float(val[0]), float(se[0])
    return val, se
