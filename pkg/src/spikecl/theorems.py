"""Numerical checks of the curriculum objective identities.

Expectations are empirical means over the N samples throughout, so the
sampling prior's mean is ``1/N``.  ``U`` values are per-sample objective
values ``exp(-loss)``; a hypothesis grid is a ``(K, N)`` array with one row
per hypothesis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curriculum import ScoreVector

__all__ = [
    "Theorem2Result",
    "check_theorem2",
    "Theorem3Result",
    "check_theorem3",
    "random_hypothesis_grid",
    "adversarial_grid",
    "Theorem4Result",
    "check_theorem4",
    "mean_preserving_spread",
]


@dataclass(frozen=True)
class Theorem2Result:
    lhs: float
    rhs: float
    residual: float


def check_theorem2(u_values, p) -> Theorem2Result:
    """Compare ``sum(U p)`` with ``mean(U) + sum((U - mean U)(p - 1/N))``."""
    u = np.asarray(u_values, dtype=float)
    p = np.asarray(p, dtype=float)
    if u.shape != p.shape or u.ndim != 1:
        raise ValueError("U and p must be vectors of equal length")
    if not np.isclose(p.sum(), 1.0, rtol=0, atol=1e-9):
        raise ValueError(f"p must sum to 1, got {p.sum()}")
    n = u.size
    lhs = float(np.dot(u, p))
    rhs = float(u.mean() + np.dot(u - u.mean(), p - 1.0 / n))
    return Theorem2Result(lhs, rhs, abs(lhs - rhs))


def _cov(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean((a - a.mean()) * (b - b.mean())))


@dataclass
class Theorem3Result:
    """Outcome over one hypothesis grid.

    ``holds`` covers both claims, evaluated over the hypotheses that satisfy
    ``Cov[U, U_best] <= Var[U_best]``; the others are listed in ``excluded``.
    ``variance_spread`` is ``max Var[U] / min Var[U]`` across the grid, a
    gauge of how far the grid is from constant variance.
    """

    holds: bool
    best: int
    best_prior: int  # argmax under the prior over the whole grid, admissible or not
    excluded: list[int] = field(default_factory=list)
    violations: list[tuple[int, str]] = field(default_factory=list)
    objective: np.ndarray | None = None
    objective_prior: np.ndarray | None = None
    variance_spread: float = 1.0

    def __bool__(self):
        return self.holds


def check_theorem3(hypothesis_grid, tol: float = 1e-12) -> Theorem3Result:
    """Check that the prior built from the best hypothesis keeps it best and
    widens its margin over every admissible competitor.

    The prior is ``p = U_best / sum(U_best)``; with it, ``U_p`` is computed
    directly as ``sum(U p)`` for every hypothesis.
    """
    grid = np.atleast_2d(np.asarray(hypothesis_grid, dtype=float))
    if grid.size == 0:
        raise ValueError("hypothesis grid is empty")
    k, n = grid.shape
    objective = grid.mean(axis=1)
    best = int(np.argmax(objective))
    u_best = grid[best]
    p = u_best / u_best.sum()
    objective_prior = grid @ p

    var_best = float(np.var(u_best))
    admissible = []
    excluded = []
    for j in range(k):
        if j == best or _cov(grid[j], u_best) <= var_best + tol:
            admissible.append(j)
        else:
            excluded.append(j)
    violations = []
    rival = admissible[int(np.argmax(objective_prior[admissible]))]
    if objective_prior[best] < objective_prior[rival] - tol:
        violations.append((rival, "best hypothesis is not the maximiser under the prior"))
    for j in admissible:
        gain_prior = objective_prior[best] - objective_prior[j]
        gain_plain = objective[best] - objective[j]
        if gain_prior < gain_plain - tol:
            violations.append((j, f"margin shrinks under the prior: {gain_prior:.3e} < {gain_plain:.3e}"))
    variances = grid.var(axis=1)
    spread = float(variances.max() / variances.min()) if variances.min() > 0 else float("inf")
    return Theorem3Result(
        holds=not violations,
        best=best,
        best_prior=int(np.argmax(objective_prior)),
        excluded=excluded,
        violations=violations,
        objective=objective,
        objective_prior=objective_prior,
        variance_spread=spread,
    )


def random_hypothesis_grid(rng: np.random.Generator, n_hypotheses: int = 5, n_samples: int = 50) -> np.ndarray:
    """``U = exp(-loss)`` with half-normal losses of hypothesis-specific scale."""
    scales = rng.uniform(0.2, 3.0, size=(n_hypotheses, 1))
    losses = np.abs(rng.normal(size=(n_hypotheses, n_samples))) * scales
    return np.exp(-losses)


def adversarial_grid() -> np.ndarray:
    """Two hypotheses where the runner-up co-varies more strongly with the
    best one than the best one varies, so the prior promotes the runner-up."""
    return np.array([[0.1, 0.9], [0.0, 0.99]])


@dataclass(frozen=True)
class Theorem4Result:
    holds: bool
    var_p_a: float
    var_p_b: float
    var_u_a: float
    var_u_b: float
    cov_a: float | None = None
    cov_b: float | None = None

    def __bool__(self):
        return self.holds


def check_theorem4(
    score_a: ScoreVector,
    score_b: ScoreVector,
    u_matrix=None,
    normalizer: float = 1.0,
    tol: float = 1e-15,
) -> Theorem4Result:
    """With a shared normaliser ``P``, ``U_best = P * p``; check that the
    score set with the larger ``Var[p]`` yields the larger ``Var[U_best]``.

    ``u_matrix`` (hypotheses x samples) is optional; when given, the mean
    covariance between its rows and ``U_best`` is reported for both sets.
    """
    pa = np.asarray(score_a.scores, dtype=float)
    pb = np.asarray(score_b.scores, dtype=float)
    if pa.shape != pb.shape:
        raise ValueError("score sets must cover the same samples")
    var_pa, var_pb = float(np.var(pa)), float(np.var(pb))
    ua, ub = normalizer * pa, normalizer * pb
    var_ua, var_ub = float(np.var(ua)), float(np.var(ub))
    if var_pa >= var_pb:
        holds = var_ua >= var_ub - tol
    else:
        holds = var_ub >= var_ua - tol
    cov_a = cov_b = None
    if u_matrix is not None:
        u = np.atleast_2d(np.asarray(u_matrix, dtype=float))
        cov_a = float(np.mean([_cov(row, ua) for row in u]))
        cov_b = float(np.mean([_cov(row, ub) for row in u]))
    return Theorem4Result(holds, var_pa, var_pb, var_ua, var_ub, cov_a, cov_b)


def mean_preserving_spread(p, factor: float) -> np.ndarray:
    """Push ``p`` away from uniform by ``factor`` >= 1, staying a distribution
    while every entry stays positive."""
    p = np.asarray(p, dtype=float)
    n = p.size
    out = 1.0 / n + factor * (p - 1.0 / n)
    if np.any(out <= 0):
        raise ValueError("spread factor too large, an entry would become non-positive")
    return out
