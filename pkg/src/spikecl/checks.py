"""The verification suite behind ``spikecl check-theorems``.

Each check returns a :class:`CheckOutcome`.  ``hard`` checks are exact
identities or constructions whose failure means a bug; soft ones report
a statistic without gating the exit code.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.special import softmax

from .curriculum import score
from .harness import firing_rate_study
from .spiking import theorem1_demo
from .theorems import (
    adversarial_grid,
    check_theorem2,
    check_theorem3,
    check_theorem4,
    mean_preserving_spread,
    random_hypothesis_grid,
)

__all__ = ["CheckOutcome", "run_suite", "format_table"]


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    hard: bool
    detail: str
    seconds: float


def _timed(fn):
    start = time.perf_counter()
    passed, detail = fn()
    return passed, detail, time.perf_counter() - start


def order_dependence_check():
    res = theorem1_demo()
    ok = res.order_a_output == (1, 1) and res.order_b_output == (0, 1)
    return ok, f"O_0={res.order_a_output} O_1={res.order_b_output}"


def covariance_identity_check(n_instances: int, seed: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        n = int(rng.integers(2, 200))
        u = rng.normal(size=n) * rng.uniform(0.1, 10)
        p = rng.dirichlet(np.full(n, rng.uniform(0.1, 5)))
        worst = max(worst, check_theorem2(u, p).residual)
    return worst < 1e-10, f"max residual {worst:.2e} over {n_instances}"


def prior_margin_check(n_instances: int, seed: int):
    rng = np.random.default_rng(seed)
    failures, excluded = 0, 0
    for _ in range(n_instances):
        res = check_theorem3(random_hypothesis_grid(rng, 5, 50))
        failures += not res.holds
        excluded += len(res.excluded)
    detail = f"{n_instances - failures}/{n_instances} grids hold, {excluded} hypotheses outside the side condition"
    return failures == 0, detail


def variance_spread_report(n_instances: int, seed: int):
    rng = np.random.default_rng(seed)
    spreads = [check_theorem3(random_hypothesis_grid(rng, 5, 50)).variance_spread for _ in range(n_instances)]
    adv = check_theorem3(adversarial_grid())
    return True, (
        f"median Var[U] max/min ratio {np.median(spreads):.2f}; "
        f"adversarial grid prior argmax {adv.best_prior} vs plain argmax {adv.best}"
    )


def score_variance_check(n_instances: int, seed: int):
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(n_instances):
        n = int(rng.integers(2, 100))
        p_b = softmax(-np.abs(rng.normal(size=n)))
        below = p_b < 1.0 / n
        f_max = float(np.min((1.0 / n) / (1.0 / n - p_b[below]))) if below.any() else 2.0
        p_a = mean_preserving_spread(p_b, 1.0 + rng.uniform(0, 0.99) * (f_max - 1.0))
        a = score(-np.log(p_a))
        b = score(-np.log(p_b))
        failures += not check_theorem4(a, b, normalizer=float(rng.uniform(0.5, 5)))
    return failures == 0, f"{n_instances - failures}/{n_instances} spreads keep the variance order"


def firing_rate_check(seed: int):
    study = firing_rate_study([0.0, 0.5, 1.0, 1.5, 2.0, 2.5], seed=seed)
    ok = study.r_squared >= 0.9 and study.rates[0] == 0.0
    return ok, f"R^2={study.r_squared:.4f}, rate(0)={study.rates[0]}"


def run_suite(n_instances: int = 1000, seed: int = 0) -> list[CheckOutcome]:
    plan = [
        ("order dependence", True, order_dependence_check),
        ("covariance identity", True, lambda: covariance_identity_check(n_instances, seed)),
        ("prior keeps best hypothesis", True, lambda: prior_margin_check(n_instances, seed)),
        ("variance spread (informational)", False, lambda: variance_spread_report(min(n_instances, 200), seed)),
        ("score variance order", True, lambda: score_variance_check(n_instances, seed)),
        ("firing rate linearity", True, lambda: firing_rate_check(seed)),
    ]
    out = []
    for name, hard, fn in plan:
        passed, detail, secs = _timed(fn)
        out.append(CheckOutcome(name, bool(passed), hard, detail, secs))
    return out


def format_table(outcomes: list[CheckOutcome]) -> str:
    width = max(len(o.name) for o in outcomes)
    lines = []
    for o in outcomes:
        status = "PASS" if o.passed else ("FAIL" if o.hard else "WARN")
        lines.append(f"{status}  {o.name:<{width}}  {o.seconds:7.3f}s  {o.detail}")
    return "\n".join(lines)
