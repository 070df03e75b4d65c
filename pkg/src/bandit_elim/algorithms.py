"""Elimination algorithms for (eps, delta)-PAC best-arm identification.

Each function draws from a :class:`~bandit_elim.arms.SamplingOracle` and
returns a :class:`RunOutcome` with full per-round accounting. Budgets and set
sizes come from :mod:`bandit_elim.schedule`, which makes every sample count
independent of the data. Ties in any ranking go to the lowest arm index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import schedule
from .arms import SamplingOracle


@dataclass
class Round:
    survivors_before: int
    per_arm_samples: int
    survivors_after: np.ndarray  # sorted arm indices


@dataclass
class RunOutcome:
    chosen_arm: int
    rounds: list[Round] = field(default_factory=list)
    fallback_taken: bool = False
    warnings: list[str] = field(default_factory=list)
    final_set: np.ndarray | None = None

    @property
    def total_samples(self) -> int:
        return sum(r.survivors_before * r.per_arm_samples for r in self.rounds)

    def __post_init__(self):
        if self.final_set is None:
            self.final_set = np.array([self.chosen_arm], dtype=np.int64)


def _as_arms(arms) -> np.ndarray:
    out = np.unique(np.asarray(arms, dtype=np.int64))
    if len(out) == 0:
        raise ValueError("empty arm set")
    return out


def _rank(arms: np.ndarray, means: np.ndarray) -> np.ndarray:
    # arms ascending + stable sort -> lowest index first among equal means
    return arms[np.argsort(-means, kind="stable")]


def _merge(*parts: RunOutcome, chosen: RunOutcome) -> RunOutcome:
    out = RunOutcome(chosen.chosen_arm, final_set=chosen.final_set)
    for p in parts:
        out.rounds += p.rounds
        out.warnings += p.warnings
        out.fallback_taken |= p.fallback_taken
    return out


def naive_elimination(oracle: SamplingOracle, arms, eps: float, delta: float,
                      samples_per_arm: int | None = None) -> RunOutcome:
    """Pull every arm the same number of times and return the empirical best.

    `samples_per_arm` overrides the ceil(2/eps^2 ln(|A|/delta)) budget.
    """
    arms = _as_arms(arms)
    if len(arms) == 1:
        return RunOutcome(int(arms[0]))
    s = schedule.naive_budget(len(arms), eps, delta) if samples_per_arm is None else samples_per_arm
    if s < 1:
        raise ValueError("samples_per_arm must be >= 1")
    sums = oracle.pull_many(arms, s)
    chosen = int(arms[np.argmax(sums / s)])
    return RunOutcome(chosen, [Round(len(arms), s, np.array([chosen]))])


def aggressive_elimination(oracle: SamplingOracle, arms, eps: float, delta: float) -> RunOutcome:
    """Shrink the arm set to about n^{3/4}/2 survivors; `final_set` holds them."""
    arms = _as_arms(arms)
    plan = schedule.aggressive_plan(len(arms), eps, delta)
    rounds = []
    survivors = arms
    top = int(arms[0])
    for size, s, keep in plan:
        ranked = _rank(survivors, oracle.pull_many(survivors, s) / s)
        top = int(ranked[0])
        survivors = np.sort(ranked[:keep])
        rounds.append(Round(size, s, survivors))
    return RunOutcome(top, rounds, final_set=survivors)


def saba(oracle: SamplingOracle, arms, eps: float, delta: float) -> RunOutcome:
    arms = _as_arms(arms)
    warnings = schedule.saba_warnings(len(arms), delta)
    ae = aggressive_elimination(oracle, arms, eps, delta / 2.0)
    final = naive_elimination(oracle, ae.final_set, eps, delta / math.e)
    out = _merge(ae, final, chosen=final)
    out.warnings = warnings + out.warnings
    return out


def _random_complement(oracle: SamplingOracle, arms: np.ndarray, taken: np.ndarray, size: int) -> np.ndarray:
    # uniform subset of arms outside `taken`; equal in law to deduplicating a
    # uniform draw from all arms and topping it up, but with a fixed union size
    pool = np.setdiff1d(arms, taken, assume_unique=True)
    size = min(size, len(pool))
    return np.sort(oracle.rng.choice(pool, size=size, replace=False))


def aba(oracle: SamplingOracle, arms, eps: float, delta: float,
        alpha: float = schedule.DEFAULT_ALPHA) -> RunOutcome:
    arms = _as_arms(arms)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    n = len(arms)
    pred = schedule.predict_samples("aba", n, eps, delta, alpha=alpha)
    if pred.fallback:
        out = naive_elimination(oracle, arms, eps, delta)
        out.fallback_taken = True
        out.warnings += pred.warnings
        return out
    ae = aggressive_elimination(oracle, arms, alpha * eps, delta / 2.0)
    extra = _random_complement(oracle, arms, ae.final_set, schedule.aba_random_size(n))
    final = naive_elimination(oracle, np.union1d(ae.final_set, extra), (1.0 - alpha) * eps, delta / math.e)
    return _merge(ae, final, chosen=final)


def abaleh(oracle: SamplingOracle, arms, eps: float, delta: float,
           lam: float = schedule.DEFAULT_LAMBDA) -> RunOutcome:
    arms = _as_arms(arms)
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    n = len(arms)
    warnings = schedule.abaleh_warnings(n, delta, lam)
    if schedule.abaleh_uses_fallback(n, delta, lam):
        out = naive_elimination(oracle, arms, eps, delta)
        out.fallback_taken = True
        out.warnings = warnings + ["abaleh: aggressive stage degenerate; using naive elimination"]
        return out
    alpha = schedule.abaleh_alpha(lam)
    s1 = schedule.abaleh_stage1_budget(eps, delta, lam)
    ranked = _rank(arms, oracle.pull_many(arms, s1) / s1)
    top = np.sort(ranked[:schedule.abaleh_top_size(n, lam)])
    stage1 = RunOutcome(int(ranked[0]), [Round(n, s1, top)])
    ae = aggressive_elimination(oracle, top, eps * alpha, delta / 4.0)
    extra = _random_complement(oracle, arms, ae.final_set, schedule.abaleh_random_size(n))
    final = naive_elimination(oracle, np.union1d(ae.final_set, extra), (1.0 - alpha) * eps, delta / 4.0)
    out = _merge(stage1, ae, final, chosen=final)
    out.warnings = warnings + out.warnings
    return out


def median_elimination(oracle: SamplingOracle, arms, eps: float, delta: float) -> RunOutcome:
    """Baseline: halve the survivor set each round at the median empirical mean."""
    arms = _as_arms(arms)
    rounds = []
    survivors = arms
    for size, s, keep in schedule.median_plan(len(arms), eps, delta):
        ranked = _rank(survivors, oracle.pull_many(survivors, s) / s)
        survivors = np.sort(ranked[:keep])
        rounds.append(Round(size, s, survivors))
    return RunOutcome(int(survivors[0]), rounds)


def run_algorithm(name: str, oracle: SamplingOracle, eps: float, delta: float,
                  lam: float | None = None, alpha: float | None = None, arms=None) -> RunOutcome:
    """Dispatch by the CLI identifier; `arms` defaults to the whole instance."""
    if arms is None:
        arms = np.arange(oracle.instance.n)
    if name == "naive":
        return naive_elimination(oracle, arms, eps, delta)
    if name == "aggressive":
        return aggressive_elimination(oracle, arms, eps, delta)
    if name == "saba":
        return saba(oracle, arms, eps, delta)
    if name == "aba":
        return aba(oracle, arms, eps, delta, schedule.DEFAULT_ALPHA if alpha is None else alpha)
    if name == "abaleh":
        return abaleh(oracle, arms, eps, delta, schedule.DEFAULT_LAMBDA if lam is None else lam)
    if name == "median":
        return median_elimination(oracle, arms, eps, delta)
    raise ValueError(f"unknown algorithm {name!r}")
