"""Ground-truth engines used to validate the simulator.

``exact_naive_success`` enumerates every joint outcome of a tiny Bernoulli
instance; ``mc_success`` estimates the same quantity by running the real
algorithm on seeded oracles.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .algorithms import naive_elimination, run_algorithm
from .arms import ArmSpec, Instance, SamplingOracle, is_eps_best, make_instance

MAX_EXACT_ARMS = 4
MAX_EXACT_SAMPLES = 64


@dataclass
class ExactResult:
    success_probability: float
    enumeration_size: int
    total_mass: float


def binomial_log_pmf(s: int, p: float) -> np.ndarray:
    """log P[Bin(s, p) = c] for c = 0..s, with -inf for impossible counts."""
    c = np.arange(s + 1)
    log_choose = np.array([math.lgamma(s + 1) - math.lgamma(k + 1) - math.lgamma(s - k + 1) for k in c])
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.where(c > 0, c * np.log(p), 0.0) if p > 0 else np.where(c > 0, -np.inf, 0.0)
        lq = np.where(c < s, (s - c) * np.log1p(-p), 0.0) if p < 1 else np.where(c < s, -np.inf, 0.0)
    return log_choose + lp + lq


def exact_naive_success(instance: Instance, samples_per_arm: int, eps: float) -> ExactResult:
    """Probability that the lowest-index empirical argmax is eps-best."""
    n, s = instance.n, samples_per_arm
    if not instance.all_bernoulli:
        raise ValueError("exact enumeration needs Bernoulli arms")
    if n > MAX_EXACT_ARMS or s > MAX_EXACT_SAMPLES or s < 1:
        raise ValueError(f"too large to enumerate: n={n}, s={s}")
    good = np.array([is_eps_best(instance, i, eps) for i in range(n)])
    logs = [binomial_log_pmf(s, float(p)) for p in instance.means]
    if n == 1:
        return ExactResult(1.0, s + 1, float(np.exp(logs[0]).sum()))
    rest_shape = (s + 1,) * (n - 1)
    rest_counts = np.stack(np.meshgrid(*[np.arange(s + 1)] * (n - 1), indexing="ij"))
    rest_log = sum(np.expand_dims(logs[i + 1], [a for a in range(n - 1) if a != i]) for i in range(n - 1))
    success = total = 0.0
    for c0 in range(s + 1):
        counts = np.concatenate([np.full((1,) + rest_shape, c0), rest_counts])
        winner = np.argmax(counts, axis=0)
        mass = np.exp(logs[0][c0] + rest_log)
        total += mass.sum()
        success += mass[good[winner]].sum()
    return ExactResult(float(success), (s + 1) ** n, float(total))


@dataclass
class McResult:
    rate: float
    wilson_interval: tuple[float, float]
    successes: int
    trials: int
    total_samples: list[int]

    def __iter__(self):
        return iter((self.rate, self.wilson_interval))

    @property
    def std_error(self) -> float:
        return math.sqrt(self.rate * (1 - self.rate) / self.trials)


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    ci = stats.binomtest(successes, trials).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


def resolve_parallel(max_parallel: int = 0) -> int:
    env = os.environ.get("BANDIT_ELIM_THREADS")
    if env:
        max_parallel = int(env)
    return max_parallel if max_parallel > 0 else (os.cpu_count() or 1)


def run_trial(algorithm: str, instance: Instance, params: dict, master_seed: int, trial: int) -> tuple[bool, int]:
    oracle = SamplingOracle(instance, master_seed, trial)
    eps = params["eps"]
    if "samples_per_arm" in params:
        out = naive_elimination(oracle, np.arange(instance.n), eps, params.get("delta", 0.5),
                                samples_per_arm=params["samples_per_arm"])
    else:
        out = run_algorithm(algorithm, oracle, eps, params["delta"], params.get("lam"), params.get("alpha"))
    if algorithm == "aggressive":
        ok = any(is_eps_best(instance, int(a), eps) for a in out.final_set)
    else:
        ok = is_eps_best(instance, out.chosen_arm, eps)
    assert out.total_samples == oracle.total_pulls
    return ok, out.total_samples


def mc_success(algorithm: str, instance: Instance, params: dict, trials: int,
               master_seed: int = 0, max_parallel: int = 1) -> McResult:
    """Fraction of seeded trials whose answer is eps-best, with a Wilson 95% interval.

    `params` holds eps, delta and optionally lam, alpha; for naive elimination
    `samples_per_arm` fixes the per-arm budget directly.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = resolve_parallel(max_parallel)

    def one(t):
        return run_trial(algorithm, instance, params, master_seed, t)

    if workers == 1:
        results = [one(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(trials)))
    k = sum(ok for ok, _ in results)
    return McResult(k / trials, wilson_interval(k, trials), k, trials, [s for _, s in results])


# (means, samples per arm, eps) for the exact-vs-Monte-Carlo agreement check
AGREEMENT_GRID = (
    ((0.6, 0.5, 0.3), 20, 0.0),
    ((0.5, 0.6), 10, 0.0),
    ((0.5, 0.6), 30, 0.05),
    ((0.7, 0.7, 0.4), 5, 0.0),
    ((0.2, 0.4, 0.35), 15, 0.1),
    ((0.9, 0.1), 1, 0.0),
    ((0.55, 0.45, 0.5), 25, 0.06),
    ((0.3, 0.5, 0.55), 30, 0.0),
    ((0.5, 0.5, 0.5), 8, 0.0),
    ((0.8, 0.75), 12, 0.0),
    ((0.1, 0.15, 0.2), 20, 0.07),
    ((0.65, 0.6, 0.62), 3, 0.04),
)


@dataclass
class AgreementRow:
    means: tuple
    samples_per_arm: int
    eps: float
    exact: float
    mc: float
    trials: int

    @property
    def tolerance(self) -> float:
        return 3 * math.sqrt(self.exact * (1 - self.exact) / self.trials)

    @property
    def agrees(self) -> bool:
        return abs(self.mc - self.exact) <= self.tolerance


def agreement_grid(trials: int = 100_000, master_seed: int = 0, grid=AGREEMENT_GRID,
                   max_parallel: int = 1) -> list[AgreementRow]:
    rows = []
    for means, s, eps in grid:
        inst = make_instance([(ArmSpec.bernoulli(p), 1) for p in means])
        exact = exact_naive_success(inst, s, eps).success_probability
        mc = mc_success("naive", inst, {"eps": eps, "samples_per_arm": s}, trials, master_seed, max_parallel)
        rows.append(AgreementRow(means, s, eps, exact, mc.rate, trials))
    return rows
