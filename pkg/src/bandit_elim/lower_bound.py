"""Hard instance for elimination algorithms and its tail-bound chain.

One good arm yields 1 w.p. 1/2 + eps, the other n-1 arms are fair coins. After
m pulls per arm, the policy that discards the arms with the most zeros must
not discard the good one. This module runs that experiment and evaluates the
normal-approximation inequalities that bound its failure rate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .arms import Instance, SamplingOracle

CHAIN_STEPS = (
    "eps_regime",
    "slud_range",
    "borjesson",
    "z_large_enough",
    "exponent_bound",
    "beats_delta",
)


@dataclass(frozen=True)
class LowerBoundConfig:
    n: int
    eps: float
    delta: float
    beta: float

    def __post_init__(self):
        if not 0 < self.beta < 0.5:
            raise ValueError("beta must lie in (0, 1/2)")
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    @property
    def nu(self) -> float:
        return 1e-4 * self.beta

    @property
    def m(self) -> int:
        raw = (1 + self.nu) / self.eps ** 2 * (0.5 - self.beta) * math.log(1 / self.delta)
        return max(1, math.ceil(raw))

    @property
    def k_excess(self) -> float:
        """k_threshold - m/2, kept apart so k - m p does not cancel digits."""
        return 0.0005 * self.beta * self.eps * self.m

    @property
    def k_threshold(self) -> float:
        return (1 + 0.001 * self.beta * self.eps) * self.m / 2

    @property
    def discard_size(self) -> int:
        return math.floor(self.nu * self.n / (1 + self.nu))


def hard_instance(n: int, eps: float, seed: int = 0) -> Instance:
    """n-1 fair coins and one coin with success probability 1/2 + eps."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    means = np.full(n, 0.5)
    means[np.random.default_rng([seed, 0xBAD]).integers(n)] = 0.5 + eps
    return Instance(means, np.zeros(n), np.zeros(n, dtype=bool))


def exclusion_trial(config: LowerBoundConfig, seed: int, discard: int | None = None) -> bool:
    """True when the top-zero-count discard set contains the good arm."""
    d = config.discard_size if discard is None else discard
    if d < 1:
        raise ValueError(f"discard set is empty at n={config.n}, beta={config.beta}")
    inst = hard_instance(config.n, config.eps, seed)
    oracle = SamplingOracle(inst, seed, 0)
    m = config.m
    zeros = m - oracle.pull_many(np.arange(config.n), m)
    g = inst.best_index
    ahead = np.count_nonzero(zeros > zeros[g]) + np.count_nonzero(zeros[:g] == zeros[g])
    return bool(ahead < d)


def exclusion_rate(config: LowerBoundConfig, trials: int, master_seed: int = 0,
                   max_parallel: int = 1) -> tuple[int, int]:
    """(excluded, trials) over seeds master_seed .. master_seed + trials - 1."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seeds = range(master_seed, master_seed + trials)
    if max_parallel == 1:
        hits = [exclusion_trial(config, s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_parallel) as pool:
            hits = list(pool.map(lambda s: exclusion_trial(config, s), seeds))
    return sum(hits), trials


def exact_exclusion_probability(n: int, m: int, eps: float, d: int) -> float:
    """Exact failure probability of the top-zero-count policy.

    Groups the bad arms into three classes relative to the good arm's zero
    count x: strictly more zeros (U of them), tied (T), fewer. With the good
    arm at a uniform position its rank inside the tie class is uniform on
    0..T, so P(excluded | x) = sum_{u<d} P(U=u) E[min(T+1, d-u)/(T+1) | U=u].
    """
    xs = np.arange(m + 1)
    px = stats.binom.pmf(xs, m, 0.5 - eps)
    bad = n - 1
    q_gt = stats.binom.sf(xs, m, 0.5)
    q_eq = stats.binom.pmf(xs, m, 0.5)
    total = 0.0
    for x in xs[px > 1e-300]:
        for u in range(min(d, bad + 1)):
            pu = stats.binom.pmf(u, bad, q_gt[x])
            if pu == 0.0:
                continue
            rest = bad - u
            # P(tie | not ahead); rounding can push it past 1 when x = 0
            r = min(q_eq[x] / (1.0 - q_gt[x]), 1.0) if q_gt[x] < 1.0 else 0.0
            j = d - u
            ts = np.arange(min(j, rest + 1))
            pt = stats.binom.pmf(ts, rest, r)
            if r > 0:
                inv_mean = -math.expm1((rest + 1) * math.log1p(-r)) / ((rest + 1) * r) if r < 1 else 1.0 / (rest + 1)
            else:
                inv_mean = 1.0
            tail = max(inv_mean - float(np.sum(pt / (ts + 1))), 0.0)
            total += px[x] * pu * (float(pt.sum()) + j * tail)
    return min(total, 1.0)


def normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_tail_lower_bound(z: float) -> float:
    """Borjesson-Sundberg: P[Z > z] >= z/(z^2+1) * pdf(z).

    The density keeps its 1/sqrt(2 pi) factor; without it the right-hand side
    exceeds the tail for every z below about 2.3.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    return z / (z * z + 1.0) * math.exp(-z * z / 2.0) / math.sqrt(2.0 * math.pi)


def slud_lower_bound(m: int, p: float, k: float) -> float:
    """Normal lower bound on a Binomial(m, p) upper tail at k, valid for p <= 1/2."""
    if not 0 < p <= 0.5:
        raise ValueError("p must lie in (0, 1/2]")
    lo, hi = m * p, m * (1 - p)
    tol = 1e-9 * max(1.0, m)
    if k < lo - tol or k > hi + tol:
        raise ValueError(f"k={k} outside [{lo}, {hi}]")
    return normal_sf((k - lo) / math.sqrt(m * p * (1 - p)))


@dataclass
class ChainReport:
    beta: float
    delta: float
    eps: float
    m: int
    k: float
    z: float
    lhs_values: dict[str, float] = field(default_factory=dict)
    steps: dict[str, bool] = field(default_factory=dict)
    holds: bool = False

    @property
    def failing_step(self) -> str | None:
        """First inequality that fails, named only when the conclusion fails."""
        if self.holds:
            return None
        return next((s for s in CHAIN_STEPS if not self.steps[s]), None)


def z_closed_form(beta: float, eps: float, m: int) -> float:
    return (2 + 0.001 * beta) / math.sqrt(1 - 4 * eps * eps) * eps * math.sqrt(m)


def verify_chain(beta: float, delta: float, eps: float | None = None) -> ChainReport:
    """Evaluate each inequality of the lower-bound argument at (beta, delta, eps).

    `holds` is the conclusion P[Z > z] lower bound >= delta^(1-beta); `steps`
    records which intermediate inequalities hold on their own.
    """
    if eps is None:
        eps = 0.5e-4 * beta
    cfg = LowerBoundConfig(2, eps, delta, beta)
    m, k = cfg.m, cfg.k_threshold
    p = 0.5 - eps
    # k - m p = (k - m/2) + m eps
    z = (cfg.k_excess + m * eps) / math.sqrt(m * p * (1 - p))
    bs = normal_tail_lower_bound(z)
    sf = normal_sf(z)
    expo = math.exp(-z * z / (2 - 0.001 * beta))
    target = delta ** (1 - beta)
    lhs = {
        "normal_sf": sf,
        "borjesson": bs,
        "exp_bound": expo,
        "delta_pow": target,
        "binomial_tail": float(stats.binom.sf(math.floor(k), m, p)),
    }
    steps = {
        "eps_regime": eps < 1e-4 * beta,
        "slud_range": m * p <= k <= m * (1 - p),
        "borjesson": sf >= bs,
        "z_large_enough": bs >= expo,
        "exponent_bound": expo >= target,
        "beats_delta": target - delta / 2 > delta,
    }
    return ChainReport(beta, delta, eps, m, k, z, lhs, steps, bs >= target)
