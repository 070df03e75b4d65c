"""Arm distributions, problem instances and the counting sampling oracle."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from . import kernels


class ArmKind(str, Enum):
    BERNOULLI = "bernoulli"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class ArmSpec:
    kind: ArmKind
    mean: float
    sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ArmKind(self.kind))
        if not 0.0 <= self.mean <= 1.0:
            raise ValueError(f"arm mean {self.mean} outside [0, 1]")
        if self.kind is ArmKind.GAUSSIAN and not 0.0 < self.sigma <= 0.5:
            raise ValueError(f"gaussian sigma {self.sigma} outside (0, 0.5]")

    @classmethod
    def bernoulli(cls, p: float) -> "ArmSpec":
        return cls(ArmKind.BERNOULLI, p)

    @classmethod
    def gaussian(cls, mean: float, sigma: float) -> "ArmSpec":
        return cls(ArmKind.GAUSSIAN, mean, sigma)


@dataclass
class Instance:
    """Arms stored column-wise so a whole instance can hold 10^6 arms cheaply."""

    means: np.ndarray
    sigmas: np.ndarray
    gaussian: np.ndarray  # bool mask
    best_index: int = field(init=False)

    def __post_init__(self):
        if len(self.means) < 1:
            raise ValueError("an instance needs at least one arm")
        self.best_index = int(np.argmax(self.means))

    @property
    def n(self) -> int:
        return len(self.means)

    @property
    def all_bernoulli(self) -> bool:
        return not self.gaussian.any()

    def arm(self, i: int) -> ArmSpec:
        if self.gaussian[i]:
            return ArmSpec.gaussian(float(self.means[i]), float(self.sigmas[i]))
        return ArmSpec.bernoulli(float(self.means[i]))


def make_instance(groups: Sequence[tuple[ArmSpec, int]]) -> Instance:
    """Lay out `count` copies of each spec, group by group."""
    total = sum(c for _, c in groups)
    if total < 1:
        raise ValueError("total arm count must be >= 1")
    means = np.empty(total)
    sigmas = np.zeros(total)
    gauss = np.zeros(total, dtype=bool)
    pos = 0
    for spec, count in groups:
        if count < 0:
            raise ValueError("negative arm count")
        means[pos:pos + count] = spec.mean
        if spec.kind is ArmKind.GAUSSIAN:
            sigmas[pos:pos + count] = spec.sigma
            gauss[pos:pos + count] = True
        pos += count
    return Instance(means, sigmas, gauss)


def is_eps_best(instance: Instance, arm: int, eps: float) -> bool:
    if not 0 <= arm < instance.n:
        raise IndexError(f"arm {arm} out of range")
    return bool(instance.means[arm] >= instance.means[instance.best_index] - eps)


class SamplingOracle:
    """Noisy access to one instance for a single trial.

    Arm i's sample stream is keyed by (master_seed, trial_index, i) and the
    number of batches already drawn from arm i, so results do not depend on the
    order in which arms are pulled. Not thread-safe; one oracle per trial.
    """

    def __init__(self, instance: Instance, master_seed: int = 0, trial_index: int = 0):
        self.instance = instance
        self.master_seed = int(master_seed)
        self.trial_index = int(trial_index)
        n = instance.n
        self._keys = kernels.derive_keys(self.master_seed, self.trial_index, n)
        self._batches = np.zeros(n, dtype=np.uint64)
        self.pulls = np.zeros(n, dtype=np.int64)
        self.total_pulls = 0
        self._rng = None

    @property
    def rng(self) -> np.random.Generator:
        """Generator for random arm subsets, separate from the sample streams."""
        if self._rng is None:
            self._rng = np.random.default_rng([self.master_seed, self.trial_index, 0x5E7])
        return self._rng

    def pull(self, arm: int, count: int) -> tuple[float, int]:
        if not 0 <= arm < self.instance.n:
            raise IndexError(f"arm {arm} out of range")
        sums = self.pull_many(np.array([arm], dtype=np.int64), count)
        return sums[0].item(), count

    def pull_many(self, arms: np.ndarray, count: int) -> np.ndarray:
        """Sum of `count` fresh draws for each arm in `arms` (distinct indices)."""
        if count < 0:
            raise ValueError("count must be non-negative")
        arms = np.asarray(arms, dtype=np.int64)
        if len(arms) and (arms.min() < 0 or arms.max() >= self.instance.n):
            raise IndexError("arm index out of range")
        inst = self.instance
        if count == 0:
            return np.zeros(len(arms), dtype=np.int64 if inst.all_bernoulli else np.float64)
        keys = self._keys[arms]
        batches = self._batches[arms]
        if inst.all_bernoulli:
            out = kernels.bernoulli_sums(keys, batches, inst.means[arms], count)
        else:
            out = np.empty(len(arms))
            g = inst.gaussian[arms]
            if (~g).any():
                out[~g] = kernels.bernoulli_sums(keys[~g], batches[~g], inst.means[arms[~g]], count)
            if g.any():
                ga = arms[g]
                out[g] = kernels.gaussian_sums(keys[g], batches[g], inst.means[ga], inst.sigmas[ga], count)
        self._batches[arms] += np.uint64(1)
        self.pulls[arms] += count
        self.total_pulls += count * len(arms)
        return out


class EmpiricalStats:
    """Running per-arm sums and counts for a subset of arms."""

    def __init__(self, arms: np.ndarray):
        self.arms = np.asarray(arms, dtype=np.int64)
        self.sums = np.zeros(len(self.arms))
        self.counts = np.zeros(len(self.arms), dtype=np.int64)

    def record(self, sums: np.ndarray, count: int) -> None:
        self.sums += sums
        self.counts += count

    def means(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.counts > 0, self.sums / np.maximum(self.counts, 1), np.nan)
