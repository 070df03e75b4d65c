"""Closed-form sampling schedules and simulation-free sample-count predictions.

Every budget and set size used by :mod:`bandit_elim.algorithms` comes from the
plan functions in this module, so a prediction and a real run always agree on
the number of pulls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

ALGORITHMS = ("naive", "aggressive", "saba", "aba", "abaleh", "median")

DEFAULT_ALPHA = 1.0 - 1.0 / math.e
DEFAULT_LAMBDA = 0.5

# aggressive elimination refuses keep-fractions at or above this
MAX_KEEP_FRACTION = 0.5


class DegenerateScheduleError(ValueError):
    """delta + phi(n) is too large for aggressive elimination to shrink the set."""


@dataclass
class SchedulePrediction:
    algorithm: str
    n: int
    eps: float
    delta: float
    lam: float | None = None
    alpha: float | None = None
    per_round: list[tuple[int, int]] = field(default_factory=list)
    fallback: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def total_samples(self) -> int:
        return sum(c * s for c, s in self.per_round)


def phi(n: int) -> float:
    if n < 2:
        raise ValueError(f"phi needs n >= 2, got {n}")
    return math.sqrt(6.0 * math.log(n) / n ** 0.75)


def phi_d(n: int, d: float) -> float:
    """Generalized keep surplus for the assumption n**d >= 1/delta."""
    if n < 3:
        raise ValueError(f"phi_d needs n >= 3, got {n}")
    if d < 0:
        raise ValueError("d must be non-negative")
    ln = math.log(n)
    return math.sqrt((math.log(10.0) + d * ln + math.log(ln)) / n ** 0.75)


def rounds_t(n: int, delta: float) -> int:
    if delta <= 0:
        raise ValueError("delta must be positive")
    q = delta + phi(n)
    if q >= 1.0:
        raise DegenerateScheduleError(f"delta + phi(n) = {q:.4g} >= 1 at n={n}")
    t = math.ceil((math.log(n) + 4.0 * math.log(2.0)) / (4.0 * math.log(1.0 / q)))
    return max(t, 1)


def big_g(n: int, delta: float) -> float:
    q = delta + phi(n)
    t = rounds_t(n, delta)
    return sum(q ** i * (i + 1) for i in range(1, t + 1))


def hoeffding_samples(accuracy: float, confidence_delta: float) -> int:
    """Pulls needed so one arm's mean is within `accuracy` w.p. 1 - confidence_delta."""
    if accuracy <= 0:
        raise ValueError("accuracy must be positive")
    if not 0 < confidence_delta <= 1:
        raise ValueError("confidence_delta must lie in (0, 1]")
    return math.ceil(math.log(1.0 / confidence_delta) / (2.0 * accuracy * accuracy))


def naive_budget(m: int, eps: float, delta: float) -> int:
    """Per-arm pulls of naive elimination over m arms."""
    if m <= 1:
        return 0
    return math.ceil(2.0 / (eps * eps) * math.log(m / delta))


def aggressive_target(n: int) -> int:
    return math.ceil(n ** 0.75 / 2.0)


def check_aggressive(n: int, delta: float) -> None:
    if n < 2:
        raise DegenerateScheduleError("aggressive elimination needs at least 2 arms")
    q = delta + phi(n)
    if q >= MAX_KEEP_FRACTION:
        raise DegenerateScheduleError(
            f"delta + phi(n) = {q:.4g} >= {MAX_KEEP_FRACTION} at n={n}; use naive elimination"
        )


def aggressive_plan(n: int, eps: float, delta: float) -> list[tuple[int, int, int]]:
    """Rounds of aggressive elimination as (survivors, per-arm pulls, kept).

    Round i pulls every survivor (i+1) * ceil(2/eps^2 ln(1/delta)) times and
    keeps floor(|A_i| (delta + phi(n))) arms, never fewer than the target
    ceil(n^{3/4}/2). The loop ends after round t(n) or once the kept set is
    at or below the target.
    """
    check_aggressive(n, delta)
    q = delta + phi(n)
    t = rounds_t(n, delta)
    target = aggressive_target(n)
    base = math.ceil(2.0 / (eps * eps) * math.log(1.0 / delta))
    plan = []
    size = n
    for i in range(t + 1):
        keep = min(max(math.floor(size * q), target), size)
        plan.append((size, (i + 1) * base, keep))
        size = keep
        if size <= target:
            break
    return plan


def median_plan(n: int, eps: float, delta: float) -> list[tuple[int, int, int]]:
    plan = []
    size = n
    e, d = eps / 4.0, delta / 2.0
    while size > 1:
        keep = math.ceil(size / 2)
        plan.append((size, math.ceil(4.0 / (e * e) * math.log(3.0 / d)), keep))
        size = keep
        e, d = 0.75 * e, d / 2.0
    return plan


def aba_fallback(n: int, delta: float) -> bool:
    return n < max(1e5, delta ** -4)


def aba_random_size(n: int) -> int:
    return math.ceil(n ** 0.875 / 2.0)


def abaleh_alpha(lam: float) -> float:
    return math.sqrt(1.0 - lam / 8.0)


def abaleh_stage1_budget(eps: float, delta: float, lam: float) -> int:
    return math.ceil((1.0 + lam / 2.0) * math.log(1.0 / delta) / (2.0 * eps * eps))


def abaleh_top_size(n: int, lam: float) -> int:
    return min(math.ceil(lam * n / 50.0), n)


def abaleh_random_size(n: int) -> int:
    return math.ceil(n ** 0.75)


def abaleh_delta0(lam: float) -> float:
    # solves lam/100 = delta0 ** (lam^2/256); underflows to 0 for most lam
    return math.exp(256.0 / (lam * lam) * math.log(lam / 100.0))


def abaleh_uses_fallback(n: int, delta: float, lam: float) -> bool:
    m = abaleh_top_size(n, lam)
    try:
        check_aggressive(m, delta / 4.0)
    except DegenerateScheduleError:
        return True
    return False


def abaleh_warnings(n: int, delta: float, lam: float) -> list[str]:
    out = []
    if n <= 1.0 / delta:
        out.append(f"abaleh: n={n} <= 1/delta")
    log10_d0 = 256.0 / (lam * lam) * math.log10(lam / 100.0)
    if math.log10(delta) > log10_d0:
        out.append(f"abaleh: delta={delta:g} exceeds delta0=10^{log10_d0:.4g} for lambda={lam:g}")
    return out


def saba_warnings(n: int, delta: float) -> list[str]:
    if n < max(1e5, delta ** -4):
        return [f"saba: n={n} below max(1e5, delta^-4)"]
    return []


def _check_common(n: int, eps: float, delta: float) -> None:
    if n < 1:
        raise ValueError("need at least one arm")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")


def predict_samples(
    algorithm: str,
    n: int,
    eps: float,
    delta: float,
    lam: float | None = None,
    alpha: float | None = None,
) -> SchedulePrediction:
    """Per-round (survivors, per-arm pulls) of `algorithm` without sampling."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    _check_common(n, eps, delta)
    pred = SchedulePrediction(algorithm, n, eps, delta)
    rounds = pred.per_round

    def naive(m, e, d):
        s = naive_budget(m, e, d)
        if s:
            rounds.append((m, s))
        return 1

    def aggressive(m, e, d):
        plan = aggressive_plan(m, e, d)
        rounds.extend((size, s) for size, s, _ in plan)
        return plan[-1][2]

    if algorithm == "naive":
        naive(n, eps, delta)
    elif algorithm == "aggressive":
        aggressive(n, eps, delta)
    elif algorithm == "median":
        rounds.extend((size, s) for size, s, _ in median_plan(n, eps, delta))
    elif algorithm == "saba":
        pred.warnings += saba_warnings(n, delta)
        kept = aggressive(n, eps, delta / 2.0)
        naive(kept, eps, delta / math.e)
    elif algorithm == "aba":
        alpha = DEFAULT_ALPHA if alpha is None else alpha
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        pred.alpha = alpha
        fallback = aba_fallback(n, delta)
        if not fallback:
            try:
                check_aggressive(n, delta / 2.0)
            except DegenerateScheduleError as err:
                pred.warnings.append(f"aba: {err}")
                fallback = True
        if fallback:
            pred.fallback = True
            naive(n, eps, delta)
        else:
            kept = aggressive(n, alpha * eps, delta / 2.0)
            union = kept + min(aba_random_size(n), n - kept)
            naive(union, (1.0 - alpha) * eps, delta / math.e)
    else:  # abaleh
        lam = DEFAULT_LAMBDA if lam is None else lam
        if not 0 < lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        pred.lam = lam
        pred.warnings += abaleh_warnings(n, delta, lam)
        if abaleh_uses_fallback(n, delta, lam):
            pred.fallback = True
            pred.warnings.append(
                f"abaleh: aggressive stage degenerate on {abaleh_top_size(n, lam)} arms; "
                "using naive elimination"
            )
            naive(n, eps, delta)
        else:
            a = abaleh_alpha(lam)
            rounds.append((n, abaleh_stage1_budget(eps, delta, lam)))
            top = abaleh_top_size(n, lam)
            kept = aggressive(top, eps * a, delta / 4.0)
            union = kept + min(abaleh_random_size(n), n - kept)
            naive(union, (1.0 - a) * eps, delta / 4.0)
    return pred
