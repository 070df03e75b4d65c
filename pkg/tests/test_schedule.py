import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandit_elim import schedule as sch


def test_phi_values():
    assert sch.phi(100000) == pytest.approx(0.11083, abs=1e-4)
    assert sch.phi(300000) == pytest.approx(0.07683, abs=1e-4)
    assert sch.phi(16) == pytest.approx(1.4421, abs=1e-3)
    # independent evaluation: 6 ln 16 / 16^0.75 = 6 * 4 ln 2 / 8
    assert sch.phi(16) == pytest.approx(math.sqrt(3 * math.log(2)), rel=1e-14)
    with pytest.raises(ValueError):
        sch.phi(1)


def test_phi_strictly_decreasing_from_16():
    vals = [sch.phi(n) for n in range(16, 5000)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_phi_d_values():
    expected = math.sqrt((math.log(10) + math.log(math.log(1e5))) / 1e5 ** 0.75)
    assert sch.phi_d(100000, 0) == pytest.approx(expected, rel=1e-12)
    assert sch.phi_d(100000, 0) == pytest.approx(0.02896, abs=1e-4)
    with pytest.raises(ValueError):
        sch.phi_d(2, 0)


def test_phi_d_satisfies_defining_inequality():
    # exp(-phi_d^2 n^{3/4}) = 1/(10 n^d ln n), checked in log space
    n, d = 100000, 6
    lhs = -sch.phi_d(n, d) ** 2 * n ** 0.75
    rhs = -(math.log(10) + d * math.log(n) + math.log(math.log(n)))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_phi_d_monotone_in_d():
    vals = [sch.phi_d(100000, d) for d in (0, 1, 2, 4)]
    assert vals == sorted(vals) and len(set(vals)) == 4


def test_rounds_t():
    assert sch.rounds_t(300000, 0.025) == 2
    assert sch.rounds_t(1000000, 0.01) == 2
    with pytest.raises(sch.DegenerateScheduleError):
        sch.rounds_t(16, 0.1)


def test_big_g():
    q = 0.025 + sch.phi(300000)
    assert sch.big_g(300000, 0.025) == pytest.approx(2 * q + 3 * q * q, rel=1e-12)
    assert sch.big_g(300000, 0.025) == pytest.approx(0.2348, abs=1e-3)
    assert sch.big_g(1000000, 0.01) == pytest.approx(0.1336, abs=1e-3)


def test_big_g_increasing_in_delta():
    vals = [sch.big_g(300000, d) for d in (0.001, 0.01, 0.025, 0.05, 0.1, 0.2)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_hoeffding_samples():
    assert sch.hoeffding_samples(0.1, 0.05) == 150
    assert sch.hoeffding_samples(0.2, 0.05) == 38
    assert sch.hoeffding_samples(0.3, 1.0) == 0
    with pytest.raises(ValueError):
        sch.hoeffding_samples(0.0, 0.1)


@given(st.floats(0.01, 0.9), st.floats(0.01, 0.9), st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_hoeffding_monotone(a1, a2, d1, d2):
    a1, a2 = sorted((a1, a2))
    d1, d2 = sorted((d1, d2))
    assert sch.hoeffding_samples(a1, d1) >= sch.hoeffding_samples(a2, d1)
    assert sch.hoeffding_samples(a1, d1) >= sch.hoeffding_samples(a1, d2)


def test_predict_naive():
    p = sch.predict_samples("naive", 300000, 0.2, 0.05)
    assert p.per_round == [(300000, 781)]
    assert p.total_samples == 234_300_000
    assert sch.predict_samples("naive", 1, 0.2, 0.05).total_samples == 0


def straight_line_aggressive(n, eps, delta):
    # reference loop written without the plan helper
    q = delta + math.sqrt(6 * math.log(n) / n ** 0.75)
    t = math.ceil((math.log(n) + 4 * math.log(2)) / (4 * math.log(1 / q)))
    target = math.ceil(n ** 0.75 / 2)
    ell = math.ceil(2 / eps ** 2 * math.log(1 / delta))
    total, size, i = 0, n, 0
    while True:
        total += size * (i + 1) * ell
        size = min(max(int(size * q), target), size)
        if i == t or size <= target:
            return total, size
        i += 1


def test_predict_aggressive_example():
    p = sch.predict_samples("aggressive", 300000, 0.2, 0.025)
    assert p.per_round == [(300000, 185), (30549, 370)]
    assert p.total_samples == 66_803_130
    plan = sch.aggressive_plan(300000, 0.2, 0.025)
    # 300000^{3/4} = 12818.6, so the terminal target is 6410 arms
    assert plan[-1][2] == sch.aggressive_target(300000) == 6410
    assert straight_line_aggressive(300000, 0.2, 0.025) == (66_803_130, 6410)


@pytest.mark.parametrize("n", [1000, 5000, 100000, 300000, 1000000])
@pytest.mark.parametrize("delta", [0.01, 0.05, 0.2])
def test_aggressive_matches_reference_loop(n, delta):
    try:
        plan = sch.aggressive_plan(n, 0.1, delta)
    except sch.DegenerateScheduleError:
        assert delta + sch.phi(n) >= 0.5
        return
    total = sum(size * s for size, s, _ in plan)
    assert (total, plan[-1][2]) == straight_line_aggressive(n, 0.1, delta)
    sizes = [size for size, _, _ in plan]
    assert all(a > b for a, b in zip(sizes, sizes[1:]))


def test_aggressive_degenerate():
    with pytest.raises(sch.DegenerateScheduleError):
        sch.aggressive_plan(16, 0.2, 0.1)
    with pytest.raises(sch.DegenerateScheduleError):
        sch.predict_samples("aggressive", 16, 0.2, 0.1)


def test_predict_saba_example():
    p = sch.predict_samples("saba", 300000, 0.2, 0.05)
    terminal = p.per_round[-1]
    assert terminal[0] == 6410
    assert terminal[1] == math.ceil(50 * math.log(6410 * math.e / 0.05))
    assert p.total_samples == 70_899_120
    assert p.total_samples <= 4 * 300000 / 0.04 * math.log(20)


def test_predict_aba_example():
    p = sch.predict_samples("aba", 300000, 0.2, 0.05)
    assert not p.fallback
    assert sch.aba_random_size(300000) == 31007
    assert p.total_samples == 367_644_315
    assert p.total_samples <= 18 * 300000 / 0.04 * math.log(20)


def test_aba_fallback_rule():
    assert sch.predict_samples("aba", 10000, 0.2, 0.05).fallback
    assert not sch.predict_samples("aba", 200000, 0.2, 0.1).fallback
    p = sch.predict_samples("aba", 10000, 0.2, 0.05)
    assert p.total_samples == sch.predict_samples("naive", 10000, 0.2, 0.05).total_samples


def test_abaleh_parts():
    assert sch.abaleh_alpha(0.5) == pytest.approx(math.sqrt(0.9375), abs=1e-12)
    assert sch.abaleh_alpha(0.5) == pytest.approx(0.96825, abs=1e-5)
    assert sch.abaleh_stage1_budget(0.2, 0.05, 0.5) == 47
    assert sch.abaleh_top_size(300000, 0.5) == 3000
    assert sch.abaleh_random_size(300000) == 12819
    p = sch.predict_samples("abaleh", 300000, 0.2, 0.05, lam=0.5)
    assert p.per_round[0] == (300000, 47)
    assert p.total_samples == 8_962_986_422
    assert any("delta0" in w for w in p.warnings)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.5), st.floats(1e-4, 0.5))
def test_abaleh_stage1_below_one_plus_lambda(lam, eps, delta):
    s = sch.abaleh_stage1_budget(eps, delta, lam)
    assert s - 1 < (1 + lam) * math.log(1 / delta) / (2 * eps * eps)


def test_abaleh_degenerate_stage_falls_back():
    # the aggressive stage would run on 1000 arms where delta/4 + phi >= 1/2
    p = sch.predict_samples("abaleh", 100000, 0.2, 0.1)
    assert p.fallback
    assert p.total_samples == sch.predict_samples("naive", 100000, 0.2, 0.1).total_samples


def test_median_plan():
    p = sch.predict_samples("median", 2, 0.4, 0.1)
    assert p.per_round == [(2, 1638)]
    assert p.total_samples == 3276
    big = sch.predict_samples("median", 300000, 0.2, 0.05)
    assert 5e9 <= big.total_samples <= 5e10
    assert [c for c, _ in big.per_round[:3]] == [300000, 150000, 75000]


@settings(max_examples=60)
@given(st.sampled_from(sch.ALGORITHMS), st.integers(2, 400000), st.floats(0.05, 0.5), st.floats(0.005, 0.3))
def test_prediction_invariants(algo, n, eps, delta):
    try:
        p = sch.predict_samples(algo, n, eps, delta)
    except sch.DegenerateScheduleError:
        assert algo in ("aggressive", "saba")
        return
    assert p.total_samples == sum(c * s for c, s in p.per_round)
    assert all(c >= 1 and s >= 1 for c, s in p.per_round)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        sch.predict_samples("naive", 10, 0.0, 0.1)
    with pytest.raises(ValueError):
        sch.predict_samples("naive", 10, 0.1, 1.0)
    with pytest.raises(ValueError):
        sch.predict_samples("bogus", 10, 0.1, 0.1)
    with pytest.raises(ValueError):
        sch.predict_samples("abaleh", 10, 0.1, 0.1, lam=1.5)
    with pytest.raises(ValueError):
        sch.predict_samples("aba", 10, 0.1, 0.1, alpha=0.0)
