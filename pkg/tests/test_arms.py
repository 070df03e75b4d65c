import numpy as np
import pytest

from bandit_elim.arms import (ArmKind, ArmSpec, EmpiricalStats, SamplingOracle, is_eps_best,
                              make_instance)


def test_appendix_style_instance():
    inst = make_instance([(ArmSpec.bernoulli(0.5), 299999), (ArmSpec.bernoulli(0.7 + 1e-13), 1)])
    assert inst.n == 300000
    assert inst.best_index == 299999


def test_single_arm_and_ties():
    assert make_instance([(ArmSpec.bernoulli(1.0), 1)]).best_index == 0
    tie = make_instance([(ArmSpec.bernoulli(0.6), 1), (ArmSpec.bernoulli(0.6), 2)])
    assert tie.best_index == 0


def test_spec_validation():
    with pytest.raises(ValueError):
        ArmSpec.bernoulli(1.2)
    with pytest.raises(ValueError):
        ArmSpec.bernoulli(-0.1)
    with pytest.raises(ValueError):
        ArmSpec.gaussian(0.5, 0.0)
    with pytest.raises(ValueError):
        ArmSpec.gaussian(0.5, 0.6)
    assert ArmSpec("gaussian", 0.5, 0.5).kind is ArmKind.GAUSSIAN
    with pytest.raises(ValueError):
        make_instance([(ArmSpec.bernoulli(0.5), 0)])


def test_is_eps_best():
    inst = make_instance([(ArmSpec.bernoulli(0.7), 1), (ArmSpec.bernoulli(0.5), 1)])
    assert is_eps_best(inst, 0, 0.0)
    assert is_eps_best(inst, 1, 0.2)
    below = make_instance([(ArmSpec.bernoulli(0.7), 1), (ArmSpec.bernoulli(0.5 - 1e-9), 1)])
    assert not is_eps_best(below, 1, 0.2)
    with pytest.raises(IndexError):
        is_eps_best(inst, 2, 0.1)


def test_pull_counts_and_edge_cases():
    inst = make_instance([(ArmSpec.bernoulli(1.0), 1), (ArmSpec.bernoulli(0.0), 1), (ArmSpec.bernoulli(0.5), 1)])
    o = SamplingOracle(inst, 5, 0)
    assert o.pull(0, 0) == (0, 0)
    assert o.total_pulls == 0 and o.pulls.sum() == 0
    assert o.pull(0, 50) == (50, 50)
    assert o.pull(1, 50) == (0, 50)
    s, c = o.pull(2, 30)
    assert 0 <= s <= 30 and float(s).is_integer()
    assert o.pulls.tolist() == [50, 50, 30]
    assert o.total_pulls == o.pulls.sum() == 130
    with pytest.raises(IndexError):
        o.pull(3, 1)
    with pytest.raises(ValueError):
        o.pull(0, -1)


def test_large_pull_concentrates():
    # |sum/N - 0.7| < 0.002 is a 4.4 sigma event at N = 10^6
    inst = make_instance([(ArmSpec.bernoulli(0.7), 1)])
    means = [SamplingOracle(inst, seed, 0).pull(0, 10 ** 6)[0] / 1e6 for seed in range(2000)]
    inside = np.mean(np.abs(np.array(means) - 0.7) < 0.002)
    assert inside >= 0.999


def test_streams_independent_of_pull_order():
    inst = make_instance([(ArmSpec.bernoulli(0.3), 4), (ArmSpec.gaussian(0.6, 0.2), 3)])
    a = SamplingOracle(inst, 11, 2)
    b = SamplingOracle(inst, 11, 2)
    ra = [a.pull_many(np.arange(7), 10), a.pull_many(np.array([1, 5]), 3)]
    rb = [b.pull_many(np.array([5, 1]), 10)[::-1], b.pull_many(np.array([0, 2, 3, 4, 6]), 10),
          b.pull_many(np.array([1, 5]), 3)]
    assert np.array_equal(ra[0][[1, 5]], rb[0])
    assert np.array_equal(ra[0][[0, 2, 3, 4, 6]], rb[1])
    assert np.array_equal(ra[1], rb[2])
    c = SamplingOracle(inst, 11, 3)
    assert not np.array_equal(c.pull_many(np.arange(7), 10), ra[0])


def test_gaussian_pulls_unclipped():
    inst = make_instance([(ArmSpec.gaussian(1.0, 0.5), 1)])
    vals = [SamplingOracle(inst, s, 0).pull(0, 1)[0] for s in range(200)]
    assert max(vals) > 1.0


def test_empirical_stats():
    st = EmpiricalStats(np.array([3, 7]))
    assert np.isnan(st.means()).all()
    st.record(np.array([4.0, 1.0]), 5)
    st.record(np.array([1.0, 0.0]), 5)
    assert st.means().tolist() == [0.5, 0.1]
    assert st.counts.tolist() == [10, 10]
