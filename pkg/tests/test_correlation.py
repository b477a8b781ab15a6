import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankmoments.correlation import (PairedSample, compute_ranks,
                                     daniels_gamma, inequality_check, kendall,
                                     kendall_fast, kendall_from_ranks,
                                     pearson, scores_kendall, scores_pearson,
                                     scores_spearman, spearman,
                                     spearman_via_s)
from rankmoments.errors import SizeError, TieError


def sample(x, y):
    return PairedSample(x=np.asarray(x, dtype=float),
                        y=np.asarray(y, dtype=float))


def random_sample(rng, n):
    return sample(rng.permutation(n) + 1.0, rng.permutation(n) + 1.0)


perm_strategy = st.integers(0, 2 ** 32 - 1)


class TestFixtures:
    def test_four_point_fixture(self):
        s = sample([1, 2, 3, 4], [1, 3, 2, 4])
        assert kendall(s) == pytest.approx(2 / 3, abs=0)
        assert spearman(s) == pytest.approx(0.8, abs=0)
        assert pearson(s) == pytest.approx(0.8, abs=1e-15)

    def test_identity(self):
        s = sample([1, 2, 3, 4, 5], [10, 20, 30, 40, 50])
        assert pearson(s) == pytest.approx(1.0, abs=1e-15)
        assert spearman(s) == 1.0
        assert kendall(s) == 1.0

    def test_reversal(self):
        s = sample([1, 2, 3, 4, 5], [5, 4, 3, 2, 1])
        assert spearman(s) == -1.0
        assert kendall(s) == -1.0

    def test_three_point_s_statistic(self):
        s = sample([1, 2, 3], [2, 1, 3])
        val, stats = spearman_via_s(s)
        assert val == pytest.approx(0.5, abs=0)
        t_norm = stats.t_value / (3 * 2)
        assert t_norm == pytest.approx(kendall(s), abs=0)

    def test_ranks(self):
        s = sample([10, 30, 20], [1, 2, 3])
        rv = compute_ranks(s)
        assert rv.p.tolist() == [1, 3, 2]
        assert rv.q.tolist() == [1, 2, 3]

    def test_ties_rejected(self):
        with pytest.raises(TieError) as exc:
            spearman(sample([1, 2, 2, 4], [1, 2, 3, 4]))
        assert exc.value.coordinate == "x"
        assert 2.0 in exc.value.values

    def test_too_small(self):
        with pytest.raises(SizeError):
            kendall(sample([1], [1]))


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(perm_strategy, st.integers(3, 50))
    def test_s_statistic_identity_exact(self, seed, n):
        s = random_sample(np.random.default_rng(seed), n)
        via_s, _ = spearman_via_s(s)
        assert via_s == spearman(s)

    @settings(max_examples=200, deadline=None)
    @given(perm_strategy, st.integers(3, 50))
    def test_fast_kendall_matches_reference(self, seed, n):
        s = random_sample(np.random.default_rng(seed), n)
        assert kendall_fast(s) == pytest.approx(kendall(s), abs=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(perm_strategy, st.integers(3, 50))
    def test_inequalities_hold(self, seed, n):
        s = random_sample(np.random.default_rng(seed), n)
        daniel_ok, ds_ok = inequality_check(spearman(s), kendall(s), n)
        assert daniel_ok and ds_ok

    @settings(max_examples=100, deadline=None)
    @given(perm_strategy, st.integers(3, 30))
    def test_symmetry_and_sign_flip(self, seed, n):
        s = random_sample(np.random.default_rng(seed), n)
        swapped = sample(s.y, s.x)
        negated = sample(-s.x, s.y)
        for coef in (pearson, spearman, kendall):
            assert coef(swapped) == pytest.approx(coef(s), abs=1e-12)
            assert coef(negated) == pytest.approx(-coef(s), abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(perm_strategy, st.integers(3, 30))
    def test_monotone_invariance(self, seed, n):
        s = random_sample(np.random.default_rng(seed), n)
        warped = sample(np.exp(s.x / 10), s.y ** 3)
        assert spearman(warped) == spearman(s)
        assert kendall(warped) == kendall(s)

    @settings(max_examples=100, deadline=None)
    @given(perm_strategy, st.integers(3, 30))
    def test_score_forms_match_direct(self, seed, n):
        s = random_sample(np.random.default_rng(seed), n)
        assert daniels_gamma(scores_pearson(s)) == pytest.approx(
            pearson(s), abs=1e-12)
        assert daniels_gamma(scores_spearman(s)) == pytest.approx(
            spearman(s), abs=1e-12)
        assert daniels_gamma(scores_kendall(s)) == pytest.approx(
            kendall(s), abs=1e-12)


class TestInequalityEdges:
    def test_perfect_agreement(self):
        assert inequality_check(1.0, 1.0, 10) == (True, True)

    def test_perfect_reversal(self):
        assert inequality_check(-1.0, -1.0, 10) == (True, True)

    def test_durbin_stuart_bound_value(self):
        # rk = 0.5, n = 10: bound is 1 - 0.5 * 8.5 / 22
        bound = 1 - 0.5 * (9 * 0.5 + 4) / 22
        assert inequality_check(bound - 1e-9, 0.5, 10)[1]
        assert not inequality_check(bound + 1e-6, 0.5, 10)[1]

    def test_small_n_rejected(self):
        with pytest.raises(SizeError):
            inequality_check(0.0, 0.0, 2)


def test_kendall_from_ranks_matches():
    rng = np.random.default_rng(5)
    s = random_sample(rng, 40)
    rv = compute_ranks(s)
    assert kendall_from_ranks(rv.p, rv.q) == pytest.approx(kendall(s), abs=1e-15)


def test_large_n_fast_path():
    rng = np.random.default_rng(11)
    s = random_sample(rng, 2000)
    rv = compute_ranks(s)
    assert kendall_from_ranks(rv.p, rv.q) == pytest.approx(kendall_fast(s),
                                                           abs=1e-15)
