from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from clinistruct.stats import (
    DegenerateVarianceError,
    bootstrap_ci,
    classify_effect,
    cohens_d,
    mann_whitney_u,
    midranks,
    standard_error,
    u_statistic,
    welch_t_test,
)


def enumerate_p(a, b):
    """Two-sided permutation p-value of U by listing every relabeling."""
    pooled = [*a, *b]
    n1 = len(a)
    mu = n1 * len(b) / 2.0

    def u_of(x, y):
        return sum(1.0 if p > q else 0.5 if p == q else 0.0 for p in x for q in y)

    observed = abs(u_of(a, b) - mu)
    total = extreme = 0
    for idx in itertools.combinations(range(len(pooled)), n1):
        chosen = set(idx)
        x = [pooled[i] for i in idx]
        y = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        total += 1
        extreme += abs(u_of(x, y) - mu) >= observed - 1e-9
    return extreme / total


SIZES = [(n1, n2) for n1 in range(1, 17) for n2 in range(1, 17) if n1 * n2 <= 16]


# -- standard error

def test_se_worked_example():
    assert round(standard_error(0.95, 1000), 6) == 0.006892


@pytest.mark.parametrize("p, n, se", [(1.0, 500, 0.0), (0.5, 100, 0.05), (0.0, 3, 0.0)])
def test_se_values(p, n, se):
    assert standard_error(p, n) == pytest.approx(se, abs=1e-15)


@pytest.mark.parametrize("p, n", [(-0.1, 10), (1.1, 10), (0.5, 0), (float("nan"), 3)])
def test_se_rejects(p, n):
    with pytest.raises(ValueError):
        standard_error(p, n)


@given(st.floats(min_value=0, max_value=1), st.integers(min_value=1, max_value=10**6))
def test_se_bound(p, n):
    assert standard_error(p, n) <= 0.5 / math.sqrt(n) + 1e-15


def test_se_bound_attained_at_half():
    assert standard_error(0.5, 400) == 0.5 / 20


# -- effect size

def test_cohens_d_fixture():
    r = cohens_d([70, 80], [85, 95])
    assert r.d == pytest.approx(-2.1213, abs=1e-4)
    assert r.pooled_sd == pytest.approx(7.0711, abs=1e-4)
    assert r.label == "large"


def test_cohens_d_identical_groups():
    assert cohens_d([1, 2, 3], [1, 2, 3]).d == 0.0


def test_cohens_d_constant_groups():
    with pytest.raises(DegenerateVarianceError):
        cohens_d([5, 5], [5, 5])


def test_cohens_d_needs_two():
    with pytest.raises(ValueError):
        cohens_d([1], [1, 2])


@pytest.mark.parametrize("d, label", [
    (0.0, "small"), (0.29, "small"), (-0.26, "small"), (0.2999999, "small"),
    (0.3, "small-to-medium"), (0.4999, "small-to-medium"),
    (0.5, "medium"), (-0.5, "medium"), (0.7999, "medium"),
    (0.8, "large"), (-0.8, "large"), (2.12, "large"),
])
def test_effect_bands(d, label):
    assert classify_effect(d) == label


# -- Welch

def test_welch_identical():
    r = welch_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert r.statistic == 0.0
    assert abs(r.p_value - 1.0) <= 1e-9


def test_welch_tiny_variance_is_finite():
    r = welch_t_test([0.0, 0.0], [0.0, 3.46e-85])
    assert math.isfinite(r.df) and r.df > 0


def test_welch_degenerate():
    with pytest.raises(DegenerateVarianceError):
        welch_t_test([2, 2], [2, 2])


@pytest.mark.filterwarnings("ignore:Precision loss:RuntimeWarning")
@settings(max_examples=50)
@given(st.lists(st.integers(-1000, 1000).map(lambda x: x / 10), min_size=2, max_size=12),
       st.lists(st.integers(-1000, 1000).map(lambda x: x / 10), min_size=2, max_size=12))
def test_welch_matches_scipy(a, b):
    try:
        ours = welch_t_test(a, b)
    except DegenerateVarianceError:
        return
    ref = sps.ttest_ind(a, b, equal_var=False)
    if not np.isfinite(ref.statistic):
        return
    assert ours.statistic == pytest.approx(ref.statistic, rel=1e-6, abs=1e-9)
    assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-6, abs=1e-9)


# -- Mann-Whitney

def test_u_examples():
    assert u_statistic([1, 2], [3, 4]) == 0
    assert u_statistic([1, 2], [1, 2]) == 2


def test_midranks_ties():
    assert midranks([3, 1, 3, 2]) == [3.5, 1.0, 3.5, 2.0]


@pytest.mark.parametrize("n1, n2", SIZES)
def test_exact_p_equals_enumeration_distinct(n1, n2):
    values = list(range(n1 + n2))
    for shift in range(min(4, n1 + n2)):
        rolled = values[shift:] + values[:shift]
        a, b = rolled[:n1], rolled[n1:]
        assert mann_whitney_u(a, b).p_value == pytest.approx(enumerate_p(a, b), abs=1e-12)


@pytest.mark.parametrize("n1, n2", SIZES)
@settings(max_examples=15, deadline=None)
@given(data=st.data())
def test_exact_p_equals_enumeration_ties(n1, n2, data):
    a = data.draw(st.lists(st.integers(0, 3), min_size=n1, max_size=n1))
    b = data.draw(st.lists(st.integers(0, 3), min_size=n2, max_size=n2))
    r = mann_whitney_u(a, b)
    assert r.method == "exact"
    assert r.p_value == pytest.approx(enumerate_p(a, b), abs=1e-12)


@settings(max_examples=40)
@given(st.lists(st.integers(0, 20), min_size=9, max_size=30),
       st.lists(st.integers(0, 20), min_size=9, max_size=30))
def test_normal_approximation_matches_scipy(a, b):
    r = mann_whitney_u(a, b)
    assert r.method == "normal"
    if len(set(a) | set(b)) == 1:
        assert r.p_value == 1.0
        return
    ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
    assert r.statistic == ref.statistic
    assert r.p_value == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-12)


def test_mwu_needs_values():
    with pytest.raises(ValueError):
        mann_whitney_u([], [1])


# -- bootstrap

def test_bootstrap_constant():
    ci = bootstrap_ci([3.5] * 10, seed=1)
    assert (ci.lo, ci.hi) == (3.5, 3.5)


def test_bootstrap_deterministic():
    xs = [1, 5, 2, 8, 3]
    assert bootstrap_ci(xs, seed=4) == bootstrap_ci(xs, seed=4)
    assert bootstrap_ci(xs, seed=4) != bootstrap_ci(xs, seed=5)


def test_bootstrap_rejects_empty():
    with pytest.raises(ValueError):
        bootstrap_ci([])


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=30))
@settings(max_examples=30, deadline=None)
def test_bootstrap_brackets_within_range(xs):
    ci = bootstrap_ci(xs, resamples=200, seed=0)
    assert min(xs) - 1e-9 <= ci.lo <= ci.hi <= max(xs) + 1e-9
