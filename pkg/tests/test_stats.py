import pytest
from hypothesis import given
from hypothesis import strategies as st

from idiotransfer.harness.control import EpisodeResult
from idiotransfer.harness.stats import (a_test, effect_label, mann_whitney, median_iqr,
                                        summarize, u_statistic)

from .oracles import a_brute, exact_p_brute, small_samples


def test_mann_whitney_examples():
    assert mann_whitney([1, 2], [3, 4]) == pytest.approx(1 / 3)
    assert mann_whitney([1, 2, 3], [1, 2, 3]) == 1.0
    assert mann_whitney(range(1, 11), range(11, 21)) < 0.001


def test_mann_whitney_modes():
    x, y = range(1, 11), range(11, 21)
    assert mann_whitney(x, y, "exact") < 0.001
    assert mann_whitney(x, y, "approx") < 0.001
    with pytest.raises(ValueError):
        mann_whitney(x, y, "bootstrap")
    with pytest.raises(ValueError):
        mann_whitney([], [1])


def test_exact_matches_enumeration():
    for x, y in small_samples(seed=1):
        assert mann_whitney(x, y, "exact") == pytest.approx(exact_p_brute(x, y), abs=1e-12)


def test_auto_switches_at_fourteen():
    x, y = [1, 2, 3, 4, 5, 6, 7], [8, 9, 10, 11, 12, 13, 14]
    assert mann_whitney(x, y) == mann_whitney(x, y, "exact")
    x2 = x + [15]
    assert mann_whitney(x2, y) == mann_whitney(x2, y, "approx")


def test_approximation_reasonable_at_moderate_size():
    x = [3, 5, 8, 9, 12, 13, 15, 18, 21, 22]
    y = [1, 2, 4, 6, 7, 10, 11, 14, 16, 17]
    assert abs(mann_whitney(x, y, "approx") - mann_whitney(x, y, "exact")) < 0.02


def test_all_ties_gives_one():
    assert mann_whitney([5] * 20, [5] * 20) == 1.0


def test_a_test_examples():
    assert a_test([1, 2], [3, 4]) == 0.0
    assert a_test([1, 2], [1, 2]) == 0.5
    assert a_test([3, 4], [1, 2]) == 1.0
    with pytest.raises(ValueError):
        a_test([], [1])


def test_a_test_matches_brute_force():
    for x, y in small_samples(seed=2):
        assert a_test(x, y) == a_brute(x, y)


samples = st.lists(st.integers(0, 30), min_size=1, max_size=25)


@given(samples, samples)
def test_a_and_u_properties(x, y):
    a = a_test(x, y)
    assert 0.0 <= a <= 1.0
    assert a + a_test(y, x) == pytest.approx(1.0)
    assert u_statistic(x, y) + u_statistic(y, x) == pytest.approx(len(x) * len(y))
    assert 0.0 <= mann_whitney(x, y) <= 1.0


@given(samples, samples)
def test_mann_whitney_symmetric(x, y):
    assert mann_whitney(x, y) == pytest.approx(mann_whitney(y, x), abs=1e-12)


def test_effect_labels():
    assert effect_label(0.5) == "small"
    assert effect_label(0.65) == "medium"
    assert effect_label(0.25) == "large"


def test_median_iqr():
    assert median_iqr([148]) == (148.0, 0.0)
    assert median_iqr([1, 2, 3, 4])[0] == 2.5
    assert median_iqr([1, 1, 2, 2, 6, 9])[0] == 2.0
    # linear interpolation: Q1 = 1.75, Q3 = 3.25
    assert median_iqr([1, 2, 3, 4])[1] == pytest.approx(1.5)
    with pytest.raises(ValueError):
        median_iqr([])


def test_summarize():
    rs = [EpisodeResult(t, c, t >= 900) for t, c in [(100, 1), (900, 4), (300, 2), (500, 0)]]
    s = summarize(rs)
    assert s.runs == 4 and s.fail_rate == 0.25
    assert s.time_median == 400.0 and s.collisions_median == 1.5
    with pytest.raises(ValueError):
        summarize([])
