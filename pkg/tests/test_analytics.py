import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from convsearch.analytics import (EngagementReport, betainc, component_runs,
                                  engagement_comparison, engagement_depth,
                                  percent_change, proactivity_report, rating_series,
                                  student_t_two_tailed, welch_ttest)
from convsearch.errors import InputError
from convsearch.logstore import SessionSummary

DAY_MS = 86_400_000


# -- runs ------------------------------------------------------------------------

def test_component_runs_hand_example():
    runs = component_runs(["Movies", "Movies", "News", "Movies"])
    assert runs == {"Movies": [2, 1], "News": [1]}


def test_engagement_depth_hand_example():
    report = engagement_depth([["Movies", "Movies", "News", "Movies"]])
    assert report.per_component["Movies"].average == pytest.approx(1.5)
    assert report.per_component["Movies"].run_count == 2
    assert report.per_component["News"].average == pytest.approx(1.0)


def test_engagement_depth_empty():
    assert engagement_depth([]).per_component == {}
    assert engagement_depth([[]]).per_component == {}


@given(st.lists(st.lists(st.sampled_from(["a", "b", "c"]), max_size=20), max_size=8))
def test_run_lengths_sum_to_turn_count(sequences):
    report = engagement_depth(sequences)
    total_runs = sum(sum(s.lengths) for s in report.per_component.values())
    assert total_runs == sum(len(seq) for seq in sequences)


# -- percent change -----------------------------------------------------------------

def test_percent_change_paper_values():
    assert percent_change(1.830, 2.745) * 100 == pytest.approx(50.0, abs=0.1)
    assert percent_change(9.66, 10.9) * 100 == pytest.approx(12.8, abs=0.1)
    assert percent_change(2.962, 3.218) * 100 == pytest.approx(8.6, abs=0.1)


def test_percent_change_identity_and_zero():
    assert percent_change(4.0, 4.0) == 0.0
    with pytest.raises(InputError):
        percent_change(0.0, 1.0)


# Metric-scale values (ratings, turns, run lengths); the 1e-12 identity is a
# float64 property only while the before/after ratio stays moderate.
@given(st.floats(0.1, 100), st.floats(0.1, 100))
def test_percent_change_reciprocal(a, b):
    r_ab = percent_change(a, b)
    r_ba = percent_change(b, a)
    assert (1 + r_ab) * (1 + r_ba) == pytest.approx(1.0, abs=1e-12)


# -- welch -------------------------------------------------------------------------

def test_welch_identical_samples():
    result = welch_ttest([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert result.t == 0.0
    assert result.p == pytest.approx(1.0)


def test_welch_hand_example():
    result = welch_ttest([1, 2, 3], [2, 3, 4])
    assert result.t == pytest.approx(-1.2247, abs=1e-4)
    assert result.df == pytest.approx(4.0, abs=1e-9)
    assert result.p == pytest.approx(0.2879, abs=1e-4)


def test_welch_order_swap_negates_t():
    a, b = [1.0, 2.0, 5.0, 3.0], [4.0, 4.5, 6.0]
    r1 = welch_ttest(a, b)
    r2 = welch_ttest(b, a)
    assert r1.t == pytest.approx(-r2.t)
    assert r1.p == pytest.approx(r2.p)
    assert (r1.df > 0) and (r2.df > 0)


def test_welch_degenerate_zero_variance():
    result = welch_ttest([2.0, 2.0], [2.0, 2.0])
    assert (result.t, result.p) == (0.0, 1.0)
    assert welch_ttest([2.0, 2.0], [3.0, 3.0]).p == 0.0


def test_welch_small_samples_rejected():
    with pytest.raises(InputError):
        welch_ttest([1.0], [1.0, 2.0])


def test_welch_matches_scipy_on_grid():
    rng = random.Random(123)
    for _ in range(100):
        na, nb = rng.randint(3, 50), rng.randint(3, 50)
        a = [rng.gauss(0, 1) for _ in range(na)]
        b = [rng.gauss(0.4, 1.7) for _ in range(nb)]
        ours = welch_ttest(a, b)
        ref = scipy_stats.ttest_ind(a, b, equal_var=False)
        assert ours.t == pytest.approx(ref.statistic, abs=1e-9)
        assert ours.p == pytest.approx(ref.pvalue, abs=1e-6)


def test_betainc_against_scipy():
    from scipy.special import betainc as scipy_betainc

    rng = random.Random(5)
    for _ in range(200):
        a = rng.uniform(0.1, 40)
        b = rng.uniform(0.1, 40)
        x = rng.random()
        assert betainc(a, b, x) == pytest.approx(scipy_betainc(a, b, x), abs=1e-8)


def test_student_t_two_tailed_against_scipy():
    for t, df in [(1.0, 3.0), (-2.5, 7.2), (0.0, 4.0), (4.2, 33.0)]:
        ref = 2 * scipy_stats.t.sf(abs(t), df)
        assert student_t_two_tailed(t, df) == pytest.approx(ref, abs=1e-8)


# -- report builders -------------------------------------------------------------------

def summary(sid, turns, rating, start_ms, components=None):
    return SessionSummary(
        session_id=sid, turn_count=turns, rating=rating,
        component_turns=components or {}, start_ms=start_ms, end_ms=start_ms,
    )


def test_rating_series_daily_buckets():
    day = 1_700_000_000_000
    summaries = [
        summary("a", 3, 2, day),
        summary("b", 4, 4, day + 1000),
        summary("c", 2, None, day),          # unrated excluded
        summary("d", 1, 5, day + DAY_MS),
    ]
    series = rating_series(summaries)
    assert len(series) == 2
    assert series[0][1] == pytest.approx(3.0) and series[0][2] == 2
    assert series[1][1] == pytest.approx(5.0) and series[1][2] == 1
    assert all(1 <= mean <= 5 for _, mean, _ in series)


def test_rating_series_empty():
    assert rating_series([summary("a", 3, None, 0)]) == []


def _exact_mean_sample(mean, n):
    total = round(mean * n)
    base = total // n
    extra = total - base * n
    return [base + 1] * extra + [base] * (n - extra)


def test_proactivity_report_paper_effect_sizes():
    split = 1_700_000_000_000
    n = 500  # both target means are exact at n=500
    turns_before = _exact_mean_sample(9.66, n)
    turns_after = _exact_mean_sample(10.9, n)
    ratings_before = _exact_mean_sample(2.962, n)
    ratings_after = _exact_mean_sample(3.218, n)

    summaries = [
        summary(f"b{i}", turns_before[i], ratings_before[i], split - DAY_MS)
        for i in range(n)
    ] + [
        summary(f"a{i}", turns_after[i], ratings_after[i], split + DAY_MS)
        for i in range(n)
    ]
    report = proactivity_report(summaries, split)
    assert report.before.mean_turns == pytest.approx(9.66)
    assert report.after.mean_turns == pytest.approx(10.9)
    assert report.turns_change * 100 == pytest.approx(12.8, abs=0.1)
    assert report.rating_change * 100 == pytest.approx(8.6, abs=0.1)
    assert report.turns_test.p < 0.001
    assert report.rating_test.p < 0.001


def test_proactivity_report_identity():
    split = 1_000
    summaries = [summary(f"b{i}", 7, 3, 500) for i in range(10)]
    summaries += [summary(f"a{i}", 7, 3, 1500) for i in range(10)]
    report = proactivity_report(summaries, split)
    assert report.turns_change == 0.0
    assert report.turns_test.p == pytest.approx(1.0)


def test_proactivity_report_empty_side_rejected():
    with pytest.raises(InputError):
        proactivity_report([summary("a", 3, 3, 10)], 0)


def test_engagement_comparison_news_effect():
    before_lengths = _exact_mean_sample(1.830, 200)
    after_lengths = _exact_mean_sample(2.745, 200)
    before = [["news"] * k + ["smalltalk"] for k in before_lengths]
    after = [["news"] * k + ["smalltalk"] for k in after_lengths]
    comparison = engagement_comparison(before, after, "news")
    assert comparison.before_average == pytest.approx(1.830)
    assert comparison.after_average == pytest.approx(2.745)
    assert comparison.change * 100 == pytest.approx(50.0, abs=0.1)
    assert comparison.test.p < 0.001
