"""Interaction analytics: engagement run lengths, percent changes,
Welch's unequal-variance two-tailed t-test, rating series, and the
before/after proactivity report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import InputError
from .logstore import SessionSummary


# --- engagement ------------------------------------------------------------

def component_runs(sequence: list[str]) -> dict[str, list[int]]:
    """Maximal consecutive runs per component; a return starts a new run."""
    runs: dict[str, list[int]] = {}
    i = 0
    while i < len(sequence):
        j = i
        while j < len(sequence) and sequence[j] == sequence[i]:
            j += 1
        runs.setdefault(sequence[i], []).append(j - i)
        i = j
    return runs


@dataclass
class RunStats:
    average: float
    run_count: int
    lengths: list[int] = field(default_factory=list)


@dataclass
class EngagementReport:
    per_component: dict[str, RunStats]

    def to_dict(self) -> dict:
        return {
            c: {"average": s.average, "run_count": s.run_count}
            for c, s in self.per_component.items()
        }


def engagement_depth(session_sequences: list[list[str]]) -> EngagementReport:
    """Average maximal-run length per component across sessions."""
    all_runs: dict[str, list[int]] = {}
    for sequence in session_sequences:
        for component, lengths in component_runs(sequence).items():
            all_runs.setdefault(component, []).extend(lengths)
    per_component = {
        c: RunStats(average=sum(ls) / len(ls), run_count=len(ls), lengths=ls)
        for c, ls in all_runs.items()
    }
    return EngagementReport(per_component)


# --- elementary statistics ---------------------------------------------------

def percent_change(before: float, after: float) -> float:
    """(after - before) / before, as a fraction (0.5 means +50%)."""
    if before == 0:
        raise InputError("percent_change undefined for before == 0")
    return (after - before) / before


def _mean_var(sample: list[float]) -> tuple[float, float]:
    n = len(sample)
    mean = sum(sample) / n
    var = sum((x - mean) ** 2 for x in sample) / (n - 1)
    return mean, var


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularized incomplete beta (Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-12:
            break
    return h


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_tailed(t: float, df: float) -> float:
    """P(|T| >= |t|) for T ~ Student-t with df degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return betainc(df / 2.0, 0.5, df / (df + t * t))


@dataclass
class TTestResult:
    t: float
    df: float
    p: float


def welch_ttest(a: list[float], b: list[float]) -> TTestResult:
    """Two-sample t-test with unequal variances (Welch-Satterthwaite df)."""
    if len(a) < 2 or len(b) < 2:
        raise InputError("welch_ttest requires at least 2 observations per sample")
    mean_a, var_a = _mean_var(list(map(float, a)))
    mean_b, var_b = _mean_var(list(map(float, b)))
    na, nb = len(a), len(b)
    se2 = var_a / na + var_b / nb
    if se2 == 0.0:
        # Degenerate: no variance on either side.
        df = float(na + nb - 2)
        if mean_a == mean_b:
            return TTestResult(0.0, df, 1.0)
        t = math.inf if mean_a > mean_b else -math.inf
        return TTestResult(t, df, 0.0)
    t = (mean_a - mean_b) / math.sqrt(se2)
    df = se2**2 / (
        (var_a / na) ** 2 / (na - 1) + (var_b / nb) ** 2 / (nb - 1)
    )
    return TTestResult(t, df, student_t_two_tailed(t, df))


# --- report builders ---------------------------------------------------------

def rating_series(summaries: list[SessionSummary]) -> list[tuple[str, float, int]]:
    """Daily (date, mean rating, count) over rated sessions, in date order."""
    buckets: dict[str, list[int]] = {}
    for s in summaries:
        if s.rating is None:
            continue
        day = datetime.fromtimestamp(s.start_ms / 1000, tz=timezone.utc).strftime("%Y-%m-%d")
        buckets.setdefault(day, []).append(s.rating)
    return [
        (day, sum(vals) / len(vals), len(vals))
        for day, vals in sorted(buckets.items())
    ]


@dataclass
class SplitStats:
    mean_turns: float
    mean_rating: float | None
    sessions: int


@dataclass
class ProactivityReport:
    before: SplitStats
    after: SplitStats
    turns_change: float
    rating_change: float | None
    turns_test: TTestResult
    rating_test: TTestResult | None

    def to_dict(self) -> dict:
        return {
            "before": vars(self.before),
            "after": vars(self.after),
            "turns_change": self.turns_change,
            "rating_change": self.rating_change,
            "turns_test": vars(self.turns_test),
            "rating_test": vars(self.rating_test) if self.rating_test else None,
        }


def proactivity_report(summaries: list[SessionSummary], split_ms: int) -> ProactivityReport:
    """Before/after means of per-session turns and ratings around a split date."""
    before = [s for s in summaries if s.start_ms < split_ms]
    after = [s for s in summaries if s.start_ms >= split_ms]
    if not before or not after:
        raise InputError("proactivity_report needs sessions on both sides of the split")

    turns_b = [float(s.turn_count) for s in before]
    turns_a = [float(s.turn_count) for s in after]
    ratings_b = [float(s.rating) for s in before if s.rating is not None]
    ratings_a = [float(s.rating) for s in after if s.rating is not None]

    mean = lambda xs: sum(xs) / len(xs)
    rating_change = None
    rating_test = None
    if len(ratings_b) >= 2 and len(ratings_a) >= 2:
        rating_change = percent_change(mean(ratings_b), mean(ratings_a))
        rating_test = welch_ttest(ratings_a, ratings_b)
    return ProactivityReport(
        before=SplitStats(mean(turns_b), mean(ratings_b) if ratings_b else None, len(before)),
        after=SplitStats(mean(turns_a), mean(ratings_a) if ratings_a else None, len(after)),
        turns_change=percent_change(mean(turns_b), mean(turns_a)),
        rating_change=rating_change,
        turns_test=welch_ttest(turns_a, turns_b),
        rating_test=rating_test,
    )


@dataclass
class EngagementComparison:
    component: str
    before_average: float
    after_average: float
    change: float
    test: TTestResult

    def to_dict(self) -> dict:
        return {
            "component": self.component,
            "before_average": self.before_average,
            "after_average": self.after_average,
            "change": self.change,
            "test": vars(self.test),
        }


def engagement_comparison(before_sequences: list[list[str]],
                          after_sequences: list[list[str]],
                          component: str) -> EngagementComparison:
    """Before/after average run length for one component, with a Welch test."""
    before = engagement_depth(before_sequences).per_component.get(component)
    after = engagement_depth(after_sequences).per_component.get(component)
    if before is None or after is None:
        raise InputError(f"component {component!r} missing on one side of the split")
    return EngagementComparison(
        component=component,
        before_average=before.average,
        after_average=after.average,
        change=percent_change(before.average, after.average),
        test=welch_ttest([float(x) for x in after.lengths],
                         [float(x) for x in before.lengths]),
    )
