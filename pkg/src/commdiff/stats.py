"""Correlation with significance stars, and the impact correlation tables."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc
from scipy.stats import rankdata

from .errors import ComputationError, InputError
from .metrics import ImpactScores


class LengthMismatch(ComputationError):
    pass


class ZeroVariance(ComputationError):
    pass


class TooFewSamples(ComputationError):
    pass


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    n: int
    p_value: float
    significance: str
    method: str = "pearson"


def stars(p: float) -> str:
    if p <= 0.001:
        return "***"
    if p <= 0.05:
        return "*"
    return "ns"


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("a series has zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def t_test_p(r: float, n: int) -> float:
    """Two-tailed p for ``t = r sqrt((n-2)/(1-r^2))`` with ``n-2`` degrees of freedom."""
    df = n - 2
    if abs(r) >= 1.0:
        return 0.0
    t2 = r * r * df / (1.0 - r * r)
    # P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    return float(betainc(df / 2.0, 0.5, df / (df + t2)))


def permutation_p(x: np.ndarray, y: np.ndarray, r: float, n_draws: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(n_draws):
        if abs(_pearson_r(x, rng.permutation(y))) >= abs(r) - 1e-12:
            hits += 1
    return (hits + 1) / (n_draws + 1)


def pearson_with_significance(
    xs: Sequence[float],
    ys: Sequence[float],
    method: str = "pearson",
    permutation: bool = False,
    n_permutations: int = 10_000,
    seed: int = 0,
) -> CorrelationResult:
    """Sample correlation and its two-tailed p-value.

    ``method="spearman"`` correlates average ranks instead. With
    ``permutation=True`` and fewer than 10 points the p-value comes from a
    seeded permutation test instead of the t distribution.
    """
    if method not in ("pearson", "spearman"):
        raise InputError(f"unknown correlation method {method!r}")
    if len(xs) != len(ys):
        raise LengthMismatch(f"series lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 3:
        raise TooFewSamples(f"need at least 3 points, got {n}")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if method == "spearman":
        x, y = rankdata(x), rankdata(y)
    r = _pearson_r(x, y)
    if permutation and n < 10:
        p = permutation_p(x, y, r, n_permutations, seed)
    else:
        p = t_test_p(r, n)
    return CorrelationResult(r, n, p, stars(p), method)


@dataclass(frozen=True)
class CorrelationRow:
    group: str
    metric_x: str
    metric_y: str
    n: int
    result: CorrelationResult | None  # None when the cell could not be computed


def _cell(group, mx, my, pairs, method, permutation, seed) -> CorrelationRow:
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    try:
        res = pearson_with_significance(xs, ys, method=method, permutation=permutation, seed=seed)
    except ComputationError:
        res = None
    return CorrelationRow(group, mx, my, len(pairs), res)


def correlation_tables(
    impacts: Sequence[ImpactScores],
    article_topics: Mapping[str, int] | None = None,
    altmetric: Mapping[str, float | None] | None = None,
    k: int | None = None,
    mentioned_only: bool = False,
    method: str = "pearson",
    permutation: bool = False,
    seed: int = 0,
) -> list[CorrelationRow]:
    """Overall, per-topic and Altmetric correlation rows.

    Academic impact pairs only use articles with a citation count; Altmetric
    rows only use articles with an Altmetric score. ``mentioned_only`` drops
    articles no tweet mentions. Topic groups are labelled 1-based.
    """
    rows: list[CorrelationRow] = []
    pool = [s for s in impacts if s.m > 0] if mentioned_only else list(impacts)
    cited = [s for s in pool if s.academic is not None]

    def pair_rows(group, subset):
        for attr in ("social_sentiment", "social_user"):
            pairs = [(s.academic, getattr(s, attr)) for s in subset]
            rows.append(_cell(group, "academic_impact", attr, pairs, method, permutation, seed))

    pair_rows("all", cited)
    if article_topics is not None:
        labels = [article_topics[s.article_id] for s in impacts]
        n_topics = k if k is not None else (max(labels) + 1 if labels else 0)
        for t in range(n_topics):
            pair_rows(f"topic {t + 1}", [s for s in cited if article_topics[s.article_id] == t])
    if altmetric is not None:
        scored = [s for s in pool if altmetric.get(s.article_id) is not None]
        for attr, values in (
            ("academic_impact", [(altmetric[s.article_id], s.academic) for s in scored if s.academic is not None]),
            ("social_sentiment", [(altmetric[s.article_id], s.social_sentiment) for s in scored]),
            ("social_user", [(altmetric[s.article_id], s.social_user) for s in scored]),
        ):
            rows.append(_cell("altmetric", "altmetric_score", attr, values, method, permutation, seed))
        for attr, field_name in (("tweet_count", "m"), ("user_count", "n_users")):
            pairs = [(altmetric[s.article_id], getattr(s, field_name)) for s in scored]
            rows.append(_cell("altmetric_counts", "altmetric_score", attr, pairs, method, permutation, seed))
    return rows
