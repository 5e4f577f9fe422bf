"""Per-article impact scores and per-topic concern scores.

Impact: academic impact normalizes citations by years since publication;
the two social scores measure depth (sentiment strength weighted by
log-retweets, averaged over mentioning tweets) and breadth (log of the
summed follower counts of distinct users).

Concern: each topic's share of articles, and how much Twitter attention
the topic's articles attract per article.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .corpus import Article, Corpus, Tweet
from .errors import ComputationError, InputError
from .sentiment import SentimentScore


class MissingCitations(ComputationError):
    pass


class FutureYear(ComputationError):
    pass


class NoArticles(ComputationError):
    pass


class NoTweets(ComputationError):
    pass


@dataclass(frozen=True)
class LogConvention:
    """Logarithm used by the social scores.

    ``shift`` applies ``log(1 + x)``; without it ``log(x)`` is used and a zero
    argument contributes 0. ``base`` is ``"e"`` or ``"10"``.
    """

    shift: bool = True
    base: str = "e"

    def __post_init__(self):
        if self.base not in ("e", "10"):
            raise InputError(f"log base must be 'e' or '10', got {self.base!r}")

    def __call__(self, x: float) -> float:
        if self.shift:
            value = math.log1p(x)
        elif x > 0:
            value = math.log(x)
        else:
            return 0.0
        return value / math.log(10) if self.base == "10" else value


NATURAL_SHIFTED = LogConvention()


def academic_impact(article: Article, current_year: int) -> float:
    if article.citations is None:
        raise MissingCitations(f"article {article.id} has no citation count")
    if article.year > current_year:
        raise FutureYear(f"article {article.id} year {article.year} > current year {current_year}")
    if article.year == current_year:
        return float(article.citations)
    return article.citations / (current_year - article.year)


def _score_value(score: SentimentScore | float) -> float:
    return score.score if isinstance(score, SentimentScore) else float(score)


def social_sentiment_impact(
    tweets: Sequence[Tweet],
    scores: Mapping[str, SentimentScore | float],
    log: LogConvention = NATURAL_SHIFTED,
) -> float:
    """Mean over mentioning tweets of ``|sentiment| * log(retweets)``; 0 without tweets."""
    if not tweets:
        return 0.0
    total = 0.0
    for t in tweets:
        total += abs(_score_value(scores[t.id])) * log(t.retweet_count)
    return total / len(tweets)


def unique_user_followers(tweets: Iterable[Tweet]) -> dict[str, int]:
    """Follower count per distinct user, taking the largest value seen."""
    followers: dict[str, int] = {}
    for t in tweets:
        if t.user_followers > followers.get(t.user_id, -1):
            followers[t.user_id] = t.user_followers
    return followers


def social_user_impact(tweets: Sequence[Tweet], log: LogConvention = NATURAL_SHIFTED) -> float:
    """Log of the summed followers of distinct users; 0 without tweets."""
    followers = unique_user_followers(tweets)
    if not followers:
        return 0.0
    return log(sum(followers.values()))


@dataclass(frozen=True)
class ImpactScores:
    article_id: str
    academic: float | None
    social_sentiment: float
    social_user: float
    m: int
    n_users: int
    follower_sum: int


def compute_impacts(
    corpus: Corpus,
    scores: Mapping[str, SentimentScore | float],
    current_year: int,
    log: LogConvention = NATURAL_SHIFTED,
) -> list[ImpactScores]:
    """Impact triple for every article, in article order.

    ``academic`` is None for articles without a citation count.
    """
    out = []
    for art in corpus.articles.values():
        linked = corpus.linked_tweets(art.id)
        followers = unique_user_followers(linked)
        out.append(
            ImpactScores(
                article_id=art.id,
                academic=academic_impact(art, current_year) if art.citations is not None else None,
                social_sentiment=social_sentiment_impact(linked, scores, log),
                social_user=log(sum(followers.values())) if followers else 0.0,
                m=len(linked),
                n_users=len(followers),
                follower_sum=sum(followers.values()),
            )
        )
    return out


@dataclass(frozen=True)
class ConcernScores:
    topic_index: int
    n_articles_topic: int
    n_articles_mentioned_topic: int
    n_tweets_topic: int
    n_users_topic: int
    aca_con: float
    # None when the topic has no articles
    soc_articles_con: float | None
    soc_tweet_con: float | None
    soc_user_con: float | None


def _n_topics(labels: Iterable[int], k: int | None) -> int:
    labels = list(labels)
    if any(t < 0 for t in labels):
        raise InputError("topic indices must be non-negative")
    needed = max(labels) + 1
    if k is None:
        return needed
    if needed > k:
        raise InputError(f"topic index {needed - 1} outside k={k}")
    return k


def concern_scores(
    article_topics: Mapping[str, int], corpus: Corpus, k: int | None = None
) -> list[ConcernScores]:
    """Academic and social concern per topic.

    A tweet mentioning several articles of one topic counts once for that
    topic; users are deduplicated within the topic.
    """
    if not corpus.articles:
        raise NoArticles("corpus has no articles")
    missing = [a for a in corpus.articles if a not in article_topics]
    if missing:
        raise InputError(f"{len(missing)} articles have no topic assignment, e.g. {missing[0]!r}")
    k = _n_topics((article_topics[a] for a in corpus.articles), k)
    n_total = len(corpus.articles)
    articles = [0] * k
    mentioned = [0] * k
    tweets: list[set[str]] = [set() for _ in range(k)]
    users: list[set[str]] = [set() for _ in range(k)]
    for art_id in corpus.articles:
        t = article_topics[art_id]
        articles[t] += 1
        linked = corpus.mention_index.get(art_id, [])
        if linked:
            mentioned[t] += 1
        for tweet_id in linked:
            tweets[t].add(tweet_id)
            users[t].add(corpus.tweets[tweet_id].user_id)
    out = []
    for t in range(k):
        n = articles[t]
        out.append(
            ConcernScores(
                topic_index=t,
                n_articles_topic=n,
                n_articles_mentioned_topic=mentioned[t],
                n_tweets_topic=len(tweets[t]),
                n_users_topic=len(users[t]),
                aca_con=n / n_total,
                soc_articles_con=mentioned[t] / n if n else None,
                soc_tweet_con=len(tweets[t]) / n if n else None,
                soc_user_con=len(users[t]) / n if n else None,
            )
        )
    return out


@dataclass(frozen=True)
class SocialTopicConcern:
    topic_index: int
    n_tweets_topic: int
    social_con: float


def social_topic_concern(tweet_topics: Mapping[str, int] | Sequence[int], k: int | None = None) -> list[SocialTopicConcern]:
    """Share of tweets per social topic."""
    labels = list(tweet_topics.values()) if isinstance(tweet_topics, Mapping) else list(tweet_topics)
    if not labels:
        raise NoTweets("no tweets to compute social concern over")
    k = _n_topics(labels, k)
    counts = [0] * k
    for t in labels:
        counts[t] += 1
    return [SocialTopicConcern(t, counts[t], counts[t] / len(labels)) for t in range(k)]
