"""Loading, validation and linking of articles and tweets.

Both inputs are line-delimited JSON, one object per line. Blank lines are
skipped; line numbers in errors are 1-based.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import InputError

log = logging.getLogger(__name__)


class DuplicateId(InputError):
    def __init__(self, record_id: str, line: int | None = None):
        self.record_id = record_id
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate id {record_id!r}{where}")


class MalformedRecord(InputError):
    def __init__(self, line: int, reason: str, path: str | Path | None = None):
        self.line = line
        self.reason = reason
        prefix = f"{path}:" if path is not None else "line "
        super().__init__(f"{prefix}{line}: {reason}")


class MissingRequiredField(MalformedRecord):
    def __init__(self, field_name: str, line: int, path: str | Path | None = None):
        self.field = field_name
        super().__init__(line, f"missing required field {field_name!r}", path)


@dataclass(frozen=True)
class Article:
    id: str
    title: str
    body: str
    year: int
    citations: int | None = None
    altmetric_score: float | None = None


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    retweet_count: int
    user_id: str
    user_followers: int
    article_ids: tuple[str, ...] = ()


# Keyed by id, in file order.
ArticleSet = dict[str, Article]
TweetSet = dict[str, Tweet]


@dataclass(frozen=True)
class ArticleSchema:
    """How optional article fields are filled and which years are accepted.

    ``body_default`` is ``"title"`` (missing body falls back to the title) or
    ``"empty"``. ``current_year`` rejects records published after it.
    """

    current_year: int | None = None
    body_default: str = "title"


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _read_records(path: str | Path):
    path = Path(path)
    try:
        fh = path.open(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(lineno, f"invalid JSON ({exc.msg})", path) from exc
            if not isinstance(obj, dict):
                raise MalformedRecord(lineno, "record is not an object", path)
            yield lineno, obj


def load_articles(path: str | Path, schema: ArticleSchema | None = None) -> ArticleSet:
    schema = schema or ArticleSchema()
    articles: ArticleSet = {}
    for lineno, rec in _read_records(path):
        for key in ("id", "title", "year"):
            if rec.get(key) is None:
                raise MissingRequiredField(key, lineno, path)
        art_id, title, year = rec["id"], rec["title"], rec["year"]
        if not isinstance(art_id, str) or not art_id:
            raise MalformedRecord(lineno, "id must be a non-empty string", path)
        if not isinstance(title, str):
            raise MalformedRecord(lineno, "title must be a string", path)
        if not _is_int(year):
            raise MalformedRecord(lineno, "year must be an integer", path)
        if schema.current_year is not None and year > schema.current_year:
            raise MalformedRecord(
                lineno, f"year {year} is after current_year {schema.current_year}", path
            )
        body = rec.get("body")
        if body is None:
            body = title if schema.body_default == "title" else ""
        elif not isinstance(body, str):
            raise MalformedRecord(lineno, "body must be a string", path)
        citations = rec.get("citations")
        if citations is not None and (not _is_int(citations) or citations < 0):
            raise MalformedRecord(lineno, "citations must be a non-negative integer", path)
        altmetric = rec.get("altmetric_score")
        if altmetric is not None:
            if not _is_number(altmetric) or altmetric < 0:
                raise MalformedRecord(lineno, "altmetric_score must be a non-negative number", path)
            altmetric = float(altmetric)
        if art_id in articles:
            raise DuplicateId(art_id, lineno)
        articles[art_id] = Article(art_id, title, body, year, citations, altmetric)
    return articles


def load_tweets(path: str | Path) -> TweetSet:
    tweets: TweetSet = {}
    for lineno, rec in _read_records(path):
        for key in ("id", "text", "retweet_count", "user_id", "user_followers"):
            if rec.get(key) is None:
                raise MissingRequiredField(key, lineno, path)
        tweet_id = rec["id"]
        if not isinstance(tweet_id, str) or not tweet_id:
            raise MalformedRecord(lineno, "id must be a non-empty string", path)
        if not isinstance(rec["text"], str):
            raise MalformedRecord(lineno, "text must be a string", path)
        if not isinstance(rec["user_id"], str):
            raise MalformedRecord(lineno, "user_id must be a string", path)
        for key in ("retweet_count", "user_followers"):
            if not _is_int(rec[key]) or rec[key] < 0:
                raise MalformedRecord(lineno, f"{key} must be a non-negative integer", path)
        refs = rec.get("article_ids", [])
        if refs is None:
            refs = []
        if not isinstance(refs, list) or not all(isinstance(r, str) for r in refs):
            raise MalformedRecord(lineno, "article_ids must be a list of strings", path)
        if tweet_id in tweets:
            raise DuplicateId(tweet_id, lineno)
        tweets[tweet_id] = Tweet(
            id=tweet_id,
            text=rec["text"],
            retweet_count=rec["retweet_count"],
            user_id=rec["user_id"],
            user_followers=rec["user_followers"],
            article_ids=tuple(refs),
        )
    return tweets


@dataclass(frozen=True)
class CoverageReport:
    n_articles: int
    n_tweets: int
    n_articles_with_citations: int
    n_articles_with_altmetric: int
    n_articles_mentioned: int
    pct_mentioned: float
    n_linked_tweets: int
    n_unique_users: int
    n_unresolved_refs: int


@dataclass
class Corpus:
    articles: ArticleSet
    tweets: TweetSet
    mention_index: dict[str, list[str]] = field(default_factory=dict)
    unresolved_refs: list[tuple[str, str]] = field(default_factory=list)

    def linked_tweets(self, article_id: str) -> list[Tweet]:
        return [self.tweets[t] for t in self.mention_index.get(article_id, ())]

    def resolved_refs(self, tweet: Tweet) -> list[str]:
        seen: list[str] = []
        for ref in tweet.article_ids:
            if ref in self.articles and ref not in seen:
                seen.append(ref)
        return seen

    def linked_tweet_ids(self) -> list[str]:
        """Ids of tweets with at least one resolved article reference, in file order."""
        return [t.id for t in self.tweets.values() if self.resolved_refs(t)]


def link_and_stats(articles: ArticleSet, tweets: TweetSet) -> tuple[Corpus, CoverageReport]:
    """Build the article -> tweets index and coverage counts.

    A tweet referencing several articles is attributed to each of them. A
    reference repeated inside one tweet counts once. Unknown references are
    collected, logged and otherwise ignored.
    """
    corpus = Corpus(articles=articles, tweets=tweets)
    index: dict[str, list[str]] = {}
    for tweet in tweets.values():
        seen = set()
        for ref in tweet.article_ids:
            if ref in seen:
                continue
            seen.add(ref)
            if ref in articles:
                index.setdefault(ref, []).append(tweet.id)
            else:
                corpus.unresolved_refs.append((tweet.id, ref))
    # keys follow article file order
    corpus.mention_index = {a: index[a] for a in articles if a in index}
    if corpus.unresolved_refs:
        log.warning("%d tweet references point to unknown articles", len(corpus.unresolved_refs))

    n_articles = len(articles)
    n_mentioned = len(corpus.mention_index)
    report = CoverageReport(
        n_articles=n_articles,
        n_tweets=len(tweets),
        n_articles_with_citations=sum(a.citations is not None for a in articles.values()),
        n_articles_with_altmetric=sum(a.altmetric_score is not None for a in articles.values()),
        n_articles_mentioned=n_mentioned,
        pct_mentioned=100.0 * n_mentioned / n_articles if n_articles else 0.0,
        n_linked_tweets=sum(1 for t in tweets.values() if any(r in articles for r in t.article_ids)),
        n_unique_users=len({t.user_id for t in tweets.values()}),
        n_unresolved_refs=len(corpus.unresolved_refs),
    )
    return corpus, report
