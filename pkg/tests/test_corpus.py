import json

import pytest

from commdiff.corpus import (
    ArticleSchema,
    DuplicateId,
    MalformedRecord,
    MissingRequiredField,
    link_and_stats,
    load_articles,
    load_tweets,
)
from commdiff.synthgen import SynthSpec, generate_synthetic_corpus


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


def art(i, **kw):
    rec = {"id": f"A{i}", "title": f"t{i}", "body": "b", "year": 2019, "citations": 1}
    rec.update(kw)
    return rec


def tw(i, refs, **kw):
    rec = {"id": f"T{i}", "text": "x", "retweet_count": 0, "user_id": f"U{i}",
           "user_followers": 1, "article_ids": refs}
    rec.update(kw)
    return rec


def test_load_three_articles(tmp_path):
    arts = load_articles(write_jsonl(tmp_path / "a.jsonl", [art(1), art(2), art(3)]))
    assert list(arts) == ["A1", "A2", "A3"]


def test_empty_file(tmp_path):
    p = tmp_path / "a.jsonl"
    p.write_text("", encoding="utf-8")
    assert load_articles(p) == {}
    assert load_tweets(p) == {}


def test_duplicate_article_id(tmp_path):
    with pytest.raises(DuplicateId) as err:
        load_articles(write_jsonl(tmp_path / "a.jsonl", [art(1), art(1)]))
    assert err.value.record_id == "A1"


def test_missing_body_falls_back_to_title(tmp_path):
    rec = art(1)
    del rec["body"]
    arts = load_articles(write_jsonl(tmp_path / "a.jsonl", [rec]))
    assert arts["A1"].body == "t1"
    arts = load_articles(tmp_path / "a.jsonl", ArticleSchema(body_default="empty"))
    assert arts["A1"].body == ""


@pytest.mark.parametrize("bad,exc", [
    ({"year": None}, MissingRequiredField),
    ({"citations": -1}, MalformedRecord),
    ({"year": "2019"}, MalformedRecord),
    ({"altmetric_score": -2.0}, MalformedRecord),
])
def test_bad_article_fields(tmp_path, bad, exc):
    with pytest.raises(exc):
        load_articles(write_jsonl(tmp_path / "a.jsonl", [art(1, **bad)]))


def test_future_year_rejected(tmp_path):
    p = write_jsonl(tmp_path / "a.jsonl", [art(1, year=2030)])
    with pytest.raises(MalformedRecord):
        load_articles(p, ArticleSchema(current_year=2020))


def test_malformed_json_reports_line(tmp_path):
    p = tmp_path / "a.jsonl"
    p.write_text(json.dumps(art(1)) + "\n{not json\n", encoding="utf-8")
    with pytest.raises(MalformedRecord) as err:
        load_articles(p)
    assert err.value.line == 2


def test_tweets_refs_intact(tmp_path):
    tweets = load_tweets(write_jsonl(tmp_path / "t.jsonl", [tw(1, ["A1", "A2"]), tw(2, [])]))
    assert len(tweets) == 2
    assert tweets["T1"].article_ids == ("A1", "A2")


def test_negative_retweets_rejected(tmp_path):
    with pytest.raises(MalformedRecord):
        load_tweets(write_jsonl(tmp_path / "t.jsonl", [tw(1, [], retweet_count=-1)]))


def test_thousand_synthetic_tweets(tmp_path):
    paths = generate_synthetic_corpus(SynthSpec(n_tweets=1000, docs_per_topic=20, doc_length=20), tmp_path)
    assert len(load_tweets(paths.tweets)) == 1000


def _corpus(tmp_path, n_articles, tweet_refs):
    arts = load_articles(write_jsonl(tmp_path / "a.jsonl", [art(i) for i in range(n_articles)]))
    tweets = load_tweets(write_jsonl(tmp_path / "t.jsonl", [tw(i, r) for i, r in enumerate(tweet_refs)]))
    return link_and_stats(arts, tweets)


def test_pct_mentioned(tmp_path):
    _, cov = _corpus(tmp_path, 10, [["A0"], ["A1", "A2"], ["A3"], ["A0", "A3"]])
    assert cov.n_articles_mentioned == 4
    assert cov.pct_mentioned == 40.0


def test_zero_tweets(tmp_path):
    corpus, cov = _corpus(tmp_path, 3, [])
    assert cov.pct_mentioned == 0.0
    assert corpus.mention_index == {}


def test_unknown_reference(tmp_path):
    corpus, cov = _corpus(tmp_path, 2, [["A99", "A1"]])
    assert corpus.unresolved_refs == [("T0", "A99")]
    assert "A99" not in corpus.mention_index
    assert corpus.mention_index == {"A1": ["T0"]}
    assert cov.n_unresolved_refs == 1


def test_repeated_reference_counts_once(tmp_path):
    corpus, _ = _corpus(tmp_path, 2, [["A1", "A1"]])
    assert corpus.mention_index == {"A1": ["T0"]}
    assert corpus.resolved_refs(corpus.tweets["T0"]) == ["A1"]


def test_mention_lists_sum_to_resolved_refs(tmp_path):
    paths = generate_synthetic_corpus(SynthSpec(n_tweets=500, docs_per_topic=20, doc_length=10), tmp_path)
    corpus, cov = link_and_stats(load_articles(paths.articles), load_tweets(paths.tweets))
    assert sum(len(v) for v in corpus.mention_index.values()) == sum(
        len(corpus.resolved_refs(t)) for t in corpus.tweets.values())
    assert cov.n_articles_mentioned <= cov.n_articles
    assert cov.n_unique_users <= cov.n_tweets
    again, _ = link_and_stats(load_articles(paths.articles), load_tweets(paths.tweets))
    assert again == corpus
