"""Pipeline stages and deterministic report writing.

Each stage writes its artifacts into the output directory; later stages
read what they need back from there, so any stage can be rerun on its own
once its prerequisites exist. Every CSV starts with a ``#`` line carrying
the package version and the config hash; artifacts produced under a
different config are rejected.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig
from .corpus import ArticleSchema, Corpus, CoverageReport, link_and_stats, load_articles, load_tweets
from .errors import CommdiffError, InputError
from .metrics import LogConvention, compute_impacts, concern_scores, social_topic_concern
from .sentiment import (
    LABELS,
    SentimentScore,
    evaluate_macro,
    label_distribution,
    label_for,
    load_gold_labels,
    load_lexicon,
    score_and_classify,
    score_from_counts,
)
from .stats import correlation_tables
from .textprep import TokenizerConfig, build_vocab, load_stopwords, tokenize, vectorize
from .topicmodel import TopicModel, assign_all, canonical_order, save_model, select_k, top_keywords, train_lda

log = logging.getLogger(__name__)

STAGES = ("ingest", "topics", "sentiment", "impact", "concern", "correlate")


class StageError(CommdiffError):
    """Wraps the error that aborted a stage."""

    def __init__(self, stage: str, cause: CommdiffError):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")

    @property
    def exit_code(self) -> int:
        return 1 if isinstance(self.cause, InputError) else 2


class MissingArtifact(InputError):
    pass


def fmt(value) -> str:
    """Render a cell: 6 significant digits for floats, ``NA`` for missing."""
    if value is None:
        return "NA"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value == 0.0:
            value = 0.0  # drop the sign of -0.0
        return f"{value:.6g}"
    return str(value)


def topic_label(index: int) -> str:
    return f"Topic {index + 1}"


@dataclass
class RunContext:
    cfg: PipelineConfig
    out: Path
    _corpus: Corpus | None = None
    _coverage: CoverageReport | None = None

    @property
    def header(self) -> str:
        return f"# commdiff {__version__} config_sha256={self.cfg.config_hash}"

    def corpus(self) -> tuple[Corpus, CoverageReport]:
        if self._corpus is None:
            schema = ArticleSchema(current_year=self.cfg.current_year)
            articles = load_articles(self.cfg.articles, schema)
            tweets = load_tweets(self.cfg.tweets)
            self._corpus, self._coverage = link_and_stats(articles, tweets)
        return self._corpus, self._coverage

    def tokenizer(self) -> TokenizerConfig:
        return TokenizerConfig(
            lowercase=self.cfg.lowercase,
            min_token_len=self.cfg.min_token_len,
            stopword_list=load_stopwords(self.cfg.stopwords),
            strip_urls_and_handles=self.cfg.strip_urls_and_handles,
        )

    def write_csv(self, name: str, columns: list[str], rows) -> Path:
        buf = io.StringIO()
        buf.write(self.header + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
        path = self.out / name
        path.write_text(buf.getvalue(), encoding="utf-8")
        return path

    def read_csv(self, name: str, producer: str) -> list[dict[str, str]]:
        path = self.out / name
        if not path.is_file():
            raise MissingArtifact(f"{path} not found; run the '{producer}' stage first")
        with open(path, encoding="utf-8", newline="") as fh:
            first = fh.readline().rstrip("\n")
            if first != self.header:
                raise MissingArtifact(f"{path} was produced under a different config; rerun '{producer}'")
            return list(csv.DictReader(fh))


# --- stages ---------------------------------------------------------------------------


def stage_ingest(ctx: RunContext) -> None:
    corpus, cov = ctx.corpus()
    log.info("ingest: %d articles, %d tweets, %d articles mentioned",
             cov.n_articles, cov.n_tweets, cov.n_articles_mentioned)
    ctx.write_csv("coverage.csv", ["statistic", "value"], [
        ("n_articles", cov.n_articles),
        ("n_articles_with_citations", cov.n_articles_with_citations),
        ("pct_with_citations", 100.0 * cov.n_articles_with_citations / cov.n_articles if cov.n_articles else 0.0),
        ("n_articles_with_altmetric", cov.n_articles_with_altmetric),
        ("pct_with_altmetric", 100.0 * cov.n_articles_with_altmetric / cov.n_articles if cov.n_articles else 0.0),
        ("n_articles_mentioned", cov.n_articles_mentioned),
        ("pct_mentioned", cov.pct_mentioned),
        ("n_tweets", cov.n_tweets),
        ("n_linked_tweets", cov.n_linked_tweets),
        ("n_unique_users", cov.n_unique_users),
        ("n_unresolved_refs", cov.n_unresolved_refs),
    ])
    ctx.write_csv("unresolved_refs.csv", ["tweet_id", "article_id"], corpus.unresolved_refs)


def _fit_topics(ctx: RunContext, ids: list[str], texts: list[str], k_range, prefix: str) -> TopicModel:
    cfg = ctx.cfg
    tok = ctx.tokenizer()
    token_docs = [tokenize(t, tok) for t in texts]
    vocab = build_vocab(token_docs, cfg.min_df, cfg.max_df_ratio)
    bows = [vectorize(d, vocab) for d in token_docs]
    if len(bows) >= 2:
        k_best, curve = select_k(
            bows, vocab, k_range,
            heldout_fraction=cfg.heldout_fraction, seed=cfg.seed, alpha=cfg.alpha, beta=cfg.beta,
            iterations=cfg.iterations, heldout_sweeps=cfg.heldout_sweeps,
        )
    else:
        k_best, curve = min(k_range), []
    model = train_lda(bows, vocab, k_best, alpha=cfg.alpha, beta=cfg.beta,
                      iterations=cfg.iterations, seed=cfg.seed, doc_ids=ids)
    model = canonical_order(model)
    log.info("topics[%s]: %d docs, V=%d, k=%d", prefix, len(ids), len(vocab), k_best)

    save_model(model, ctx.out / f"{prefix}_model.json")
    ctx.write_csv(f"{prefix}_topic_selection.csv", ["k", "perplexity", "selected"],
                  [(k, p, k == k_best) for k, p in curve])
    ctx.write_csv(f"{prefix}_topics.csv", ["doc_id", "topic_index", "topic", "probability"],
                  [(a.doc_id, a.topic_index, topic_label(a.topic_index), a.probability) for a in assign_all(model)])
    kw_rows = []
    for t in range(model.k):
        for rank, term in enumerate(top_keywords(model, t, cfg.n_keywords), start=1):
            kw_rows.append((topic_label(t), rank, term, model.topic_word[t, model.vocabulary.index(term)]))
    ctx.write_csv(f"{prefix}_keywords.csv", ["topic", "rank", "term", "probability"], kw_rows)
    return model


def stage_topics(ctx: RunContext) -> None:
    corpus, _ = ctx.corpus()
    cfg = ctx.cfg
    arts = list(corpus.articles.values())
    _fit_topics(ctx, [a.id for a in arts], [a.body for a in arts], cfg.k_range, "article")
    social = load_tweets(cfg.social_tweets) if cfg.social_tweets else corpus.tweets
    tweets = list(social.values())
    _fit_topics(ctx, [t.id for t in tweets], [t.text for t in tweets],
                cfg.tweet_k_range or cfg.k_range, "tweet")


def stage_sentiment(ctx: RunContext) -> None:
    corpus, _ = ctx.corpus()
    lexicon = load_lexicon(ctx.cfg.lexicon)
    tok = ctx.tokenizer()
    scores = [score_and_classify(tokenize(corpus.tweets[t].text, tok), lexicon, t)
              for t in corpus.linked_tweet_ids()]
    ctx.write_csv("tweet_sentiment.csv", ["tweet_id", "pos_count", "neg_count", "score", "label"],
                  [(s.tweet_id, s.pos_count, s.neg_count, s.score, s.label) for s in scores])
    dist = label_distribution(scores)
    total = len(scores)
    ctx.write_csv("sentiment_distribution.csv", ["label", "count", "pct"],
                  [(lab, dist[lab], 100.0 * dist[lab] / total if total else 0.0) for lab in LABELS])
    log.info("sentiment: %d linked tweets scored %s", total, dist)

    if ctx.cfg.gold_labels is not None:
        gold = load_gold_labels(ctx.cfg.gold_labels)
        # tweets without a gold label are not evaluated
        pairs = [(s.label, gold[s.tweet_id]) for s in scores if s.tweet_id in gold]
        report = evaluate_macro([p for p, _ in pairs], [g for _, g in pairs])
        rows = [("all", "macro_precision", report.macro_precision),
                ("all", "macro_recall", report.macro_recall),
                ("all", "macro_f1", report.macro_f1),
                ("all", "n", len(pairs))]
        for c in LABELS:
            pc = report.per_class[c]
            rows += [(c, "precision", pc["precision"]), (c, "recall", pc["recall"]), (c, "support", pc["support"])]
            rows += [(c, f"predicted_{p}", report.confusion[c][p]) for p in LABELS]
        ctx.write_csv("sentiment_eval.csv", ["class", "metric", "value"], rows)


def _load_scores(ctx: RunContext) -> dict[str, SentimentScore]:
    scores = {}
    for row in ctx.read_csv("tweet_sentiment.csv", "sentiment"):
        pos, neg = int(row["pos_count"]), int(row["neg_count"])
        score = score_from_counts(pos, neg)
        scores[row["tweet_id"]] = SentimentScore(row["tweet_id"], pos, neg, score, label_for(score))
    return scores


def _load_topics(ctx: RunContext, prefix: str) -> dict[str, int]:
    return {r["doc_id"]: int(r["topic_index"]) for r in ctx.read_csv(f"{prefix}_topics.csv", "topics")}


def _n_topics(ctx: RunContext, prefix: str) -> int:
    path = ctx.out / f"{prefix}_model.json"
    if not path.is_file():
        raise MissingArtifact(f"{path} not found; run the 'topics' stage first")
    return int(json.loads(path.read_text(encoding="utf-8"))["k"])


def _impacts(ctx: RunContext):
    corpus, _ = ctx.corpus()
    scores = _load_scores(ctx)
    missing = [t for t in corpus.linked_tweet_ids() if t not in scores]
    if missing:
        raise MissingArtifact(f"tweet_sentiment.csv lacks {len(missing)} linked tweets; rerun 'sentiment'")
    conv = LogConvention(shift=ctx.cfg.log_shift, base=ctx.cfg.log_base)
    return corpus, compute_impacts(corpus, scores, ctx.cfg.current_year, conv)


def _histogram(values: list[float], bins: int):
    if not values:
        return []
    hi = max(values)
    counts, edges = np.histogram(values, bins=bins, range=(0.0, hi if hi > 0 else 1.0))
    return [(float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)]


def stage_impact(ctx: RunContext) -> None:
    corpus, impacts = _impacts(ctx)
    topics = _load_topics(ctx, "article") if (ctx.out / "article_topics.csv").is_file() else {}
    ctx.write_csv(
        "article_impact.csv",
        ["article_id", "topic", "academic_impact", "social_sentiment", "social_user", "tweets", "users", "follower_sum"],
        [(s.article_id, topic_label(topics[s.article_id]) if s.article_id in topics else None,
          s.academic, s.social_sentiment, s.social_user, s.m, s.n_users, s.follower_sum) for s in impacts],
    )
    pool = [s for s in impacts if s.m > 0] if ctx.cfg.mentioned_only else impacts
    hist_rows = []
    for metric, values in (
        ("academic_impact", [s.academic for s in pool if s.academic is not None]),
        ("social_sentiment", [s.social_sentiment for s in pool]),
        ("social_user", [s.social_user for s in pool]),
    ):
        hist_rows += [(metric, lo, hi, c) for lo, hi, c in _histogram(values, ctx.cfg.histogram_bins)]
    ctx.write_csv("impact_histograms.csv", ["metric", "bin_low", "bin_high", "count"], hist_rows)
    log.info("impact: %d articles scored", len(impacts))


def stage_concern(ctx: RunContext) -> None:
    corpus, _ = ctx.corpus()
    art_topics = _load_topics(ctx, "article")
    concern = concern_scores(art_topics, corpus, _n_topics(ctx, "article"))
    ctx.write_csv(
        "topic_concern.csv",
        ["topic", "articles", "articles_mentioned", "tweets", "users",
         "aca_con", "soc_articles_con", "soc_tweet_con", "soc_user_con"],
        [(topic_label(c.topic_index), c.n_articles_topic, c.n_articles_mentioned_topic, c.n_tweets_topic,
          c.n_users_topic, c.aca_con, c.soc_articles_con, c.soc_tweet_con, c.soc_user_con) for c in concern],
    )
    social = social_topic_concern(_load_topics(ctx, "tweet"), _n_topics(ctx, "tweet"))
    ctx.write_csv("social_topic_concern.csv", ["topic", "tweets", "social_con"],
                  [(topic_label(s.topic_index), s.n_tweets_topic, s.social_con) for s in social])
    log.info("concern: %d research topics, %d social topics", len(concern), len(social))


def stage_correlate(ctx: RunContext) -> None:
    corpus, impacts = _impacts(ctx)
    rows = correlation_tables(
        impacts,
        article_topics=_load_topics(ctx, "article"),
        altmetric={a.id: a.altmetric_score for a in corpus.articles.values()},
        k=_n_topics(ctx, "article"),
        mentioned_only=ctx.cfg.mentioned_only,
        method=ctx.cfg.correlation,
        permutation=ctx.cfg.permutation_test,
        seed=ctx.cfg.seed,
    )
    ctx.write_csv(
        "correlations.csv", ["group", "metric_x", "metric_y", "r", "p", "stars", "n"],
        [(r.group, r.metric_x, r.metric_y,
          r.result.r if r.result else None, r.result.p_value if r.result else None,
          r.result.significance if r.result else None, r.n) for r in rows],
    )
    log.info("correlate: %d cells, %d not computable", len(rows), sum(r.result is None for r in rows))


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "topics": stage_topics,
    "sentiment": stage_sentiment,
    "impact": stage_impact,
    "concern": stage_concern,
    "correlate": stage_correlate,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_metadata(ctx: RunContext) -> None:
    cfg = ctx.cfg
    inputs = {key: _sha256(getattr(cfg, key)) for key in
              ("articles", "tweets", "lexicon", "stopwords", "social_tweets", "gold_labels")
              if getattr(cfg, key) is not None}
    meta = {
        "tool": "commdiff",
        "version": __version__,
        "config_sha256": cfg.config_hash,
        "config": cfg.canonical_text.splitlines(),
        "seed": cfg.seed,
        "inputs_sha256": inputs,
        "correlation": f"{cfg.correlation} correlation, two-tailed t-test"
                       + (" (permutation test for n < 10)" if cfg.permutation_test else ""),
        "stars": {"***": "p <= 0.001", "*": "p <= 0.05"},
        "log_convention": ("ln" if cfg.log_base == "e" else "log10") + ("(1 + x)" if cfg.log_shift else "(x)"),
        "topic_model": "LDA, collapsed Gibbs sampling",
        "versions": {"python": platform.python_version(), "numpy": np.__version__},
    }
    (ctx.out / "run_metadata.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_stage(cfg: PipelineConfig, stage: str) -> Path:
    """Run one stage (or ``"report"`` for all of them) and return the output directory."""
    if stage != "report" and stage not in _STAGE_FUNCS:
        raise InputError(f"unknown stage {stage!r}")
    try:
        cfg.check_paths()
    except InputError as exc:
        raise StageError(stage, exc) from exc
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    ctx = RunContext(cfg, out)
    for name in (STAGES if stage == "report" else (stage,)):
        log.info("stage %s", name)
        try:
            _STAGE_FUNCS[name](ctx)
        except CommdiffError as exc:
            raise StageError(name, exc) from exc
    if stage == "report":
        write_metadata(ctx)
    return out


@dataclass(frozen=True)
class ReportBundle:
    """Paths of the files written by a full run."""

    out_dir: Path
    coverage: Path
    article_keywords: Path
    tweet_keywords: Path
    sentiment_distribution: Path
    article_impact: Path
    impact_histograms: Path
    topic_concern: Path
    social_topic_concern: Path
    correlations: Path
    metadata: Path

    def files(self) -> list[Path]:
        return [getattr(self, f) for f in self.__dataclass_fields__ if f != "out_dir"]


def run_pipeline(cfg: PipelineConfig) -> ReportBundle:
    out = run_stage(cfg, "report")
    return ReportBundle(
        out_dir=out,
        coverage=out / "coverage.csv",
        article_keywords=out / "article_keywords.csv",
        tweet_keywords=out / "tweet_keywords.csv",
        sentiment_distribution=out / "sentiment_distribution.csv",
        article_impact=out / "article_impact.csv",
        impact_histograms=out / "impact_histograms.csv",
        topic_concern=out / "topic_concern.csv",
        social_topic_concern=out / "social_topic_concern.csv",
        correlations=out / "correlations.csv",
        metadata=out / "run_metadata.json",
    )
