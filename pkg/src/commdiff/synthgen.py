"""Synthetic article/tweet corpora with planted topics and tunable coupling.

Article bodies are drawn from one of ``n_topics`` disjoint vocabulary
blocks. Tweets inject only lexicon terms of known polarity, so the gold
sentiment label of every tweet is fixed by construction. Citation counts
are tied to each article's total (deduplicated) follower reach through a
shared latent rank mixed with independent noise:

    mix = coupling * rank(reach) + (1 - coupling) * rank(noise)

and citations are the ordinal rank of ``mix``. With ``coupling = 1`` the
citation order reproduces the reach order exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ComputationError

POSITIVE_TERMS = (
    "good", "great", "excellent", "helpful", "promising", "important", "hopeful",
    "effective", "reliable", "useful", "impressive", "encouraging", "remarkable",
    "valuable", "insightful", "brilliant", "accurate", "clear", "safe", "strong",
)
NEGATIVE_TERMS = (
    "bad", "poor", "harmful", "worrying", "misleading", "dangerous", "flawed",
    "weak", "alarming", "useless", "wrong", "terrible", "fake", "risky", "biased",
    "confusing", "scary", "sad", "unsafe", "deadly",
)
# equal weights: present in the lexicon but never counted
BALANCED_TERMS = ("mixed", "unclear", "debated")

LABELS = ("positive", "negative", "neutral")


class InvalidSpec(ComputationError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    n_topics: int = 3
    docs_per_topic: int = 100
    vocab_block_size: int = 100
    doc_length: int = 150
    n_tweets: int = 1000
    tweet_topic_words: int = 6
    unmentioned_fraction: float = 0.2
    multi_ref_fraction: float = 0.05
    unresolved_fraction: float = 0.01
    user_pool_size: int | None = None  # default: n_tweets // 3
    follower_log_mean: float = 6.0
    follower_log_sd: float = 1.5
    retweet_mean: float = 3.0
    coupling: float = 1.0
    missing_citation_fraction: float = 0.03
    current_year: int = 2020
    year_span: int = 1
    label_probs: tuple[float, float, float] = (0.35, 0.30, 0.35)
    seed: int = 0

    def validate(self) -> None:
        if self.n_topics < 1 or self.docs_per_topic < 1 or self.vocab_block_size < 1:
            raise InvalidSpec("n_topics, docs_per_topic and vocab_block_size must be >= 1")
        if self.doc_length < 1 or self.tweet_topic_words < 0:
            raise InvalidSpec("doc_length must be >= 1 and tweet_topic_words >= 0")
        if not 0 <= self.coupling <= 1:
            raise InvalidSpec(f"coupling must be in [0, 1], got {self.coupling}")
        for name in ("unmentioned_fraction", "multi_ref_fraction", "unresolved_fraction",
                     "missing_citation_fraction"):
            if not 0 <= getattr(self, name) < 1:
                raise InvalidSpec(f"{name} must be in [0, 1)")
        n_articles = self.n_topics * self.docs_per_topic
        n_mentioned = n_articles - int(round(self.unmentioned_fraction * n_articles))
        if self.n_tweets < n_mentioned:
            raise InvalidSpec(f"n_tweets={self.n_tweets} is below the {n_mentioned} mentioned articles")
        if self.user_pool_size is not None and self.user_pool_size < 1:
            raise InvalidSpec("user_pool_size must be >= 1")
        if self.year_span < 0 or self.retweet_mean < 0:
            raise InvalidSpec("year_span and retweet_mean must be non-negative")
        if len(self.label_probs) != 3 or abs(sum(self.label_probs) - 1) > 1e-9 or min(self.label_probs) < 0:
            raise InvalidSpec("label_probs must be three non-negative numbers summing to 1")


@dataclass
class SyntheticCorpus:
    articles: list[dict]
    tweets: list[dict]
    lexicon: dict[str, tuple[float, float]]
    ground_truth: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SynthPaths:
    articles: Path
    tweets: Path
    ground_truth: Path
    lexicon: Path
    gold_labels: Path
    config: Path


def block_words(spec: SynthSpec) -> list[list[str]]:
    width = len(str(spec.vocab_block_size - 1))
    return [[f"b{b}w{j:0{width}d}" for j in range(spec.vocab_block_size)] for b in range(spec.n_topics)]


def synth_lexicon() -> dict[str, tuple[float, float]]:
    lexicon = {}
    for i, term in enumerate(POSITIVE_TERMS):
        lexicon[term] = (0.5 + 0.125 * (i % 3), 0.125 * (i % 2))
    for i, term in enumerate(NEGATIVE_TERMS):
        lexicon[term] = (0.125 * (i % 2), 0.5 + 0.125 * (i % 3))
    for term in BALANCED_TERMS:
        lexicon[term] = (0.25, 0.25)
    return dict(sorted(lexicon.items()))


def _ordinal_rank(values: np.ndarray) -> np.ndarray:
    ranks = np.empty(values.size, dtype=np.int64)
    ranks[np.argsort(values, kind="stable")] = np.arange(values.size)
    return ranks


def build_synthetic(spec: SynthSpec) -> SyntheticCorpus:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    blocks = block_words(spec)
    n_articles = spec.n_topics * spec.docs_per_topic
    id_width = len(str(n_articles - 1))
    art_ids = [f"A{i:0{id_width}d}" for i in range(n_articles)]
    topics = rng.permutation(np.repeat(np.arange(spec.n_topics), spec.docs_per_topic))
    years = spec.current_year - rng.integers(0, spec.year_span + 1, size=n_articles)

    bodies = []
    for i in range(n_articles):
        words = rng.integers(0, spec.vocab_block_size, size=spec.doc_length)
        bodies.append(" ".join(blocks[topics[i]][w] for w in words))

    # which articles are mentioned, and how many tweets each gets as primary reference
    n_unmentioned = int(round(spec.unmentioned_fraction * n_articles))
    mentioned = np.sort(rng.permutation(n_articles)[n_unmentioned:])
    weights = rng.lognormal(0.0, 1.0, size=mentioned.size)
    extra = rng.multinomial(spec.n_tweets - mentioned.size, weights / weights.sum())
    primaries = np.repeat(mentioned, 1 + extra)
    primaries = primaries[rng.permutation(primaries.size)]

    pool = spec.user_pool_size or max(1, spec.n_tweets // 3)
    user_width = len(str(pool - 1))
    base_followers = np.floor(rng.lognormal(spec.follower_log_mean, spec.follower_log_sd, size=pool)).astype(np.int64)

    lexicon = synth_lexicon()
    tweet_width = len(str(spec.n_tweets - 1))
    tweets: list[dict] = []
    tweet_truth: dict[str, dict] = {}
    linked: dict[int, list[int]] = {int(a): [] for a in range(n_articles)}
    for j in range(spec.n_tweets):
        primary = int(primaries[j])
        refs = [primary]
        if spec.multi_ref_fraction and rng.random() < spec.multi_ref_fraction and mentioned.size > 1:
            other = int(mentioned[rng.integers(mentioned.size)])
            if other != primary:
                refs.append(other)
        ref_ids = [art_ids[a] for a in refs]
        if spec.unresolved_fraction and rng.random() < spec.unresolved_fraction:
            ref_ids.append(f"X{j:0{tweet_width}d}")
        for a in refs:
            linked[a].append(j)

        user = int(rng.integers(pool))
        followers = int(base_followers[user] + rng.integers(0, 3))
        retweets = int(rng.geometric(1.0 / (1.0 + spec.retweet_mean)) - 1)

        label = LABELS[int(rng.choice(3, p=spec.label_probs))]
        if label == "neutral":
            n_pos = n_neg = int(rng.integers(0, 2))
        else:
            major = int(rng.integers(1, 4))
            minor = int(rng.integers(0, major))
            n_pos, n_neg = (major, minor) if label == "positive" else (minor, major)
        words = [blocks[topics[primary]][w] for w in rng.integers(0, spec.vocab_block_size, size=spec.tweet_topic_words)]
        words += [POSITIVE_TERMS[w] for w in rng.integers(0, len(POSITIVE_TERMS), size=n_pos)]
        words += [NEGATIVE_TERMS[w] for w in rng.integers(0, len(NEGATIVE_TERMS), size=n_neg)]
        if rng.random() < 0.3:
            words.append(BALANCED_TERMS[int(rng.integers(len(BALANCED_TERMS)))])
        words = [words[i] for i in rng.permutation(len(words))]
        text = f"@u{user} " + " ".join(words)
        if rng.random() < 0.5:
            text += f" https://t.co/{int(rng.integers(16**6)):06x}"

        tweet_id = f"T{j:0{tweet_width}d}"
        tweets.append({
            "id": tweet_id,
            "text": text,
            "retweet_count": retweets,
            "user_id": f"U{user:0{user_width}d}",
            "user_followers": followers,
            "article_ids": ref_ids,
        })
        tweet_truth[tweet_id] = {"label": label, "pos_count": n_pos, "neg_count": n_neg}

    # per-article reach: distinct users, each at the largest follower count seen
    reach = np.zeros(n_articles, dtype=np.int64)
    n_users = np.zeros(n_articles, dtype=np.int64)
    for a, tweet_idx in linked.items():
        best: dict[str, int] = {}
        for j in tweet_idx:
            t = tweets[j]
            best[t["user_id"]] = max(best.get(t["user_id"], -1), t["user_followers"])
        reach[a] = sum(best.values())
        n_users[a] = len(best)

    shared = (_ordinal_rank(reach) + 0.5) / n_articles
    noise = (rng.permutation(n_articles) + 0.5) / n_articles
    citations = _ordinal_rank(spec.coupling * shared + (1 - spec.coupling) * noise)
    n_missing = int(round(spec.missing_citation_fraction * n_articles))
    missing = set(rng.permutation(n_articles)[:n_missing].tolist())

    articles = []
    article_truth = {}
    for i in range(n_articles):
        m = len(linked[i])
        altmetric = None
        if m:
            altmetric = float(m + 0.25 * int(rng.integers(0, 4)))
        elif rng.random() < 0.1:
            altmetric = 0.25 * int(rng.integers(1, 4))
        cites = None if i in missing else int(citations[i])
        articles.append({
            "id": art_ids[i],
            "title": f"Synthetic article {i}",
            "body": bodies[i],
            "year": int(years[i]),
            "citations": cites,
            "altmetric_score": altmetric,
        })
        article_truth[art_ids[i]] = {
            "topic": int(topics[i]),
            "citations": cites,
            "year": int(years[i]),
            "m": m,
            "n_users": int(n_users[i]),
            "follower_sum": int(reach[i]),
        }

    spec_dict = asdict(spec)
    spec_dict["label_probs"] = list(spec.label_probs)
    truth = {
        "spec": spec_dict,
        "blocks": blocks,
        "articles": article_truth,
        "tweets": tweet_truth,
    }
    return SyntheticCorpus(articles=articles, tweets=tweets, lexicon=lexicon, ground_truth=truth)


def _write_jsonl(records: list[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def generate_synthetic_corpus(spec: SynthSpec, out_dir: str | Path) -> SynthPaths:
    """Write articles, tweets, ground truth, lexicon, gold labels and a pipeline config."""
    corpus = build_synthetic(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = SynthPaths(
        articles=out / "articles.jsonl",
        tweets=out / "tweets.jsonl",
        ground_truth=out / "ground_truth.json",
        lexicon=out / "lexicon.tsv",
        gold_labels=out / "gold_labels.tsv",
        config=out / "pipeline.cfg",
    )
    _write_jsonl(corpus.articles, paths.articles)
    _write_jsonl(corpus.tweets, paths.tweets)
    paths.ground_truth.write_text(json.dumps(corpus.ground_truth, indent=1) + "\n", encoding="utf-8")
    with open(paths.lexicon, "w", encoding="utf-8", newline="\n") as fh:
        for term, (pos, neg) in corpus.lexicon.items():
            fh.write(f"{term}\t{pos}\t{neg}\n")
    with open(paths.gold_labels, "w", encoding="utf-8", newline="\n") as fh:
        for tweet_id, info in corpus.ground_truth["tweets"].items():
            fh.write(f"{tweet_id}\t{info['label']}\n")
    k_hi = min(50, max(2 * spec.n_topics, spec.n_topics + 1))
    paths.config.write_text(
        "\n".join([
            "# generated by commdiff synth",
            "articles = articles.jsonl",
            "tweets = tweets.jsonl",
            "lexicon = lexicon.tsv",
            "gold_labels = gold_labels.tsv",
            "output_dir = out",
            f"current_year = {spec.current_year}",
            f"k_range = 1-{k_hi}",
            "tweet_k_range = 1-{}".format(k_hi),
            "# short synthetic texts: a fixed alpha keeps perplexity comparable across k",
            "alpha = 0.1",
            "iterations = 200",
            f"seed = {spec.seed}",
            "",
        ]),
        encoding="utf-8",
    )
    return paths
