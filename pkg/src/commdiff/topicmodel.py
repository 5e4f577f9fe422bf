"""LDA by collapsed Gibbs sampling, held-out perplexity and topic-count selection.

Documents are sparse count vectors ``{term index: count}`` as produced by
:func:`commdiff.textprep.vectorize`. Topic indices are 0-based everywhere;
only rendered reports use 1-based labels.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _gibbs
from .errors import ComputationError, InputError
from .textprep import Vocabulary

BowDoc = Mapping[int, int]

MODEL_FORMAT = "commdiff-lda/1"


class EmptyCorpus(ComputationError):
    pass


class InvalidHyperparameter(ComputationError):
    pass


class EmptyHeldout(ComputationError):
    pass


class InvalidDistribution(ComputationError):
    pass


class TopicIndexOutOfRange(ComputationError):
    pass


@dataclass(frozen=True, eq=False)
class TopicModel:
    k: int
    topic_word: np.ndarray  # k x V
    doc_topic: np.ndarray  # D x k
    alpha: float
    beta: float
    iterations: int
    seed: int
    vocabulary: tuple[str, ...]
    doc_ids: tuple[str, ...] = field(default=())

    @property
    def n_terms(self) -> int:
        return self.topic_word.shape[1]


@dataclass(frozen=True)
class TopicAssignment:
    doc_id: str | None
    topic_index: int
    probability: float


def default_alpha(k: int) -> float:
    return 50.0 / k


def _terms(vocab: Vocabulary | Sequence[str]) -> tuple[str, ...]:
    return tuple(vocab.terms) if isinstance(vocab, Vocabulary) else tuple(vocab)


def _flatten(docs: Sequence[BowDoc], n_terms: int) -> tuple[np.ndarray, np.ndarray]:
    words: list[int] = []
    owners: list[int] = []
    for d, doc in enumerate(docs):
        for w in sorted(doc):
            c = doc[w]
            if not 0 <= w < n_terms:
                raise InputError(f"document {d} has term index {w} outside vocabulary of size {n_terms}")
            if c < 0:
                raise InputError(f"document {d} has negative count for term {w}")
            words.extend([w] * c)
            owners.extend([d] * c)
    return np.asarray(words, dtype=np.int64), np.asarray(owners, dtype=np.int64)


def train_lda(
    docs: Sequence[BowDoc],
    vocab: Vocabulary | Sequence[str],
    k: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    seed: int = 0,
    doc_ids: Sequence[str] | None = None,
) -> TopicModel:
    """Fit LDA with ``iterations`` collapsed Gibbs sweeps.

    Estimates come from the final sample: ``phi = (n_kw + beta) / (n_k + V beta)``
    and ``theta = (n_dk + alpha) / (n_d + k alpha)``. ``alpha`` defaults to 50/k.
    """
    terms = _terms(vocab)
    if k < 1:
        raise InvalidHyperparameter(f"k must be >= 1, got {k}")
    if alpha is None:
        alpha = default_alpha(k)
    if not (alpha > 0 and beta > 0):
        raise InvalidHyperparameter(f"alpha and beta must be positive, got {alpha}, {beta}")
    if iterations < 0:
        raise InvalidHyperparameter(f"iterations must be >= 0, got {iterations}")
    if not docs or not terms:
        raise EmptyCorpus("no documents or empty vocabulary")
    n_docs, n_terms = len(docs), len(terms)
    words, owners = _flatten(docs, n_terms)
    if words.size == 0:
        raise EmptyCorpus("corpus has no in-vocabulary tokens")

    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=words.size, dtype=np.int64)
    ndk = np.zeros((n_docs, k), dtype=np.int64)
    nwk = np.zeros((n_terms, k), dtype=np.int64)
    np.add.at(ndk, (owners, z), 1)
    np.add.at(nwk, (words, z), 1)
    nk = nwk.sum(axis=0)
    p = np.empty(k, dtype=np.float64)
    vbeta = n_terms * beta
    for _ in range(iterations):
        u = rng.random(words.size)
        _gibbs.train_sweep(words, owners, z, ndk, nwk, nk, float(alpha), float(beta), vbeta, u, p)

    topic_word = (nwk.T + beta) / (nk[:, None] + vbeta)
    doc_len = ndk.sum(axis=1)
    doc_topic = (ndk + alpha) / (doc_len[:, None] + k * alpha)
    return TopicModel(
        k=k,
        topic_word=topic_word,
        doc_topic=doc_topic,
        alpha=float(alpha),
        beta=float(beta),
        iterations=iterations,
        seed=seed,
        vocabulary=terms,
        doc_ids=tuple(doc_ids) if doc_ids is not None else (),
    )


def infer_doc_topic(
    model: TopicModel, docs: Sequence[BowDoc], sweeps: int = 100, seed: int | None = None
) -> np.ndarray:
    """Estimate document-topic distributions for unseen documents with the topic-word matrix frozen."""
    k = model.k
    words, owners = _flatten(docs, model.n_terms)
    rng = np.random.default_rng(model.seed if seed is None else seed)
    z = rng.integers(0, k, size=words.size, dtype=np.int64)
    ndk = np.zeros((len(docs), k), dtype=np.int64)
    np.add.at(ndk, (owners, z), 1)
    phi_t = np.ascontiguousarray(model.topic_word.T)
    p = np.empty(k, dtype=np.float64)
    for _ in range(sweeps):
        u = rng.random(words.size)
        _gibbs.frozen_sweep(words, owners, z, ndk, phi_t, model.alpha, u, p)
    doc_len = ndk.sum(axis=1)
    return (ndk + model.alpha) / (doc_len[:, None] + k * model.alpha)


def perplexity(
    model: TopicModel, heldout: Sequence[BowDoc], sweeps: int = 100, seed: int | None = None
) -> float:
    """``exp(-sum log p(w|d) / N)`` over held-out tokens, with ``p(w|d) = sum_z theta_dz phi_zw``."""
    n_tokens = sum(sum(doc.values()) for doc in heldout)
    if n_tokens == 0:
        raise EmptyHeldout("held-out documents contain no in-vocabulary tokens")
    theta = infer_doc_topic(model, heldout, sweeps=sweeps, seed=seed)
    loglik = 0.0
    for d, doc in enumerate(heldout):
        if not doc:
            continue
        idx = np.fromiter(sorted(doc), dtype=np.int64)
        counts = np.array([doc[w] for w in idx], dtype=np.float64)
        pw = theta[d] @ model.topic_word[:, idx]
        loglik += float(counts @ np.log(pw))
    return math.exp(-loglik / n_tokens)


def split_heldout(n_docs: int, heldout_fraction: float, seed: int) -> tuple[list[int], list[int]]:
    """Shuffle document indices and return ``(train, heldout)``, both non-empty and sorted."""
    if not 0 < heldout_fraction < 1:
        raise InputError(f"heldout_fraction must be in (0, 1), got {heldout_fraction}")
    if n_docs < 2:
        raise EmptyCorpus("need at least two documents to hold some out")
    perm = np.random.default_rng(seed).permutation(n_docs)
    n_held = min(max(1, round(heldout_fraction * n_docs)), n_docs - 1)
    return sorted(perm[n_held:].tolist()), sorted(perm[:n_held].tolist())


def pick_k(curve: Sequence[tuple[int, float]], tie_tolerance: float = 0.005) -> int:
    """Smallest k whose perplexity is within ``tie_tolerance`` (relative) of the minimum."""
    best = min(perp for _, perp in curve)
    return min(k for k, perp in curve if perp <= best * (1 + tie_tolerance))


def select_k(
    docs: Sequence[BowDoc],
    vocab: Vocabulary | Sequence[str],
    k_range: Iterable[int],
    heldout_fraction: float = 0.2,
    seed: int = 0,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    heldout_sweeps: int = 100,
    tie_tolerance: float = 0.005,
) -> tuple[int, list[tuple[int, float]]]:
    """Train one model per k on a training split and pick k by held-out perplexity."""
    ks = sorted(set(k_range))
    if not ks:
        raise InputError("k_range is empty")
    train_idx, held_idx = split_heldout(len(docs), heldout_fraction, seed)
    train = [docs[i] for i in train_idx]
    held = [docs[i] for i in held_idx]
    curve = []
    for k in ks:
        model = train_lda(train, vocab, k, alpha=alpha, beta=beta, iterations=iterations, seed=seed)
        curve.append((k, perplexity(model, held, sweeps=heldout_sweeps, seed=seed)))
    return pick_k(curve, tie_tolerance), curve


def assign_topic(row: Sequence[float] | np.ndarray, doc_id: str | None = None) -> TopicAssignment:
    """Dominant topic of a document: the argmax, lowest index on ties."""
    arr = np.asarray(row, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidDistribution("expected a non-empty probability vector")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise InvalidDistribution("distribution has negative or non-finite entries")
    if abs(arr.sum() - 1.0) > 1e-6:
        raise InvalidDistribution(f"distribution sums to {arr.sum()!r}, not 1")
    idx = int(np.argmax(arr))
    return TopicAssignment(doc_id, idx, float(arr[idx]))


def assign_all(model: TopicModel) -> list[TopicAssignment]:
    ids = model.doc_ids or (None,) * model.doc_topic.shape[0]
    return [assign_topic(row, doc_id) for row, doc_id in zip(model.doc_topic, ids)]


def top_keywords(model: TopicModel, topic_index: int, n: int = 10) -> list[str]:
    """The ``n`` most probable terms of a topic; ties resolved lexicographically."""
    if not 0 <= topic_index < model.k:
        raise TopicIndexOutOfRange(f"topic {topic_index} not in [0, {model.k})")
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    row = model.topic_word[topic_index]
    order = sorted(range(len(row)), key=lambda w: (-row[w], model.vocabulary[w]))
    return [model.vocabulary[w] for w in order[:n]]


def permute_topics(model: TopicModel, order: Sequence[int]) -> TopicModel:
    """New model whose topic ``i`` is the old topic ``order[i]``."""
    order = list(order)
    if sorted(order) != list(range(model.k)):
        raise InputError(f"{order} is not a permutation of range({model.k})")
    return TopicModel(
        k=model.k,
        topic_word=model.topic_word[order],
        doc_topic=model.doc_topic[:, order],
        alpha=model.alpha,
        beta=model.beta,
        iterations=model.iterations,
        seed=model.seed,
        vocabulary=model.vocabulary,
        doc_ids=model.doc_ids,
    )


def canonical_order(model: TopicModel) -> TopicModel:
    """Relabel topics by the first document each one dominates.

    Topics that dominate no document keep their relative order at the end.
    """
    order: list[int] = []
    for row in model.doc_topic:
        t = int(np.argmax(row))
        if t not in order:
            order.append(t)
    order += [t for t in range(model.k) if t not in order]
    return permute_topics(model, order)


def matching_purity(assigned: Sequence[int], truth: Sequence[int]) -> float:
    """Fraction of documents whose topic maps to their true block under the best one-to-one matching."""
    from scipy.optimize import linear_sum_assignment

    if len(assigned) != len(truth):
        raise InputError("assigned and truth differ in length")
    if not assigned:
        raise InputError("no documents")
    a_labels = sorted(set(assigned))
    t_labels = sorted(set(truth))
    table = np.zeros((len(a_labels), len(t_labels)), dtype=np.int64)
    a_pos = {a: i for i, a in enumerate(a_labels)}
    t_pos = {t: i for i, t in enumerate(t_labels)}
    for a, t in zip(assigned, truth):
        table[a_pos[a], t_pos[t]] += 1
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum()) / len(assigned)


def save_model(model: TopicModel, path: str | Path) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "k": model.k,
        "alpha": model.alpha,
        "beta": model.beta,
        "iterations": model.iterations,
        "seed": model.seed,
        "vocabulary": list(model.vocabulary),
        "doc_ids": list(model.doc_ids),
        "topic_word": model.topic_word.tolist(),
        "doc_topic": model.doc_topic.tolist(),
    }
    Path(path).write_text(json.dumps(payload) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> TopicModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read model file {path}: {exc}") from exc
    if payload.get("format") != MODEL_FORMAT:
        raise InputError(f"{path} is not a {MODEL_FORMAT} model file")
    k = payload["k"]
    n_terms = len(payload["vocabulary"])
    topic_word = np.array(payload["topic_word"], dtype=np.float64).reshape(k, n_terms)
    doc_topic = np.array(payload["doc_topic"], dtype=np.float64).reshape(-1, k)
    return TopicModel(
        k=k,
        topic_word=topic_word,
        doc_topic=doc_topic,
        alpha=payload["alpha"],
        beta=payload["beta"],
        iterations=payload["iterations"],
        seed=payload["seed"],
        vocabulary=tuple(payload["vocabulary"]),
        doc_ids=tuple(payload["doc_ids"]),
    )
