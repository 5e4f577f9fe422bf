"""Lexicon-based tweet sentiment and macro-averaged evaluation.

A token is a positive term when its lexicon positive weight exceeds its
negative weight, a negative term in the opposite case, and is ignored when
the weights are equal or the token is not in the lexicon. Negation is not
handled.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from .errors import ComputationError, InputError

LABELS = ("positive", "negative", "neutral")


class DuplicateTerm(InputError):
    def __init__(self, term: str, line: int):
        self.term = term
        self.line = line
        super().__init__(f"line {line}: duplicate lexicon term {term!r}")


class MalformedLine(InputError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"line {line}: {reason}")


class WeightOutOfRange(MalformedLine):
    pass


class LengthMismatch(ComputationError):
    pass


class UnknownLabel(ComputationError):
    pass


Lexicon = dict[str, tuple[float, float]]


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a ``term<TAB>pos_weight<TAB>neg_weight`` file without header."""
    lexicon: Lexicon = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read lexicon {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise MalformedLine(lineno, f"expected 3 tab-separated columns, got {len(parts)}")
        term = parts[0].strip()
        if not term:
            raise MalformedLine(lineno, "empty term")
        try:
            pos, neg = float(parts[1]), float(parts[2])
        except ValueError as exc:
            raise MalformedLine(lineno, f"non-numeric weight ({exc})") from exc
        for w in (pos, neg):
            if not 0.0 <= w <= 1.0:
                raise WeightOutOfRange(lineno, f"weight {w} outside [0, 1]")
        if term in lexicon:
            raise DuplicateTerm(term, lineno)
        lexicon[term] = (pos, neg)
    return lexicon


def lexicon_from_sentiwordnet(path: str | Path) -> Lexicon:
    """Collapse a SentiWordNet 3.0 dump to term-level weights.

    Each term gets the mean positive and mean negative score over all synsets
    it appears in. Multi-word lemmas (``a_priori``) are skipped since scoring
    works on unigrams.
    """
    sums: dict[str, list[float]] = defaultdict(lambda: [0.0, 0.0, 0])
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) < 5 or not cols[2]:
                continue
            pos, neg = float(cols[2]), float(cols[3])
            for entry in cols[4].split():
                lemma = entry.rsplit("#", 1)[0].lower()
                if "_" in lemma:
                    continue
                acc = sums[lemma]
                acc[0] += pos
                acc[1] += neg
                acc[2] += 1
    return {t: (p / n, q / n) for t, (p, q, n) in sorted(sums.items())}


def write_lexicon(lexicon: Lexicon, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for term, (pos, neg) in lexicon.items():
            fh.write(f"{term}\t{pos!r}\t{neg!r}\n")


@dataclass(frozen=True)
class SentimentScore:
    tweet_id: str | None
    pos_count: int
    neg_count: int
    score: float
    label: str


def score_from_counts(pos_count: int, neg_count: int) -> float:
    total = pos_count + neg_count
    if total == 0:
        return 0.0
    return (pos_count - neg_count) / total


def label_for(score: float) -> str:
    if score > 0:
        return "positive"
    if score < 0:
        return "negative"
    return "neutral"


def score_and_classify(
    tokens: Iterable[str], lexicon: Lexicon, tweet_id: str | None = None
) -> SentimentScore:
    pos = neg = 0
    for tok in tokens:
        weights = lexicon.get(tok)
        if weights is None:
            continue
        if weights[0] > weights[1]:
            pos += 1
        elif weights[1] > weights[0]:
            neg += 1
    score = score_from_counts(pos, neg)
    return SentimentScore(tweet_id, pos, neg, score, label_for(score))


def label_distribution(scores: Iterable[SentimentScore]) -> dict[str, int]:
    counts = Counter(s.label for s in scores)
    return {label: counts.get(label, 0) for label in LABELS}


@dataclass(frozen=True)
class EvalReport:
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: dict[str, dict[str, float]]
    confusion: dict[str, dict[str, int]]  # gold -> predicted -> count


def f1_from(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def evaluate_macro(predicted: Sequence[str], gold: Sequence[str]) -> EvalReport:
    """Macro precision and recall over the three classes; F1 from the macro averages.

    A class with no predictions has precision 0, one absent from the gold
    labels has recall 0.
    """
    if len(predicted) != len(gold):
        raise LengthMismatch(f"{len(predicted)} predictions vs {len(gold)} gold labels")
    for label in (*predicted, *gold):
        if label not in LABELS:
            raise UnknownLabel(f"unknown label {label!r}")
    confusion = {g: {p: 0 for p in LABELS} for g in LABELS}
    for p, g in zip(predicted, gold):
        confusion[g][p] += 1
    per_class = {}
    for c in LABELS:
        tp = confusion[c][c]
        n_pred = sum(confusion[g][c] for g in LABELS)
        n_gold = sum(confusion[c].values())
        per_class[c] = {
            "precision": tp / n_pred if n_pred else 0.0,
            "recall": tp / n_gold if n_gold else 0.0,
            "support": n_gold,
        }
    precision = sum(v["precision"] for v in per_class.values()) / len(LABELS)
    recall = sum(v["recall"] for v in per_class.values()) / len(LABELS)
    return EvalReport(precision, recall, f1_from(precision, recall), per_class, confusion)


def load_gold_labels(path: str | Path) -> dict[str, str]:
    """Read a ``tweet_id<TAB>label`` file."""
    gold: dict[str, str] = {}
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise InputError(f"cannot read gold labels {path}: {exc}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise MalformedLine(lineno, "expected tweet_id<TAB>label")
            tweet_id, label = row[0].strip(), row[1].strip()
            if label not in LABELS:
                raise MalformedLine(lineno, f"unknown label {label!r}")
            if tweet_id in gold:
                raise MalformedLine(lineno, f"duplicate tweet id {tweet_id!r}")
            gold[tweet_id] = label
    return gold
