"""Tokenization and bag-of-words construction.

Tokens are maximal runs of Unicode letters/digits, optionally joined by
internal hyphens, so ``COVID-19`` survives as one token. No stemming is
applied: keyword tables must show surface forms.
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ComputationError, InputError

_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_HANDLE_RE = re.compile(r"(?<![\w@])@\w+")


class EmptyVocabulary(ComputationError):
    """No term survived document-frequency filtering."""


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stopword file (one term per line, ``#`` starts a comment line).

    With no path, the bundled English list is returned.
    """
    if path is None:
        text = resources.files("commdiff.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read stopword file {path}: {exc}") from exc
    terms = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.add(line.lower())
    return frozenset(terms)


@dataclass(frozen=True)
class TokenizerConfig:
    lowercase: bool = True
    min_token_len: int = 2
    stopword_list: frozenset[str] = field(default_factory=load_stopwords)
    strip_urls_and_handles: bool = True

    def __post_init__(self):
        if self.min_token_len < 1:
            raise InputError(f"min_token_len must be >= 1, got {self.min_token_len}")


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Split ``text`` into tokens, preserving order.

    >>> tokenize("COVID-19 spreads fast!")
    ['covid-19', 'spreads', 'fast']
    """
    if config is None:
        config = TokenizerConfig()
    if config.strip_urls_and_handles:
        text = _URL_RE.sub(" ", text)
        text = _HANDLE_RE.sub(" ", text)
    tokens = []
    for tok in _TOKEN_RE.findall(text):
        if config.lowercase:
            tok = tok.lower()
        if len(tok) < config.min_token_len:
            continue
        if tok.lower() in config.stopword_list:
            continue
        tokens.append(tok)
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: object) -> bool:
        return term in self.index


def build_vocab(
    docs: Iterable[Sequence[str]], min_df: int = 2, max_df_ratio: float = 0.95
) -> Vocabulary:
    """Keep terms whose document frequency lies in ``[min_df, max_df_ratio * D]``.

    Terms are ordered lexicographically so the result does not depend on
    document order.
    """
    if min_df < 1:
        raise InputError(f"min_df must be >= 1, got {min_df}")
    if not 0 < max_df_ratio <= 1:
        raise InputError(f"max_df_ratio must be in (0, 1], got {max_df_ratio}")
    df: Counter[str] = Counter()
    n_docs = 0
    for doc in docs:
        n_docs += 1
        df.update(set(doc))
    max_df = max_df_ratio * n_docs
    kept = sorted(t for t, c in df.items() if min_df <= c <= max_df)
    if not kept:
        raise EmptyVocabulary(
            f"no terms with document frequency in [{min_df}, {max_df:g}] over {n_docs} documents"
        )
    return Vocabulary(terms=tuple(kept), doc_freq=tuple(df[t] for t in kept))


def vectorize(tokens: Iterable[str], vocab: Vocabulary) -> dict[int, int]:
    """Sparse count vector ``{term index: count}``; out-of-vocabulary tokens are dropped."""
    counts: dict[int, int] = {}
    index = vocab.index
    for tok in tokens:
        i = index.get(tok)
        if i is not None:
            counts[i] = counts.get(i, 0) + 1
    return dict(sorted(counts.items()))
