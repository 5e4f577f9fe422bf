"""Pipeline configuration: a flat ``key = value`` text file.

Relative paths are resolved against the directory holding the config file.
Lines starting with ``#`` or ``;`` are comments.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import InputError


class ConfigError(InputError):
    pass


def parse_k_range(text: str) -> tuple[int, ...]:
    """``"1-10"``, ``"3"`` or ``"2,4,6"`` (ranges may be mixed with commas)."""
    ks: set[int] = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-", 1))
                ks.update(range(lo, hi + 1))
            else:
                ks.add(int(part))
    except ValueError as exc:
        raise ConfigError(f"bad k range {text!r}") from exc
    if not ks:
        raise ConfigError(f"empty k range {text!r}")
    if min(ks) < 1 or max(ks) > 50:
        raise ConfigError(f"k range {text!r} must lie within [1, 50]")
    return tuple(sorted(ks))


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PATH_KEYS = ("articles", "tweets", "lexicon", "stopwords", "social_tweets", "gold_labels", "output_dir")
_REQUIRED = ("articles", "tweets", "lexicon", "current_year")


@dataclass(frozen=True)
class PipelineConfig:
    articles: Path
    tweets: Path
    lexicon: Path
    current_year: int
    stopwords: Path | None = None
    social_tweets: Path | None = None
    gold_labels: Path | None = None
    output_dir: Path = Path("out")
    lowercase: bool = True
    min_token_len: int = 2
    strip_urls_and_handles: bool = True
    min_df: int = 2
    max_df_ratio: float = 0.95
    k_range: tuple[int, ...] = tuple(range(1, 11))
    tweet_k_range: tuple[int, ...] | None = None
    alpha: float | None = None  # None: 50/k
    beta: float = 0.01
    iterations: int = 1000
    heldout_fraction: float = 0.2
    heldout_sweeps: int = 100
    seed: int = 0
    n_keywords: int = 10
    log_shift: bool = True
    log_base: str = "e"
    mentioned_only: bool = False
    correlation: str = "pearson"
    permutation_test: bool = False
    histogram_bins: int = 20
    canonical_text: str = field(default="", compare=False, repr=False)

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text.encode("utf-8")).hexdigest()

    def check_paths(self) -> None:
        for key in _PATH_KEYS:
            if key == "output_dir":
                continue
            path = getattr(self, key)
            if path is not None and not path.is_file():
                raise ConfigError(f"{key} file not found: {path}")

    def with_output_dir(self, out: Path) -> "PipelineConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values["output_dir"] = Path(out)
        return PipelineConfig(**values)


_CONVERTERS = {
    "current_year": int,
    "lowercase": _bool,
    "min_token_len": int,
    "strip_urls_and_handles": _bool,
    "min_df": int,
    "max_df_ratio": float,
    "k_range": parse_k_range,
    "tweet_k_range": parse_k_range,
    "alpha": lambda s: None if s.strip().lower() == "auto" else float(s),
    "beta": float,
    "iterations": int,
    "heldout_fraction": float,
    "heldout_sweeps": int,
    "seed": int,
    "n_keywords": int,
    "log_shift": _bool,
    "log_base": str.strip,
    "mentioned_only": _bool,
    "correlation": str.strip,
    "permutation_test": _bool,
    "histogram_bins": int,
}


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


def parse_config(text: str, base_dir: Path = Path(".")) -> PipelineConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string("[pipeline]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    raw = dict(parser["pipeline"])
    known = set(_PATH_KEYS) | set(_CONVERTERS)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in _REQUIRED if not raw.get(k)]
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")

    values: dict = {}
    for key, value in raw.items():
        value = value.strip()
        if key in _PATH_KEYS:
            if value:
                values[key] = (base_dir / value).resolve() if not Path(value).is_absolute() else Path(value)
        else:
            try:
                values[key] = _CONVERTERS[key](value)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc
    canonical = "".join(f"{k}={raw[k].strip()}\n" for k in sorted(raw))
    cfg = PipelineConfig(**values, canonical_text=canonical)
    _validate(cfg)
    return cfg


def _validate(cfg: PipelineConfig) -> None:
    if cfg.min_token_len < 1:
        raise ConfigError("min_token_len must be >= 1")
    if cfg.min_df < 1:
        raise ConfigError("min_df must be >= 1")
    if not 0 < cfg.max_df_ratio <= 1:
        raise ConfigError("max_df_ratio must be in (0, 1]")
    if cfg.alpha is not None and cfg.alpha <= 0:
        raise ConfigError("alpha must be positive or 'auto'")
    if cfg.beta <= 0:
        raise ConfigError("beta must be positive")
    if cfg.iterations < 0 or cfg.heldout_sweeps < 0:
        raise ConfigError("iterations and heldout_sweeps must be non-negative")
    if not 0 < cfg.heldout_fraction < 1:
        raise ConfigError("heldout_fraction must be in (0, 1)")
    if cfg.n_keywords < 1 or cfg.histogram_bins < 1:
        raise ConfigError("n_keywords and histogram_bins must be >= 1")
    if cfg.log_base not in ("e", "10"):
        raise ConfigError("log_base must be 'e' or '10'")
    if cfg.correlation not in ("pearson", "spearman"):
        raise ConfigError("correlation must be 'pearson' or 'spearman'")
