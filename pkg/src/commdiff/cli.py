"""Command line entry point: ``commdiff <subcommand> --config <path> [--out <dir>]``.

Exit status: 0 on success, 1 for input errors, 2 for computation errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import load_config
from .errors import CommdiffError, InputError
from .report import STAGES, StageError, run_stage
from .synthgen import SynthSpec, generate_synthetic_corpus

STAGE_HELP = {
    "ingest": "load and link articles/tweets, write coverage statistics",
    "topics": "fit LDA on articles and tweets, select k by perplexity",
    "sentiment": "score linked tweets against the lexicon",
    "impact": "per-article academic and social impact scores",
    "concern": "per-topic academic and social concern scores",
    "correlate": "correlation tables with significance stars",
    "report": "run every stage in order",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commdiff", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log stage progress")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*STAGES, "report"):
        p = sub.add_parser(name, help=STAGE_HELP[name])
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")

    s = sub.add_parser("synth", help="generate a synthetic corpus with planted topics")
    s.add_argument("--out", required=True, type=Path)
    s.add_argument("--topics", type=int, default=3)
    s.add_argument("--docs-per-topic", type=int, default=100)
    s.add_argument("--block-size", type=int, default=100)
    s.add_argument("--doc-length", type=int, default=150)
    s.add_argument("--tweets", type=int, default=1000)
    s.add_argument("--coupling", type=float, default=1.0)
    s.add_argument("--current-year", type=int, default=2020)
    s.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            spec = SynthSpec(
                n_topics=args.topics, docs_per_topic=args.docs_per_topic, vocab_block_size=args.block_size,
                doc_length=args.doc_length, n_tweets=args.tweets, coupling=args.coupling,
                current_year=args.current_year, seed=args.seed,
            )
            paths = generate_synthetic_corpus(spec, args.out)
            print(f"wrote synthetic corpus; run: commdiff report --config {paths.config}")
            return 0
        cfg = load_config(args.config)
        if args.out is not None:
            cfg = cfg.with_output_dir(args.out)
        out = run_stage(cfg, args.command)
    except StageError as exc:
        print(f"commdiff: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except CommdiffError as exc:
        print(f"commdiff: error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc, InputError) else 2
    print(f"{args.command}: outputs in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
