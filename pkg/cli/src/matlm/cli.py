import argparse
import logging
from pathlib import Path
from typing import NoReturn, Sequence

from pydantic import ValidationError

from matlm.config import ModelName, RunConfig, ScoreMode
from matlm.corpus import load_corpus_file
from matlm.exceptions import ConfigError, DataFileError, DomainError
from matlm.ranking import rank, write_diagnostics, write_trec_run
from matlm.topics import save_topic_params, synthesize_topic_params

LOG_FORMAT = "%(levelname)s [%(name)s] %(message)s"
logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with exit code 2; ours is 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage()
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rank(args: argparse.Namespace) -> None:
    overrides = {
        "model": args.model,
        "corpus": args.corpus,
        "queries": args.queries,
        "docids": args.docids,
        "theta": args.theta,
        "phi": args.phi,
        "wordmap": args.wordmap,
        "others": args.others,
        "mu": args.mu,
        "lambda": args.lambda_,
        "score_mode": args.score_mode,
        "top_k": args.top_k,
        "run_tag": args.run_tag,
        "output": args.output,
        "diagnostics": args.diagnostics,
        "show_progress": True if args.progress else None,
    }
    config = RunConfig.from_sources(overrides, config_path=args.config)
    if config.logging_level and args.verbose == 0:
        logging.getLogger().setLevel(config.logging_level.upper())

    result = rank(config)

    run_path = write_trec_run(result.lists, config.run_tag, config.output)
    diagnostics_path = write_diagnostics(result, config)

    logger.info("Run file written to: %s", run_path)
    logger.info("Diagnostics written to: %s", diagnostics_path)
    skipped = sum(1 for entry in result.diagnostics if "error" in entry)
    if skipped:
        logger.warning("%d queries were skipped; see %s", skipped, diagnostics_path)


def _synthesize_topics(args: argparse.Namespace) -> None:
    corpus = load_corpus_file(args.corpus)
    params = synthesize_topic_params(
        seed=args.seed, m=corpus.num_documents, n=corpus.num_terms, k=args.topics
    )
    output_dir: Path = args.output_dir
    theta_path, phi_path, wordmap_path = save_topic_params(
        params,
        corpus.vocab,
        output_dir / "model.theta",
        output_dir / "model.phi",
        output_dir / "wordmap.txt",
    )
    print(f"Synthetic theta written to: {theta_path}")
    print(f"Synthetic phi written to: {phi_path}")
    print(f"Wordmap written to: {wordmap_path}")


# ----------------------
# CLI WIRING
# ----------------------
def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matlm")

    # Global flags
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Increase verbosity (-v, -vv).",
    )

    # Subcommands
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = subparsers.add_parser("rank", help="Rank documents for every query.")
    r.add_argument("-c", "--config", type=Path, default=None, help="TOML file of run settings.")
    r.add_argument("--model", choices=[name.value for name in ModelName])
    r.add_argument("--corpus", type=Path, help="JGibbLDA-format corpus file.")
    r.add_argument("--queries", type=Path, help="One query per line: <id> <tokens...>.")
    r.add_argument("--docids", type=Path, help="Optional document ids, one per line.")
    r.add_argument("--theta", type=Path)
    r.add_argument("--phi", type=Path)
    r.add_argument("--wordmap", type=Path)
    r.add_argument("--others", type=Path, help="Optional sampler summary for cross-checks.")
    r.add_argument("--mu", type=float)
    r.add_argument("--lambda", dest="lambda_", type=float)
    r.add_argument("--score-mode", choices=[mode.value for mode in ScoreMode])
    r.add_argument("--top-k", type=int)
    r.add_argument("--run-tag")
    r.add_argument("--output", type=Path)
    r.add_argument("--diagnostics", type=Path, help="Default: <output>.diagnostics.json")
    r.add_argument("--progress", action="store_true", help="Show a per-query progress bar.")
    r.set_defaults(func=_rank)

    s = subparsers.add_parser(
        "synthesize-topics", help="Write random theta/phi/wordmap fixtures for a corpus."
    )
    s.add_argument("--corpus", type=Path, required=True)
    s.add_argument("--topics", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output-dir", type=Path, required=True)
    s.set_defaults(func=_synthesize_topics)

    return parser


def run(argv: Sequence[str]) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Logging
    level = (
        logging.WARNING
        if args.verbose == 0
        else logging.INFO
        if args.verbose == 1
        else logging.DEBUG
    )
    logging.basicConfig(level=level, format=LOG_FORMAT)

    # Dispatch
    try:
        args.func(args)
    except (ConfigError, ValidationError) as exc:
        logger.error(str(exc))
        raise SystemExit(EXIT_USAGE)
    except (DataFileError, DomainError, OSError) as exc:
        logger.error(str(exc))
        raise SystemExit(EXIT_DATA)
