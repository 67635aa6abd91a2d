"""Command-line entry point.

Usage:
    python -m app.experiments.cli gen-synthetic --out runs --seed 0
    python -m app.experiments.cli align --src-emb en.vec --tgt-emb es.vec --dict en-es.tsv
    python -m app.experiments.cli transfer --src-emb en.vec --tgt-emb es.vec \\
        --dict en-es.tsv --lexicon bing.tsv --lambda 0.65
    python -m app.experiments.cli train-eval --train train.tsv --test test.tsv \\
        --lexicon bing.es.tsv --ngram-max 2
    python -m app.experiments.cli sweep-dict --config sweep.env --sizes 100,500,1000

Exit codes: 0 success, 2 configuration or contract error, 3 data or parse
error, 4 numeric error.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from app.core.exceptions import EXIT_DATA, ToolkitError
from app.core.logging import get_logger, setup_logging
from app.experiments.commands import COMMANDS
from app.experiments.run import build_run_config

logger = get_logger(__name__)

# argparse destinations that are not run settings
_CLI_ONLY = {"command", "config", "log_level", "log_file", "log_json"}


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)

    inputs = parent.add_argument_group("inputs")
    inputs.add_argument("--src-emb", help="Source-language embedding file")
    inputs.add_argument("--tgt-emb", help="Target-language embedding file")
    inputs.add_argument("--src-lang", help="Source language tag (default: src)")
    inputs.add_argument("--tgt-lang", help="Target language tag (default: tgt)")
    inputs.add_argument("--dict", help="Bilingual dictionary used to fit the map")
    inputs.add_argument("--heldout", help="Held-out dictionary for precision@k")
    inputs.add_argument(
        "--lexicon", action="append", help="Polarity lexicon (repeatable)"
    )
    inputs.add_argument("--native-lexicon", help="Target-language lexicon that overrides transfers")
    inputs.add_argument("--gold-translations", help="Gold translations of the seed lexicon")
    inputs.add_argument("--map", help="Previously fitted linear map")
    inputs.add_argument("--train", help="Labeled training tweets")
    inputs.add_argument("--test", help="Labeled test tweets")
    inputs.add_argument(
        "--no-case-fold", dest="case_fold", action="store_const", const=False,
        help="Keep word case when loading inputs",
    )

    params = parent.add_argument_group("parameters")
    params.add_argument("--lambda", type=float, help="Similarity threshold in (0, 1] (default: 0.65)")
    params.add_argument("--ngram-max", type=int, help="Highest n-gram order (default: 2)")
    params.add_argument("--regularization", type=float, help="SVM regularization constant")
    params.add_argument("--epochs", type=int, help="Solver iteration cap")
    params.add_argument("--tolerance", type=float, help="Solver stopping tolerance")
    params.add_argument("--seed", type=int, help="Random seed (default: 42)")
    params.add_argument("--seeds", type=int, help="Seeds per sweep point")
    params.add_argument("--folds", type=int, help="Cross-validation folds without a test split")
    params.add_argument("--heldout-fraction", type=float, help="Dictionary share held out in sweeps")
    params.add_argument("--precision-k", type=int, help="k of precision@k")
    params.add_argument("--sizes", help="Comma-separated dictionary sizes")
    params.add_argument("--counts", help="Comma-separated seed-lexicon sizes")

    synthetic = parent.add_argument_group("synthetic data")
    synthetic.add_argument("--n-words", type=int, help="Concepts per language")
    synthetic.add_argument("--dim", type=int, help="Embedding dimension")
    synthetic.add_argument("--noise", type=float, help="Embedding noise level")
    synthetic.add_argument("--dictionary-size", type=int, help="Alignment dictionary entries")
    synthetic.add_argument("--lexicon-size", type=int, help="Planted lexicon entries")
    synthetic.add_argument("--n-train", type=int, help="Training tweets")
    synthetic.add_argument("--n-test", type=int, help="Test tweets")

    run = parent.add_argument_group("run")
    run.add_argument("--out", help="Output root (default: runs)")
    run.add_argument("--config", help="Key-value config file; flags override it")
    run.add_argument(
        "--overwrite", action="store_const", const=True,
        help="Reuse an existing run directory",
    )
    run.add_argument("--workers", type=int, help="Worker threads")
    run.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    run.add_argument("--log-file", help="Also log to this file")
    run.add_argument("--log-json", action="store_const", const=True, help="JSON log lines")
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per experiment command."""
    parser = argparse.ArgumentParser(
        prog="lexicon-transfer",
        description="Cross-lingual sentiment lexicon transfer and evaluation",
    )
    parent = _common_flags()
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        summary = (command.__doc__ or "").strip().splitlines()[0]
        subparsers.add_parser(name, parents=[parent], help=summary, description=summary)
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Run settings given on the command line (unset flags are left out)."""
    return {
        key: value
        for key, value in vars(args).items()
        if key not in _CLI_ONLY and value is not None
    }


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one command and map failures to exit codes.

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_file, args.log_json)

    try:
        config = build_run_config(overrides_from_args(args), args.config)
        result = COMMANDS[args.command](config)
    except ToolkitError as e:
        logger.error(f"{args.command} failed: {e}")
        return e.exit_code
    except (FileNotFoundError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_DATA

    logger.info(f"{args.command} finished; outputs in {result.run_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
