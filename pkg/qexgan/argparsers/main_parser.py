"""Main argument parser for the qexgan CLI."""

import argparse

from qexgan import __version__
from qexgan.argparsers.pipeline_parsers import (
    add_adv_train_parser,
    add_prepare_parser,
    add_pretrain_disc_parser,
    add_pretrain_gen_parser,
)
from qexgan.argparsers.query_parsers import add_evaluate_parser, add_expand_parser
from qexgan.types import RewardMode, Strategy


STRATEGY_CHOICES = tuple(strategy.cli_name for strategy in Strategy)
REWARD_MODE_CHOICES = tuple(mode.value.replace("_", "-") for mode in RewardMode)


def create_global_parser() -> argparse.ArgumentParser:
    """Flags shared by every subcommand.

    Defaults are suppressed so a flag given before the subcommand is not
    overwritten by the subcommand's own copy, and so unset flags fall through
    to the config file.
    """
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--config",
        type=str,
        default=argparse.SUPPRESS,
        help="JSON run config file",
    )
    parser.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="Seed for every module"
    )
    parser.add_argument(
        "--workdir",
        type=str,
        default=argparse.SUPPRESS,
        help="Artifact directory (falls back to $QEXGAN_WORKDIR)",
    )
    parser.add_argument(
        "--strategy",
        choices=STRATEGY_CHOICES,
        default=argparse.SUPPRESS,
        help="Condition strategy",
    )
    parser.add_argument(
        "--epochs",
        type=int,
        default=argparse.SUPPRESS,
        help="Override the configured epoch count of the command",
    )
    parser.add_argument(
        "--half-epochs",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Run half the configured (or --epochs) epoch count",
    )
    parser.add_argument(
        "--reward-mode",
        choices=REWARD_MODE_CHOICES,
        default=argparse.SUPPRESS,
        help="Adversarial reward: P(real) or the discriminator loss",
    )
    parser.add_argument(
        "--num-threads",
        type=int,
        default=argparse.SUPPRESS,
        help="torch intra-op threads (1 keeps runs byte-reproducible)",
    )
    return parser


def create_main_parser() -> argparse.ArgumentParser:
    """Create the main argument parser with one subcommand per pipeline stage.

    Returns:
        The configured argument parser
    """
    global_parser = create_global_parser()
    parser = argparse.ArgumentParser(
        prog="qexgan",
        description="qexgan - conditional sequence-GAN query expansion",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        parents=[global_parser],
        epilog="""
Pipeline:
  qexgan prepare --corpus pairs.jsonl --embeddings vectors.vec
  qexgan pretrain-gen --strategy doc-sim
  qexgan pretrain-disc --strategy doc-sim --half-epochs
  qexgan adv-train --strategy doc-sim
  qexgan expand --strategy doc-sim --query "kırmızı elbise"
  qexgan evaluate --strategies self word-sim doc-sim tfidf
""",
    )

    parser.add_argument(
        "--version",
        "-v",
        action="version",
        version=f"qexgan {__version__}",
        help="Show the version number and exit",
    )

    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [global_parser]
    add_prepare_parser(subparsers, parents)
    add_pretrain_gen_parser(subparsers, parents)
    add_pretrain_disc_parser(subparsers, parents)
    add_adv_train_parser(subparsers, parents)
    add_expand_parser(subparsers, parents)
    add_evaluate_parser(subparsers, parents)
    return parser
