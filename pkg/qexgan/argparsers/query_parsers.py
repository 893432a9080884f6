"""Argument parsers for the subcommands that use a trained generator."""

import argparse

from qexgan.types import Strategy


PHASE_CHOICES = ("auto", "pretrained", "adversarial", "adversarial-best")


def add_expand_parser(
    subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]
) -> argparse.ArgumentParser:
    """Add expand subcommand parser.

    Args:
        subparsers: The subparsers object to add the expand parser to
        parents: Parsers contributing the global flags

    Returns:
        The expand argument parser
    """
    expand_parser = subparsers.add_parser(
        "expand", parents=parents, help="Print expansion terms for queries"
    )
    source = expand_parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--query", type=str, help="A single query")
    source.add_argument(
        "--queries-file", type=str, help="File with one query per line"
    )
    expand_parser.add_argument(
        "--output", type=str, help="Write JSON lines here instead of stdout"
    )
    expand_parser.add_argument(
        "--phase",
        choices=PHASE_CHOICES,
        default="auto",
        help="Generator checkpoint to use (auto prefers the adversarial best)",
    )
    return expand_parser


def add_evaluate_parser(
    subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]
) -> argparse.ArgumentParser:
    evaluate_parser = subparsers.add_parser(
        "evaluate",
        parents=parents,
        help="CE, perplexity, word coverage and semantic similarity on the test split",
    )
    evaluate_parser.add_argument(
        "--strategies",
        nargs="+",
        choices=[strategy.cli_name for strategy in Strategy],
        help="Compare several strategies (default: --strategy)",
    )
    evaluate_parser.add_argument(
        "--phase",
        choices=PHASE_CHOICES,
        default="auto",
        help="Generator checkpoint to evaluate",
    )
    return evaluate_parser
