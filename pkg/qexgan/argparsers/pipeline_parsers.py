"""Argument parsers for the training pipeline subcommands."""

import argparse


def add_prepare_parser(
    subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]
) -> argparse.ArgumentParser:
    """Add prepare subcommand parser.

    Args:
        subparsers: The subparsers object to add the prepare parser to
        parents: Parsers contributing the global flags

    Returns:
        The prepare argument parser
    """
    prepare_parser = subparsers.add_parser(
        "prepare",
        parents=parents,
        help="Split the corpus, build the vocabulary, embeddings and conditions",
    )
    prepare_parser.add_argument(
        "--corpus", type=str, help="Query-document pair file (jsonl or tsv)"
    )
    prepare_parser.add_argument(
        "--corpus-format", choices=("jsonl", "tsv"), help="Corpus file format"
    )
    prepare_parser.add_argument(
        "--embeddings", type=str, help="Word vector file in text format"
    )
    prepare_parser.add_argument(
        "--all-strategies",
        action="store_true",
        default=False,
        help="Build the condition table of every strategy",
    )
    return prepare_parser


def add_pretrain_gen_parser(
    subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]
) -> argparse.ArgumentParser:
    return subparsers.add_parser(
        "pretrain-gen",
        parents=parents,
        help="Pre-train the generator with cross-entropy",
    )


def add_pretrain_disc_parser(
    subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]
) -> argparse.ArgumentParser:
    pretrain_disc_parser = subparsers.add_parser(
        "pretrain-disc",
        parents=parents,
        help="Pre-train the discriminator on documents vs. expanded queries",
    )
    pretrain_disc_parser.add_argument(
        "--grid-search",
        action="store_true",
        default=False,
        help="Pick hyper-parameters on a hold-out split first",
    )
    pretrain_disc_parser.add_argument(
        "--disc-split",
        choices=("test", "train"),
        help="Split whose pairs supply both classes",
    )
    return pretrain_disc_parser


def add_adv_train_parser(
    subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]
) -> argparse.ArgumentParser:
    adv_parser = subparsers.add_parser(
        "adv-train",
        parents=parents,
        help="Fine-tune the generator with policy gradients and rollouts",
    )
    adv_parser.add_argument(
        "--alternate-discriminator",
        action="store_true",
        default=False,
        help="Give the discriminator one epoch after every adversarial epoch",
    )
    return adv_parser
