"""Turns parsed CLI arguments into a run config and dispatches the subcommand."""

from __future__ import annotations

import argparse
import logging

import torch
from prompt_toolkit import print_formatted_text
from pydantic import ValidationError

from qexgan.commands.adv_train import cmd_adv_train
from qexgan.commands.artifacts import Phase
from qexgan.commands.evaluate import cmd_evaluate
from qexgan.commands.expand import cmd_expand, read_queries_file
from qexgan.commands.prepare import cmd_prepare
from qexgan.commands.pretrain import (
    TrainingResult,
    cmd_pretrain_disc,
    cmd_pretrain_gen,
)
from qexgan.config import RunConfig, load_run_config
from qexgan.errors import ConfigError
from qexgan.lock import workdir_lock
from qexgan.locations import resolve_workdir
from qexgan.store import ArtifactStore
from qexgan.tui import (
    display_evaluation,
    display_stats,
    print_info,
    print_success,
    print_warning,
)
from qexgan.types import CorpusFormat, DiscriminatorProtocol, RewardMode, Strategy


logger = logging.getLogger(__name__)


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """CLI flags over the config file over QEXGAN_WORKDIR over defaults."""
    config = load_run_config(getattr(args, "config", None))
    if getattr(args, "seed", None) is not None:
        config = config.with_seed(args.seed)
    try:
        if getattr(args, "strategy", None):
            config.strategy = Strategy.parse(args.strategy)
        if getattr(args, "reward_mode", None):
            config.adversarial.reward_mode = RewardMode(
                args.reward_mode.replace("-", "_")
            )
        if getattr(args, "num_threads", None) is not None:
            config.num_threads = args.num_threads
        if getattr(args, "corpus", None):
            config.corpus_path = args.corpus
        if getattr(args, "corpus_format", None):
            config.corpus_format = CorpusFormat(args.corpus_format)
        if getattr(args, "embeddings", None):
            config.embeddings_path = args.embeddings
        if getattr(args, "disc_split", None):
            config.discriminator.protocol = DiscriminatorProtocol(args.disc_split)
        if getattr(args, "alternate_discriminator", False):
            config.adversarial.alternate_discriminator = True
    except (ValidationError, ValueError) as e:
        raise ConfigError(str(e)) from e
    workdir = resolve_workdir(getattr(args, "workdir", None), config.workdir)
    config.workdir = str(workdir)
    return config


def resolve_epochs(configured: int, override: int | None, half: bool) -> int | None:
    """Epoch count for a training command; None keeps the configured value."""
    if override is None and not half:
        return None
    epochs = override if override is not None else configured
    if epochs < 1:
        raise ConfigError(f"--epochs must be positive, got {epochs}")
    return max(1, epochs // 2) if half else epochs


def _report_training(result: TrainingResult) -> None:
    print_success(f"Checkpoint written to {result.checkpoint}")
    for extra in result.extra_reports:
        print_info(f"Also written: {extra}")
    print_info(f"History ({len(result.history)} epochs): {result.history_path}")
    if result.history:
        print_info(result.history[-1].model_dump_json())


def run_command(args: argparse.Namespace) -> None:
    config = build_run_config(args)
    torch.set_num_threads(config.num_threads)
    override = getattr(args, "epochs", None)
    half = getattr(args, "half_epochs", False)
    store = ArtifactStore(str(config.workdir))

    with workdir_lock(store.root):
        logger.info("running %s in %s", args.command, store.root)
        if args.command == "prepare":
            prepared = cmd_prepare(config, store, args.all_strategies)
            display_stats(prepared.stats)
            if prepared.dropped:
                print_warning(f"Dropped {prepared.dropped} blank records")
            print_success(
                f"Prepared {len(prepared.artifacts)} artifacts in {store.root}"
            )
        elif args.command == "pretrain-gen":
            epochs = resolve_epochs(config.generator.pretrain_epochs, override, half)
            _report_training(cmd_pretrain_gen(config, store, epochs))
        elif args.command == "pretrain-disc":
            epochs = resolve_epochs(config.discriminator.epochs, override, half)
            _report_training(
                cmd_pretrain_disc(config, store, epochs, args.grid_search)
            )
        elif args.command == "adv-train":
            epochs = resolve_epochs(config.adversarial.epochs, override, half)
            _report_training(cmd_adv_train(config, store, epochs))
        elif args.command == "expand":
            queries = (
                [args.query]
                if args.query is not None
                else read_queries_file(args.queries_file)
            )
            expanded = cmd_expand(
                config, store, queries, args.output, Phase(args.phase)
            )
            for warning in expanded.warnings:
                print_warning(warning)
            if expanded.output is not None:
                print_success(
                    f"Wrote {len(expanded.records)} expansions to {expanded.output}"
                )
            else:
                for line in expanded.lines():
                    print_formatted_text(line)
        elif args.command == "evaluate":
            strategies = (
                [Strategy.parse(s) for s in args.strategies]
                if args.strategies
                else None
            )
            evaluated = cmd_evaluate(config, store, strategies, Phase(args.phase))
            display_evaluation(evaluated.rows)
            for path in evaluated.reports:
                print_info(f"Report written to {path}")
        else:
            raise ConfigError(f"unknown command '{args.command}'")
