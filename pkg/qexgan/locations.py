import os
from pathlib import Path


# Environment fallback for --workdir
WORKDIR_ENV = "QEXGAN_WORKDIR"
DEFAULT_WORKDIR = "qexgan-work"

# Workdir sub-directories
ARTIFACTS_DIR = "artifacts"
CHECKPOINTS_DIR = "checkpoints"
REPORTS_DIR = "reports"

MANIFEST_FILE = "manifest.json"
LOCK_FILE = ".lock"

# Artifact files (relative to ARTIFACTS_DIR)
CORPUS_FILE = "corpus.jsonl"
VOCABULARY_FILE = "vocabulary.json"
EMBEDDINGS_FILE = "embeddings.vec"
STATS_FILE = "stats.json"


def condition_table_file(strategy_value: str) -> str:
    return f"conditions-{strategy_value}.jsonl"


def resolve_workdir(cli_value: str | None, config_value: str | None) -> Path:
    """CLI flag, then config file, then QEXGAN_WORKDIR, then the default."""
    for candidate in (cli_value, config_value, os.getenv(WORKDIR_ENV)):
        if candidate:
            return Path(candidate).expanduser()
    return Path(DEFAULT_WORKDIR)


# Checkpoints (relative to CHECKPOINTS_DIR) and reports (relative to REPORTS_DIR)
def generator_checkpoint_file(strategy_value: str, phase: str = "") -> str:
    suffix = f"-{phase}" if phase else ""
    return f"generator-{strategy_value}{suffix}.ckpt"


def discriminator_checkpoint_file(strategy_value: str) -> str:
    return f"discriminator-{strategy_value}.ckpt"


def history_file(command: str, strategy_value: str) -> str:
    return f"{command}-{strategy_value}.jsonl"


def evaluation_file(strategy_value: str, phase: str) -> str:
    return f"evaluation-{strategy_value}-{phase}.json"
