"""Run and per-module configuration models.

Every config is a pydantic model so a run config file round-trips through
JSON without loss.
"""

from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qexgan.errors import ConfigError, MissingInputError
from qexgan.types import (
    BaselineMode,
    CorpusFormat,
    DiscriminatorProtocol,
    OovPolicy,
    RewardMode,
    Strategy,
)


class _Config(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class CorpusConfig(_Config):
    min_count: int = Field(default=1, ge=1)
    split_ratios: tuple[float, float, float] = (0.8, 0.1, 0.1)
    turkish_casing: bool = True

    @model_validator(mode="after")
    def _check_ratios(self) -> CorpusConfig:
        if any(ratio <= 0 for ratio in self.split_ratios):
            raise ValueError("split ratios must be positive")
        if abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise ValueError("split ratios must sum to 1")
        return self


class EmbeddingConfig(_Config):
    oov_policy: OovPolicy = OovPolicy.ZERO
    restrict_to_vocabulary: bool = True


class ConditionConfig(_Config):
    k_documents: int = Field(default=1, ge=1)
    k_words: int = Field(default=5, ge=1)
    leaf_size: int = Field(default=16, ge=1)
    workers: int = Field(default=1, ge=1)


class GeneratorConfig(_Config):
    token_dim: int = Field(default=100, gt=0)
    condition_dim: int = Field(default=100, gt=0)
    model_input_dim: int = Field(default=200, gt=0)
    hidden_dim: int = Field(default=512, gt=0)
    encoder_layers: int = Field(default=2, ge=1)
    decoder_layers: int = Field(default=2, ge=1)
    attention_heads: int = Field(default=4, ge=1)
    dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    max_expansion_len: int = Field(default=64, ge=1)
    vocab_size: int = Field(default=4, ge=4)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    pretrain_epochs: int = Field(default=16, ge=1)
    batch_size: int = Field(default=64, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _check_dims(self) -> GeneratorConfig:
        if self.model_input_dim != self.token_dim + self.condition_dim:
            raise ValueError(
                f"model_input_dim {self.model_input_dim} must equal token_dim "
                f"{self.token_dim} + condition_dim {self.condition_dim}"
            )
        if self.model_input_dim % self.attention_heads != 0:
            raise ValueError(
                f"attention_heads {self.attention_heads} must divide "
                f"model_input_dim {self.model_input_dim}"
            )
        return self


class DiscriminatorConfig(_Config):
    token_dim: int = Field(default=100, gt=0)
    lstm_hidden: int = Field(default=128, gt=0)
    layers: int = Field(default=1, ge=1)
    allow_multilayer: bool = False
    dropout: float = Field(default=0.1, ge=0.0, lt=1.0)
    learning_rate: float = Field(default=1e-2, gt=0.0)
    epochs: int = Field(default=24, ge=1)
    batch_size: int = Field(default=256, ge=2)
    protocol: DiscriminatorProtocol = DiscriminatorProtocol.TEST_SPLIT
    seed: int = 0

    @model_validator(mode="after")
    def _check_layers(self) -> DiscriminatorConfig:
        if self.layers != 1 and not self.allow_multilayer:
            raise ValueError(
                f"discriminator uses a single LSTM layer; got layers={self.layers} "
                "(set allow_multilayer to override)"
            )
        return self


class DiscriminatorGrid(_Config):
    learning_rates: tuple[float, ...] = (1e-3, 1e-2)
    dropouts: tuple[float, ...] = (0.1, 0.3)
    epochs: tuple[int, ...] = (12, 24)
    batch_sizes: tuple[int, ...] = (64, 256)
    holdout_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)


class AdversarialConfig(_Config):
    rollout_count: int = Field(default=16, ge=1)
    max_expansion_len: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-4, gt=0.0)
    epochs: int = Field(default=10, ge=1)
    patience: int = Field(default=3, ge=1)
    batch_size: int = Field(default=16, ge=1)
    reward_mode: RewardMode = RewardMode.PROB_REAL
    baseline_mode: BaselineMode = BaselineMode.NONE
    baseline_momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    alternate_discriminator: bool = False
    seed: int = 0


class EvaluationConfig(_Config):
    expansion_only_similarity: bool = False


class RunConfig(_Config):
    corpus_path: str | None = None
    corpus_format: CorpusFormat = CorpusFormat.JSONL
    embeddings_path: str | None = None
    workdir: str | None = None
    strategy: Strategy = Strategy.SELF
    seed: int = 0
    num_threads: int = Field(default=1, ge=1)
    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    embeddings: EmbeddingConfig = Field(default_factory=EmbeddingConfig)
    conditions: ConditionConfig = Field(default_factory=ConditionConfig)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)
    discriminator: DiscriminatorConfig = Field(default_factory=DiscriminatorConfig)
    discriminator_grid: DiscriminatorGrid = Field(default_factory=DiscriminatorGrid)
    adversarial: AdversarialConfig = Field(default_factory=AdversarialConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)

    def with_seed(self, seed: int) -> RunConfig:
        """Return a copy whose module seeds all follow `seed`."""
        return self.model_copy(
            update={
                "seed": seed,
                "generator": self.generator.model_copy(update={"seed": seed}),
                "discriminator": self.discriminator.model_copy(update={"seed": seed}),
                "adversarial": self.adversarial.model_copy(update={"seed": seed}),
            }
        )


def load_run_config(path: str | Path | None) -> RunConfig:
    """Load a run config file, or return defaults when no path is given."""
    if path is None:
        return RunConfig()
    config_path = Path(path)
    if not config_path.exists():
        raise MissingInputError(config_path, "config file")
    try:
        return RunConfig.model_validate_json(config_path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigError(f"invalid config {config_path}: {e}") from e


def save_run_config(config: RunConfig, path: str | Path) -> None:
    Path(path).write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")


def build_config(factory: type[_Config], **values: object) -> _Config:
    """Construct a module config, reporting invariant violations as ConfigError."""
    try:
        return factory(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
