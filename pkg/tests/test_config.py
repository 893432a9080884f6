from pathlib import Path

import pytest
from pydantic import ValidationError

from qexgan.config import (
    ConditionConfig,
    CorpusConfig,
    RunConfig,
    build_config,
    load_run_config,
    save_run_config,
)
from qexgan.errors import ConfigError, MissingInputError
from qexgan.locations import DEFAULT_WORKDIR, WORKDIR_ENV, resolve_workdir
from qexgan.types import RewardMode, Strategy


class TestRunConfig:
    def test_file_round_trip(self, tmp_path: Path, run_config: RunConfig) -> None:
        path = tmp_path / "run.json"
        save_run_config(run_config, path)
        assert load_run_config(path) == run_config

    def test_defaults_without_a_file(self) -> None:
        config = load_run_config(None)
        assert config.strategy is Strategy.SELF
        assert config.adversarial.reward_mode is RewardMode.PROB_REAL

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(MissingInputError):
            load_run_config(tmp_path / "absent.json")

    def test_unknown_key_is_a_config_error(self, tmp_path: Path) -> None:
        path = tmp_path / "run.json"
        path.write_text('{"strategy": "self", "learning_rate": 1}')
        with pytest.raises(ConfigError):
            load_run_config(path)

    def test_with_seed_reaches_every_module(self, run_config: RunConfig) -> None:
        seeded = run_config.with_seed(42)
        assert seeded.seed == 42
        assert seeded.generator.seed == 42
        assert seeded.discriminator.seed == 42
        assert seeded.adversarial.seed == 42
        assert run_config.generator.seed == 0

    def test_assignment_is_validated(self) -> None:
        config = RunConfig()
        with pytest.raises(ValidationError):
            config.num_threads = 0


class TestModuleConfigs:
    @pytest.mark.parametrize(
        "ratios", [(0.5, 0.5, 0.0), (0.5, 0.3, 0.3), (-0.1, 0.6, 0.5)]
    )
    def test_split_ratios(self, ratios: tuple[float, float, float]) -> None:
        with pytest.raises(ValidationError):
            CorpusConfig(split_ratios=ratios)

    def test_build_config_reports_config_errors(self) -> None:
        with pytest.raises(ConfigError):
            build_config(ConditionConfig, k_documents=0)
        assert build_config(ConditionConfig, k_words=3).k_words == 3


class TestResolveWorkdir:
    def test_precedence(
        self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path
    ) -> None:
        monkeypatch.setenv(WORKDIR_ENV, str(tmp_path / "env"))
        assert resolve_workdir("cli", "file") == Path("cli")
        assert resolve_workdir(None, "file") == Path("file")
        assert resolve_workdir(None, None) == tmp_path / "env"

    def test_default(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv(WORKDIR_ENV, raising=False)
        assert resolve_workdir(None, None) == Path(DEFAULT_WORKDIR)
