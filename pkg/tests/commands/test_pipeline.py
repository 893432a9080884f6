"""End-to-end runs of the CLI pipeline on the toy corpus."""

import json
import shutil
from pathlib import Path
from unittest.mock import patch

import pytest

from qexgan import simple_main
from qexgan.commands.artifacts import Phase
from qexgan.commands.expand import cmd_expand
from qexgan.config import RunConfig, save_run_config
from qexgan.store import ArtifactStore


# ---------- Fixtures & helpers ----------


CONSOLE = (
    "display_evaluation",
    "display_stats",
    "print_formatted_text",
    "print_info",
    "print_success",
    "print_warning",
)


@pytest.fixture(autouse=True)
def quiet_console():
    """Console output patched out; the runner's calls stay inspectable."""
    patches = {name: patch(f"qexgan.runner.{name}") for name in CONSOLE}
    mocks = {name: p.start() for name, p in patches.items()}
    with patch("qexgan.simple_main.print_error") as mock_error:
        mocks["print_error"] = mock_error
        yield mocks
    for p in patches.values():
        p.stop()


@pytest.fixture
def config_file(tmp_path: Path, run_config: RunConfig) -> Path:
    path = tmp_path / "run.json"
    save_run_config(run_config, path)
    return path


@pytest.fixture
def workdir(run_config: RunConfig) -> Path:
    assert run_config.workdir is not None
    return Path(run_config.workdir)


def run(config_file: Path, *argv: str) -> int:
    """Run the CLI and return its exit code."""
    try:
        simple_main.main(["--config", str(config_file), *argv])
    except SystemExit as e:
        return int(e.code or 0)
    return 0


def snapshot(workdir: Path, directory: str) -> dict[str, bytes]:
    return {
        p.name: p.read_bytes() for p in sorted((workdir / directory).iterdir())
    }


def train(config_file: Path, *strategies: str) -> None:
    for strategy in strategies:
        assert run(config_file, "--strategy", strategy, "pretrain-gen") == 0
        assert run(config_file, "--strategy", strategy, "pretrain-disc") == 0


# ---------- prepare ----------


class TestPrepare:
    def test_writes_the_prepared_artifacts(
        self, config_file: Path, workdir: Path, quiet_console
    ) -> None:
        assert run(config_file, "prepare") == 0

        assert sorted(snapshot(workdir, "artifacts")) == [
            "conditions-self.jsonl",
            "corpus.jsonl",
            "embeddings.vec",
            "stats.json",
            "vocabulary.json",
        ]
        manifest = json.loads((workdir / "manifest.json").read_text())
        assert len(manifest["artifacts"]) == 5
        assert not (workdir / ".lock").exists()
        quiet_console["display_stats"].assert_called_once()

    def test_embeddings_are_reduced_to_the_token_dimension(
        self, config_file: Path, workdir: Path
    ) -> None:
        run(config_file, "prepare")
        header = (workdir / "artifacts" / "embeddings.vec").read_text().split("\n")[0]
        # 13 corpus words; the unused vector is dropped
        assert header == "13 4"

    def test_rerun_is_byte_identical(self, config_file: Path, workdir: Path) -> None:
        run(config_file, "prepare", "--all-strategies")
        first = snapshot(workdir, "artifacts")

        assert run(config_file, "prepare", "--all-strategies") == 0

        assert snapshot(workdir, "artifacts") == first
        assert len(first) == 8

    def test_missing_embeddings_is_a_validation_failure(
        self, config_file: Path, tmp_path: Path, quiet_console
    ) -> None:
        code = run(config_file, "prepare", "--embeddings", str(tmp_path / "nope.vec"))

        assert code == 2
        (message,), _ = quiet_console["print_error"].call_args
        assert "nope.vec" in message


# ---------- training ----------


class TestTraining:
    def test_pretraining_writes_checkpoints_and_histories(
        self, config_file: Path, workdir: Path
    ) -> None:
        run(config_file, "prepare")
        train(config_file, "self")

        checkpoints = snapshot(workdir, "checkpoints")
        assert sorted(checkpoints) == ["discriminator-self.ckpt", "generator-self.ckpt"]
        history = (workdir / "reports" / "pretrain-gen-self.jsonl").read_text()
        assert len(history.splitlines()) == 2

    def test_half_epochs(self, config_file: Path, workdir: Path) -> None:
        run(config_file, "prepare")
        assert run(config_file, "pretrain-gen", "--half-epochs") == 0
        history = (workdir / "reports" / "pretrain-gen-self.jsonl").read_text()
        assert len(history.splitlines()) == 1

    def test_generator_training_is_reproducible(
        self, config_file: Path, workdir: Path
    ) -> None:
        run(config_file, "prepare")
        run(config_file, "pretrain-gen")
        first = snapshot(workdir, "checkpoints")

        run(config_file, "pretrain-gen")

        assert snapshot(workdir, "checkpoints") == first

    def test_discriminator_needs_a_generator(
        self, config_file: Path, quiet_console
    ) -> None:
        run(config_file, "prepare")
        assert run(config_file, "pretrain-disc") == 2

    def test_stale_upstream_is_refused(self, config_file: Path) -> None:
        run(config_file, "prepare")
        run(config_file, "pretrain-gen")
        # a different split changes the corpus the generator was trained on
        run(config_file, "--seed", "1", "prepare")

        assert run(config_file, "pretrain-disc") == 2

    def test_adversarial_training(self, config_file: Path, workdir: Path) -> None:
        run(config_file, "prepare")
        train(config_file, "self")

        assert run(config_file, "adv-train", "--reward-mode", "disc-loss") == 0

        checkpoints = snapshot(workdir, "checkpoints")
        assert "generator-self-adversarial.ckpt" in checkpoints
        assert "generator-self-adversarial-best.ckpt" in checkpoints
        history = (workdir / "reports" / "adv-train-self.jsonl").read_text()
        assert len(history.splitlines()) == 1

    def test_adversarial_training_with_alternating_discriminator(
        self, config_file: Path, workdir: Path
    ) -> None:
        run(config_file, "prepare")
        train(config_file, "self")
        before = snapshot(workdir, "checkpoints")["discriminator-self.ckpt"]

        assert run(config_file, "adv-train", "--alternate-discriminator") == 0

        after = snapshot(workdir, "checkpoints")["discriminator-self.ckpt"]
        assert after == before


# ---------- expand & evaluate ----------


class TestExpand:
    def test_queries_file_keeps_order(
        self, config_file: Path, workdir: Path, tmp_path: Path
    ) -> None:
        run(config_file, "prepare")
        run(config_file, "pretrain-gen")
        queries = tmp_path / "queries.txt"
        queries.write_text("mavi etek\n\nsiyah canta\nkirmizi elbise\n")
        output = tmp_path / "out" / "expansions.jsonl"

        code = run(
            config_file,
            "expand",
            "--queries-file",
            str(queries),
            "--output",
            str(output),
        )

        assert code == 0
        records = [json.loads(line) for line in output.read_text().splitlines()]
        assert [r["query"] for r in records] == [
            "mavi etek",
            "siyah canta",
            "kirmizi elbise",
        ]
        for record in records:
            assert record["condition_strategy"] == "self"
            assert record["expanded_query"].startswith(record["query"])

    def test_single_query_prints_one_line(
        self, config_file: Path, quiet_console
    ) -> None:
        run(config_file, "prepare")
        run(config_file, "pretrain-gen")

        assert run(config_file, "expand", "--query", "Mavi Etek") == 0

        (line,), _ = quiet_console["print_formatted_text"].call_args
        assert json.loads(line)["query"] == "mavi etek"

    def test_out_of_vocabulary_query_warns(
        self, config_file: Path, run_config: RunConfig, workdir: Path
    ) -> None:
        run(config_file, "prepare")
        run(config_file, "pretrain-gen")

        result = cmd_expand(
            run_config, ArtifactStore(workdir), ["zzzz qqqq", "mavi etek"]
        )

        assert result.phase is Phase.PRETRAINED
        assert len(result.records) == 2
        assert len(result.warnings) == 1
        assert "zzzz qqqq" in result.warnings[0]

    def test_blank_query_is_rejected(self, config_file: Path) -> None:
        run(config_file, "prepare")
        run(config_file, "pretrain-gen")
        assert run(config_file, "expand", "--query", "!!!") == 2


class TestEvaluate:
    def test_compares_every_strategy(
        self, config_file: Path, workdir: Path, quiet_console
    ) -> None:
        run(config_file, "prepare", "--all-strategies")
        train(config_file, "self", "tfidf", "doc-sim", "word-sim")

        code = run(
            config_file,
            "evaluate",
            "--strategies",
            "self",
            "tfidf",
            "doc-sim",
            "word-sim",
        )

        assert code == 0
        (rows,), _ = quiet_console["display_evaluation"].call_args
        assert [label for label, _ in rows] == [
            "Baseline Generator",
            "TF-IDF",
            "Document Sim.",
            "Word Sim.",
        ]
        for _, report in rows:
            assert report.metadata.phase == "pretrained"
            assert report.metadata.discriminator_protocol == "test"
        reports = snapshot(workdir, "reports")
        assert "evaluation-doc_sim-pretrained.json" in reports

    def test_full_pipeline_rerun_is_byte_identical(
        self, config_file: Path, workdir: Path
    ) -> None:
        def pipeline() -> dict[str, bytes]:
            assert run(config_file, "prepare") == 0
            train(config_file, "self")
            assert run(config_file, "adv-train") == 0
            assert run(config_file, "evaluate") == 0
            return {
                str(p.relative_to(workdir)): p.read_bytes()
                for p in sorted(workdir.rglob("*"))
                if p.is_file()
            }

        first = pipeline()
        shutil.rmtree(workdir)
        second = pipeline()

        assert "reports/evaluation-self-adversarial-best.json" in first
        assert "checkpoints/generator-self-adversarial-best.ckpt" in first
        assert "manifest.json" in first
        assert second.keys() == first.keys()
        for name, content in first.items():
            assert second[name] == content, name

    def test_auto_phase_prefers_the_adversarial_best(
        self, config_file: Path, workdir: Path
    ) -> None:
        run(config_file, "prepare")
        train(config_file, "self")
        run(config_file, "adv-train")

        assert run(config_file, "evaluate") == 0

        report = json.loads(
            (workdir / "reports" / "evaluation-self-adversarial-best.json").read_text()
        )
        assert report["metadata"]["phase"] == "adversarial-best"
        assert report["metadata"]["reward_mode"] == "prob_real"

    def test_missing_condition_table(self, config_file: Path) -> None:
        run(config_file, "prepare")
        assert run(config_file, "evaluate", "--strategies", "tfidf") == 2
