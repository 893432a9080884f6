from pathlib import Path

import pytest
from pydantic import BaseModel

from qexgan.errors import ArtifactMismatch, MissingArtifactError
from qexgan.store import ArtifactStore, sha256_of


class Record(BaseModel):
    name: str
    value: int


@pytest.fixture
def store(tmp_path: Path) -> ArtifactStore:
    store = ArtifactStore(tmp_path / "work")
    store.ensure_layout()
    return store


class TestArtifactStore:
    def test_layout(self, store: ArtifactStore) -> None:
        for directory in ("artifacts", "checkpoints", "reports"):
            assert (store.root / directory).is_dir()

    def test_write_records_hash_and_upstream(self, store: ArtifactStore) -> None:
        store.write_text("artifacts/a.txt", "alpha")
        store.write_text("artifacts/b.txt", "beta", upstream=["artifacts/a.txt"])

        entry = store.load_manifest().artifacts["artifacts/b.txt"]

        assert entry.sha256 == sha256_of(store.path("artifacts/b.txt"))
        assert entry.upstream == {
            "artifacts/a.txt": sha256_of(store.path("artifacts/a.txt"))
        }

    def test_verify_passes_for_untouched_artifacts(self, store: ArtifactStore) -> None:
        store.write_text("artifacts/a.txt", "alpha")
        store.write_text("artifacts/b.txt", "beta", upstream=["artifacts/a.txt"])
        assert store.verify("artifacts/b.txt") == sha256_of(
            store.path("artifacts/b.txt")
        )

    def test_edited_artifact_is_refused(self, store: ArtifactStore) -> None:
        store.write_text("artifacts/a.txt", "alpha")
        store.path("artifacts/a.txt").write_text("tampered")

        with pytest.raises(ArtifactMismatch):
            store.verify("artifacts/a.txt")

    def test_changed_upstream_is_refused(self, store: ArtifactStore) -> None:
        store.write_text("artifacts/a.txt", "alpha")
        store.write_text("artifacts/b.txt", "beta", upstream=["artifacts/a.txt"])
        store.write_text("artifacts/a.txt", "changed")

        with pytest.raises(ArtifactMismatch) as exc_info:
            store.verify("artifacts/b.txt")
        assert "artifacts/a.txt" in str(exc_info.value)

    def test_missing_artifact(self, store: ArtifactStore) -> None:
        with pytest.raises(MissingArtifactError):
            store.require("artifacts/absent.txt")

    def test_unrecorded_file_verifies_by_content(self, store: ArtifactStore) -> None:
        store.path("artifacts/c.txt").write_text("gamma")
        assert store.verify("artifacts/c.txt") == sha256_of(
            store.path("artifacts/c.txt")
        )

    def test_jsonl_is_sorted_and_stable(self, store: ArtifactStore) -> None:
        records = [Record(name="x", value=1), Record(name="y", value=2)]
        path = store.write_jsonl("reports/r.jsonl", records)
        first = path.read_bytes()

        store.write_jsonl("reports/r.jsonl", records)

        assert path.read_bytes() == first
        assert first.decode().splitlines()[0] == '{"name": "x", "value": 1}'

    def test_write_model(self, store: ArtifactStore) -> None:
        path = store.write_model("reports/one.json", Record(name="z", value=3))
        assert Record.model_validate_json(path.read_text()) == Record(
            name="z", value=3
        )
        assert "reports/one.json" in store.load_manifest().artifacts
