"""Workdir artifact store with a sha256 manifest.

Every artifact is addressed by its path relative to the workdir. The manifest
records each artifact's hash and the hashes of the artifacts it was derived
from; a stale upstream is refused, never silently recomputed.
"""

from __future__ import annotations

import hashlib
import json
import logging
from collections.abc import Iterable
from pathlib import Path

from pydantic import BaseModel, Field

from qexgan.errors import ArtifactMismatch, MissingArtifactError
from qexgan.locations import (
    ARTIFACTS_DIR,
    CHECKPOINTS_DIR,
    MANIFEST_FILE,
    REPORTS_DIR,
)


logger = logging.getLogger(__name__)


class ManifestEntry(BaseModel):
    sha256: str
    upstream: dict[str, str] = Field(default_factory=dict)


class Manifest(BaseModel):
    artifacts: dict[str, ManifestEntry] = Field(default_factory=dict)


def sha256_of(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def artifact_name(directory: str, filename: str) -> str:
    return f"{directory}/{filename}"


class ArtifactStore:
    """Single source of truth for reading and writing workdir artifacts."""

    def __init__(self, workdir: str | Path) -> None:
        self.root = Path(workdir)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_FILE

    def ensure_layout(self) -> None:
        for directory in (ARTIFACTS_DIR, CHECKPOINTS_DIR, REPORTS_DIR):
            (self.root / directory).mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.root / name

    def load_manifest(self) -> Manifest:
        if not self.manifest_path.exists():
            return Manifest()
        return Manifest.model_validate_json(
            self.manifest_path.read_text(encoding="utf-8")
        )

    def _save_manifest(self, manifest: Manifest) -> None:
        text = json.dumps(manifest.model_dump(mode="json"), sort_keys=True, indent=2)
        self.manifest_path.write_text(text + "\n", encoding="utf-8")

    def require(self, name: str) -> Path:
        path = self.path(name)
        if not path.exists():
            raise MissingArtifactError(name, path)
        return path

    def current_hash(self, name: str) -> str:
        return sha256_of(self.require(name))

    def verify(self, name: str) -> str:
        """Check `name` and its recorded upstream against the files on disk."""
        actual = self.current_hash(name)
        entry = self.load_manifest().artifacts.get(name)
        if entry is None:
            return actual
        if entry.sha256 != actual:
            raise ArtifactMismatch(name, entry.sha256, actual)
        for upstream, recorded in sorted(entry.upstream.items()):
            current = self.current_hash(upstream)
            if current != recorded:
                raise ArtifactMismatch(upstream, recorded, current)
        return actual

    def upstream_hashes(self, names: Iterable[str]) -> dict[str, str]:
        """Verified current hashes of `names`, for recording as upstream."""
        return {name: self.verify(name) for name in sorted(set(names))}

    def record(self, name: str, upstream: Iterable[str] = ()) -> str:
        """Add an already written file to the manifest."""
        digest = self.current_hash(name)
        manifest = self.load_manifest()
        manifest.artifacts[name] = ManifestEntry(
            sha256=digest,
            upstream={u: self.current_hash(u) for u in sorted(set(upstream))},
        )
        self._save_manifest(manifest)
        logger.debug("recorded %s (%s)", name, digest[:12])
        return digest

    def write_bytes(
        self, name: str, data: bytes, upstream: Iterable[str] = ()
    ) -> Path:
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        self.record(name, upstream)
        return path

    def write_text(self, name: str, text: str, upstream: Iterable[str] = ()) -> Path:
        return self.write_bytes(name, text.encode("utf-8"), upstream)

    def write_jsonl(
        self,
        name: str,
        records: Iterable[BaseModel],
        upstream: Iterable[str] = (),
    ) -> Path:
        lines = [
            json.dumps(r.model_dump(mode="json"), sort_keys=True) for r in records
        ]
        return self.write_text(name, "".join(line + "\n" for line in lines), upstream)

    def write_model(
        self, name: str, model: BaseModel, upstream: Iterable[str] = ()
    ) -> Path:
        text = json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2)
        return self.write_text(name, text + "\n", upstream)
