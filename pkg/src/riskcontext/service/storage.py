"""File-backed persistence: a directory per immutable snapshot, each with
a manifest, plus the raw claims inputs at the workspace root.

A snapshot is never edited; every mutation copies the previous artifacts
forward, adds the new ones, writes the manifest, then atomically
repoints `current`.
"""
from __future__ import annotations

import json
import os
import shutil
import tempfile
from pathlib import Path

from ..errors import DependencyError

CLAIMS_FILE = "claims.ndjson"
CCS_MAP_FILE = "ccs_map.json"

ARTIFACTS = (
    "cohort",
    "features",
    "split",
    "model",
    "metrics",
    "attributions",
    "prototypes",
    "prototype_summary",
    "aggregate",
    "guidelines",
)


class Snapshot:
    def __init__(self, directory: Path):
        self.directory = Path(directory)
        with open(self.directory / "manifest.json", encoding="utf-8") as fh:
            self.manifest = json.load(fh)
        self.snapshot_id: str = self.manifest["snapshot"]

    def has(self, artifact: str) -> bool:
        return artifact in self.manifest["artifacts"]

    def read_bytes(self, artifact: str) -> bytes:
        if not self.has(artifact):
            raise DependencyError(
                f"artifact {artifact!r} is not in snapshot {self.snapshot_id}",
                missing=artifact,
            )
        return (self.directory / self.manifest["artifacts"][artifact]).read_bytes()

    def read_json(self, artifact: str):
        return json.loads(self.read_bytes(artifact))


class Workspace:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "snapshots").mkdir(exist_ok=True)

    # Raw inputs
    @property
    def claims_path(self) -> Path:
        return self.root / CLAIMS_FILE

    @property
    def ccs_map_path(self) -> Path:
        return self.root / CCS_MAP_FILE

    # Snapshots
    def _current_file(self) -> Path:
        return self.root / "current"

    def current_snapshot(self) -> Snapshot | None:
        marker = self._current_file()
        if not marker.exists():
            return None
        snapshot_id = marker.read_text().strip()
        return Snapshot(self.root / "snapshots" / snapshot_id)

    def require_snapshot(self) -> Snapshot:
        snapshot = self.current_snapshot()
        if snapshot is None:
            raise DependencyError("no snapshot built yet", missing="snapshot")
        return snapshot

    def new_snapshot(self, updates: dict[str, bytes]) -> Snapshot:
        """Write a successor snapshot carrying forward previous artifacts."""
        previous = self.current_snapshot()
        next_ordinal = 1
        if previous is not None:
            next_ordinal = int(previous.snapshot_id) + 1
        snapshot_id = f"{next_ordinal:04d}"
        directory = self.root / "snapshots" / snapshot_id
        directory.mkdir(parents=True)

        artifacts: dict[str, str] = {}
        if previous is not None:
            for name, filename in previous.manifest["artifacts"].items():
                if name in updates:
                    continue
                shutil.copyfile(previous.directory / filename, directory / filename)
                artifacts[name] = filename
        for name, blob in updates.items():
            filename = f"{name}.json"
            (directory / filename).write_bytes(blob)
            artifacts[name] = filename

        manifest = {"snapshot": snapshot_id, "artifacts": artifacts, "version": 1}
        (directory / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

        # Atomic repoint: write a temp file in the same directory, then rename.
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".current-")
        with os.fdopen(fd, "w") as fh:
            fh.write(snapshot_id + "\n")
        os.replace(tmp, self._current_file())
        return Snapshot(directory)


def dump_json(payload) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
