"""Run manifests and atomic file output."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

MANIFEST_SCHEMA_VERSION = 1


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def atomic_write(path: str | os.PathLike, data: str | bytes) -> str:
    """Write via a temp file in the target directory and rename; returns the sha256 of the bytes."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return sha256_bytes(data)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass
class RunManifest:
    command: str
    parameters: dict
    artifact_version: str
    schema_version: int = MANIFEST_SCHEMA_VERSION
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    input_checksums: dict = field(default_factory=dict)
    output_checksums: dict = field(default_factory=dict)
    wall_seconds: float | None = None
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def add_input(self, path: str) -> None:
        self.input_checksums[os.fspath(path)] = sha256_file(path)

    def finish(self) -> "RunManifest":
        self.finished_at = _now()
        self.wall_seconds = round(time.perf_counter() - self._t0, 6)
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("_t0")
        return d

    def write_beside(self, output_path: str) -> str:
        """Write ``<output_path>.manifest.json``; call after every output exists."""
        path = os.fspath(output_path) + ".manifest.json"
        atomic_write(path, json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path
