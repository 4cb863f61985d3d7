"""Content-addressed session store for run artifacts.

Layout under the store root:

    objects/<sha256>          immutable blobs, named by their own hash
    runs/<run_id>/manifest.json
    runs/<run_id>/timings.json

Blobs are deduplicated by content. Writes go through a temp file followed by
os.replace so readers never observe a partial file; manifests are written the
same way. The runs directory itself is the index.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import threading
from pathlib import Path

from ..errors import StoreError

_RUN_ID_RE = re.compile(r"^[0-9a-f]{16}$")

MANIFEST_FILE = "manifest.json"
TIMINGS_FILE = "timings.json"


def blob_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class SessionStore:
    """Disk-backed store shared by the pipeline, the CLI, and the service."""

    def __init__(self, root):
        self.root = Path(root)
        self._objects = self.root / "objects"
        self._runs = self.root / "runs"
        self._objects.mkdir(parents=True, exist_ok=True)
        self._runs.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # --- blobs ---

    def put_blob(self, data: bytes) -> str:
        digest = blob_hash(data)
        path = self._objects / digest
        if not path.exists():
            _atomic_write(path, data)
        return digest

    def get_blob(self, digest: str) -> bytes:
        path = self._objects / digest
        try:
            data = path.read_bytes()
        except OSError:
            raise StoreError(f"missing blob {digest}") from None
        if blob_hash(data) != digest:
            raise StoreError(f"blob {digest} is corrupt")
        return data

    def has_blob(self, digest: str) -> bool:
        return (self._objects / digest).exists()

    # --- runs ---

    def _run_dir(self, run_id: str) -> Path:
        if not _RUN_ID_RE.match(run_id):
            raise StoreError(f"malformed run id {run_id!r}")
        return self._runs / run_id

    def put_run(self, run_id: str, manifest: dict, timings=None):
        """Persist a run manifest (and optional timing sidecar) atomically."""
        run_dir = self._run_dir(run_id)
        body = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
        with self._lock:
            _atomic_write(run_dir / MANIFEST_FILE, body.encode("utf-8"))
            if timings is not None:
                side = json.dumps(timings, sort_keys=True, separators=(",", ":"))
                _atomic_write(run_dir / TIMINGS_FILE, side.encode("utf-8"))

    def has_run(self, run_id: str) -> bool:
        if not _RUN_ID_RE.match(run_id):
            return False
        return (self._runs / run_id / MANIFEST_FILE).exists()

    def get_manifest(self, run_id: str) -> dict:
        path = self._run_dir(run_id) / MANIFEST_FILE
        try:
            body = path.read_bytes()
        except OSError:
            raise StoreError(f"unknown run {run_id}") from None
        try:
            return json.loads(body)
        except ValueError as exc:
            raise StoreError(f"manifest for run {run_id} is corrupt: {exc}") from exc

    def get_timings(self, run_id: str) -> dict:
        path = self._run_dir(run_id) / TIMINGS_FILE
        try:
            body = path.read_bytes()
        except OSError:
            return {}
        try:
            return json.loads(body)
        except ValueError:
            return {}

    def delete_run(self, run_id: str):
        """Remove a run's manifest and sidecars. Shared blobs stay."""
        run_dir = self._run_dir(run_id)
        with self._lock:
            if not run_dir.exists():
                raise StoreError(f"unknown run {run_id}")
            for child in run_dir.iterdir():
                child.unlink()
            run_dir.rmdir()

    def list_runs(self) -> list:
        out = []
        for child in sorted(self._runs.iterdir()):
            if child.is_dir() and _RUN_ID_RE.match(child.name):
                if (child / MANIFEST_FILE).exists():
                    out.append(child.name)
        return out
