"""Versioned state snapshots with integrity checking.

A snapshot wraps a pickled payload in an envelope carrying a format
version and a content digest, so restores fail loudly on version drift or
corruption instead of resuming from a silently broken state.  Restored
learners must reproduce the exact prediction sequence of an uninterrupted
run; the tests enforce that bit-for-bit.
"""

from __future__ import annotations

import hashlib
import io
import pickle
from pathlib import Path

FORMAT_VERSION = 1
_MAGIC = b"WINSTREAM-SNAPSHOT"


class SnapshotError(ValueError):
    pass


def save_snapshot(payload: object, path: str | Path) -> Path:
    path = Path(path)
    body = pickle.dumps(payload, protocol=pickle.HIGHEST_PROTOCOL)
    digest = hashlib.sha256(body).hexdigest().encode()
    with open(path, "wb") as sink:
        sink.write(_MAGIC + b"\n")
        sink.write(f"version={FORMAT_VERSION}\n".encode())
        sink.write(digest + b"\n")
        sink.write(body)
    return path


def load_snapshot(path: str | Path) -> object:
    path = Path(path)
    if not path.exists():
        raise SnapshotError(f"snapshot not found: {path}")
    with open(path, "rb") as source:
        magic = source.readline().strip()
        if magic != _MAGIC:
            raise SnapshotError("not a snapshot file (bad magic)")
        version_line = source.readline().strip().decode()
        if not version_line.startswith("version="):
            raise SnapshotError("snapshot missing version header")
        version = int(version_line.split("=", 1)[1])
        if version != FORMAT_VERSION:
            raise SnapshotError(
                f"snapshot version {version} unsupported (expected {FORMAT_VERSION})"
            )
        digest = source.readline().strip().decode()
        body = source.read()
    if hashlib.sha256(body).hexdigest() != digest:
        raise SnapshotError("snapshot integrity check failed (corrupted payload)")
    return pickle.loads(body)
