"""Content-addressed, on-disk, append-only response cache.

Keys are SHA-256 hashes over (backend_id, schema_version, prompt bundle);
identical inputs always map to the same key. Entries are never mutated:
the first write wins, later writes return the stored entry. Reads are
lock-free; writes are atomic (temp file + rename). A keyed-lock helper
lets batch callers guarantee at most one network request per key.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .prompts import PromptBundle


@dataclass(frozen=True)
class CacheEntry:
    key: str
    value: str
    stored_at: str


def bundle_key(backend_id: str, schema_version: str, bundle: PromptBundle) -> str:
    """Deterministic content hash for one (backend, schema, bundle) triple."""
    payload = json.dumps(
        {
            "backend_id": backend_id,
            "schema_version": schema_version,
            "system_message": bundle.system_message,
            "codebook_message": bundle.codebook_message,
            "policy_message": bundle.policy_message,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResponseCache:
    def __init__(self, directory):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def _path(self, key: str) -> Path:
        return self._dir / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[CacheEntry]:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as handle:
                record = json.load(handle)
        except FileNotFoundError:
            return None
        return CacheEntry(key=key, value=record["value"], stored_at=record["stored_at"])

    def put(self, key: str, value: str, stored_at: str) -> CacheEntry:
        """Store an entry unless one exists; returns whichever entry is stored."""
        with self._write_lock:
            existing = self.get(key)
            if existing is not None:
                return existing
            path = self._path(key)
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            with open(tmp, "w", encoding="utf-8") as handle:
                json.dump({"value": value, "stored_at": stored_at}, handle)
            os.replace(tmp, path)
            return CacheEntry(key=key, value=value, stored_at=stored_at)


class KeyedLocks:
    """One lock per key, created on demand. Guards in-flight requests."""

    def __init__(self):
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def lock_for(self, key: str) -> threading.Lock:
        with self._guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = self._locks[key] = threading.Lock()
            return lock
