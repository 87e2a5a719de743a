"""Content-addressed result cache.

Records are JSON documents stored under ``<dir>/<hash[:2]>/<hash>.json``.
Writes go to a temporary file in the same directory and are renamed into
place, so readers never see a partial record.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from . import __version__

log = logging.getLogger(__name__)

ENV_VAR = "VLAB_CACHE_DIR"
DEFAULT_DIR = ".vlab-cache"


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(obj) -> str:
    return hashlib.sha256(canonical(obj).encode("utf-8")).hexdigest()


def cache_key(algebra: dict, prime, degree, operation: str, version: str = __version__) -> str:
    return content_hash({"algebra": algebra, "prime": prime, "degree": degree,
                         "operation": operation, "version": version})


class Cache:
    def __init__(self, root=None, enabled: bool = True):
        if root is None:
            root = os.environ.get(ENV_VAR) or DEFAULT_DIR
        self.root = Path(root)
        self.enabled = enabled

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str):
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None
        try:
            doc = json.loads(text)
            if doc.get("key") != key:
                raise ValueError("key mismatch")
            return doc["record"]
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            log.warning("ignoring corrupt cache entry %s (%s)", path, exc)
            return None

    def put(self, key: str, record) -> None:
        if not self.enabled:
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(canonical({"key": key, "record": record}))
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise


def cache_get(cache: Cache, key: str):
    return cache.get(key)


def cache_put(cache: Cache, key: str, record) -> None:
    cache.put(key, record)
