"""Versioned on-disk caches with atomic writes and advisory locking.

Caches hold exact data (integer series coefficients, rational matrices),
so a format bump invalidates rather than migrates; a corrupt file raises
CacheError instead of being silently rebuilt.
"""

import fcntl
import json
import os
import tempfile

FORMAT_VERSION = 1


class CacheError(RuntimeError):
    pass


def default_cache_dir():
    env = os.environ.get("PLINV_CACHE_DIR")
    if env:
        return env
    base = os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache"))
    return os.path.join(base, "plinv")


class Cache:
    def __init__(self, directory=None, enabled=True):
        self.directory = directory or default_cache_dir()
        self.enabled = enabled

    def _path(self, name):
        return os.path.join(self.directory, name + ".json")

    def load(self, name, kind):
        if not self.enabled:
            return None
        path = self._path(name)
        if not os.path.exists(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CacheError(f"corrupt cache file {path}: {exc}") from exc
        if not isinstance(data, dict) or data.get("format") != FORMAT_VERSION:
            return None  # stale format: ignore, will be rewritten
        if data.get("kind") != kind:
            raise CacheError(f"cache file {path} holds {data.get('kind')!r}, wanted {kind!r}")
        return data.get("payload")

    def store(self, name, kind, payload):
        if not self.enabled:
            return
        os.makedirs(self.directory, exist_ok=True)
        path = self._path(name)
        lock_path = path + ".lock"
        data = {"format": FORMAT_VERSION, "kind": kind, "payload": payload}
        with open(lock_path, "w") as lock:
            fcntl.flock(lock, fcntl.LOCK_EX)
            try:
                fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
                try:
                    with os.fdopen(fd, "w", encoding="utf-8") as fh:
                        json.dump(data, fh)
                    os.replace(tmp, path)
                except BaseException:
                    if os.path.exists(tmp):
                        os.unlink(tmp)
                    raise
            finally:
                fcntl.flock(lock, fcntl.LOCK_UN)


_default = None


def shared_cache():
    global _default
    if _default is None:
        _default = Cache()
    return _default
