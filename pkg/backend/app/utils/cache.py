"""
Thread-Safe Table Cache
Keeps recently built sieve and Mertens tables so subcommands in one process
share them. Uses cachetools.LRUCache behind a lock.
"""

import hashlib
import logging
import threading
from typing import Any, Callable, Hashable, Optional

from cachetools import LRUCache

from app.settings import get_settings

logger = logging.getLogger(__name__)


class ThreadSafeLRUCache:
    """Thread-safe LRU cache keyed by hashable build parameters"""

    def __init__(self, max_size: int = 4, name: str = "cache"):
        self._cache = LRUCache(maxsize=max_size)
        self._lock = threading.RLock()
        self._build_locks: dict = {}
        self.name = name
        self.hits = 0
        self.misses = 0

    def _get_key(self, key: Hashable) -> str:
        """Stable string key from the build parameters"""
        return hashlib.sha256(repr(key).encode()).hexdigest()

    def get(self, key: Hashable) -> Optional[Any]:
        k = self._get_key(key)
        with self._lock:
            try:
                value = self._cache[k]
                self.hits += 1
                return value
            except KeyError:
                self.misses += 1
                return None

    def set(self, key: Hashable, value: Any) -> None:
        with self._lock:
            self._cache[self._get_key(key)] = value

    def get_or_build(self, key: Hashable, build: Callable[[], Any]) -> Any:
        """
        Return the cached value or build it once.

        Concurrent callers asking for the same key wait for a single build.
        """
        value = self.get(key)
        if value is not None:
            return value
        k = self._get_key(key)
        with self._lock:
            build_lock = self._build_locks.setdefault(k, threading.Lock())
        with build_lock:
            with self._lock:
                if k in self._cache:
                    return self._cache[k]
            logger.debug(f"{self.name}: building entry for {key!r}")
            value = build()
            self.set(key, value)
            return value

    def stats(self) -> dict:
        with self._lock:
            total = self.hits + self.misses
            hit_rate = (self.hits / total * 100) if total > 0 else 0
            return {
                "size": len(self._cache),
                "max_size": self._cache.maxsize,
                "hits": self.hits,
                "misses": self.misses,
                "hit_rate": round(hit_rate, 2),
            }


# ═══════════════════════════════════════════════════════════
# GLOBAL INSTANCES
# ═══════════════════════════════════════════════════════════

sieve_cache = ThreadSafeLRUCache(max_size=get_settings().cache_size, name="sieve")
