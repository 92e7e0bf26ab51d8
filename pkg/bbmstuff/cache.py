"""Caching of study results in memory, optionally backed by a `ResultStore`.
"""

import logging
from collections import OrderedDict
from typing import Any, Callable, Dict, Optional
from weakref import WeakValueDictionary

from bbmstuff.store import ResultStore
from bbmstuff.util import ReadWriteLock


logger = logging.getLogger(__name__)


class StudyCache:
    """A Least-Recently-Used cache of results keyed by config hash.

    Evicted results go to a 'graveyard' of weak references
    (`weakref.WeakValueDictionary`) and are resurrected if they are requested
    again before they are collected. Misses fall through to the store, when
    there is one, and every `set` is written through to it.

    Lookups always go through `get` with an explicit default; there is no
    mapping interface.

    :param maxsize: The maximum number of results held strongly.
    :param store: Where results are persisted, if anywhere.
    :param decode: Turns a stored record back into a result.

    >>> import gc
    >>> class R:
    ...     def __init__(self, x):
    ...         self.x = x
    ...     def __repr__(self):
    ...         return 'ALIVE ' + str(self.x)
    >>> c = StudyCache(maxsize=2)
    >>> c.set("a", R(1))
    >>> c.set("b", R(2))
    >>> c.set("c", R(3))
    >>> _ = gc.collect()
    >>> c.get("a", 'DEAD')
    'DEAD'
    >>> c.get("b")
    ALIVE 2
    >>> c.hits, c.misses
    (1, 1)
    """

    def __init__(
        self,
        maxsize: int = 16,
        store: Optional[ResultStore] = None,
        decode: Optional[Callable[[Dict[str, Any]], Any]] = None,
    ):
        if store is not None and decode is None:
            raise ValueError("a store needs a decode function")
        self.maxsize = maxsize
        self.store = store
        self.decode = decode
        self.lru: "OrderedDict[str, Any]" = OrderedDict()
        self.grave: "WeakValueDictionary[str, Any]" = WeakValueDictionary()
        self.hits = 0
        self.misses = 0
        self.resurrections = 0
        self.loads = 0
        self.rwlock = ReadWriteLock()

    def __contains__(self, key: str) -> bool:
        with self.rwlock.read_access:
            if key in self.lru or key in self.grave:
                return True
        return self.store is not None and key in self.store

    def _admit(self, key: str, value):
        self.lru[key] = value
        self.lru.move_to_end(key)
        while len(self.lru) > self.maxsize:
            # send the oldest to live with the dead
            (k, v) = self.lru.popitem(last=False)
            self.grave[k] = v

    def get(self, key: str, default=None):
        """Retrieve a result from memory or the store.

        :param key: The config hash.
        :param default: Returned when the result is nowhere to be found.
        """
        with self.rwlock.write_access:
            if key in self.lru:
                self.hits += 1
                self.lru.move_to_end(key)
                return self.lru[key]
            value = self.grave.pop(key, None)
            if value is not None:
                self.resurrections += 1
                self._admit(key, value)
                return value
            record = None if self.store is None else self.store.load(key)
            if record is None:
                self.misses += 1
                logger.info("cache miss %s", key[:12])
                return default
            value = self.decode(record)
            self.loads += 1
            self._admit(key, value)
        logger.info("cache hit %s (from store)", key[:12])
        return value

    def set(self, key: str, value):
        """Add a result, writing it through to the store.

        :param key: The config hash.
        :param value: The result; it must provide ``to_dict`` when a store
            is attached.
        """
        with self.rwlock.write_access:
            if key in self.grave:
                del self.grave[key]
            self._admit(key, value)
            if self.store is not None:
                self.store.save(key, value.to_dict())

    def delete(self, key: str):
        """Forget a result everywhere. Unknown keys are ignored.

        :param key: The config hash.
        """
        with self.rwlock.write_access:
            if key in self.grave:
                del self.grave[key]
            if key in self.lru:
                del self.lru[key]
            if self.store is not None:
                self.store.delete(key)
