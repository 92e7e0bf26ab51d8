"""Utilities
"""

import hashlib
import json
from contextlib import contextmanager
from threading import Condition, Lock
from typing import Any, Iterator, Sequence, Tuple

import numpy as np


def split_list(x: Sequence) -> Tuple[Sequence, Sequence]:
    """Split a sequence.

    For an odd-length sequence, the median goes to the right.

    :param x: the sequence to split
    :return: A tuple containing each half

    >>> split_list([1, 2, 3, 4])
    ([1, 2], [3, 4])
    >>> split_list([1, 2, 3, 4, 5])
    ([1, 2], [3, 4, 5])
    """

    median = len(x) // 2
    return x[:median], x[median:]


def pairwise_sum(values: Sequence[float]) -> float:
    """Sum partial results along a fixed binary tree.

    The tree only depends on ``len(values)``, so the same partial sums always
    combine in the same order no matter which worker produced them.

    >>> pairwise_sum([1.0, 2.0, 3.0, 4.0])
    10.0
    >>> pairwise_sum([])
    0.0
    """

    if len(values) == 0:
        return 0.0
    if len(values) == 1:
        return float(values[0])
    left, right = split_list(values)
    return pairwise_sum(left) + pairwise_sum(right)


def blocked_sum(values, block: int = 4096) -> float:
    """Sum fixed-length blocks, then combine them with `pairwise_sum`.

    >>> blocked_sum(np.arange(10.0), block=4)
    45.0
    """
    values = np.ravel(values)
    return pairwise_sum(
        [
            float(np.sum(values[i : i + block]))
            for i in range(0, len(values), block)
        ]
    )


def canonical_json(value: Any) -> str:
    """JSON with sorted keys and no whitespace.

    >>> canonical_json({"b": 1, "a": [1.5, None]})
    '{"a":[1.5,null],"b":1}'
    """
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def stable_hash(value: Any) -> str:
    """Content hash of a JSON-able value."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


class ReadWriteLock:
    """Many readers or a single writer.

    A writer waiting for readers to leave holds the entry lock, so new
    readers queue behind it.
    """

    def __init__(self):
        self._entry = Lock()
        self._idle = Condition(Lock())
        self._readers = 0

    @property
    def read_access(self):
        return self._reading()

    @property
    def write_access(self):
        return self._writing()

    @contextmanager
    def _reading(self) -> Iterator[None]:
        with self._entry, self._idle:
            self._readers += 1
        try:
            yield
        finally:
            with self._idle:
                self._readers -= 1
                if not self._readers:
                    self._idle.notify_all()

    @contextmanager
    def _writing(self) -> Iterator[None]:
        with self._entry, self._idle:
            self._idle.wait_for(lambda: self._readers == 0)
            yield
