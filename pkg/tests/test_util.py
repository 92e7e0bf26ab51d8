import threading
import time

import numpy as np

from hypothesis import given, seed, settings
from hypothesis import strategies as st

from bbmstuff.util import (
    ReadWriteLock,
    blocked_sum,
    pairwise_sum,
    split_list,
    stable_hash,
)


@seed(20240608)
@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-(10**6), 10**6), max_size=100))
def test_split_list(values):
    left, right = split_list(values)
    assert left + right == values
    assert len(right) - len(left) in (0, 1)


@seed(20240609)
@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), max_size=200))
def test_pairwise_sum_is_deterministic(values):
    total = pairwise_sum(values)
    assert pairwise_sum(list(values)) == total
    assert abs(total - sum(values)) <= 1e-6 * (1.0 + sum(map(abs, values)))


def test_blocked_sum_groups_in_fixed_blocks():
    values = np.random.default_rng(2).standard_normal(10_000)
    blocks = [float(np.sum(values[i : i + 4096])) for i in (0, 4096, 8192)]
    assert blocked_sum(values) == pairwise_sum(blocks)
    assert blocked_sum([]) == 0.0


def test_stable_hash_ignores_key_order():
    assert stable_hash({"a": 1, "b": [1.5, None]}) == stable_hash(
        {"b": [1.5, None], "a": 1}
    )
    assert stable_hash({"a": 1}) != stable_hash({"a": 2})


def test_readers_share_writers_exclude():
    lock = ReadWriteLock()
    inside = []
    peak = []

    def reader():
        with lock.read_access:
            inside.append(1)
            peak.append(len(inside))
            time.sleep(0.05)
            inside.pop()

    def writer():
        with lock.write_access:
            peak.append(-len(inside))

    readers = [threading.Thread(target=reader) for _ in range(4)]
    for thread in readers:
        thread.start()
    time.sleep(0.02)
    w = threading.Thread(target=writer)
    w.start()
    for thread in readers + [w]:
        thread.join()
    # readers overlapped, the writer saw nobody inside
    assert max(peak) > 1
    assert peak[-1] == 0
