import gc
from concurrent.futures import ThreadPoolExecutor

import pytest

from bbmstuff.cache import StudyCache
from bbmstuff.store import ResultStore


class Result:
    def __init__(self, x):
        self.x = x

    def to_dict(self):
        return {"x": self.x}

    @classmethod
    def from_dict(cls, data):
        return cls(data["x"])


@pytest.fixture
def store(tmp_path):
    return ResultStore(tmp_path)


def test_lru_eviction():
    cache = StudyCache(maxsize=2)
    a, b, c = Result(1), Result(2), Result(3)
    cache.set("a", a)
    cache.set("b", b)
    assert cache.get("a") is a
    cache.set("c", c)
    # "b" was the least recently used
    assert list(cache.lru) == ["a", "c"]
    assert "b" in cache.grave


def test_graveyard_resurrection():
    cache = StudyCache(maxsize=1)
    kept = Result(1)
    cache.set("a", kept)
    cache.set("b", Result(2))
    cache.set("c", Result(3))
    gc.collect()
    # "a" is still referenced here, "b" is not
    assert cache.get("a") is kept
    assert cache.resurrections == 1
    assert cache.get("b") is None
    assert cache.misses == 1


def test_write_through_and_load(store):
    first = StudyCache(store=store, decode=Result.from_dict)
    first.set("k", Result(7))
    assert store.load("k") == {"x": 7}

    second = StudyCache(store=store, decode=Result.from_dict)
    assert "k" in second
    loaded = second.get("k")
    assert loaded.x == 7
    assert second.loads == 1
    assert second.get("k") is loaded
    assert second.hits == 1


def test_delete_reaches_the_store(store):
    cache = StudyCache(store=store, decode=Result.from_dict)
    cache.set("k", Result(1))
    cache.delete("k")
    cache.delete("unknown")
    assert cache.get("k", "gone") == "gone"
    assert store.load("k") is None


def test_store_needs_decoder(store):
    with pytest.raises(ValueError):
        StudyCache(store=store)


def test_concurrent_access(store):
    cache = StudyCache(maxsize=4, store=store, decode=Result.from_dict)

    def work(i):
        key = f"k{i % 8}"
        if cache.get(key) is None:
            cache.set(key, Result(i % 8))
        return cache.get(key).x

    with ThreadPoolExecutor(max_workers=8) as pool:
        values = list(pool.map(work, range(200)))
    assert values == [i % 8 for i in range(200)]
