import json

import pytest

from bbmstuff.errors import RecordFormatError
from bbmstuff.store import FORMAT, VERSION, ResultStore


@pytest.fixture
def store(tmp_path):
    return ResultStore(tmp_path / "cache")


def test_save_and_load(store):
    record = {"rows": [{"s": 0.9, "value": 1.25}], "limit": 1.0}
    store.save("k1", record)
    assert store.load("k1") == record
    assert "k1" in store
    assert list(store.keys()) == ["k1"]


def test_missing_record(store):
    assert store.load("nothing") is None
    assert "nothing" not in store


def test_overwrite_leaves_no_temporary_files(store):
    store.save("k1", {"value": 1})
    store.save("k1", {"value": 2})
    assert store.load("k1") == {"value": 2}
    assert sorted(p.name for p in store.directory.iterdir()) == ["k1.json"]


def test_file_layout(store):
    store.save("k1", {"value": 1})
    payload = json.loads(store.path("k1").read_text())
    assert payload == {
        "format": FORMAT,
        "version": VERSION,
        "key": "k1",
        "record": {"value": 1},
    }


def test_reopen(tmp_path):
    ResultStore(tmp_path).save("k1", {"value": 3})
    assert ResultStore(tmp_path).load("k1") == {"value": 3}


def test_failed_write_keeps_the_old_record(store):
    store.save("k1", {"value": 1})
    with pytest.raises(TypeError):
        store.save("k1", {"value": object()})
    assert store.load("k1") == {"value": 1}
    assert sorted(p.name for p in store.directory.iterdir()) == ["k1.json"]


@pytest.mark.parametrize(
    "payload, message",
    [
        ({"format": "other", "version": VERSION, "key": "k1"}, "marker"),
        ({"format": FORMAT, "version": VERSION + 1, "key": "k1"}, "version"),
        ({"format": FORMAT, "version": VERSION, "key": "k2"}, "another key"),
    ],
)
def test_foreign_files_are_rejected(store, payload, message):
    store.path("k1").write_text(json.dumps({**payload, "record": {}}))
    with pytest.raises(RecordFormatError, match=message):
        store.load("k1")


def test_garbage_is_rejected(store):
    store.path("k1").write_text("{not json")
    with pytest.raises(RecordFormatError, match="not JSON"):
        store.load("k1")


@pytest.mark.parametrize("key", ["", ".hidden", "a/b"])
def test_invalid_keys(store, key):
    with pytest.raises(RecordFormatError):
        store.save(key, {})


def test_delete(store):
    store.save("k1", {"value": 1})
    store.delete("k1")
    store.delete("k1")
    assert store.load("k1") is None
