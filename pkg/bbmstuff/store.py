"""Persist study results as one JSON record per content hash.

Record format::

    {
        "format":  FORMAT,
        "version": VERSION,
        "key":     <sha256 of the config>,
        "record":  <StudyResult.to_dict()>
    }

Writes go to a temporary file in the same directory followed by
`os.replace`, so a reader never sees a half written record.
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterator, Optional, Union

from bbmstuff.errors import RecordFormatError


logger = logging.getLogger(__name__)

FORMAT = "bbmstuff-result"
VERSION = 1


class ResultStore:
    """A directory of JSON records keyed by content hash.

    >>> import tempfile
    >>> store = ResultStore(tempfile.mkdtemp())
    >>> store.save("abc", {"value": 1.5})
    >>> store.load("abc")
    {'value': 1.5}
    >>> store.load("missing") is None
    True
    """

    def __init__(self, directory: Union[str, os.PathLike]):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def path(self, key: str) -> Path:
        if not key or os.sep in key or key.startswith("."):
            raise RecordFormatError(f"invalid record key {key!r}")
        return self.directory / f"{key}.json"

    def __contains__(self, key: str) -> bool:
        return self.path(key).exists()

    def keys(self) -> Iterator[str]:
        for path in sorted(self.directory.glob("*.json")):
            yield path.stem

    def save(self, key: str, record: Dict[str, object]):
        """Atomically write `record` under `key`.

        :param key: The content hash of the record.
        :param record: A JSON-able mapping.
        """
        payload = {
            "format": FORMAT,
            "version": VERSION,
            "key": key,
            "record": record,
        }
        text = json.dumps(payload, indent=2, sort_keys=True)
        target = self.path(key)
        fd, tmp = tempfile.mkstemp(
            dir=self.directory, prefix=".tmp-", suffix=".json"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as file:
                file.write(text)
                file.flush()
                os.fsync(file.fileno())
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        logger.debug("stored %s", target)

    def load(self, key: str) -> Optional[Dict[str, object]]:
        """Read the record under `key`, or None when there is none.

        :raises RecordFormatError: on a foreign or outdated file.
        """
        target = self.path(key)
        if not target.exists():
            return None
        with open(target, encoding="utf-8") as file:
            try:
                payload = json.load(file)
            except json.JSONDecodeError as exc:
                raise RecordFormatError(f"{target} is not JSON") from exc
        if not isinstance(payload, dict) or payload.get("format") != FORMAT:
            raise RecordFormatError(f"{target} has an incorrect format marker")
        if payload.get("version") != VERSION:
            raise RecordFormatError(
                f"{target} has version {payload.get('version')}, "
                f"expected {VERSION}"
            )
        if payload.get("key") != key:
            raise RecordFormatError(f"{target} is stored under another key")
        return payload["record"]

    def delete(self, key: str):
        """Remove the record if it exists."""
        target = self.path(key)
        if target.exists():
            target.unlink()
