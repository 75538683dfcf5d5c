"""Filesystem-backed content-addressed object store with a tag index.

Layout under the store root::

    objects/<d0d1>/<sha256 hex>
    index.jsonl

Objects are written once per distinct content. The index holds one
metadata record per (object, logical document) and is rewritten atomically
through a temporary file and a rename.
"""
from __future__ import annotations

import contextlib
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping

TAG_KEYS = ("format", "disease_id", "patient", "created_at", "doc_id")


class ObjectNotFoundError(KeyError):
    """No object with the requested digest exists in the store."""


class IntegrityError(RuntimeError):
    """Stored bytes no longer hash to their digest."""


@dataclass(frozen=True, order=True)
class ObjectRef:
    digest: str
    size_bytes: int

    def __str__(self) -> str:
        return f"sha256:{self.digest}"

    @classmethod
    def for_bytes(cls, data: bytes) -> ObjectRef:
        return cls(hashlib.sha256(data).hexdigest(), len(data))


@dataclass(frozen=True)
class MetadataRecord:
    object: ObjectRef
    tags: Mapping[str, str] = field(default_factory=dict, hash=False)

    def to_json(self) -> dict[str, Any]:
        return {"digest": self.object.digest, "size_bytes": self.object.size_bytes,
                "tags": dict(sorted(self.tags.items()))}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> MetadataRecord:
        return cls(ObjectRef(obj["digest"], int(obj["size_bytes"])),
                   {str(k): str(v) for k, v in obj["tags"].items()})

    def sort_key(self) -> tuple[str, str, str, str]:
        t = self.tags
        return (t.get("patient", ""), t.get("created_at", ""), t.get("doc_id", ""),
                self.object.digest)


class DocStore:
    """Single-writer store; concurrent readers are safe."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.objects_dir = self.root / "objects"
        self.index_path = self.root / "index.jsonl"
        self._records: list[MetadataRecord] | None = None
        self._keys: set[tuple[str, str]] = set()
        self._batch_depth = 0
        self._dirty = False

    # -- index

    def _load(self) -> list[MetadataRecord]:
        if self._records is None:
            records: list[MetadataRecord] = []
            if self.index_path.exists():
                with self.index_path.open(encoding="utf-8") as fh:
                    for n, line in enumerate(fh, start=1):
                        if line.strip():
                            try:
                                records.append(MetadataRecord.from_json(json.loads(line)))
                            except (ValueError, KeyError) as exc:
                                raise ValueError(f"{self.index_path}:{n}: bad index line") from exc
            self._records = records
            self._keys = {self._identity(r) for r in records}
        return self._records

    @staticmethod
    def _identity(record: MetadataRecord) -> tuple[str, str]:
        return (record.object.digest, record.tags.get("doc_id", ""))

    def _flush(self) -> None:
        records = self._load()
        self.root.mkdir(parents=True, exist_ok=True)
        text = "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in records)
        try:
            fd, tmp = tempfile.mkstemp(prefix=".index-", dir=self.root)
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, self.index_path)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write index {self.index_path}: {exc.strerror}") from exc
        self._dirty = False

    @contextlib.contextmanager
    def batch(self) -> Iterator[DocStore]:
        """Defer index rewrites until the outermost batch exits."""
        self._batch_depth += 1
        try:
            yield self
        finally:
            self._batch_depth -= 1
            if self._batch_depth == 0 and self._dirty:
                self._flush()

    # -- objects

    def object_path(self, digest: str) -> Path:
        return self.objects_dir / digest[:2] / digest

    def put_object(self, data: bytes, tags: Mapping[str, str] | None = None) -> ObjectRef:
        ref = ObjectRef.for_bytes(data)
        path = self.object_path(ref.digest)
        if not path.exists():
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(prefix=".obj-", dir=path.parent)
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp, path)
            except OSError as exc:
                raise OSError(exc.errno, f"cannot store object {path}: {exc.strerror}") from exc
        record = MetadataRecord(ref, {str(k): str(v) for k, v in (tags or {}).items()})
        records = self._load()
        if self._identity(record) not in self._keys:
            self._keys.add(self._identity(record))
            records.append(record)
            self._dirty = True
        if self._batch_depth == 0 and self._dirty:
            self._flush()
        return ref

    def get_object(self, ref: ObjectRef | str) -> bytes:
        digest = ref.digest if isinstance(ref, ObjectRef) else str(ref).removeprefix("sha256:")
        path = self.object_path(digest)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise ObjectNotFoundError(digest) from None
        if hashlib.sha256(data).hexdigest() != digest:
            raise IntegrityError(f"{path}: content does not hash to its digest")
        return data

    def __contains__(self, ref: ObjectRef | str) -> bool:
        digest = ref.digest if isinstance(ref, ObjectRef) else str(ref).removeprefix("sha256:")
        return self.object_path(digest).exists()

    def object_count(self) -> int:
        if not self.objects_dir.exists():
            return 0
        return sum(1 for p in self.objects_dir.glob("*/*") if not p.name.startswith("."))

    # -- queries

    def records(self) -> list[MetadataRecord]:
        return sorted(self._load(), key=MetadataRecord.sort_key)

    def query_by_tags(self, filter: Mapping[str, str] | None = None, **tags: str) -> list[MetadataRecord]:
        """Records whose tags match every given key, ordered by (patient, created_at)."""
        wanted = {**(filter or {}), **tags}
        return [r for r in self.records()
                if all(r.tags.get(k) == str(v) for k, v in wanted.items())]
