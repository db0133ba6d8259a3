"""File-backed record store: one directory per kind, one file per record.

Records are JSON envelopes carrying their own content digest. Writes go to
a temporary file first and are renamed into place, so a crash mid-write
never leaves a half-visible record. Reads verify the digest; anything that
fails verification is moved aside into a quarantine directory and reported
through the health endpoint rather than served.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

RECORD_KINDS = (
    "prescription",
    "program",
    "scenario",
    "session_log",
    "eval_report",
    "verdict",
)

_QUARANTINE = "quarantine"

_CROCKFORD = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"


class StoreError(ValueError):
    """Base class for store failures."""


class UnknownKindError(StoreError):
    """A record kind outside the fixed catalogue was requested."""


class MissingRecordError(StoreError):
    """No record exists under the given kind and id."""


class QuarantinedRecordError(StoreError):
    """The record failed digest verification and was moved aside."""


_ulid_lock = threading.Lock()
_ulid_last: tuple[int, int] | None = None


def new_ulid() -> str:
    """A 26-character sortable identifier: millisecond time plus entropy.

    Ids minted within the same millisecond increment the random component,
    so lexicographic order always follows creation order in one process.
    """
    global _ulid_last
    with _ulid_lock:
        now_ms = time.time_ns() // 1_000_000
        entropy = secrets.randbits(80)
        if _ulid_last is not None and _ulid_last[0] >= now_ms:
            now_ms = _ulid_last[0]
            entropy = (_ulid_last[1] + 1) % (1 << 80)
        _ulid_last = (now_ms, entropy)
    value = (now_ms << 80) | entropy
    chars = []
    for _ in range(26):
        chars.append(_CROCKFORD[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


def payload_digest(payload: Mapping[str, object]) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class StoreRecord:
    kind: str
    id: str
    payload: Mapping[str, object]
    created_at: float
    digest: str

    def envelope(self) -> dict[str, object]:
        return {
            "kind": self.kind,
            "id": self.id,
            "created_at": self.created_at,
            "digest": self.digest,
            "payload": self.payload,
        }


class FileStore:
    """Directory-per-kind persistence with atomic writes and digest checks."""

    def __init__(self, root: str | os.PathLike[str]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        for kind in RECORD_KINDS:
            (self.root / kind).mkdir(exist_ok=True)
        (self.root / _QUARANTINE).mkdir(exist_ok=True)
        self._guard = threading.Lock()
        self._locks: dict[tuple[str, str], threading.Lock] = {}

    def _lock_for(self, kind: str, record_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault((kind, record_id), threading.Lock())

    @staticmethod
    def _check_kind(kind: str) -> None:
        if kind not in RECORD_KINDS:
            raise UnknownKindError(
                f"unknown record kind {kind!r}; expected one of {RECORD_KINDS}"
            )

    def _path(self, kind: str, record_id: str) -> Path:
        return self.root / kind / f"{record_id}.json"

    def put(
        self,
        kind: str,
        payload: Mapping[str, object],
        record_id: str | None = None,
    ) -> StoreRecord:
        self._check_kind(kind)
        record = StoreRecord(
            kind=kind,
            id=record_id or new_ulid(),
            payload=dict(payload),
            created_at=time.time(),
            digest=payload_digest(payload),
        )
        path = self._path(kind, record.id)
        blob = json.dumps(record.envelope(), indent=2, sort_keys=True)
        with self._lock_for(kind, record.id):
            temp = path.with_name(f".tmp-{record.id}-{os.getpid()}")
            temp.write_text(blob, encoding="utf-8")
            os.replace(temp, path)
        return record

    def get(self, kind: str, record_id: str) -> StoreRecord:
        self._check_kind(kind)
        path = self._path(kind, record_id)
        with self._lock_for(kind, record_id):
            try:
                raw = path.read_text(encoding="utf-8")
            except FileNotFoundError:
                raise MissingRecordError(f"no {kind} record {record_id!r}")
            try:
                doc = json.loads(raw)
                payload = doc["payload"]
                stored_digest = doc["digest"]
            except (json.JSONDecodeError, KeyError, TypeError):
                self._quarantine(kind, record_id, path)
                raise QuarantinedRecordError(
                    f"{kind} record {record_id!r} is unreadable and was quarantined"
                )
            if payload_digest(payload) != stored_digest:
                self._quarantine(kind, record_id, path)
                raise QuarantinedRecordError(
                    f"{kind} record {record_id!r} failed digest verification "
                    "and was quarantined"
                )
        return StoreRecord(
            kind=kind,
            id=str(doc["id"]),
            payload=payload,
            created_at=float(doc["created_at"]),
            digest=stored_digest,
        )

    def _quarantine(self, kind: str, record_id: str, path: Path) -> None:
        target = self.root / _QUARANTINE / f"{kind}-{record_id}.json"
        os.replace(path, target)

    def exists(self, kind: str, record_id: str) -> bool:
        self._check_kind(kind)
        return self._path(kind, record_id).is_file()

    def ids(self, kind: str) -> tuple[str, ...]:
        """All ids of one kind in creation order (ids sort that way)."""
        self._check_kind(kind)
        return tuple(
            sorted(p.stem for p in (self.root / kind).glob("*.json"))
        )

    def count(self, kind: str) -> int:
        return len(self.ids(kind))

    def quarantined(self) -> tuple[str, ...]:
        return tuple(
            sorted(p.stem for p in (self.root / _QUARANTINE).glob("*.json"))
        )

    def health(self) -> dict[str, object]:
        return {
            "counts": {kind: self.count(kind) for kind in RECORD_KINDS},
            "quarantined": list(self.quarantined()),
        }
