"""HTTP service: persistence, session execution, and the event stream."""

from .app import ApiError, DEFAULT_PORT, create_app, serve
from .broker import (
    EVENT_KINDS,
    RUNTIME_KIND_MAP,
    TERMINAL_KIND,
    BrokerError,
    EventBroker,
    SessionEvent,
)
from .runner import (
    CREATED,
    DEFAULT_RT_FACTOR,
    DONE,
    FAILED,
    RUNNING,
    SessionHandle,
    SessionRunner,
    SessionSetupError,
)
from .store import (
    RECORD_KINDS,
    FileStore,
    MissingRecordError,
    QuarantinedRecordError,
    StoreError,
    StoreRecord,
    UnknownKindError,
    new_ulid,
    payload_digest,
)

__all__ = [
    "ApiError",
    "BrokerError",
    "CREATED",
    "DEFAULT_PORT",
    "DEFAULT_RT_FACTOR",
    "DONE",
    "EVENT_KINDS",
    "EventBroker",
    "FAILED",
    "FileStore",
    "MissingRecordError",
    "QuarantinedRecordError",
    "RECORD_KINDS",
    "RUNNING",
    "RUNTIME_KIND_MAP",
    "SessionEvent",
    "SessionHandle",
    "SessionRunner",
    "SessionSetupError",
    "StoreError",
    "StoreRecord",
    "TERMINAL_KIND",
    "UnknownKindError",
    "create_app",
    "new_ulid",
    "payload_digest",
    "serve",
]
