"""In-process event fan-out with per-session gapless sequence numbers.

Each session owns one channel. Publishing assigns the next sequence number
under the channel lock, so subscribers always see 1, 2, 3, ... with no
holes regardless of when they join: the backlog is replayed first, then the
live tail. A channel closes after its terminal event; late subscribers
still get the full backlog.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterator, Mapping

TERMINAL_KIND = "SessionDone"

EVENT_KINDS = (
    "Announced",
    "DetectionTick",
    "Completed",
    "TimedOut",
    "FallbackEngaged",
    "Advanced",
    TERMINAL_KIND,
)

# The session runtime reports lifecycle moments in snake_case; the wire
# protocol uses the capitalised names above.
RUNTIME_KIND_MAP = {
    "announced": "Announced",
    "detection_tick": "DetectionTick",
    "completed": "Completed",
    "timed_out": "TimedOut",
    "fallback_engaged": "FallbackEngaged",
    "advanced": "Advanced",
    "session_done": TERMINAL_KIND,
}


class BrokerError(ValueError):
    """A channel was used outside its lifecycle."""


@dataclass(frozen=True)
class SessionEvent:
    """One observation on a session's wire channel."""

    session_id: str
    seq: int
    kind: str
    at: float
    step_index: int | None = None
    detail: Mapping[str, object] = field(default_factory=dict)

    def to_json(self) -> dict[str, object]:
        return {
            "session_id": self.session_id,
            "seq": self.seq,
            "kind": self.kind,
            "at": self.at,
            "step_index": self.step_index,
            "detail": dict(self.detail),
        }


class _Channel:
    def __init__(self, session_id: str):
        self.session_id = session_id
        self.events: list[SessionEvent] = []
        self.closed = False
        self.condition = threading.Condition()


class EventBroker:
    """Channel registry: publish once, replay to any number of readers."""

    def __init__(self):
        self._guard = threading.Lock()
        self._channels: dict[str, _Channel] = {}

    def open(self, session_id: str) -> None:
        with self._guard:
            if session_id in self._channels:
                raise BrokerError(f"channel {session_id!r} already open")
            self._channels[session_id] = _Channel(session_id)

    def _channel(self, session_id: str) -> _Channel:
        with self._guard:
            try:
                return self._channels[session_id]
            except KeyError:
                raise BrokerError(f"no channel for session {session_id!r}")

    def publish(
        self,
        session_id: str,
        kind: str,
        at: float,
        step_index: int | None = None,
        detail: Mapping[str, object] | None = None,
    ) -> SessionEvent:
        if kind not in EVENT_KINDS:
            raise BrokerError(f"unknown event kind {kind!r}")
        channel = self._channel(session_id)
        with channel.condition:
            if channel.closed:
                raise BrokerError(
                    f"channel {session_id!r} is closed; {kind!r} dropped"
                )
            event = SessionEvent(
                session_id=session_id,
                seq=len(channel.events) + 1,
                kind=kind,
                at=at,
                step_index=step_index,
                detail=dict(detail or {}),
            )
            channel.events.append(event)
            if kind == TERMINAL_KIND:
                channel.closed = True
            channel.condition.notify_all()
        return event

    def close(self, session_id: str) -> None:
        """Force-close a channel that will never reach its terminal event."""
        channel = self._channel(session_id)
        with channel.condition:
            channel.closed = True
            channel.condition.notify_all()

    def subscribe(
        self, session_id: str, after_seq: int = 0, timeout: float | None = None
    ) -> Iterator[SessionEvent]:
        """Yield events with seq > ``after_seq``: backlog first, then live.

        The iterator ends once the channel is closed and fully drained.
        ``timeout`` bounds each individual wait, not the whole stream; a
        wait that times out ends the stream early.
        """
        channel = self._channel(session_id)
        cursor = after_seq
        while True:
            with channel.condition:
                while len(channel.events) <= cursor and not channel.closed:
                    if not channel.condition.wait(timeout=timeout):
                        return
                batch = channel.events[cursor:]
                closed = channel.closed
            for event in batch:
                yield event
            cursor += len(batch)
            if closed and not batch:
                return
            if closed:
                with channel.condition:
                    drained = len(channel.events) <= cursor
                if drained:
                    return

    def backlog(self, session_id: str) -> tuple[SessionEvent, ...]:
        channel = self._channel(session_id)
        with channel.condition:
            return tuple(channel.events)

    def is_closed(self, session_id: str) -> bool:
        channel = self._channel(session_id)
        with channel.condition:
            return channel.closed
