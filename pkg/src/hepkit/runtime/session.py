"""Session execution: announce, monitor, advance, log.

The runner walks the program step by step against an injected clock and
frame source.  Monitored steps are polled at a fixed rate from the
announcement until detection or timeout; a timed-out step with a
fallback gets a second, fresh monitoring window.  Everything observable
lands in the session log, and an optional event callback sees the same
milestones as they happen, which is what the service streams out.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping

from hepkit.dsl import Program, Step, validate_semantics
from hepkit.runtime.clock import VirtualClock
from hepkit.runtime.evaluate import build_evaluator
from hepkit.runtime.frames import FrameSource, Vec3

ANNOUNCE_DWELL_S = 5.0

# Step lifecycle states, in legal transition order.
ANNOUNCED = "Announced"
MONITORING = "Monitoring"
COMPLETED = "Completed"
TIMED_OUT = "TimedOut"
FALLBACK_MONITORING = "FallbackMonitoring"
ADVANCED = "Advanced"


class SessionError(ValueError):
    """Base class for session execution failures."""


class InvalidProgramError(SessionError):
    """The program failed semantic validation."""


class TruncatedSessionError(SessionError):
    """The frame source ended before the program did.

    Carries the partial log so callers can still inspect what ran.
    """

    def __init__(self, message: str, partial: "SessionLog"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class SessionEvent:
    kind: str  # announced | detection_tick | completed | timed_out |
    #            fallback_engaged | advanced | session_done
    at: float
    step_index: int | None = None
    detail: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class StepRecord:
    index: int
    utterance: str
    monitored: bool
    announced_at: float
    detected_complete: bool
    detection_at: float | None
    timed_out: bool
    advanced_at: float
    fallback_engaged: bool = False
    fallback_detected: bool | None = None
    fallback_detection_at: float | None = None
    fallback_timed_out: bool | None = None
    state: str = ADVANCED


@dataclass(frozen=True)
class SessionLog:
    program_name: str
    poll_hz: float
    clock_profile: str
    active_side: str
    steps: tuple[StepRecord, ...]
    seed: int | None = None

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["steps"] = [asdict(s) for s in self.steps]
        return doc

    @staticmethod
    def from_json(doc: Mapping[str, object]) -> "SessionLog":
        steps = tuple(StepRecord(**s) for s in doc["steps"])  # type: ignore[arg-type]
        fields = {k: doc[k] for k in
                  ("program_name", "poll_hz", "clock_profile", "active_side", "seed")
                  if k in doc}
        return SessionLog(steps=steps, **fields)  # type: ignore[arg-type]

    def to_csv(self) -> str:
        header = (
            "index,monitored,announced_at,detected_complete,detection_at,"
            "timed_out,fallback_engaged,advanced_at"
        )
        rows = [header]
        for s in self.steps:
            rows.append(
                f"{s.index},{int(s.monitored)},{s.announced_at},"
                f"{int(s.detected_complete)},"
                f"{'' if s.detection_at is None else s.detection_at},"
                f"{int(s.timed_out)},{int(s.fallback_engaged)},{s.advanced_at}"
            )
        return "\n".join(rows) + "\n"

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


EventCallback = Callable[[SessionEvent], None]


def _scene_positions(program: Program) -> dict[str, Vec3]:
    return {
        decl.ident: decl.position
        for decl in program.scene
        if decl.position is not None
    }


def run_session(
    program: Program,
    frames: FrameSource,
    clock: VirtualClock | None = None,
    poll_hz: float = 10.0,
    active_side: str = "right",
    on_event: EventCallback | None = None,
    seed: int | None = None,
) -> SessionLog:
    """Execute a program against a frame source and return the log.

    Deterministic for identical inputs: all timing comes from the clock
    and the poll grid, never from the wall.  Raises
    :class:`TruncatedSessionError` when the source cannot cover a poll
    instant the program still needs.
    """
    if not 1.0 <= poll_hz <= 60.0:
        raise SessionError(f"poll_hz {poll_hz} outside [1, 60]")
    diagnostics = validate_semantics(program)
    if diagnostics:
        raise InvalidProgramError(
            "; ".join(d.render() for d in diagnostics[:3])
        )
    clock = clock or VirtualClock()
    scene = _scene_positions(program)
    records: list[StepRecord] = []

    def emit(kind: str, at: float, step: Step | None = None, **detail: object) -> None:
        if on_event is not None:
            index = step.index if step is not None else None
            on_event(SessionEvent(kind=kind, at=at, step_index=index, detail=detail))

    def fail_truncated(step: Step, needed: float) -> TruncatedSessionError:
        partial = SessionLog(
            program_name=program.name,
            poll_hz=poll_hz,
            clock_profile=clock.profile,
            active_side=active_side,
            steps=tuple(records),
            seed=seed,
        )
        return TruncatedSessionError(
            f"frame source ended at {frames.end_time()} but step "
            f"{step.index} needed frames at {needed}",
            partial,
        )

    def monitor_window(
        step: Step, monitor, timeout: float, started_at: float
    ) -> tuple[bool, float | None]:
        """Poll one monitoring window; return (detected, detection_at)."""
        evaluator = build_evaluator(monitor, scene, active_side, started_at)
        total_polls = math.floor(timeout * poll_hz + 1e-9)
        last_tick = 0
        for k in range(1, total_polls + 1):
            instant = started_at + k / poll_hz
            if instant > frames.end_time() + 1e-9:
                raise fail_truncated(step, instant)
            clock.advance_to(instant)
            for frame in frames.frames_until(instant):
                evaluator.feed(frame)
            satisfied = evaluator.poll(instant)
            if satisfied:
                return True, instant
            elapsed_whole = math.floor((instant - started_at) + 1e-9)
            if elapsed_whole > last_tick:
                last_tick = elapsed_whole
                emit("detection_tick", instant, step, elapsed=elapsed_whole)
        return False, None

    for step in program.steps:
        announced_at = clock.now
        emit("announced", announced_at, step, utterance=step.utterance,
             monitored=step.monitor is not None)
        frames.on_step_start(step, announced_at)

        if step.monitor is None:
            advance_at = announced_at + ANNOUNCE_DWELL_S
            if advance_at > frames.end_time() + 1e-9:
                raise fail_truncated(step, advance_at)
            clock.advance_to(advance_at)
            frames.frames_until(advance_at)
            records.append(
                StepRecord(
                    index=step.index,
                    utterance=step.utterance,
                    monitored=False,
                    announced_at=announced_at,
                    detected_complete=False,
                    detection_at=None,
                    timed_out=False,
                    advanced_at=advance_at,
                )
            )
            emit("advanced", advance_at, step)
            continue

        assert step.timeout is not None
        detected, detection_at = monitor_window(
            step, step.monitor, step.timeout, announced_at
        )
        fallback_engaged = False
        fb_detected: bool | None = None
        fb_detection_at: float | None = None
        fb_timed_out: bool | None = None

        if detected:
            assert detection_at is not None
            advanced_at = detection_at
            emit("completed", detection_at, step)
        else:
            timeout_at = announced_at + step.timeout
            clock.advance_to(timeout_at)
            emit("timed_out", timeout_at, step)
            advanced_at = timeout_at
            if step.fallback is not None:
                fallback_engaged = True
                emit("fallback_engaged", timeout_at, step,
                     utterance=step.fallback.utterance)
                frames.on_step_start(step, timeout_at)
                fb_detected, fb_detection_at = monitor_window(
                    step, step.fallback.monitor, step.fallback.timeout, timeout_at
                )
                if fb_detected:
                    assert fb_detection_at is not None
                    advanced_at = fb_detection_at
                    fb_timed_out = False
                    emit("completed", fb_detection_at, step, fallback=True)
                else:
                    fb_timed_out = True
                    advanced_at = timeout_at + step.fallback.timeout
                    clock.advance_to(advanced_at)
                    emit("timed_out", advanced_at, step, fallback=True)

        records.append(
            StepRecord(
                index=step.index,
                utterance=step.utterance,
                monitored=True,
                announced_at=announced_at,
                detected_complete=detected,
                detection_at=detection_at,
                timed_out=not detected,
                advanced_at=advanced_at,
                fallback_engaged=fallback_engaged,
                fallback_detected=fb_detected,
                fallback_detection_at=fb_detection_at,
                fallback_timed_out=fb_timed_out,
            )
        )
        emit("advanced", advanced_at, step)

    log = SessionLog(
        program_name=program.name,
        poll_hz=poll_hz,
        clock_profile=clock.profile,
        active_side=active_side,
        steps=tuple(records),
        seed=seed,
    )
    emit("session_done", clock.now)
    return log
