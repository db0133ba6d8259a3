"""Session execution: one background thread per session, evented progress.

A session binds a stored program to a stored scenario and replays it on a
paced virtual clock (default ten times faster than real time). Runtime
callbacks are republished on the session's broker channel with gapless
sequence numbers; the final log is persisted under the session's own id so
the report endpoint can find it after the stream ends.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from hepkit.dsl import parse_program, validate_semantics
from hepkit.patientsim import Scenario, ScenarioError, SimulatedPatient
from hepkit.runtime import PacedClock, run_session
from hepkit.runtime.session import SessionEvent as RuntimeEvent

from .broker import RUNTIME_KIND_MAP, EventBroker
from .store import FileStore, new_ulid

DEFAULT_RT_FACTOR = 10.0

CREATED = "created"
RUNNING = "running"
DONE = "done"
FAILED = "failed"


class SessionSetupError(ValueError):
    """The session's inputs do not form a runnable pair."""


@dataclass
class SessionHandle:
    """Mutable bookkeeping for one session's lifecycle."""

    session_id: str
    program_id: str
    scenario_id: str
    rt_factor: float
    state: str = CREATED
    error: str | None = None
    thread: threading.Thread | None = field(default=None, repr=False)
    flags: dict[int, str] = field(default_factory=dict)

    def to_json(self) -> dict[str, object]:
        return {
            "session_id": self.session_id,
            "program_id": self.program_id,
            "scenario_id": self.scenario_id,
            "rt_factor": self.rt_factor,
            "state": self.state,
            "error": self.error,
            "flags": {str(k): v for k, v in sorted(self.flags.items())},
        }


class SessionRunner:
    """Creates, validates, starts, and tracks sessions."""

    def __init__(self, store: FileStore, broker: EventBroker):
        self.store = store
        self.broker = broker
        self._guard = threading.Lock()
        self._sessions: dict[str, SessionHandle] = {}

    def _load_pair(self, program_id: str, scenario_id: str):
        program_record = self.store.get("program", program_id)
        scenario_record = self.store.get("scenario", scenario_id)
        text = program_record.payload.get("text")
        if not isinstance(text, str):
            raise SessionSetupError(
                f"program record {program_id!r} carries no program text"
            )
        try:
            program = parse_program(text)
        except ValueError as exc:
            raise SessionSetupError(f"program does not parse: {exc}") from exc
        diagnostics = validate_semantics(program)
        if diagnostics:
            raise SessionSetupError(
                "program is semantically invalid: "
                + "; ".join(d.message for d in diagnostics)
            )
        try:
            scenario = Scenario.from_json(dict(scenario_record.payload))
        except ScenarioError as exc:
            raise SessionSetupError(f"scenario does not load: {exc}") from exc
        return program, scenario

    def create(
        self,
        program_id: str,
        scenario_id: str,
        rt_factor: float = DEFAULT_RT_FACTOR,
    ) -> SessionHandle:
        """Validate the pair and register a session, without starting it."""
        if rt_factor <= 0:
            raise SessionSetupError("rt_factor must be positive")
        program, scenario = self._load_pair(program_id, scenario_id)
        try:
            SimulatedPatient(
                program,
                scenario.profile,
                scenario.script,
                scenario.noise,
                hz=scenario.hz,
            )
        except ValueError as exc:
            raise SessionSetupError(f"scenario cannot play this program: {exc}") from exc
        handle = SessionHandle(
            session_id=new_ulid(),
            program_id=program_id,
            scenario_id=scenario_id,
            rt_factor=rt_factor,
        )
        with self._guard:
            self._sessions[handle.session_id] = handle
        self.broker.open(handle.session_id)
        return handle

    def get(self, session_id: str) -> SessionHandle:
        with self._guard:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise SessionSetupError(f"no session {session_id!r}")

    def list(self) -> tuple[SessionHandle, ...]:
        with self._guard:
            return tuple(self._sessions.values())

    def flag_step(self, session_id: str, step_index: int, flag: str) -> SessionHandle:
        handle = self.get(session_id)
        with self._guard:
            handle.flags[int(step_index)] = flag
        return handle

    def start(self, session_id: str) -> SessionHandle:
        handle = self.get(session_id)
        with self._guard:
            if handle.state != CREATED:
                raise SessionSetupError(
                    f"session {session_id!r} already {handle.state}"
                )
            handle.state = RUNNING
        thread = threading.Thread(
            target=self._execute, args=(handle,), daemon=True,
            name=f"session-{session_id}",
        )
        handle.thread = thread
        thread.start()
        return handle

    def _execute(self, handle: SessionHandle) -> None:
        session_id = handle.session_id
        try:
            program, scenario = self._load_pair(
                handle.program_id, handle.scenario_id
            )
            sim = SimulatedPatient(
                program,
                scenario.profile,
                scenario.script,
                scenario.noise,
                hz=scenario.hz,
            )
            clock = PacedClock(rt_factor=handle.rt_factor)

            def forward(event: RuntimeEvent) -> None:
                self.broker.publish(
                    session_id,
                    RUNTIME_KIND_MAP[event.kind],
                    at=event.at,
                    step_index=event.step_index,
                    detail=event.detail,
                )

            log = run_session(
                program,
                sim,
                clock=clock,
                poll_hz=scenario.hz,
                active_side=scenario.profile.affected_side,
                on_event=forward,
            )
            payload = {
                "session_id": session_id,
                "program_id": handle.program_id,
                "scenario_id": handle.scenario_id,
                "rt_factor": handle.rt_factor,
                "log": log.to_json(),
                "ground_truth": {
                    str(k): v for k, v in sorted(dict(sim.ground_truth).items())
                },
            }
            self.store.put("session_log", payload, record_id=session_id)
            handle.state = DONE
        except Exception as exc:  # noqa: BLE001 - surfaced via handle state
            handle.state = FAILED
            handle.error = str(exc)
            self.broker.close(session_id)

    def wait(self, session_id: str, timeout: float | None = None) -> SessionHandle:
        handle = self.get(session_id)
        if handle.thread is not None:
            handle.thread.join(timeout=timeout)
        return handle
