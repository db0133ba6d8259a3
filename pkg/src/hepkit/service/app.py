"""HTTP surface over the full pipeline, with a live session event stream.

Every domain verdict is computed server-side; clients post documents, get
ids back, and read results or subscribe to a session's event channel. All
error responses share one shape: ``{"code", "message", "detail"}``.
"""

from __future__ import annotations

import json
import os
from typing import Any, Iterator, Mapping

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from hepkit.dsl import parse_program, print_program, validate_semantics
from hepkit.genpipe import (
    ReplayBackend,
    RemoteBackend,
    TemplateBackend,
    backend_from_env,
    detect_hallucinated_monitors,
    generate_program,
    prescription_from_json,
    validate_fidelity,
)
from hepkit.genpipe.prescription import PrescriptionError
from hepkit.patientsim import Scenario, ScenarioError
from hepkit.retrofit import retrofit_check, template_for_goal
from hepkit.runtime import SessionLog, pacing_of
from hepkit.runtime.pacing import ADEQUATE
from hepkit.evalstats import StepOutcome, build_report
from hepkit.fixtures import GOAL_IDS

from .broker import BrokerError, EventBroker
from .runner import DEFAULT_RT_FACTOR, DONE, SessionRunner, SessionSetupError
from .store import (
    FileStore,
    MissingRecordError,
    QuarantinedRecordError,
    StoreError,
)

DEFAULT_PORT = 8077


class ApiError(Exception):
    """An error the HTTP layer renders as {code, message, detail}."""

    def __init__(
        self,
        status: int,
        code: str,
        message: str,
        detail: Mapping[str, Any] | None = None,
    ):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = dict(detail or {})


def _not_found(exc: Exception) -> ApiError:
    return ApiError(404, "not_found", str(exc))


def _invalid(message: str, detail: Mapping[str, Any] | None = None) -> ApiError:
    return ApiError(422, "invalid", message, detail)


class SessionBody(BaseModel):
    program_id: str
    scenario_id: str
    rt_factor: float = DEFAULT_RT_FACTOR


class GenerateBody(BaseModel):
    backend: str | None = None
    replay_dir: str | None = None
    url: str | None = None
    model: str | None = None
    key: str | None = None


class ValidateBody(BaseModel):
    prescription_id: str | None = None


class EvalBody(BaseModel):
    session_ids: list[str]
    prelabels: list[dict[str, str]] | None = None
    confidence: float = 0.95


class RetrofitBody(BaseModel):
    prescription_id: str
    template_id: int


class FlagBody(BaseModel):
    step_index: int
    flag: str = Field(min_length=1)


def _fidelity_json(report) -> dict[str, Any]:
    return {
        "correct": report.correct,
        "complete": report.complete,
        "verdicts": [
            {
                "kind": v.kind,
                "rx_index": v.rx_index,
                "program_index": v.program_index,
                "rx_text": v.rx_text,
                "program_text": v.program_text,
                "similarity": v.similarity,
            }
            for v in report.verdicts
        ],
    }


def _findings_json(findings) -> list[dict[str, Any]]:
    return [
        {
            "step_index": f.step_index,
            "atom": f.atom,
            "symbol": f.symbol,
            "reason": f.reason,
            "quantity": f.quantity,
        }
        for f in findings
    ]


def _resolve_backend(body: GenerateBody):
    name = body.backend
    if name is None:
        return backend_from_env()
    if name == "template":
        return TemplateBackend()
    if name == "replay":
        if not body.replay_dir:
            raise _invalid("replay backend needs a replay_dir")
        return ReplayBackend(body.replay_dir)
    if name == "remote":
        url = body.url or os.environ.get("GENERATOR_URL", "")
        if not url:
            raise _invalid("remote backend needs a url (body or GENERATOR_URL)")
        return RemoteBackend(
            base_url=url,
            model=body.model or os.environ.get("GENERATOR_MODEL", "default"),
            api_key=body.key or os.environ.get("GENERATOR_KEY", ""),
        )
    raise _invalid(f"unknown backend {name!r}")


def create_app(data_dir: str | os.PathLike[str] | None = None) -> FastAPI:
    """Build the service with its store rooted at ``data_dir``."""
    root = data_dir or os.environ.get("DATA_DIR", "data")
    store = FileStore(root)
    broker = EventBroker()
    runner = SessionRunner(store, broker)

    app = FastAPI(title="hepkit service")
    app.state.store = store
    app.state.broker = broker
    app.state.runner = runner

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status,
            content={
                "code": exc.code,
                "message": exc.message,
                "detail": exc.detail,
            },
        )

    def _get_record(kind: str, record_id: str):
        try:
            return store.get(kind, record_id)
        except MissingRecordError as exc:
            raise _not_found(exc)
        except QuarantinedRecordError as exc:
            raise ApiError(410, "record_quarantined", str(exc))

    def _load_prescription(record_id: str):
        record = _get_record("prescription", record_id)
        try:
            return prescription_from_json(dict(record.payload))
        except PrescriptionError as exc:
            raise _invalid(f"stored prescription is malformed: {exc}")

    # ---- prescriptions ----------------------------------------------------

    @app.post("/prescriptions", status_code=201)
    async def post_prescription(body: dict[str, Any]) -> dict[str, Any]:
        try:
            prescription_from_json(body)
        except PrescriptionError as exc:
            raise _invalid(str(exc))
        record = store.put("prescription", body)
        return {"id": record.id, "digest": record.digest}

    @app.get("/prescriptions")
    async def list_prescriptions() -> dict[str, Any]:
        return {"ids": list(store.ids("prescription"))}

    @app.get("/prescriptions/{record_id}")
    async def get_prescription(record_id: str) -> dict[str, Any]:
        record = _get_record("prescription", record_id)
        return {
            "id": record.id,
            "digest": record.digest,
            "created_at": record.created_at,
            "payload": record.payload,
        }

    @app.post("/prescriptions/{record_id}/generate", status_code=201)
    async def generate(record_id: str, body: GenerateBody) -> dict[str, Any]:
        rx = _load_prescription(record_id)
        backend = _resolve_backend(body)
        try:
            text, provenance = generate_program(rx, backend)
        except ValueError as exc:
            raise ApiError(502, "backend_failed", str(exc))
        try:
            program = parse_program(text)
        except ValueError as exc:
            raise ApiError(
                422,
                "generation_invalid",
                "generated text does not parse",
                {"error": str(exc), "text": text},
            )
        diagnostics = validate_semantics(program)
        if diagnostics:
            raise ApiError(
                422,
                "generation_invalid",
                "generated program fails semantic validation",
                {
                    "diagnostics": [
                        {"code": d.code, "message": d.message, "line": d.line}
                        for d in diagnostics
                    ],
                    "text": text,
                },
            )
        canonical = print_program(program)
        fidelity = validate_fidelity(rx, program)
        findings = detect_hallucinated_monitors(rx, program)
        payload = {
            "prescription_id": record_id,
            "text": canonical,
            "provenance": {
                "backend": provenance.backend,
                "timestamp": provenance.timestamp,
                "prompt_digest": provenance.prompt_digest,
            },
            "fidelity": _fidelity_json(fidelity),
            "hallucinations": _findings_json(findings),
        }
        record = store.put("program", payload)
        return {"id": record.id, **payload}

    # ---- programs ---------------------------------------------------------

    @app.get("/programs")
    async def list_programs() -> dict[str, Any]:
        return {"ids": list(store.ids("program"))}

    @app.get("/programs/{record_id}")
    async def get_program(record_id: str) -> dict[str, Any]:
        record = _get_record("program", record_id)
        return {"id": record.id, "digest": record.digest, "payload": record.payload}

    @app.post("/programs/{record_id}/validate")
    async def validate(record_id: str, body: ValidateBody | None = None) -> dict[str, Any]:
        record = _get_record("program", record_id)
        text = record.payload.get("text")
        if not isinstance(text, str):
            raise _invalid("program record carries no text")
        try:
            program = parse_program(text)
        except ValueError as exc:
            return {
                "valid": False,
                "faithful": False,
                "diagnostics": [{"code": "parse_error", "message": str(exc)}],
                "fidelity": None,
                "hallucinations": [],
            }
        diagnostics = validate_semantics(program)
        rx_id = None
        if body is not None and body.prescription_id:
            rx_id = body.prescription_id
        elif isinstance(record.payload.get("prescription_id"), str):
            rx_id = record.payload["prescription_id"]
        fidelity_doc = None
        findings_doc: list[dict[str, Any]] = []
        faithful = False
        if rx_id is not None:
            rx = _load_prescription(rx_id)
            fidelity = validate_fidelity(rx, program)
            findings = detect_hallucinated_monitors(rx, program)
            fidelity_doc = _fidelity_json(fidelity)
            findings_doc = _findings_json(findings)
            faithful = (
                not diagnostics
                and fidelity.correct
                and fidelity.complete
                and not findings
            )
        return {
            "valid": not diagnostics,
            "faithful": faithful,
            "diagnostics": [
                {"code": d.code, "message": d.message, "line": d.line}
                for d in diagnostics
            ],
            "fidelity": fidelity_doc,
            "hallucinations": findings_doc,
        }

    # ---- scenarios ----------------------------------------------------------

    @app.post("/scenarios", status_code=201)
    async def post_scenario(body: dict[str, Any]) -> dict[str, Any]:
        try:
            Scenario.from_json(body)
        except ScenarioError as exc:
            raise _invalid(str(exc))
        record = store.put("scenario", body)
        return {"id": record.id, "digest": record.digest}

    @app.get("/scenarios")
    async def list_scenarios() -> dict[str, Any]:
        return {"ids": list(store.ids("scenario"))}

    @app.get("/scenarios/{record_id}")
    async def get_scenario(record_id: str) -> dict[str, Any]:
        record = _get_record("scenario", record_id)
        return {"id": record.id, "digest": record.digest, "payload": record.payload}

    # ---- sessions -----------------------------------------------------------

    @app.post("/sessions", status_code=201)
    async def post_session(body: SessionBody) -> dict[str, Any]:
        try:
            handle = runner.create(
                body.program_id, body.scenario_id, rt_factor=body.rt_factor
            )
        except MissingRecordError as exc:
            raise _not_found(exc)
        except (SessionSetupError, StoreError) as exc:
            raise _invalid(str(exc))
        return handle.to_json()

    @app.get("/sessions")
    async def list_sessions() -> dict[str, Any]:
        return {"sessions": [h.to_json() for h in runner.list()]}

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str) -> dict[str, Any]:
        try:
            return runner.get(session_id).to_json()
        except SessionSetupError as exc:
            raise _not_found(exc)

    @app.post("/sessions/{session_id}/start")
    async def start_session(session_id: str) -> dict[str, Any]:
        try:
            handle = runner.start(session_id)
        except SessionSetupError as exc:
            if "no session" in str(exc):
                raise _not_found(exc)
            raise ApiError(409, "session_state", str(exc))
        return handle.to_json()

    @app.post("/sessions/{session_id}/flags")
    async def flag_step(session_id: str, body: FlagBody) -> dict[str, Any]:
        try:
            handle = runner.flag_step(session_id, body.step_index, body.flag)
        except SessionSetupError as exc:
            raise _not_found(exc)
        return handle.to_json()

    @app.get("/sessions/{session_id}/events")
    async def session_events(session_id: str, request: Request, after: int = 0):
        try:
            runner.get(session_id)
        except SessionSetupError as exc:
            raise _not_found(exc)
        last_event_id = request.headers.get("last-event-id")
        if last_event_id is not None:
            try:
                after = max(after, int(last_event_id))
            except ValueError:
                pass

        def stream() -> Iterator[str]:
            try:
                for event in broker.subscribe(
                    session_id, after_seq=after, timeout=300.0
                ):
                    doc = json.dumps(event.to_json(), sort_keys=True)
                    yield f"id: {event.seq}\nevent: {event.kind}\ndata: {doc}\n\n"
            except BrokerError:
                return

        return StreamingResponse(
            stream(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    @app.get("/sessions/{session_id}/report")
    async def session_report(session_id: str) -> dict[str, Any]:
        try:
            handle = runner.get(session_id)
        except SessionSetupError as exc:
            raise _not_found(exc)
        if handle.state != DONE:
            raise ApiError(
                409,
                "session_state",
                f"session is {handle.state}, report needs {DONE}",
                {"state": handle.state, "error": handle.error},
            )
        record = _get_record("session_log", session_id)
        log = SessionLog.from_json(record.payload["log"])
        truth = {
            int(k): v
            for k, v in dict(record.payload.get("ground_truth", {})).items()
        }
        verdicts = pacing_of(log, truth)
        judged = [v for v in verdicts if v.verdict]
        adequacy = (
            sum(1 for v in judged if v.verdict == ADEQUATE) / len(judged)
            if judged
            else 1.0
        )
        return {
            "session_id": session_id,
            "program_id": record.payload.get("program_id"),
            "scenario_id": record.payload.get("scenario_id"),
            "log": record.payload["log"],
            "ground_truth": record.payload.get("ground_truth", {}),
            "pacing": [
                {
                    "step_index": v.step_index,
                    "verdict": v.verdict,
                    "advanced_at": v.advanced_at,
                    "true_completion_at": v.true_completion_at,
                }
                for v in verdicts
            ],
            "adequacy": adequacy,
            "flags": {str(k): v for k, v in sorted(handle.flags.items())},
        }

    # ---- evaluation and retrofit --------------------------------------------

    @app.post("/eval", status_code=201)
    async def post_eval(body: EvalBody) -> dict[str, Any]:
        if body.prelabels is not None and len(body.prelabels) != len(
            body.session_ids
        ):
            raise _invalid("prelabels must align one-to-one with session_ids")
        outcomes: list[StepOutcome] = []
        for position, session_id in enumerate(body.session_ids):
            record = _get_record("session_log", session_id)
            log = SessionLog.from_json(record.payload["log"])
            if body.prelabels is not None:
                labels = {
                    int(k): v for k, v in body.prelabels[position].items()
                }
            else:
                scenario_record = _get_record(
                    "scenario", str(record.payload["scenario_id"])
                )
                labels = Scenario.from_json(
                    dict(scenario_record.payload)
                ).prelabels()
            for rec in log.steps:
                if not rec.monitored:
                    continue
                if rec.index not in labels:
                    raise _invalid(
                        f"session {session_id}: no prelabel for monitored "
                        f"step {rec.index}"
                    )
                outcomes.append(
                    StepOutcome(
                        rx_id=session_id,
                        step_index=rec.index,
                        truth=labels[rec.index],
                        detected=rec.detected_complete,
                    )
                )
        try:
            report = build_report(outcomes, confidence=body.confidence)
        except ValueError as exc:
            raise _invalid(str(exc))
        payload = {"session_ids": list(body.session_ids), **report.to_json()}
        record = store.put("eval_report", payload)
        return {"id": record.id, **payload}

    @app.post("/retrofit", status_code=201)
    async def post_retrofit(body: RetrofitBody) -> dict[str, Any]:
        rx = _load_prescription(body.prescription_id)
        if body.template_id not in GOAL_IDS:
            raise _invalid(
                f"template_id must be one of {list(GOAL_IDS)}, "
                f"got {body.template_id}"
            )
        verdict = retrofit_check(rx, template_for_goal(body.template_id))
        payload = {
            "prescription_id": body.prescription_id,
            "template_id": body.template_id,
            **verdict.to_json(),
        }
        record = store.put("verdict", payload)
        return {"id": record.id, **payload}

    # ---- health -------------------------------------------------------------

    @app.get("/health")
    async def health() -> dict[str, Any]:
        states: dict[str, int] = {}
        for handle in runner.list():
            states[handle.state] = states.get(handle.state, 0) + 1
        return {"status": "ok", **store.health(), "sessions": states}

    return app


def serve(
    data_dir: str | None = None,
    host: str = "127.0.0.1",
    port: int | None = None,
) -> None:
    """Run the service under uvicorn until interrupted."""
    import uvicorn

    resolved_port = port or int(os.environ.get("PORT", DEFAULT_PORT))
    uvicorn.run(create_app(data_dir), host=host, port=resolved_port)
