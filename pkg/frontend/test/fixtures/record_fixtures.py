#!/usr/bin/env python3
"""Record service payloads for the console test suite.

Run from this directory with the Python package installed:

    python3 record_fixtures.py

Every fixture is a verbatim service response or SSE capture; the two
derived files (badge timeline, prelabel preset) are mechanical reshapings
of those captures, so the TypeScript side is always compared against what
the service actually sent. The script asserts the frozen invariants it
relies on (gapless sequences, event counts, rt-factor independence)
before writing anything.
"""
from __future__ import annotations

import json
import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from hepkit.dsl import parse_program
from hepkit.fixtures import default_prescriptions
from hepkit.genpipe import (
    ReplayBackend,
    TemplateBackend,
    assemble_prompt,
    default_prompt_config,
    generate_program,
    mutate_program,
    prescription_to_json,
)
from hepkit.patientsim import (
    CompleteAt,
    Scenario,
    ZERO_NOISE,
    behavior_to_json,
    make_prelabel_mix,
    standard_patient,
)
from hepkit.service import create_app

HERE = Path(__file__).resolve().parent
MUTATION_SEEDS = {
    "omit": 0,
    "duplicate": 0,
    "substitute": 0,
    "reorder": 0,
    "hallucinate-atom": 1,
}
EXPECTED_COUNTS = {
    "Announced": 11,
    "Advanced": 11,
    "DetectionTick": 36,
    "Completed": 8,
    "SessionDone": 1,
}


def write(name: str, doc) -> None:
    path = HERE / name
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.name}")


def scenario_doc(program_text: str) -> dict:
    """Zero-noise scenario completing every monitored step a few seconds in."""
    program = parse_program(program_text)
    monitored = [s.index for s in program.steps if s.monitor is not None]
    script = {i: CompleteAt(3.0 + 0.5 * k) for k, i in enumerate(monitored)}
    scenario = Scenario(
        profile=standard_patient(), script=script, noise=ZERO_NOISE, hz=10.0
    )
    return scenario.to_json()


def read_stream(client: TestClient, url: str) -> list[dict]:
    events = []
    current: dict = {}
    with client.stream("GET", url) as response:
        assert response.status_code == 200, response.read()
        for line in response.iter_lines():
            if line.startswith("id: "):
                current["seq"] = int(line[len("id: "):])
            elif line.startswith("event: "):
                current["kind"] = line[len("event: "):]
            elif line.startswith("data: "):
                current["data"] = json.loads(line[len("data: "):])
            elif line == "" and current:
                events.append(current["data"])
                if current["kind"] == "SessionDone":
                    break
                current = {}
    return events


def run_session(client: TestClient, program_id: str, scenario_id: str, rt: float) -> tuple[str, list[dict]]:
    response = client.post(
        "/sessions",
        json={"program_id": program_id, "scenario_id": scenario_id, "rt_factor": rt},
    )
    assert response.status_code == 201, response.text
    session_id = response.json()["session_id"]
    assert client.post(f"/sessions/{session_id}/start").status_code == 200
    deadline = time.monotonic() + 60
    while time.monotonic() < deadline:
        state = client.get(f"/sessions/{session_id}").json()["state"]
        assert state != "failed"
        if state == "done":
            break
        time.sleep(0.05)
    else:
        raise AssertionError("session never finished")
    events = read_stream(client, f"/sessions/{session_id}/events")
    seqs = [e["seq"] for e in events]
    assert seqs == list(range(1, len(seqs) + 1)), "stream had gaps"
    counts: dict[str, int] = {}
    for event in events:
        counts[event["kind"]] = counts.get(event["kind"], 0) + 1
    assert counts == EXPECTED_COUNTS, counts
    return session_id, events


def record_mutated_validates(client: TestClient, rx, rx_id: str, program_text: str) -> dict:
    """Store one mutated program per kind via replay and validate each."""
    program = parse_program(program_text)
    bundle = assemble_prompt(rx, default_prompt_config())
    out = {}
    for kind, seed in MUTATION_SEEDS.items():
        mutated, _label = mutate_program(program, kind, seed=seed)
        from hepkit.dsl import print_program

        with tempfile.TemporaryDirectory() as replay_dir:
            ReplayBackend(replay_dir).record(bundle, print_program(mutated))
            response = client.post(
                f"/prescriptions/{rx_id}/generate",
                json={"backend": "replay", "replay_dir": replay_dir},
            )
        assert response.status_code == 201, response.text
        program_id = response.json()["id"]
        validated = client.post(f"/programs/{program_id}/validate", json={})
        assert validated.status_code == 200, validated.text
        out[kind] = validated.json()
    return out


def badge_fixture(events: list[dict]) -> dict:
    """Reshape the event capture into the expected badge timeline."""
    transitions = []
    badges: dict[str, str] = {str(i): "Pending" for i in range(1, 12)}
    for event in events:
        if event["step_index"] is not None:
            transitions.append(
                {
                    "seq": event["seq"],
                    "at": event["at"],
                    "stepIndex": event["step_index"],
                    "badge": event["kind"],
                }
            )
            badges[str(event["step_index"])] = event["kind"]
    return {
        "badges": badges,
        "transitions": transitions,
        "clock": events[-1]["at"],
        "done": True,
        "lastSeq": events[-1]["seq"],
    }


def main() -> None:
    rx = default_prescriptions()[0]
    assert rx.id == "wks-g01-right-x2-d10"
    rx_doc = prescription_to_json(rx)
    write("prescription.goal1.json", rx_doc)

    canonical, _ = generate_program(rx, TemplateBackend())

    with tempfile.TemporaryDirectory() as data_dir:
        client = TestClient(create_app(data_dir))

        posted = client.post("/prescriptions", json=rx_doc)
        assert posted.status_code == 201, posted.text
        rx_id = posted.json()["id"]
        fetched = client.get(f"/prescriptions/{rx_id}").json()
        assert fetched["payload"] == rx_doc, "round-trip drifted"

        generated = client.post(
            f"/prescriptions/{rx_id}/generate", json={"backend": "template"}
        )
        assert generated.status_code == 201, generated.text
        program = generated.json()
        assert program["text"] == canonical
        assert program["fidelity"]["correct"] and program["fidelity"]["complete"]
        write("program.goal1.json", program)

        validates = {"clean": client.post(f"/programs/{program['id']}/validate", json={}).json()}
        validates.update(record_mutated_validates(client, rx, rx_id, program["text"]))
        write("validate.goal1.json", validates)

        scn_doc = scenario_doc(program["text"])
        write("scenario.goal1.json", scn_doc)
        scn_id = client.post("/scenarios", json=scn_doc).json()["id"]

        session_id, events = run_session(client, program["id"], scn_id, rt=50.0)
        write("events.goal1.json", events)
        write("badges.goal1.json", badge_fixture(events))

        # The virtual timeline must not depend on the real-time factor;
        # the live round-trip runs at 10x and reuses these counts.
        _, events_rt10 = run_session(client, program["id"], scn_id, rt=10.0)
        assert [
            (e["kind"], e["step_index"], e["at"]) for e in events_rt10
        ] == [(e["kind"], e["step_index"], e["at"]) for e in events]

        flagged = client.post(
            f"/sessions/{session_id}/flags",
            json={"step_index": 3, "flag": "reviewed"},
        )
        assert flagged.status_code == 200, flagged.text
        report = client.get(f"/sessions/{session_id}/report")
        assert report.status_code == 200, report.text
        write("report.goal1.json", report.json())

        monitored = sorted(e["step"] for e in scn_doc["script"])
        labels = {str(i): "complete" for i in monitored}
        evaluated = client.post(
            "/eval",
            json={"session_ids": [session_id], "prelabels": [labels], "confidence": 0.95},
        )
        assert evaluated.status_code == 201, evaluated.text
        assert evaluated.json()["accuracy"] == 1.0
        write("eval.goal1.json", evaluated.json())

        errors = {}
        bad_text = {**rx_doc, "id": "bad-empty", "steps": [{"text": "  ", "entities": {}}]}
        response = client.post("/prescriptions", json=bad_text)
        assert response.status_code == 422
        errors["empty_step_text"] = response.json()
        bad_joint = {
            **rx_doc,
            "id": "bad-joint",
            "steps": [
                {"text": "Bend the elbow.", "entities": {"joints": ["left_hip_flexion"]}}
            ],
        }
        response = client.post("/prescriptions", json=bad_joint)
        assert response.status_code == 422
        errors["unknown_joint"] = response.json()
        write("authoring.errors.json", errors)

    # Prelabel preset: the mix is drawn server-side; the console only maps
    # scripted behaviors onto labels, so record both sides of that contract.
    seed = 7
    behaviors, labels = make_prelabel_mix(len(monitored), 0.363, seed=seed)
    mix_script = [
        {"step": step, **behavior_to_json(behavior)}
        for step, behavior in zip(monitored, behaviors)
    ]
    mix_scenario = {**scn_doc, "script": mix_script}
    write(
        "prelabel.mix.json",
        {
            "seed": seed,
            "incomplete_fraction": 0.363,
            "monitored": monitored,
            "scenario": mix_scenario,
            "expected": {str(step): label for step, label in zip(monitored, labels)},
        },
    )


if __name__ == "__main__":
    main()
