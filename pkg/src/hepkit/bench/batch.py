"""Batch construction and execution for the monitoring benchmark.

The benchmark batch strings together enough worksheet sessions to reach
exactly 398 monitored steps: four full passes over the ten goals, one
pass over goals one through eight, and a final partial run of goal one
cut after its sixth monitored step.  Each monitored step gets a
scripted truth label in advance, so a session's detections can be
scored as a confusion table afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from hepkit.dsl import Program
from hepkit.evalstats.confusion import EvalReport, StepOutcome, build_report
from hepkit.fixtures.worksheets import default_prescriptions
from hepkit.genpipe.generate import compile_prescription
from hepkit.genpipe.hallucination import (
    HallucinationFinding,
    detect_hallucinated_monitors,
)
from hepkit.genpipe.mutate import mutate_program
from hepkit.genpipe.prescription import Prescription
from hepkit.patientsim.noise import NoiseModel, ZERO_NOISE
from hepkit.patientsim.profile import PatientProfile, standard_patient
from hepkit.patientsim.scenario import Scenario
from hepkit.patientsim.script import make_prelabel_mix
from hepkit.patientsim.simulate import SimulatedPatient
from hepkit.runtime.pacing import PacingVerdict, pacing_of
from hepkit.runtime.session import SessionLog, run_session

BATCH_TOTAL_MONITORED = 398
DEFAULT_INCOMPLETE_FRACTION = 0.363
BRACED_JOINTS = frozenset({"right_elbow_flexion"})


class BatchError(ValueError):
    """Raised when the batch cannot be assembled as designed."""


@dataclass(frozen=True)
class BatchEntry:
    """One session slot: the clean program plus what the session runs."""

    run_id: str
    rx: Prescription
    program: Program
    session_program: Program
    injected_step: int | None = None

    @property
    def monitored_indices(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.program.steps if s.monitor is not None)


def _monitored_count(program: Program) -> int:
    return sum(1 for s in program.steps if s.monitor is not None)


def _prefix_prescription(rx: Prescription, monitored_limit: int) -> Prescription:
    kept = []
    seen = 0
    for step in rx.steps:
        kept.append(step)
        if not step.entities.is_empty():
            seen += 1
            if seen == monitored_limit:
                break
    if seen < monitored_limit:
        raise BatchError(
            f"{rx.id} has only {seen} monitored steps, needed {monitored_limit}"
        )
    return replace(rx, id=f"{rx.id}-part{monitored_limit}", steps=tuple(kept))


def build_batch(
    hallucinate: bool = False,
    mutation_seeds: tuple[int, ...] = tuple(range(10)),
) -> tuple[BatchEntry, ...]:
    """Assemble the 398-monitored-step batch.

    With ``hallucinate`` set, the first pass's ten programs each get one
    hallucinated joint-band atom injected into a random monitored step;
    the braced elbow is excluded from the injection pool because its
    clamped resting angle already sits inside the default band, which
    would make the defect invisible at run time.
    """
    rxs = default_prescriptions()
    entries: list[BatchEntry] = []
    position = 0

    def add(rx: Prescription, tag: str, inject_seed: int | None) -> None:
        nonlocal position
        program = compile_prescription(rx)
        session_program = program
        injected = None
        if inject_seed is not None:
            session_program, label = mutate_program(
                program,
                "hallucinate-atom",
                seed=inject_seed,
                avoid_joints=BRACED_JOINTS,
            )
            injected = label.step_index
        entries.append(
            BatchEntry(
                run_id=f"{tag}-{rx.id}",
                rx=rx,
                program=program,
                session_program=session_program,
                injected_step=injected,
            )
        )
        position += 1

    for pass_no in range(4):
        for goal_pos, rx in enumerate(rxs):
            seed = None
            if hallucinate and pass_no == 0:
                seed = mutation_seeds[goal_pos % len(mutation_seeds)]
            add(rx, f"p{pass_no + 1}", seed)
    for rx in rxs[:8]:
        add(rx, "p5", None)
    add(_prefix_prescription(rxs[0], 6), "p6", None)

    total = sum(_monitored_count(e.program) for e in entries)
    if total != BATCH_TOTAL_MONITORED:
        raise BatchError(f"batch has {total} monitored steps, expected 398")
    return tuple(entries)


@dataclass(frozen=True)
class BatchRun:
    """Everything a batch execution produced, ready for scoring."""

    outcomes: tuple[StepOutcome, ...]
    pacing: tuple[PacingVerdict, ...]
    findings: tuple[HallucinationFinding, ...]
    logs: tuple[SessionLog, ...]
    scenarios: tuple[Scenario, ...]

    def report(self, confidence: float = 0.95) -> EvalReport:
        return build_report(list(self.outcomes), confidence)


def run_batch(
    entries: tuple[BatchEntry, ...],
    noise: NoiseModel = ZERO_NOISE,
    seed: int = 0,
    incomplete_fraction: float = 0.0,
    profile: PatientProfile | None = None,
) -> BatchRun:
    """Simulate every entry and pair scripted truth with detections.

    ``seed`` shifts both the behavior mix and the per-session noise
    streams, so repeated runs with the same seed are bit-identical and
    different seeds give independent replicates.
    """
    profile = profile or standard_patient()
    outcomes: list[StepOutcome] = []
    pacing: list[PacingVerdict] = []
    findings: list[HallucinationFinding] = []
    logs: list[SessionLog] = []
    scenarios: list[Scenario] = []
    for j, entry in enumerate(entries):
        monitored = entry.monitored_indices
        behaviors, prelabels = make_prelabel_mix(
            len(monitored), incomplete_fraction, seed=seed * 1009 + j
        )
        script = dict(zip(monitored, behaviors))
        session_noise = replace(noise, seed=seed * 9176 + j)
        scenario = Scenario(
            profile=profile, script=script, noise=session_noise, hz=10.0
        )
        sim = SimulatedPatient(
            entry.program, profile, script, session_noise, hz=10.0
        )
        log = run_session(
            entry.session_program,
            sim,
            poll_hz=10.0,
            active_side=profile.affected_side,
            seed=seed,
        )
        detected = {
            rec.index: rec.detected_complete for rec in log.steps if rec.monitored
        }
        for idx, truth in zip(monitored, prelabels):
            outcomes.append(
                StepOutcome(
                    rx_id=entry.run_id,
                    step_index=idx,
                    truth=truth,
                    detected=detected[idx],
                    hallucinated=idx == entry.injected_step,
                )
            )
        pacing.extend(pacing_of(log, dict(sim.ground_truth)))
        if entry.injected_step is not None:
            findings.extend(detect_hallucinated_monitors(entry.rx, entry.session_program))
        logs.append(log)
        scenarios.append(scenario)
    return BatchRun(
        outcomes=tuple(outcomes),
        pacing=tuple(pacing),
        findings=tuple(findings),
        logs=tuple(logs),
        scenarios=tuple(scenarios),
    )
