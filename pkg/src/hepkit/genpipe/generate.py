"""Rule-based compilation of prescriptions into monitored programs.

This is the deterministic reference generator.  It maps each annotated
prescription step onto the narrowest monitor its entities support, using
a fixed palette of default numerics, and lays out scene geometry on a
simple grid.  Language-model backends produce the same kind of output
through prompting; this one does it by construction, which makes it the
anchor for fidelity and hallucination checks in tests.
"""

from __future__ import annotations

import re

from hepkit.dsl import (
    All,
    Any,
    Count,
    Fallback,
    Grasp,
    HandAt,
    Hold,
    JointAngle,
    ObjectAt,
    Predicate,
    Program,
    Release,
    Rest,
    SceneDecl,
    Step,
)
from hepkit.genpipe.prescription import Prescription, PrescriptionStep

DEFAULT_RADIUS_CM = 5.0
DEFAULT_TIMEOUT_S = 20.0
DEFAULT_HOLD_S = 3.0
DEFAULT_REST_S = 2.0
DEFAULT_BAND_DEG = (20.0, 160.0)

RETRY_UTTERANCE = "Let's try that step again."

_PLACE_WORDS = re.compile(
    r"\b(place|put|set|lay|stack|lower|drop|return|release)\b", re.IGNORECASE
)
_REST_WORDS = re.compile(r"\b(rest|break)\b", re.IGNORECASE)


def _step_atoms(step: PrescriptionStep) -> list[Predicate]:
    """Choose monitor atoms for one step from its entity annotation."""
    ent = step.entities
    atoms: list[Predicate] = []
    if ent.objects and ent.targets:
        for obj in ent.objects:
            atoms.append(ObjectAt(obj, ent.targets[0], DEFAULT_RADIUS_CM))
    elif ent.objects:
        releasing = bool(_PLACE_WORDS.search(step.text))
        for obj in ent.objects:
            atoms.append(Release(obj) if releasing else Grasp(obj))
    elif ent.targets and ent.joints:
        atoms.append(HandAt(ent.targets[0], DEFAULT_RADIUS_CM))
        for joint in ent.joints:
            atoms.append(JointAngle(joint, *DEFAULT_BAND_DEG))
    elif ent.targets:
        for target in ent.targets:
            atoms.append(HandAt(target, DEFAULT_RADIUS_CM))
    elif ent.joints:
        resting = bool(_REST_WORDS.search(step.text))
        for joint in ent.joints:
            if resting:
                atoms.append(Rest(joint, DEFAULT_REST_S))
            else:
                atoms.append(JointAngle(joint, *DEFAULT_BAND_DEG))
    return atoms


def _scene_for(steps: tuple[Step, ...]) -> tuple[SceneDecl, ...]:
    """Declare every identifier the monitors reference, on a fixed grid."""
    targets: list[str] = []
    objects: list[str] = []
    joints: list[str] = []

    def note(name: str, into: list[str]) -> None:
        if name not in into:
            into.append(name)

    def walk(pred: Predicate) -> None:
        if isinstance(pred, (All, Any)):
            for item in pred.items:
                walk(item)
        elif isinstance(pred, (Hold, Count)):
            walk(pred.atom)
        elif isinstance(pred, (JointAngle, Rest)):
            note(pred.joint, joints)
        elif isinstance(pred, HandAt):
            note(pred.target, targets)
        elif isinstance(pred, (Grasp, Release)):
            note(pred.obj, objects)
        elif isinstance(pred, ObjectAt):
            note(pred.obj, objects)
            note(pred.target, targets)

    for step in steps:
        if step.monitor is not None:
            walk(step.monitor)
        if step.fallback is not None:
            walk(step.fallback.monitor)

    decls: list[SceneDecl] = []
    for i, name in enumerate(targets):
        decls.append(SceneDecl("target", name, (20.0 * i, 30.0, 0.0)))
    for i, name in enumerate(objects):
        decls.append(SceneDecl("object", name, (20.0 * i, 50.0, 0.0)))
    for name in joints:
        decls.append(SceneDecl("joint", name, None))
    return tuple(decls)


def compile_prescription(rx: Prescription) -> Program:
    """Translate a prescription into a monitored exercise program.

    Steps whose annotations name no scene entity become announce-only
    steps.  Steps marked conditional get a retry fallback that reuses
    the same monitor.
    """
    steps: list[Step] = []
    for i, rx_step in enumerate(rx.steps, start=1):
        atoms = _step_atoms(rx_step)
        if not atoms:
            steps.append(Step(index=i, utterance=rx_step.text))
            continue
        monitor: Predicate = atoms[0] if len(atoms) == 1 else All(tuple(atoms))
        fallback = None
        if rx_step.entities.conditional:
            retry: Predicate = atoms[0] if len(atoms) == 1 else All(tuple(atoms))
            fallback = Fallback(RETRY_UTTERANCE, retry, DEFAULT_TIMEOUT_S)
        steps.append(
            Step(
                index=i,
                utterance=rx_step.text,
                monitor=monitor,
                timeout=DEFAULT_TIMEOUT_S,
                fallback=fallback,
            )
        )
    prog_steps = tuple(steps)
    return Program(name=rx.id, scene=_scene_for(prog_steps), steps=prog_steps)
